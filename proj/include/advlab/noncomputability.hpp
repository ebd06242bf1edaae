#ifndef ADVLAB_NONCOMPUTABILITY_HPP_
#define ADVLAB_NONCOMPUTABILITY_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "advlab/constructions.hpp"
#include "advlab/cost.hpp"
#include "advlab/problem.hpp"

namespace advlab {

// A solver sees the training set T_delta = {x^{1,delta}, ..., x^{r,delta}}
// only through dyadic approximations. The adversary answers every query
// from the delta = 0 line and, once the solver halts, picks delta = 4^-n
// small enough that both instances explain every answer. Their solution
// sets are 1/2 - eps_hat apart, so the solver's output is far from one.

/// Coordinate j of point k, to within 2^-n. All indices are 1-based.
struct DyadicQuery {
  int j = 1;
  int k = 1;
  int n = 1;
};

struct TranscriptEntry {
  DyadicQuery query;
  Rational answer;  // an integer multiple of 2^-n
};

struct OracleTranscript {
  std::vector<TranscriptEntry> entries;
  int max_precision = 0;
  bool halted = false;
  std::optional<std::vector<Rational>> output;  // present iff halted
};

/// A query outside 1 <= j <= d, 1 <= k <= r, n >= 1.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised inside a session once the query budget is spent.
class QueryBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdversaryParams {
  Rational a{1, 2};
  Rational kappa{1, 2};
  int r = 6;
  std::vector<int> dims{2, 1, 1};
  CostKind cost = CostKind::mean_absolute;
  Rational eps{1, 24};
  Norm norm = Norm::linf;
  std::int64_t query_budget = 1'000'000;
};

/// Throws PreconditionError on an unusable parameter set.
void validate(const AdversaryParams& params);

/// eps_hat for the configured cost: exact r eps for mean_absolute and
/// root_mean_square, otherwise cf_eps_bound rounded up to a rational.
Rational eps_hat(const AdversaryParams& params);

/// The delta = 0 instance plus everything served so far.
class AdversaryState {
 public:
  explicit AdversaryState(const AdversaryParams& params);

  int points() const { return params_.r; }
  int dim() const { return params_.dims.front(); }
  const AdversaryParams& params() const { return params_; }
  const OracleTranscript& transcript() const { return transcript_; }
  OracleTranscript& transcript() { return transcript_; }

  /// True coordinate j of x^{k,delta}.
  Rational coordinate(int j, int k, const Rational& delta) const;

 private:
  AdversaryParams params_;
  ProblemInstance inst_;
  OracleTranscript transcript_;
};

/// Dyadic rounding (half up) of coordinate j of x^{k,0} to the grid 2^-n Z.
/// Records the query and its answer. Throws ProtocolError for an
/// out-of-range query and QueryBudgetExceeded past the budget.
Rational adversary_serve(const DyadicQuery& query, AdversaryState& state);

/// Certified l_inf gap 1/2 - eps_hat between the solution sets of the delta = 0
/// instance and of every delta = 4^-n instance. Needs r >= 3 (N_1 + 1)...(N_{L-1} + 1)
/// and eps_hat in (0, 1/2).
Rational solution_set_gap(int r, const std::vector<int>& dims, const Rational& eps_hat);

/// Smallest n with 4^-n < eps'(r), so that delta = 4^-n is a member of the family.
int family_precision_floor(int r);

/// A solver talks to the adversary and returns r outputs.
class Solver {
 public:
  virtual ~Solver() = default;
  virtual std::string name() const = 0;
  virtual std::vector<Rational> solve(AdversaryState& oracle) = 0;
};

/// "labels", "train", "hedge", "random"; "never-halt" loops until the budget runs out.
std::unique_ptr<Solver> make_solver(const std::string& name, std::uint64_t seed);
const std::vector<std::string>& baseline_solver_names();

struct AdversaryVerdict {
  std::string solver;
  bool halted = false;
  bool disqualified = false;
  std::string reason;
  int max_precision = 0;
  int chosen_n = 0;
  Rational chosen_delta{0};     // delta of the instance the solver fails on
  Norm norm = Norm::linf;
  Rational eps_hat{0};
  Rational output_error{0};     // |output - labels|_inf
  Rational d0_lower_bound{0};   // distance to the delta = 0 solution set
  Rational d1_lower_bound{0};   // distance to the delta = 4^-n solution set
  bool infinite_distance = false;  // NH or disqualified
  Rational distance_lower_bound{0};
  Rational threshold{0};        // 1/4 - 3 eps_hat / 4
  Rational sharp_threshold{0};  // 1/4 - eps_hat / 2
  bool consistent = false;      // every answer within 2^-n of both instances
  bool meets_threshold = false;
};

struct AdversaryRun {
  AdversaryVerdict verdict;
  OracleTranscript transcript;
};

/// Runs one session and judges the output. Never throws for solver misbehaviour.
AdversaryRun run_adversary(Solver& solver, const AdversaryParams& params);

/// "Q j k n → p/q" per query, then a verdict block.
std::string transcript_text(const AdversaryRun& run);
nlohmann::json verdict_to_json(const AdversaryVerdict& verdict);

/// True iff the first-coordinate sets {a/(k+1-kappa) : k <= r} are pairwise
/// disjoint across the given kappas.
bool families_disjoint(const Rational& a, const std::vector<Rational>& kappas, int r);

}  // namespace advlab

#endif  // ADVLAB_NONCOMPUTABILITY_HPP_
