#ifndef ADVLAB_MONTECARLO_HPP_
#define ADVLAB_MONTECARLO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "advlab/zeta.hpp"

namespace advlab {

enum class Verdict { pass, fail, vacuous, insufficient_data, infeasible, observed };

std::string to_string(Verdict verdict);

/// One estimated probability against a one-sided bound.
///
/// slack is three worst-case binomial standard errors, 3 * 0.5 / sqrt(trials).
/// A lower bound passes iff empirical >= bound - slack, an upper bound iff
/// empirical <= bound + slack.
struct TrialReport {
  std::string operation;
  std::string params;  // "key=value;..." in a fixed order
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double empirical = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool lower_bound = true;
  Verdict verdict = Verdict::observed;
  bool low_power = false;          // fewer than kMinTrialsForPower trials
  std::optional<double> exact;     // closed-form probability when one exists
  std::optional<bool> exact_agrees;  // |empirical - exact| <= 3 sigma(exact)
  std::string note;
  std::vector<TrialReport> parts;  // buckets or conjuncts
};

inline constexpr std::int64_t kMinTrialsForPower = 30;
inline constexpr std::int64_t kMinBucketTrials = 100;

double binomial_slack(std::int64_t trials);

/// Draws theta indices from P and reduces them to the sorted distinct values.
std::vector<std::int64_t> distinct_draws(ZetaDistribution& dist, Rng& rng, std::int64_t theta);

/// sum_j [Z_{j+1} - Z_j odd] over sorted distinct values Z.
std::int64_t alternation_count(const std::vector<std::int64_t>& sorted_distinct);

/// P(N >= c1 theta^{1/gamma}) >= 1 - c1^-2 theta^{-(2/gamma - 1)}.
TrialReport verify_unique_count(double gamma, std::int64_t theta, std::int64_t trials, std::uint64_t seed,
                                int threads = 1);

/// P(max S <= n) >= 1 - c2 theta floor(n/2)^{1 - gamma}; exact = P(X <= n)^theta.
TrialReport verify_max_bound(double gamma, std::int64_t theta, std::int64_t n, std::int64_t trials,
                             std::uint64_t seed, int threads = 1);

/// P(alternations <= n/5 | N = n) <= exp(-n/100) for 10 <= n <= theta, checked
/// per bucket N = n >= max(10, n_min) holding at least 100 trials.
TrialReport verify_alternation_bound(double gamma, std::int64_t theta, std::int64_t n_min, std::int64_t trials,
                                     std::uint64_t seed, int threads = 1);

struct TheoremEventParams {
  std::int64_t r = 200;
  std::int64_t s = 200;
  double p = 0.5;
  std::int64_t q = 1;
  std::int64_t hidden_product = 2;  // (N_1 + 1)...(N_{L-1} + 1)
  std::optional<double> C;          // surrogate constant; nullopt means the theorem's constant
  double gamma = 1.5;
};

/// Largest r + s the event check will simulate per trial.
inline constexpr std::int64_t kDeskScaleDraws = 10'000'000;

/// Frequency of {max index <= ceil(C (r v s)^2 / p^2)} and
/// {alternations > 6 q prod(N_l + 1)} over draws of T and V. With the
/// theorem's constant the probability 1 - p is asserted, but only when the
/// sample size condition holds and fits at desk scale; otherwise the report
/// says "infeasible". A surrogate C yields an "observed" report.
TrialReport verify_theorem_event(const TheoremEventParams& params, std::int64_t trials, std::uint64_t seed,
                                 int threads = 1);

/// operation,params,trials,successes,empirical,bound,slack,verdict rows,
/// followed by one row per part.
std::string reports_csv(const std::vector<TrialReport>& reports);
nlohmann::json report_to_json(const TrialReport& report);

}  // namespace advlab

#endif  // ADVLAB_MONTECARLO_HPP_
