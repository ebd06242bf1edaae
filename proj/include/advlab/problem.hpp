#ifndef ADVLAB_PROBLEM_HPP_
#define ADVLAB_PROBLEM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "advlab/errors.hpp"
#include "advlab/rational.hpp"

namespace advlab {

/// Parameters of the classification problem f_a and the point family x^{k,delta}.
struct ProblemInstance {
  Rational a{1, 2};      // in [1/2, 1]
  Rational kappa{1, 2};  // in [1/4, 3/4]
  Rational delta{1, 100};  // >= 0
  int dim = 2;           // >= 2
};

/// Throws DomainError when a parameter is out of range.
void validate(const ProblemInstance& inst);

/// f_a(x) = 1 iff ceil(a / x_1) is odd. Refuses x_1 outside (0, 1].
int classify(const ProblemInstance& inst, const VectorQ& x);
int classify_first(const Rational& a, const Rational& x1);

/// a / (k + 1 - kappa), the first coordinate of x^{k,delta}.
Rational grid_coordinate(const ProblemInstance& inst, std::int64_t k);

/// x^{k,delta} = (a/(k+1-kappa), 0, ..., 0) for odd k and
///               (a/(k+1-kappa), delta, 0, ..., 0) for even k.
VectorQ grid_point(const ProblemInstance& inst, std::int64_t k);

/// Same point with delta replaced (the delta = 0 line point is grid_point_at(inst, k, 0)).
VectorQ grid_point_at(const ProblemInstance& inst, std::int64_t k, const Rational& delta);

/// eps'(n) = 1 / ((4n + 3)(4n + 4)).
Rational separation_radius(std::int64_t n);

/// eps(n) = (C n)^-4.
double theorem_radius(double C, double n);

struct TheoremConstants {
  double zeta_normalizer;  // C_zeta(3/2)
  double c1;               // (1 - exp(-C_zeta)) / 2
  double c2;               // C_zeta / (gamma - 1)
  double bound_unique;     // 4^3 c1^-6
  double bound_alternation;  // 200 log(8)^{3/2} c1^{-3/2}
  double bound_max;        // 4 (8 c2)^2
  double C;                // max of the three
};

/// Constants for gamma = 3/2.
TheoremConstants theorem_constant();

/// c1 and c2 for an arbitrary gamma in (1, 2).
double unique_count_constant(double gamma);
double max_bound_constant(double gamma);

struct SeparationWitness {
  enum class Kind { too_close, unstable_point } kind;
  std::size_t first;
  std::size_t second;  // equals first for unstable_point
};

struct SeparationCheck {
  bool ok = true;
  std::optional<SeparationWitness> witness;
  explicit operator bool() const { return ok; }
};

/// Membership in the well-separated and stable family with radius delta_sep:
/// distinct points are >= 2 delta_sep apart in l_inf, and ceil(a / .) is
/// constant on (x_1 - delta_sep, x_1 + delta_sep) for every point. Equal
/// points are skipped (multiset semantics). Exact.
SeparationCheck is_well_separated(const ProblemInstance& inst, const std::vector<VectorQ>& points,
                                  const Rational& delta_sep);

/// Points with their f_a labels and where they came from.
struct LabeledMultiset {
  struct Provenance {
    enum class Kind { sampled, enumerated } kind = Kind::enumerated;
    std::uint64_t seed = 0;
    std::int64_t theta = 0;
    double gamma = 0.0;
    std::int64_t k_first = 0;
    std::int64_t k_last = 0;
  };

  std::vector<VectorQ> points;
  std::vector<int> labels;
  std::vector<std::int64_t> indices;  // k of x^{k,delta}; 0 when unknown
  Provenance provenance;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// {x^{k,delta} : first <= k <= last}.
LabeledMultiset enumerate_dataset(const ProblemInstance& inst, std::int64_t first, std::int64_t last);

/// theta i.i.d. draws from D_kappa: index k with probability p_k, mapped to
/// x^{k,delta}. Reproducible for a fixed seed.
LabeledMultiset sample_dataset(const ProblemInstance& inst, double gamma, std::int64_t theta,
                               std::uint64_t seed);

/// Replayable dataset document: instance parameters, seed, theta and every
/// point/label with rationals as "p/q" strings.
nlohmann::json dataset_to_json(const ProblemInstance& inst, const LabeledMultiset& data);
LabeledMultiset dataset_from_json(const nlohmann::json& doc, ProblemInstance* inst = nullptr);

nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& doc);

}  // namespace advlab

#endif  // ADVLAB_PROBLEM_HPP_
