#ifndef ADVLAB_CONSTRUCTIONS_HPP_
#define ADVLAB_CONSTRUCTIONS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advlab/monotone.hpp"
#include "advlab/network.hpp"
#include "advlab/problem.hpp"

namespace advlab {

enum class Norm { l1, l2, linf };

std::string to_string(Norm norm);
Norm parse_norm(std::string_view text);

double vector_norm(const VectorQ& v, Norm norm);

/// ||v|| <= bound (or < bound when strict), decided exactly. l2 compares squares.
bool norm_within(const VectorQ& v, Norm norm, const Rational& bound, bool strict = false);

/// The matcher phi~: A^1 has entry (1, 2) = 1/delta, deeper layers carry
/// coordinate 1 with weight 1, every other entry and all biases are 0.
/// phi~(x^{k,delta}) = f_a(x^{k,delta}) for every k. Needs L >= 2, d >= 2, delta > 0.
ReluNetwork<Rational> build_unstable_matcher(const std::vector<int>& dims, const Rational& delta);

/// 1 > alpha_1 > alpha_2 > ... > alpha_K > 0 with K even.
struct AlphaSequence {
  std::vector<Rational> values;
  std::size_t size() const { return values.size(); }
};

/// Throws InvariantViolation unless the sequence is strictly decreasing in (0, 1) with even length.
void validate_alphas(const AlphaSequence& alphas);

/// psi = sum_l psi_l with one hidden layer of 4 units per block,
///   psi_l(x) = (rho(a_{4l-2} - x_1) - rho(a_{4l-1} - x_1)) / (a_{4l-2} - a_{4l-1})
///            - (rho(a_{4l} - x_1) - rho(a_{4l+1} - x_1)) / (a_{4l} - a_{4l+1}),
/// after padding with alpha_K/2, alpha_K/4 when 4 does not divide K and
/// setting alpha_{K+1} = 0. psi = 0 on [alpha_k, alpha_{k-1}] for k = 2 mod 4
/// and psi = 1 there for k = 0 mod 4.
ReluNetwork<Rational> build_stable_classifier(const AlphaSequence& alphas, int d);

/// alpha_{2k-1} = x_1^{k,delta} + eps_rad and alpha_{2k} = x_1^{k,delta} - eps_rad
/// for k = 1..K. Refuses (PreconditionError naming k) unless
/// 2 eps_rad < 1 / (2 (K + 1 - kappa)(K - kappa)) and the result lies in (0, 1).
AlphaSequence stable_alphas(const ProblemInstance& inst, std::int64_t K, const Rational& eps_rad);

enum class PerturbationFamily { even_case, odd_case };

std::string to_string(PerturbationFamily family);
PerturbationFamily parse_family(std::string_view text);

/// even_case: (omega, -delta, 0, ..., 0); odd_case: (omega, 0, ..., 0).
struct Perturbation {
  PerturbationFamily family = PerturbationFamily::even_case;
  Rational omega;
  Rational delta;
  int dim = 2;

  VectorQ vector() const;
  int support_size() const;
};

Perturbation make_perturbation(PerturbationFamily family, const Rational& omega, const Rational& delta, int dim);

struct AttackRow {
  std::size_t index;
  std::int64_t k;
  int label;                        // f_a at the perturbed point
  Rational output;                  // net(x)
  Rational perturbed_output;        // net(x + eta)
  std::optional<Rational> error;    // |g(net(x + eta)) - label| when g is exact
  double error_approx;
  bool flipped;                     // error >= 1/2
  bool domain_exit;                 // x + eta left the domain of f_a; not counted
};

struct AttackReport {
  std::vector<AttackRow> rows;
  std::vector<std::size_t> flipped;  // indices into the point list
  std::size_t domain_exits = 0;
  double norm_value = 0.0;
  Norm norm = Norm::linf;
  int support_size = 0;
};

/// Evaluates every point before and after adding eta and reports the points
/// where |g(net(x + eta)) - f_a(x + eta)| >= 1/2. Exact.
AttackReport verify_attack(const ReluNetwork<Rational>& net, const MonotoneMap& g, const LabeledMultiset& data,
                           const Perturbation& eta, const ProblemInstance& inst, Norm norm = Norm::linf);

/// index,k,label,output,perturbed_output,error,flipped
std::string attack_csv(const AttackReport& report);

}  // namespace advlab

#endif  // ADVLAB_CONSTRUCTIONS_HPP_
