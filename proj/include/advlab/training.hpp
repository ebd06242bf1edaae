#ifndef ADVLAB_TRAINING_HPP_
#define ADVLAB_TRAINING_HPP_

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "advlab/constructions.hpp"
#include "advlab/cost.hpp"
#include "advlab/monotone.hpp"
#include "advlab/network.hpp"
#include "advlab/problem.hpp"
#include "advlab/reduction.hpp"

namespace advlab {

struct TrainConfig {
  CostKind cost = CostKind::cross_entropy;
  double learning_rate = 0.5;
  int epochs = 3000;
  double init_scale = 0.5;
  std::uint64_t seed = 0;
  MonotoneMap g = MonotoneMap::sigmoid();
};

struct TrainOutcome {
  ReluNetwork<double> net;      // best-cost iterate
  double final_cost = 0.0;      // its cost
  int best_epoch = 0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  std::vector<double> history;  // cost of the iterate entering each epoch
  bool diverged = false;
};

/// Weights and biases drawn uniformly from (-scale, scale).
ReluNetwork<double> init_network(const std::vector<int>& dims, double scale, std::uint64_t seed);

/// Inputs as columns of a d x r matrix and labels as a vector.
Eigen::MatrixXd design_matrix(const LabeledMultiset& data);
Eigen::VectorXd label_vector(const LabeledMultiset& data);

struct CostGradient {
  double cost = 0.0;
  std::vector<Eigen::MatrixXd> dA;
  std::vector<Eigen::VectorXd> db;
};

/// R(g(net(X)), w) and its gradient in every weight and bias. The ReLU
/// derivative at 0 is taken as 0. g must be identity, affine or sigmoid.
/// Cross entropy after sigmoid uses the fused derivative (v - w) / r.
CostGradient cost_and_gradient(const ReluNetwork<double>& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                               CostKind cost, const MonotoneMap& g);

/// Full-batch gradient descent with a constant step. Deterministic in cfg.seed.
/// Divergence (a non-finite cost) stops the run and is reported.
TrainOutcome train(const std::vector<int>& dims, const LabeledMultiset& data, const LabeledMultiset& val,
                   const TrainConfig& cfg);

/// Fraction of points with |g(net(x)) - label| < 1/2; 1.0 (with a warning)
/// for an empty set.
template <typename T>
double accuracy(const ReluNetwork<T>& net, const MonotoneMap& g, const LabeledMultiset& data) {
  if (data.empty()) {
    std::cerr << "warning: accuracy of an empty set is taken as 1\n";
    return 1.0;
  }
  std::size_t right = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Vector<T> x;
    if constexpr (std::is_same_v<T, Rational>) {
      x = data.points[i];
    } else {
      x = data.points[i].unaryExpr([](const Rational& q) { return static_cast<T>(to_double(q)); });
    }
    right += !g.errs(eval_network(net, x), data.labels[i]);
  }
  return static_cast<double>(right) / static_cast<double>(data.size());
}

struct AttackSearchResult {
  Perturbation best;
  std::size_t flips = 0;
  std::vector<std::size_t> flipped;  // indices into the point list
  std::size_t candidates = 0;        // perturbations inside the budget
};

inline constexpr int kOmegaGrid = 1000;

/// Tries eta^omega from both families with omega = budget * i / 1000,
/// i = 0..999, keeps those with ||eta|| < budget, and returns the one with the
/// most points where |g(net(x + eta)) - f_a(x + eta)| >= 1/2 (earliest on
/// ties, even-case first). Points leaving the domain of f_a are skipped.
template <typename T>
AttackSearchResult universal_attack_search(const ReluNetwork<T>& net, const MonotoneMap& g,
                                           const LabeledMultiset& data, const ProblemInstance& inst,
                                           const Rational& budget, Norm norm) {
  if (!(budget > 0)) throw PreconditionError("attack budget must be > 0");
  AttackSearchResult result;
  bool have = false;
  for (auto family : {PerturbationFamily::even_case, PerturbationFamily::odd_case}) {
    for (int i = 0; i < kOmegaGrid; ++i) {
      const Perturbation eta = make_perturbation(family, budget * Rational(i, kOmegaGrid), inst.delta, inst.dim);
      const VectorQ shift = eta.vector();
      if (!norm_within(shift, norm, budget, true)) continue;
      ++result.candidates;
      std::vector<std::size_t> flipped;
      for (std::size_t j = 0; j < data.size(); ++j) {
        const VectorQ moved = data.points[j] + shift;
        if (moved(0) <= 0 || moved(0) > 1) continue;
        const int label = classify(inst, moved);
        Vector<T> x;
        if constexpr (std::is_same_v<T, Rational>) {
          x = moved;
        } else {
          x = moved.unaryExpr([](const Rational& q) { return static_cast<T>(to_double(q)); });
        }
        if (g.errs(eval_network(net, x), label)) flipped.push_back(j);
      }
      if (!have || flipped.size() > result.flips) {
        have = true;
        result.best = eta;
        result.flips = flipped.size();
        result.flipped = std::move(flipped);
      }
    }
  }
  if (!have) result.best = make_perturbation(PerturbationFamily::odd_case, 0, inst.delta, inst.dim);
  return result;
}

/// Largest absolute and relative gaps between the analytic gradient and
/// central differences with the given step, over every parameter.
struct GradientCheck {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  std::size_t parameters = 0;
};

/// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
GradientCheck check_gradient(const ReluNetwork<double>& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                             CostKind cost, const MonotoneMap& g, double step = 1e-6, double floor = 1e-3);

/// Smallest |pre-activation| over every hidden unit and every column of X.
double min_preactivation_margin(const ReluNetwork<double>& net, const Eigen::MatrixXd& X);

/// epoch,cost
std::string history_csv(const TrainOutcome& outcome);

/// Train on T, validate on V, attack T, then run the extractor on the
/// delta = 0 line through the distinct indices of T and V.
struct VulnerabilityConfig {
  ProblemInstance inst;
  std::vector<int> dims{2, 8, 1};
  double gamma = 1.5;
  std::int64_t r = 50;
  std::int64_t s = 50;
  TrainConfig train;  // train.seed also seeds T (stream 1) and V (stream 2)
  Rational budget{6, 100};
  Norm norm = Norm::l1;
};

struct VulnerabilityResult {
  std::uint64_t seed = 0;
  LabeledMultiset train_set;
  LabeledMultiset val_set;
  TrainOutcome outcome;
  AttackSearchResult attack;
  std::int64_t alternations = 0;     // label changes along the sorted distinct indices
  std::int64_t certified_floor = 0;  // floor(alternations / (6 prod(N_l + 1)))
  std::optional<MisclassifiedSet> extracted;  // absent when too few alternations

  bool accurate() const { return outcome.train_accuracy == 1.0 && outcome.val_accuracy == 1.0; }
};

VulnerabilityResult vulnerability_run(const VulnerabilityConfig& cfg);

/// seed,train_accuracy,val_accuracy,final_cost,diverged,flips,family,omega,alternations,certified_floor,extracted
std::string vulnerability_csv(const std::vector<VulnerabilityResult>& results);

}  // namespace advlab

#endif  // ADVLAB_TRAINING_HPP_
