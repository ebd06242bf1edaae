#include "doctest.h"

#include <cmath>

#include "advlab/rng.hpp"
#include "advlab/training.hpp"

using namespace advlab;

namespace {

LabeledMultiset random_points(Rng& rng, int d, int count) {
  ProblemInstance inst;
  inst.dim = d;
  LabeledMultiset data;
  for (int i = 0; i < count; ++i) {
    VectorQ x = VectorQ::Zero(d);
    x(0) = from_double(uniform(rng, 0.05, 1.0));
    for (int j = 1; j < d; ++j) x(j) = from_double(uniform(rng, -0.5, 0.5));
    data.points.push_back(x);
    data.labels.push_back(classify(inst, x));
    data.indices.push_back(0);
  }
  return data;
}

}  // namespace

TEST_CASE("gradient matches central differences away from kinks") {
  Rng rng = make_stream(2024, 0);
  int checked = 0;
  const std::vector<std::pair<CostKind, MonotoneMap>> setups = {
      {CostKind::cross_entropy, MonotoneMap::sigmoid()},
      {CostKind::mean_square, MonotoneMap::identity()},
      {CostKind::mean_square, MonotoneMap::sigmoid()},
      {CostKind::mean_absolute, MonotoneMap::sigmoid()},
  };
  for (std::uint64_t trial = 0; checked < 100; ++trial) {
    const int width = 2 + static_cast<int>(trial % 5);
    const std::vector<int> dims = trial % 2 ? std::vector<int>{2, width, 1} : std::vector<int>{2, width, 3, 1};
    auto net = init_network(dims, 1.0, trial);
    auto data = random_points(rng, 2, 8);
    const auto X = design_matrix(data);
    const auto w = label_vector(data);
    if (min_preactivation_margin(net, X) < 1e-3) continue;
    const auto& [cost, g] = setups[trial % setups.size()];
    auto check = check_gradient(net, X, w, cost, g);
    CHECK(check.max_rel_error < 1e-4);
    CHECK(check.parameters > 0);
    ++checked;
  }
}

TEST_CASE("single point training descends monotonically") {
  ProblemInstance inst;
  auto data = enumerate_dataset(inst, 2, 2);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.epochs = 400;
  cfg.seed = 3;
  auto outcome = train({2, 3, 1}, data, {}, cfg);
  REQUIRE(outcome.history.size() == 400);
  for (std::size_t i = 1; i < outcome.history.size(); ++i) {
    CHECK(outcome.history[i] <= outcome.history[i - 1] + 1e-15);
  }
  CHECK(outcome.train_accuracy == 1.0);
  CHECK(!outcome.diverged);
}

TEST_CASE("one epoch") {
  ProblemInstance inst;
  auto data = enumerate_dataset(inst, 1, 6);
  TrainConfig cfg;
  cfg.epochs = 1;
  auto outcome = train({2, 4, 1}, data, data, cfg);
  CHECK(outcome.history.size() == 1);
  CHECK(outcome.best_epoch == 0);
  CHECK(outcome.final_cost == outcome.history[0]);
  CHECK(outcome.train_accuracy >= 0.0);
  CHECK(outcome.train_accuracy <= 1.0);
}

TEST_CASE("preconditions and divergence") {
  ProblemInstance inst;
  auto data = enumerate_dataset(inst, 1, 6);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train({2, 4, 1}, data, {}, cfg), PreconditionError);
  cfg.learning_rate = 0.1;
  cfg.epochs = 0;
  CHECK_THROWS_AS(train({2, 4, 1}, data, {}, cfg), PreconditionError);
  cfg.epochs = 10;
  CHECK_THROWS_AS(train({2, 4, 1}, {}, {}, cfg), PreconditionError);
  CHECK_THROWS_AS(train({3, 4, 1}, data, {}, cfg), ShapeError);

  cfg.cost = CostKind::mean_square;
  cfg.g = MonotoneMap::identity();
  cfg.learning_rate = 1e6;
  cfg.epochs = 50;
  auto outcome = train({2, 4, 1}, data, {}, cfg);
  CHECK(outcome.diverged);
  CHECK(outcome.history.size() == 50);
  CHECK(std::isfinite(outcome.final_cost));
}

TEST_CASE("training is deterministic") {
  ProblemInstance inst;
  inst.delta = Rational(1, 20);
  auto data = sample_dataset(inst, 1.5, 30, 5);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.seed = 12;
  auto a = train({2, 6, 1}, data, data, cfg);
  auto b = train({2, 6, 1}, data, data, cfg);
  CHECK(history_csv(a) == history_csv(b));
  CHECK(network_to_json(a.net).dump() == network_to_json(b.net).dump());
  CHECK(a.history.back() < a.history.front());
  cfg.seed = 13;
  auto c = train({2, 6, 1}, data, data, cfg);
  CHECK(history_csv(a) != history_csv(c));
}

TEST_CASE("accuracy") {
  ProblemInstance inst;
  auto data = enumerate_dataset(inst, 1, 40);
  auto matcher = build_unstable_matcher({2, 3, 1}, inst.delta).cast<double>();
  CHECK(accuracy(matcher, MonotoneMap::identity(), data) == 1.0);
  CHECK(accuracy(matcher, MonotoneMap::threshold(), data) == 1.0);

  ReluNetwork<double> zero;
  zero.dims = {2, 1, 1};
  zero.layers.push_back({Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1)});
  zero.layers.push_back({Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1)});
  CHECK(accuracy(zero, MonotoneMap::identity(), data) == 0.5);
  CHECK(accuracy(zero, MonotoneMap::identity(), LabeledMultiset{}) == 1.0);
}

TEST_CASE("attack search on the float matcher flips the even points") {
  ProblemInstance inst;
  inst.delta = Rational(1, 1000);
  auto data = enumerate_dataset(inst, 1, 10);
  auto matcher = build_unstable_matcher({2, 3, 1}, inst.delta).cast<double>();
  const Rational budget = inst.delta * Rational(1001, 1000);
  auto result = universal_attack_search(matcher, MonotoneMap::identity(), data, inst, budget, Norm::l1);
  CHECK(result.flips == 5);
  CHECK(result.best.family == PerturbationFamily::even_case);
  CHECK(result.best.omega == 0);
  for (auto i : result.flipped) CHECK(data.indices[i] % 2 == 0);
  CHECK(result.candidates == 1 + kOmegaGrid);
}

TEST_CASE("attack search finds nothing against the stable classifier") {
  ProblemInstance inst;
  const Rational eps_rad = separation_radius(10) / 2;
  auto psi = build_stable_classifier(stable_alphas(inst, 10, eps_rad), 2);
  auto data = enumerate_dataset(inst, 1, 10);
  auto result = universal_attack_search(psi, MonotoneMap::threshold(), data, inst, eps_rad, Norm::linf);
  CHECK(result.flips == 0);
  CHECK(result.flipped.empty());
  CHECK(result.candidates == kOmegaGrid);
}

TEST_CASE("a near-zero budget flips only points already misclassified") {
  ProblemInstance inst;
  auto data = enumerate_dataset(inst, 1, 8);
  ReluNetwork<double> zero;
  zero.dims = {2, 1, 1};
  zero.layers.push_back({Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1)});
  zero.layers.push_back({Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1)});
  auto result = universal_attack_search(zero, MonotoneMap::identity(), data, inst, Rational(1, 1000000), Norm::linf);
  CHECK(result.best.family == PerturbationFamily::odd_case);
  CHECK(result.best.omega == 0);
  CHECK(result.flips == 4);
  for (auto i : result.flipped) CHECK(data.labels[i] == 1);
  CHECK_THROWS_AS(universal_attack_search(zero, MonotoneMap::identity(), data, inst, Rational(0), Norm::linf),
                  PreconditionError);
}

TEST_CASE("history csv") {
  TrainOutcome outcome;
  outcome.history = {1.0, 0.5};
  CHECK(history_csv(outcome) == "epoch,cost\n0,1\n1,0.5\n");
}
