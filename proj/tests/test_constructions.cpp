#include "doctest.h"

#include <random>

#include "advlab/constructions.hpp"

using advlab::Rational;

namespace {

advlab::VectorQ point(Rational x1, Rational x2 = 0) {
  advlab::VectorQ x(2);
  x << x1, x2;
  return x;
}

}  // namespace

TEST_CASE("monotone maps") {
  auto id = advlab::MonotoneMap::parse("identity");
  auto th = advlab::MonotoneMap::parse("threshold");
  auto af = advlab::MonotoneMap::parse("affine:2,-1/2");
  auto st = advlab::MonotoneMap::parse("step:0,1/4,1/2,3/4,1");
  auto sg = advlab::MonotoneMap::parse("sigmoid");
  CHECK(id(Rational(3, 7)) == Rational(3, 7));
  CHECK(th(Rational(1, 2)) == 1);
  CHECK(th(Rational(49, 100)) == 0);
  CHECK(af(Rational(1, 2)) == Rational(1, 2));
  CHECK(st(Rational(0)) == 0);
  CHECK(st(Rational(1, 4)) == Rational(1, 2));
  CHECK(st(Rational(9, 10)) == 1);
  CHECK(af.spec() == "affine:2/1,-1/2");
  CHECK(advlab::MonotoneMap::parse(st.spec()).spec() == st.spec());
  CHECK_THROWS(advlab::MonotoneMap::parse("step:0,1,1,1/2,0"));
  CHECK_THROWS(advlab::MonotoneMap::parse("cubic"));
  CHECK_THROWS(sg(Rational(0)));

  CHECK(sg.at_least_half(Rational(0)));
  CHECK_FALSE(sg.at_least_half(Rational(-1, 1000000)));
  CHECK(sg.errs(Rational(0), 1));
  CHECK(sg.errs(Rational(0), 0));
  CHECK_FALSE(sg.errs(Rational(1, 10), 1));
  CHECK(id.errs(Rational(1, 2), 1));
  CHECK_FALSE(id.errs(Rational(51, 100), 1));
  CHECK(sg(0.0) == 0.5);
}

TEST_CASE("unstable matcher") {
  advlab::ProblemInstance inst;
  auto net = advlab::build_unstable_matcher({2, 3, 1}, inst.delta);
  CHECK(advlab::eval_network(net, advlab::grid_point(inst, 2)) == 1);
  CHECK(advlab::eval_network(net, advlab::grid_point(inst, 1)) == 0);
  CHECK(advlab::eval_network(net, point(Rational(1, 5), Rational(0))) == 0);

  inst.delta = Rational(1, 3);
  auto deep = advlab::build_unstable_matcher({2, 1, 1, 1}, inst.delta);
  for (int k = 1; k <= 200; ++k) {
    auto x = advlab::grid_point(inst, k);
    CHECK(advlab::eval_network(deep, x) == advlab::classify(inst, x));
  }
  CHECK_THROWS_AS(advlab::build_unstable_matcher({2, 3, 1}, Rational(0)), advlab::PreconditionError);
  CHECK_THROWS_AS(advlab::build_unstable_matcher({2, 1}, Rational(1)), advlab::PreconditionError);
}

TEST_CASE("matcher exact over a parameter grid") {
  for (const Rational& a : {Rational(1, 2), Rational(3, 4), Rational(1)}) {
    for (const Rational& kappa : {Rational(1, 4), Rational(1, 2), Rational(3, 4)}) {
      for (const Rational& delta : {Rational(1, 10), Rational(1, 100)}) {
        advlab::ProblemInstance inst{a, kappa, delta, 2};
        auto net = advlab::build_unstable_matcher({2, 3, 1}, delta);
        for (int k = 1; k <= 300; ++k) {
          auto x = advlab::grid_point(inst, k);
          REQUIRE(advlab::eval_network(net, x) == advlab::classify(inst, x));
        }
      }
    }
  }
}

TEST_CASE("stable classifier on the hand example") {
  advlab::AlphaSequence alphas{{Rational(4, 5), Rational(3, 5), Rational(2, 5), Rational(1, 5)}};
  auto psi = advlab::build_stable_classifier(alphas, 2);
  CHECK(psi.dims == std::vector<int>{2, 4, 1});
  CHECK(advlab::eval_network(psi, point(Rational(3, 10))) == 1);
  CHECK(advlab::eval_network(psi, point(Rational(7, 10))) == 0);
  CHECK(advlab::eval_network(psi, point(Rational(1, 2))) == Rational(1, 2));

  advlab::AlphaSequence bad{{Rational(1, 5), Rational(2, 5)}};
  CHECK_THROWS_AS(advlab::build_stable_classifier(bad, 2), advlab::InvariantViolation);
  advlab::AlphaSequence odd{{Rational(1, 2)}};
  CHECK_THROWS_AS(advlab::build_stable_classifier(odd, 2), advlab::InvariantViolation);
}

TEST_CASE("stable classifier pads to a multiple of four") {
  advlab::AlphaSequence alphas{{Rational(9, 10), Rational(7, 10), Rational(5, 10), Rational(3, 10), Rational(2, 10),
                                Rational(1, 10)}};
  auto psi = advlab::build_stable_classifier(alphas, 3);
  CHECK(psi.dims == std::vector<int>{3, 8, 1});
  // k = 2: [alpha_2, alpha_1] -> 0; k = 4: [alpha_4, alpha_3] -> 1; k = 6: -> 0.
  advlab::VectorQ x = advlab::VectorQ::Zero(3);
  for (auto [lo, hi, want] : {std::tuple{Rational(7, 10), Rational(9, 10), 0},
                              std::tuple{Rational(3, 10), Rational(5, 10), 1},
                              std::tuple{Rational(1, 10), Rational(2, 10), 0}}) {
    for (int i = 0; i <= 20; ++i) {
      x(0) = lo + (hi - lo) * Rational(i, 20);
      CHECK(advlab::eval_network(psi, x) == want);
    }
  }
}

TEST_CASE("stable alphas") {
  advlab::ProblemInstance inst;
  auto alphas = advlab::stable_alphas(inst, 3, Rational(1, 500));
  REQUIRE(alphas.size() == 6);
  CHECK(alphas.values[0] == Rational(1, 3) + Rational(1, 500));
  CHECK(alphas.values[1] == Rational(1, 3) - Rational(1, 500));
  CHECK_NOTHROW(advlab::validate_alphas(alphas));
  CHECK_THROWS_AS(advlab::stable_alphas(inst, 3, Rational(1, 10)), advlab::PreconditionError);

  auto psi = advlab::build_stable_classifier(alphas, 2);
  for (int k = 1; k <= 3; ++k) {
    const Rational c = advlab::grid_coordinate(inst, k);
    for (int i = 0; i <= 1000; ++i) {
      auto x = point(c - Rational(1, 500) + Rational(2, 500) * Rational(i, 1000));
      REQUIRE(advlab::eval_network(psi, x) == advlab::classify(inst, x));
    }
  }
}

TEST_CASE("perturbations") {
  auto even = advlab::make_perturbation(advlab::PerturbationFamily::even_case, 0, Rational(1, 100), 2);
  CHECK(even.vector() == point(0, Rational(-1, 100)));
  CHECK(even.support_size() == 1);
  auto odd = advlab::make_perturbation(advlab::PerturbationFamily::odd_case, Rational(1, 1000), Rational(1, 100), 3);
  advlab::VectorQ want = advlab::VectorQ::Zero(3);
  want(0) = Rational(1, 1000);
  CHECK(odd.vector() == want);
  CHECK(odd.support_size() == 1);
  CHECK_THROWS(advlab::make_perturbation(advlab::PerturbationFamily::odd_case, -1, 0, 2));

  const Rational delta(1, 100);
  for (int i = 0; i < 50; ++i) {
    const Rational omega = delta * Rational(i, 50);
    auto eta = advlab::make_perturbation(advlab::PerturbationFamily::even_case, omega, delta, 2);
    CHECK(eta.support_size() <= 2);
    CHECK(advlab::norm_within(eta.vector(), advlab::Norm::l1, omega + delta));
    CHECK(advlab::norm_within(eta.vector(), advlab::Norm::l1, 2 * delta));
    CHECK(advlab::norm_within(eta.vector(), advlab::Norm::l2, 2 * delta));
    CHECK(advlab::norm_within(eta.vector(), advlab::Norm::linf, delta));
  }
}

TEST_CASE("norms") {
  advlab::VectorQ v = point(Rational(3), Rational(-4));
  CHECK(advlab::vector_norm(v, advlab::Norm::l1) == 7.0);
  CHECK(advlab::vector_norm(v, advlab::Norm::l2) == 5.0);
  CHECK(advlab::vector_norm(v, advlab::Norm::linf) == 4.0);
  CHECK(advlab::norm_within(v, advlab::Norm::l2, 5));
  CHECK_FALSE(advlab::norm_within(v, advlab::Norm::l2, 5, true));
  CHECK(advlab::parse_norm("l2") == advlab::Norm::l2);
}

TEST_CASE("universal attack on the matcher") {
  advlab::ProblemInstance inst;
  auto net = advlab::build_unstable_matcher({2, 3, 1}, inst.delta);
  auto data = advlab::enumerate_dataset(inst, 1, 40);
  auto g = advlab::MonotoneMap::identity();

  auto zero = advlab::make_perturbation(advlab::PerturbationFamily::odd_case, 0, inst.delta, 2);
  CHECK(advlab::verify_attack(net, g, data, zero, inst).flipped.empty());

  auto eta = advlab::make_perturbation(advlab::PerturbationFamily::even_case, 0, inst.delta, 2);
  auto report = advlab::verify_attack(net, g, data, eta, inst);
  REQUIRE(report.flipped.size() == 20);
  for (auto i : report.flipped) {
    CHECK(data.indices[i] % 2 == 0);
    CHECK(*report.rows[i].error == 1);
  }
  CHECK(report.support_size == 1);
  CHECK(advlab::attack_csv(report).rfind("index,k,label,output,perturbed_output,error,flipped\n", 0) == 0);
}

TEST_CASE("stable classifier resists the same attack") {
  advlab::ProblemInstance inst;
  const Rational eps_rad = advlab::separation_radius(10) / 2;
  auto psi = advlab::build_stable_classifier(advlab::stable_alphas(inst, 10, eps_rad), 2);
  auto data = advlab::enumerate_dataset(inst, 1, 10);
  for (auto family : {advlab::PerturbationFamily::even_case, advlab::PerturbationFamily::odd_case}) {
    auto eta = advlab::make_perturbation(family, eps_rad, eps_rad, 2);
    auto report = advlab::verify_attack(psi, advlab::MonotoneMap::threshold(), data, eta, inst);
    CHECK(report.flipped.empty());
  }
}
