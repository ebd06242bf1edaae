#include "doctest.h"

#include "advlab/noncomputability.hpp"

using namespace advlab;

namespace {

class FixedSolver : public Solver {
 public:
  FixedSolver(std::vector<Rational> out, std::vector<DyadicQuery> queries)
      : out_(std::move(out)), queries_(std::move(queries)) {}
  std::string name() const override { return "fixed"; }
  std::vector<Rational> solve(AdversaryState& oracle) override {
    for (const auto& q : queries_) adversary_serve(q, oracle);
    return out_;
  }

 private:
  std::vector<Rational> out_;
  std::vector<DyadicQuery> queries_;
};

}  // namespace

TEST_CASE("serving dyadic answers") {
  AdversaryParams params;
  AdversaryState state(params);
  CHECK(adversary_serve({2, 2, 3}, state) == 0);
  CHECK(abs(Rational(0 - Rational(1, 16))) <= Rational(1, 8));

  const Rational x = adversary_serve({1, 1, 5}, state);
  CHECK(x == Rational(11, 32));
  CHECK(abs(Rational(x - Rational(1, 3))) == Rational(1, 96));

  const Rational deep = adversary_serve({1, 4, 60}, state);
  CHECK(abs(Rational(deep - state.coordinate(1, 4, 0))) <= Rational(1) / pow2(60));
  CHECK(state.transcript().entries.size() == 3);
  CHECK(state.transcript().max_precision == 60);

  CHECK_THROWS_AS(adversary_serve({3, 1, 1}, state), ProtocolError);
  CHECK_THROWS_AS(adversary_serve({1, 7, 1}, state), ProtocolError);
  CHECK_THROWS_AS(adversary_serve({1, 0, 1}, state), ProtocolError);
  CHECK_THROWS_AS(adversary_serve({1, 1, 0}, state), ProtocolError);
}

TEST_CASE("query budget") {
  AdversaryParams params;
  params.query_budget = 2;
  AdversaryState state(params);
  adversary_serve({1, 1, 1}, state);
  adversary_serve({1, 1, 1}, state);
  CHECK_THROWS_AS(adversary_serve({1, 1, 1}, state), QueryBudgetExceeded);
}

TEST_CASE("solution set gap") {
  CHECK(solution_set_gap(6, {2, 1, 1}, Rational(1, 4)) == Rational(1, 4));
  CHECK(solution_set_gap(6, {2, 1, 1}, Rational(1, 4)) / 2 == Rational(1, 4) - Rational(1, 4) / 2);
  const Rational near_half = Rational(1, 2) - Rational(1, 1000000);
  CHECK(solution_set_gap(6, {2, 1, 1}, near_half) == Rational(1, 1000000));
  CHECK_THROWS_AS(solution_set_gap(5, {2, 1, 1}, Rational(1, 4)), PreconditionError);
  CHECK_THROWS_AS(solution_set_gap(17, {2, 2, 2, 1}, Rational(1, 4)), PreconditionError);
  CHECK_NOTHROW(solution_set_gap(27, {2, 2, 2, 1}, Rational(1, 4)));
  CHECK_THROWS_AS(solution_set_gap(6, {2, 1, 1}, Rational(1, 2)), PreconditionError);
  CHECK_THROWS_AS(solution_set_gap(6, {2, 1, 1}, Rational(0)), PreconditionError);
}

TEST_CASE("eps hat per cost") {
  AdversaryParams params;
  CHECK(eps_hat(params) == Rational(1, 4));
  params.cost = CostKind::mean_square;
  params.eps = Rational(1, 96);
  CHECK(eps_hat(params) == Rational(1, 4));
  CHECK_NOTHROW(validate(params));
  params.eps = Rational(1, 50);
  const Rational e = eps_hat(params);
  CHECK(e * e >= Rational(6, 50));
  CHECK(to_double(e) == doctest::Approx(std::sqrt(0.12)));
  params.cost = CostKind::mean_absolute;
  params.eps = Rational(1, 12);
  CHECK_THROWS_AS(validate(params), PreconditionError);
}

TEST_CASE("family precision floor") {
  CHECK(family_precision_floor(6) == 5);
  for (int r : {1, 6, 20, 100}) {
    const int n = family_precision_floor(r);
    CHECK(Rational(1) / pow2(2 * n) < separation_radius(r));
    CHECK(!(Rational(1) / pow2(2 * n - 2) < separation_radius(r)));
  }
}

TEST_CASE("the labels solver fails on the line instance") {
  AdversaryParams params;
  auto solver = make_solver("labels", 0);
  auto run = run_adversary(*solver, params);
  const auto& v = run.verdict;
  CHECK(v.halted);
  CHECK(v.consistent);
  CHECK(v.output_error == 0);
  CHECK(v.chosen_delta == 0);
  CHECK(v.distance_lower_bound == Rational(1, 2));
  CHECK(v.threshold == Rational(1, 16));
  CHECK(v.sharp_threshold == Rational(1, 8));
  CHECK(v.meets_threshold);
  CHECK(v.max_precision == 10);
  CHECK(v.chosen_n == 5);
  CHECK(run.transcript.entries.size() == 6);
  CHECK(run.transcript.output.has_value());
}

TEST_CASE("the hedge solver sits exactly at the sharp threshold") {
  AdversaryParams params;
  auto run = run_adversary(*make_solver("hedge", 3), params);
  CHECK(run.verdict.distance_lower_bound == Rational(1, 8));
  CHECK(run.verdict.d0_lower_bound == run.verdict.d1_lower_bound);
}

TEST_CASE("an output far from the labels fails on the perturbed instance") {
  AdversaryParams params;
  FixedSolver solver({1, 0, 1, 0, 1, 0}, {{1, 1, 20}, {2, 2, 13}});
  auto run = run_adversary(solver, params);
  const auto& v = run.verdict;
  CHECK(v.output_error == 1);
  CHECK(v.d1_lower_bound == Rational(3, 4));
  CHECK(v.chosen_n == 10);
  CHECK(v.chosen_delta == Rational(1) / pow2(20));
  CHECK(v.consistent);
  CHECK(v.meets_threshold);
}

TEST_CASE("misbehaving solvers") {
  AdversaryParams params;
  params.query_budget = 1000;
  auto nh = run_adversary(*make_solver("never-halt", 0), params);
  CHECK(!nh.verdict.halted);
  CHECK(nh.verdict.infinite_distance);
  CHECK(nh.verdict.reason.rfind("NH", 0) == 0);
  CHECK(!nh.transcript.output.has_value());
  CHECK(nh.transcript.entries.size() == 1000);
  CHECK(nh.verdict.consistent);
  CHECK(transcript_text(nh).find("distance_lower_bound inf") != std::string::npos);

  FixedSolver bad_query({0, 0, 0, 0, 0, 0}, {{1, 9, 3}});
  auto dq = run_adversary(bad_query, params);
  CHECK(dq.verdict.disqualified);
  CHECK(dq.verdict.infinite_distance);

  FixedSolver short_output({0, 0}, {});
  CHECK(run_adversary(short_output, params).verdict.disqualified);
}

TEST_CASE("every baseline solver meets the threshold in every norm") {
  for (auto norm : {Norm::linf, Norm::l1, Norm::l2}) {
    AdversaryParams params;
    params.norm = norm;
    for (const auto& name : baseline_solver_names()) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto run = run_adversary(*make_solver(name, seed), params);
        CHECK(run.verdict.halted);
        CHECK(run.verdict.consistent);
        CHECK(run.verdict.distance_lower_bound >= Rational(1, 16));
        CHECK(run.verdict.distance_lower_bound >= run.verdict.sharp_threshold);
      }
    }
  }
}

TEST_CASE("transcripts are stable") {
  AdversaryParams params;
  auto a = transcript_text(run_adversary(*make_solver("random", 4), params));
  auto b = transcript_text(run_adversary(*make_solver("random", 4), params));
  CHECK(a == b);
  auto labels = transcript_text(run_adversary(*make_solver("labels", 0), params));
  CHECK(labels.rfind("Q 1 1 10 → 341/1024\n", 0) == 0);
  CHECK(labels.find("verdict\n") != std::string::npos);
  CHECK(labels.find("  chosen_instance delta=0/1\n") != std::string::npos);
}

TEST_CASE("families for distinct kappas are disjoint") {
  std::vector<Rational> kappas;
  for (int i = 0; i < 10; ++i) kappas.push_back(Rational(1, 4) + Rational(i, 18));
  CHECK(families_disjoint(Rational(1, 2), kappas, 6));
  CHECK(families_disjoint(Rational(3, 4), kappas, 200));
  CHECK(!families_disjoint(Rational(1, 2), {Rational(1, 2), Rational(1, 2)}, 6));
}
