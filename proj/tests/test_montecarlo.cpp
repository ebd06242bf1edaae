#include "doctest.h"

#include <cmath>

#include "advlab/montecarlo.hpp"
#include "advlab/problem.hpp"

using namespace advlab;

TEST_CASE("binomial slack") {
  CHECK(binomial_slack(1) == doctest::Approx(1.5));
  CHECK(binomial_slack(100) == doctest::Approx(0.15));
  CHECK(binomial_slack(10000) == doctest::Approx(0.015));
}

TEST_CASE("alternation count and distinct draws") {
  CHECK(alternation_count({}) == 0);
  CHECK(alternation_count({5}) == 0);
  CHECK(alternation_count({1, 2, 4, 7, 8}) == 3);
  ZetaDistribution dist(1.5);
  Rng rng = make_stream(3, 0);
  auto z = distinct_draws(dist, rng, 500);
  CHECK(!z.empty());
  for (std::size_t i = 1; i < z.size(); ++i) CHECK(z[i - 1] < z[i]);
}

TEST_CASE("unique count is vacuous at theta = 1000") {
  auto report = verify_unique_count(1.5, 1000, 20, 1);
  CHECK(report.verdict == Verdict::vacuous);
  CHECK(report.bound < 0.0);
  CHECK(1.0 - report.bound == doctest::Approx(3.9525).epsilon(1e-3));
  CHECK(report.trials == 20);
}

TEST_CASE("a single trial always passes and is flagged") {
  auto report = verify_max_bound(1.5, 100, 1000000, 1, 9);
  CHECK(report.slack == doctest::Approx(1.5));
  CHECK(report.verdict == Verdict::pass);
  CHECK(report.low_power);
}

TEST_CASE("max bound at n = 1 matches p1^theta") {
  const double p1 = 0.191396691999713;
  auto report = verify_max_bound(1.5, 3, 1, 4000, 5);
  REQUIRE(report.exact.has_value());
  CHECK(*report.exact == doctest::Approx(std::pow(p1, 3)).epsilon(1e-9));
  CHECK(report.exact_agrees.value());
  CHECK(report.verdict == Verdict::vacuous);
}

TEST_CASE("max bound at theta = 1 against the cdf") {
  for (std::int64_t n : {1, 2, 5, 50}) {
    auto report = verify_max_bound(1.5, 1, n, 3000, 11 + static_cast<std::uint64_t>(n));
    REQUIRE(report.exact.has_value());
    CHECK(*report.exact == doctest::Approx(ZetaDistribution(1.5).cdf(n)));
    CHECK(report.exact_agrees.value());
  }
}

TEST_CASE("max bound at theta = 100, n = 10^6") {
  auto report = verify_max_bound(1.5, 100, 1000000, 400, 2);
  CHECK(report.bound == doctest::Approx(0.891729680952264).epsilon(1e-12));
  CHECK(report.verdict == Verdict::pass);
  CHECK(report.exact_agrees.value());
}

TEST_CASE("alternation bound with too few trials per bucket") {
  auto report = verify_alternation_bound(1.5, 10, 10, 200, 4);
  CHECK(report.verdict == Verdict::insufficient_data);
  CHECK(report.parts.empty());
  CHECK_THROWS(verify_alternation_bound(1.5, 10, 9, 10, 4));
  CHECK_THROWS(verify_alternation_bound(1.5, 10, 11, 10, 4));
}

TEST_CASE("alternation bound buckets") {
  auto report = verify_alternation_bound(1.5, 200, 10, 3000, 6);
  REQUIRE(!report.parts.empty());
  for (const auto& part : report.parts) {
    CHECK(part.trials >= kMinBucketTrials);
    CHECK(part.verdict == Verdict::pass);
    CHECK(!part.lower_bound);
  }
  CHECK(report.verdict == Verdict::pass);
}

TEST_CASE("theorem event") {
  SUBCASE("paper constant is infeasible") {
    TheoremEventParams params;
    auto report = verify_theorem_event(params, 10, 1);
    CHECK(report.verdict == Verdict::infeasible);
    CHECK(report.note.find("infeasible at desk scale") != std::string::npos);
    CHECK(report.trials == 0);
  }
  SUBCASE("surrogate constant is observed") {
    TheoremEventParams params;
    params.C = 10.0;
    auto report = verify_theorem_event(params, 40, 1);
    CHECK(report.verdict == Verdict::observed);
    REQUIRE(report.parts.size() == 2);
    CHECK(report.successes <= report.parts[0].successes);
    CHECK(report.successes <= report.parts[1].successes);
    CHECK(report.bound == doctest::Approx(0.5));
  }
}

TEST_CASE("reports are deterministic and independent of threads") {
  auto a = verify_max_bound(1.5, 50, 1000, 300, 77, 1);
  auto b = verify_max_bound(1.5, 50, 1000, 300, 77, 3);
  CHECK(reports_csv({a}) == reports_csv({b}));
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());
  auto c = verify_alternation_bound(1.5, 100, 10, 500, 8, 1);
  auto d = verify_alternation_bound(1.5, 100, 10, 500, 8, 2);
  CHECK(reports_csv({c}) == reports_csv({d}));
}

TEST_CASE("csv and json shape") {
  auto report = verify_max_bound(1.5, 3, 1, 50, 5);
  const auto csv = reports_csv({report});
  CHECK(csv.rfind("operation,params,trials,successes,empirical,bound,slack,verdict\n", 0) == 0);
  auto doc = report_to_json(report);
  CHECK(doc["operation"] == "max_bound");
  CHECK(doc["trials"] == 50);
}

TEST_CASE("verdicts stay pass as trials grow over a seed battery") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::int64_t trials : {50, 100, 200}) {
      auto report = verify_max_bound(1.5, 100, 1000000, trials, seed);
      CHECK(report.verdict == Verdict::pass);
    }
  }
}
