#include "advlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "advlab/network.hpp"
#include "advlab/parallel.hpp"
#include "advlab/problem.hpp"

namespace advlab {

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::vacuous: return "vacuous";
    case Verdict::insufficient_data: return "insufficient_data";
    case Verdict::infeasible: return "infeasible";
    case Verdict::observed: return "observed";
  }
  return "unknown";
}

double binomial_slack(std::int64_t trials) {
  if (trials < 1) return std::numeric_limits<double>::infinity();
  return 1.5 / std::sqrt(static_cast<double>(trials));
}

std::vector<std::int64_t> distinct_draws(ZetaDistribution& dist, Rng& rng, std::int64_t theta) {
  std::vector<std::int64_t> draws(static_cast<std::size_t>(theta));
  for (auto& k : draws) k = dist.sample(rng);
  std::sort(draws.begin(), draws.end());
  draws.erase(std::unique(draws.begin(), draws.end()), draws.end());
  return draws;
}

std::int64_t alternation_count(const std::vector<std::int64_t>& z) {
  std::int64_t count = 0;
  for (std::size_t j = 1; j < z.size(); ++j) count += (z[j] - z[j - 1]) % 2 != 0;
  return count;
}

namespace {

std::string fmt(double x) { return ScalarTraits<double>::to_text(x); }

void require_gamma(double gamma) {
  if (!(gamma > 1.0 && gamma < 2.0)) throw std::invalid_argument("gamma must lie in (1, 2)");
}

void require_trials(std::int64_t trials) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
}

void finish(TrialReport& report) {
  report.empirical = report.trials > 0 ? static_cast<double>(report.successes) / static_cast<double>(report.trials) : 0.0;
  report.slack = binomial_slack(report.trials);
  report.low_power = report.trials < kMinTrialsForPower;
  if (report.verdict == Verdict::vacuous || report.verdict == Verdict::infeasible ||
      report.verdict == Verdict::observed || report.verdict == Verdict::insufficient_data) {
    return;
  }
  const bool ok = report.lower_bound ? report.empirical >= report.bound - report.slack
                                     : report.empirical <= report.bound + report.slack;
  report.verdict = ok ? Verdict::pass : Verdict::fail;
}

void check_exact(TrialReport& report) {
  if (!report.exact) return;
  const double p = *report.exact;
  const double sigma = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(report.trials));
  // A 1/trials floor keeps a certain event (p = 0 or 1) from demanding an exact hit.
  report.exact_agrees = std::abs(report.empirical - p) <= 3.0 * sigma + 1.0 / static_cast<double>(report.trials);
}

ZetaDistribution prepared_distribution(double gamma) {
  static std::mutex mutex;
  static std::map<double, ZetaDistribution> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(gamma);
  if (it == cache.end()) {
    it = cache.emplace(gamma, ZetaDistribution(gamma)).first;
    it->second.prepare();
  }
  return it->second;
}

// Runs `trials` independent trials, trial i seeded by stream i of `seed`,
// and returns what `body` computed for each one.
template <typename Out, typename Body>
std::vector<Out> run_trials(double gamma, std::int64_t trials, std::uint64_t seed, int threads, Body body) {
  const ZetaDistribution prepared = prepared_distribution(gamma);
  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, trials));
  std::vector<ZetaDistribution> dists(static_cast<std::size_t>(workers), prepared);
  std::vector<Out> out(static_cast<std::size_t>(trials));
  parallel_for(trials, workers, [&](std::int64_t i, int w) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = body(dists[static_cast<std::size_t>(w)], rng);
  });
  return out;
}

}  // namespace

TrialReport verify_unique_count(double gamma, std::int64_t theta, std::int64_t trials, std::uint64_t seed,
                                int threads) {
  require_gamma(gamma);
  require_trials(trials);
  if (theta < 1) throw std::invalid_argument("theta must be >= 1");
  const double c1 = unique_count_constant(gamma);
  const double target = c1 * std::pow(static_cast<double>(theta), 1.0 / gamma);
  TrialReport report;
  report.operation = "unique_count";
  report.params = "gamma=" + fmt(gamma) + ";theta=" + std::to_string(theta) + ";seed=" + std::to_string(seed);
  report.trials = trials;
  report.bound = 1.0 - std::pow(c1, -2.0) * std::pow(static_cast<double>(theta), -(2.0 / gamma - 1.0));
  report.lower_bound = true;
  report.verdict = report.bound > 0.0 ? Verdict::pass : Verdict::vacuous;
  report.note = "success: N >= c1 theta^(1/gamma) = " + fmt(target);

  auto counts = run_trials<std::int64_t>(gamma, trials, seed, threads, [&](ZetaDistribution& dist, Rng& rng) {
    return static_cast<std::int64_t>(distinct_draws(dist, rng, theta).size());
  });
  for (auto n : counts) report.successes += static_cast<double>(n) >= target;
  finish(report);
  return report;
}

TrialReport verify_max_bound(double gamma, std::int64_t theta, std::int64_t n, std::int64_t trials,
                             std::uint64_t seed, int threads) {
  require_gamma(gamma);
  require_trials(trials);
  if (theta < 1 || n < 1) throw std::invalid_argument("theta and n must be >= 1");
  const double c2 = max_bound_constant(gamma);
  TrialReport report;
  report.operation = "max_bound";
  report.params = "gamma=" + fmt(gamma) + ";theta=" + std::to_string(theta) + ";n=" + std::to_string(n) +
                  ";seed=" + std::to_string(seed);
  report.trials = trials;
  const auto half = n / 2;
  report.bound = half == 0 ? -std::numeric_limits<double>::infinity()
                           : 1.0 - c2 * static_cast<double>(theta) * std::pow(static_cast<double>(half), 1.0 - gamma);
  report.lower_bound = true;
  report.verdict = report.bound > 0.0 ? Verdict::pass : Verdict::vacuous;
  ZetaDistribution dist(gamma);
  report.exact = std::pow(dist.cdf(n), static_cast<double>(theta));
  report.note = "success: max drawn index <= n";

  auto hits = run_trials<char>(gamma, trials, seed, threads, [&](ZetaDistribution& d, Rng& rng) {
    for (std::int64_t i = 0; i < theta; ++i) {
      if (d.sample(rng) > n) return char{0};
    }
    return char{1};
  });
  for (char h : hits) report.successes += h;
  finish(report);
  check_exact(report);
  return report;
}

TrialReport verify_alternation_bound(double gamma, std::int64_t theta, std::int64_t n_min, std::int64_t trials,
                                     std::uint64_t seed, int threads) {
  require_gamma(gamma);
  require_trials(trials);
  if (n_min < 10 || n_min > theta) throw std::invalid_argument("need 10 <= n_min <= theta");
  struct Outcome {
    std::int64_t n = 0;
    std::int64_t alternations = 0;
  };
  auto outcomes = run_trials<Outcome>(gamma, trials, seed, threads, [&](ZetaDistribution& dist, Rng& rng) {
    auto z = distinct_draws(dist, rng, theta);
    return Outcome{static_cast<std::int64_t>(z.size()), alternation_count(z)};
  });

  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> buckets;  // n -> (trials, hits)
  for (const auto& o : outcomes) {
    auto& b = buckets[o.n];
    ++b.first;
    b.second += 5 * o.alternations <= o.n;
  }

  TrialReport report;
  report.operation = "alternation_bound";
  report.params = "gamma=" + fmt(gamma) + ";theta=" + std::to_string(theta) + ";n_min=" + std::to_string(n_min) +
                  ";seed=" + std::to_string(seed);
  report.lower_bound = false;
  bool all_pass = true;
  for (const auto& [n, b] : buckets) {
    if (n < n_min || n > theta || b.first < kMinBucketTrials) continue;
    TrialReport part;
    part.operation = "alternation_bucket";
    part.params = "n=" + std::to_string(n);
    part.trials = b.first;
    part.successes = b.second;
    part.bound = std::exp(-static_cast<double>(n) / 100.0);
    part.lower_bound = false;
    part.verdict = Verdict::pass;
    finish(part);
    all_pass = all_pass && part.verdict == Verdict::pass;
    report.trials += part.trials;
    report.successes += part.successes;
    report.bound = std::max(report.bound, part.bound);
    report.parts.push_back(std::move(part));
  }
  report.note = "event: alternations <= N/5 given N = n; " + std::to_string(report.parts.size()) +
                " buckets with >= " + std::to_string(kMinBucketTrials) + " trials out of " + std::to_string(trials);
  if (report.parts.empty()) {
    report.verdict = Verdict::insufficient_data;
    finish(report);
    return report;
  }
  report.verdict = Verdict::observed;
  finish(report);
  report.slack = 0.0;
  report.verdict = all_pass ? Verdict::pass : Verdict::fail;
  return report;
}

TrialReport verify_theorem_event(const TheoremEventParams& params, std::int64_t trials, std::uint64_t seed,
                                 int threads) {
  require_gamma(params.gamma);
  require_trials(trials);
  if (params.r < 1 || params.s < 1 || params.q < 1 || params.hidden_product < 1) {
    throw std::invalid_argument("r, s, q and the hidden product must be >= 1");
  }
  if (!(params.p > 0.0)) throw std::invalid_argument("p must be > 0");
  const bool paper = !params.C.has_value();
  const double C = paper ? theorem_constant().C : *params.C;
  const std::int64_t total = params.r + params.s;
  const double rs = static_cast<double>(std::max(params.r, params.s));

  TrialReport report;
  report.operation = "theorem_event";
  report.params = "r=" + std::to_string(params.r) + ";s=" + std::to_string(params.s) + ";p=" + fmt(params.p) +
                  ";q=" + std::to_string(params.q) + ";prod=" + std::to_string(params.hidden_product) +
                  ";C=" + fmt(C) + ";seed=" + std::to_string(seed);
  report.trials = trials;
  report.bound = 1.0 - params.p;
  report.lower_bound = true;

  if (paper) {
    const double qp = static_cast<double>(params.q * params.hidden_product);
    const double required = C * std::max(std::pow(params.p, -3.0), std::pow(qp, 1.5));
    if (required > static_cast<double>(kDeskScaleDraws)) {
      report.trials = 0;
      report.verdict = Verdict::infeasible;
      report.note = "constants infeasible at desk scale: the theorem needs r + s >= " + fmt(required);
      return report;
    }
    if (static_cast<double>(total) < required) {
      report.trials = 0;
      report.verdict = Verdict::vacuous;
      report.note = "r + s is below the theorem's sample size " + fmt(required);
      return report;
    }
    report.verdict = Verdict::pass;
  } else {
    report.verdict = Verdict::observed;
  }

  const long double cap = std::ceil(static_cast<long double>(C) * rs * rs / (static_cast<long double>(params.p) * params.p));
  const std::int64_t max_index = cap >= 9.0e18L ? std::numeric_limits<std::int64_t>::max() : static_cast<std::int64_t>(cap);
  const std::int64_t needed = 6 * params.q * params.hidden_product;
  report.note = "conjuncts: max index <= " + std::to_string(max_index) + " and alternations > " + std::to_string(needed);

  struct Outcome {
    char max_ok = 0;
    char alt_ok = 0;
  };
  auto outcomes = run_trials<Outcome>(params.gamma, trials, seed, threads, [&](ZetaDistribution& dist, Rng& rng) {
    auto z = distinct_draws(dist, rng, total);
    return Outcome{static_cast<char>(z.back() <= max_index), static_cast<char>(alternation_count(z) > needed)};
  });
  TrialReport max_part, alt_part;
  max_part.operation = "theorem_event_max_index";
  alt_part.operation = "theorem_event_alternations";
  for (auto* part : {&max_part, &alt_part}) {
    part->params = report.params;
    part->trials = trials;
    part->verdict = Verdict::observed;
    part->bound = report.bound;
  }
  for (const auto& o : outcomes) {
    max_part.successes += o.max_ok;
    alt_part.successes += o.alt_ok;
    report.successes += o.max_ok && o.alt_ok;
  }
  finish(max_part);
  finish(alt_part);
  report.parts = {max_part, alt_part};
  finish(report);
  return report;
}

std::string reports_csv(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << "operation,params,trials,successes,empirical,bound,slack,verdict\n";
  auto row = [&out](const TrialReport& r) {
    out << r.operation << ',' << r.params << ',' << r.trials << ',' << r.successes << ',' << fmt(r.empirical) << ','
        << fmt(r.bound) << ',' << fmt(r.slack) << ',' << to_string(r.verdict) << '\n';
  };
  for (const auto& r : reports) {
    row(r);
    for (const auto& part : r.parts) row(part);
  }
  return out.str();
}

namespace {

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);
}

}  // namespace

nlohmann::json report_to_json(const TrialReport& r) {
  nlohmann::json doc{{"operation", r.operation},
                     {"params", r.params},
                     {"trials", r.trials},
                     {"successes", r.successes},
                     {"empirical", number(r.empirical)},
                     {"bound", number(r.bound)},
                     {"bound_kind", r.lower_bound ? "lower" : "upper"},
                     {"slack", number(r.slack)},
                     {"verdict", to_string(r.verdict)},
                     {"low_power", r.low_power},
                     {"note", r.note}};
  if (r.exact) doc["exact"] = number(*r.exact);
  if (r.exact_agrees) doc["exact_agrees"] = *r.exact_agrees;
  if (!r.parts.empty()) {
    doc["parts"] = nlohmann::json::array();
    for (const auto& part : r.parts) doc["parts"].push_back(report_to_json(part));
  }
  return doc;
}

}  // namespace advlab
