#include "advlab/noncomputability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "advlab/errors.hpp"
#include "advlab/rng.hpp"
#include "advlab/training.hpp"

namespace advlab {

namespace {

std::int64_t product_of_hidden(const std::vector<int>& dims) {
  std::int64_t product = 1;
  for (std::size_t l = 1; l + 1 < dims.size(); ++l) product *= dims[l] + 1;
  return product;
}

ProblemInstance line_instance(const AdversaryParams& params) {
  ProblemInstance inst;
  inst.a = params.a;
  inst.kappa = params.kappa;
  inst.delta = 0;
  inst.dim = params.dims.front();
  return inst;
}

Rational round_up(double x) {
  return from_double(std::nextafter(x, std::numeric_limits<double>::infinity()));
}

}  // namespace

void validate(const AdversaryParams& params) {
  if (params.dims.size() < 3) throw PreconditionError("dims need at least one hidden layer");
  if (params.dims.front() < 2) throw PreconditionError("input dimension must be >= 2");
  if (params.dims.back() != 1) throw PreconditionError("output dimension must be 1");
  for (int n : params.dims) {
    if (n < 1) throw PreconditionError("layer widths must be >= 1");
  }
  if (params.r < 1) throw PreconditionError("r must be >= 1");
  if (!(params.eps > 0)) throw PreconditionError("eps must be > 0");
  if (params.query_budget < 1) throw PreconditionError("query budget must be >= 1");
  validate(line_instance(params));
  solution_set_gap(params.r, params.dims, eps_hat(params));
}

Rational eps_hat(const AdversaryParams& params) {
  const Rational re = Rational(params.r) * params.eps;
  switch (params.cost) {
    case CostKind::mean_absolute:
    case CostKind::root_mean_square:
      return re;
    case CostKind::mean_square: {
      Rational q = from_double(std::sqrt(to_double(re)));
      if (q * q == re) return q;
      q = round_up(std::sqrt(to_double(re)));
      while (q * q < re) q = round_up(to_double(q));
      return q;
    }
    case CostKind::cross_entropy:
      return round_up(cf_eps_bound(params.cost, params.r, to_double(params.eps)));
  }
  throw PreconditionError("unknown cost kind");
}

AdversaryState::AdversaryState(const AdversaryParams& params) : params_(params), inst_(line_instance(params)) {}

Rational AdversaryState::coordinate(int j, int k, const Rational& delta) const {
  if (j == 1) return grid_coordinate(inst_, k);
  if (j == 2 && k % 2 == 0) return delta;
  return 0;
}

Rational adversary_serve(const DyadicQuery& query, AdversaryState& state) {
  if (query.j < 1 || query.j > state.dim() || query.k < 1 || query.k > state.points() || query.n < 1) {
    throw ProtocolError("query out of range: j=" + std::to_string(query.j) + " k=" + std::to_string(query.k) +
                        " n=" + std::to_string(query.n));
  }
  auto& transcript = state.transcript();
  if (static_cast<std::int64_t>(transcript.entries.size()) >= state.params().query_budget) {
    throw QueryBudgetExceeded("query budget of " + std::to_string(state.params().query_budget) + " spent");
  }
  Rational answer = dyadic_round(state.coordinate(query.j, query.k, 0), query.n);
  transcript.entries.push_back({query, answer});
  transcript.max_precision = std::max(transcript.max_precision, query.n);
  return answer;
}

Rational solution_set_gap(int r, const std::vector<int>& dims, const Rational& eps_hat) {
  const std::int64_t product = product_of_hidden(dims);
  if (r < 3 * product) {
    throw PreconditionError("r = " + std::to_string(r) + " is below 3 (N_1 + 1)...(N_{L-1} + 1) = " +
                            std::to_string(3 * product));
  }
  if (!(eps_hat > 0) || !(eps_hat < Rational(1, 2))) throw PreconditionError("eps_hat must lie in (0, 1/2)");
  return Rational(1, 2) - eps_hat;
}

int family_precision_floor(int r) {
  const Rational limit = separation_radius(r);
  int n = 1;
  while (!(Rational(1) / pow2(2 * n) < limit)) ++n;
  return n;
}

namespace {

std::vector<int> line_labels(const AdversaryParams& params) {
  const auto inst = line_instance(params);
  std::vector<int> labels;
  for (int k = 1; k <= params.r; ++k) labels.push_back(classify_first(params.a, grid_coordinate(inst, k)));
  return labels;
}

// Labels from the first coordinates read at precision n.
std::vector<int> read_labels(AdversaryState& oracle, int n) {
  std::vector<int> labels;
  for (int k = 1; k <= oracle.points(); ++k) {
    const Rational x1 = adversary_serve({1, k, n}, oracle);
    labels.push_back(classify_first(oracle.params().a, x1));
  }
  return labels;
}

class LabelsSolver : public Solver {
 public:
  explicit LabelsSolver(std::uint64_t seed) : precision_(10 + static_cast<int>(seed % 6)) {}
  std::string name() const override { return "labels"; }
  std::vector<Rational> solve(AdversaryState& oracle) override {
    std::vector<Rational> out;
    for (int label : read_labels(oracle, precision_)) out.emplace_back(label);
    return out;
  }

 private:
  int precision_;
};

// Splits the difference between the two certified regions.
class HedgeSolver : public Solver {
 public:
  explicit HedgeSolver(std::uint64_t seed) : precision_(10 + static_cast<int>(seed % 4)) {}
  std::string name() const override { return "hedge"; }
  std::vector<Rational> solve(AdversaryState& oracle) override {
    const Rational shift = (Rational(1, 2) + eps_hat(oracle.params())) / 2;
    std::vector<Rational> out;
    for (int label : read_labels(oracle, precision_)) out.push_back(label == 1 ? Rational(1 - shift) : shift);
    return out;
  }

 private:
  int precision_;
};

class TrainSolver : public Solver {
 public:
  explicit TrainSolver(std::uint64_t seed) : seed_(seed), precision_(8 + static_cast<int>(seed % 8)) {}
  std::string name() const override { return "train"; }
  std::vector<Rational> solve(AdversaryState& oracle) override {
    LabeledMultiset data;
    for (int k = 1; k <= oracle.points(); ++k) {
      VectorQ x(oracle.dim());
      for (int j = 1; j <= oracle.dim(); ++j) x(j - 1) = adversary_serve({j, k, precision_}, oracle);
      data.labels.push_back(classify_first(oracle.params().a, x(0)));
      data.points.push_back(std::move(x));
      data.indices.push_back(k);
    }
    TrainConfig cfg;
    cfg.cost = CostKind::mean_square;
    cfg.g = MonotoneMap::identity();
    cfg.learning_rate = 0.2;
    cfg.epochs = 400;
    cfg.seed = seed_;
    const auto outcome = train(oracle.params().dims, data, {}, cfg);
    std::vector<Rational> out;
    for (const auto& x : data.points) {
      const Eigen::VectorXd xd = x.unaryExpr([](const Rational& q) { return to_double(q); });
      const double y = eval_network(outcome.net, xd);
      out.push_back(std::isfinite(y) ? from_double(y) : Rational(0));
    }
    return out;
  }

 private:
  std::uint64_t seed_;
  int precision_;
};

class RandomSolver : public Solver {
 public:
  explicit RandomSolver(std::uint64_t seed) : rng_(make_stream(seed, 7)) {}
  std::string name() const override { return "random"; }
  std::vector<Rational> solve(AdversaryState& oracle) override {
    const auto queries = uniform_int(rng_, 0, 20);
    for (std::int64_t i = 0; i < queries; ++i) {
      adversary_serve({static_cast<int>(uniform_int(rng_, 1, oracle.dim())),
                       static_cast<int>(uniform_int(rng_, 1, oracle.points())),
                       static_cast<int>(uniform_int(rng_, 1, 40))},
                      oracle);
    }
    std::vector<Rational> out;
    for (int k = 0; k < oracle.points(); ++k) out.push_back(from_double(uniform01(rng_)));
    return out;
  }

 private:
  Rng rng_;
};

class NeverHaltSolver : public Solver {
 public:
  std::string name() const override { return "never-halt"; }
  std::vector<Rational> solve(AdversaryState& oracle) override {
    for (int n = 1;; n = n % 30 + 1) adversary_serve({1, 1, n}, oracle);
  }
};

}  // namespace

std::unique_ptr<Solver> make_solver(const std::string& name, std::uint64_t seed) {
  if (name == "labels") return std::make_unique<LabelsSolver>(seed);
  if (name == "hedge") return std::make_unique<HedgeSolver>(seed);
  if (name == "train") return std::make_unique<TrainSolver>(seed);
  if (name == "random") return std::make_unique<RandomSolver>(seed);
  if (name == "never-halt") return std::make_unique<NeverHaltSolver>();
  throw PreconditionError("unknown solver '" + name + "'");
}

const std::vector<std::string>& baseline_solver_names() {
  static const std::vector<std::string> names{"labels", "train", "hedge", "random"};
  return names;
}

AdversaryRun run_adversary(Solver& solver, const AdversaryParams& params) {
  validate(params);
  AdversaryState state(params);
  AdversaryRun run;
  auto& v = run.verdict;
  v.solver = solver.name();
  v.norm = params.norm;
  v.eps_hat = eps_hat(params);
  v.threshold = Rational(1, 4) - 3 * v.eps_hat / 4;
  v.sharp_threshold = Rational(1, 4) - v.eps_hat / 2;

  std::vector<Rational> output;
  try {
    output = solver.solve(state);
    v.halted = true;
  } catch (const QueryBudgetExceeded& e) {
    v.reason = std::string("NH: ") + e.what();
  } catch (const ProtocolError& e) {
    v.disqualified = true;
    v.reason = std::string("protocol violation: ") + e.what();
  }
  if (v.halted && static_cast<int>(output.size()) != params.r) {
    v.halted = false;
    v.disqualified = true;
    v.reason = "output has " + std::to_string(output.size()) + " entries, expected " + std::to_string(params.r);
  }

  run.transcript = state.transcript();
  v.max_precision = run.transcript.max_precision;
  v.chosen_n = std::max((v.max_precision + 1) / 2, family_precision_floor(params.r));
  const Rational delta1 = Rational(1) / pow2(2 * v.chosen_n);

  v.consistent = true;
  for (const auto& e : run.transcript.entries) {
    const Rational tol = Rational(1) / pow2(e.query.n);
    const Rational scaled = e.answer * pow2(e.query.n);
    const bool on_grid = numerator(scaled) % denominator(scaled) == 0;
    const bool near0 = abs(Rational(e.answer - state.coordinate(e.query.j, e.query.k, 0))) <= tol;
    const bool near1 = abs(Rational(e.answer - state.coordinate(e.query.j, e.query.k, delta1))) <= tol;
    if (!(on_grid && near0 && near1)) {
      v.consistent = false;
      break;
    }
  }

  if (!v.halted) {
    v.infinite_distance = true;
    v.chosen_delta = 0;
    v.meets_threshold = true;
    return run;
  }
  run.transcript.halted = true;
  run.transcript.output = output;

  const auto labels = line_labels(params);
  Rational s = 0;
  for (int k = 0; k < params.r; ++k) s = std::max(s, abs(Rational(output[k] - labels[k])));
  v.output_error = s;
  v.d0_lower_bound = std::max(Rational(0), Rational(Rational(1, 2) - s));
  v.d1_lower_bound = std::max(Rational(0), Rational(s - v.eps_hat));
  const bool fails_on_line = v.d0_lower_bound >= v.d1_lower_bound;
  v.distance_lower_bound = fails_on_line ? v.d0_lower_bound : v.d1_lower_bound;
  v.chosen_delta = fails_on_line ? Rational(0) : delta1;
  v.meets_threshold = v.distance_lower_bound >= v.threshold;
  return run;
}

std::string transcript_text(const AdversaryRun& run) {
  const auto& v = run.verdict;
  std::ostringstream out;
  for (const auto& e : run.transcript.entries) {
    out << "Q " << e.query.j << ' ' << e.query.k << ' ' << e.query.n << " → " << to_string(e.answer) << '\n';
  }
  out << "verdict\n";
  out << "  solver " << v.solver << '\n';
  out << "  queries " << run.transcript.entries.size() << '\n';
  out << "  halted " << (v.halted ? "true" : "false") << '\n';
  if (!v.reason.empty()) out << "  reason " << v.reason << '\n';
  out << "  max_precision " << v.max_precision << '\n';
  out << "  chosen_n " << v.chosen_n << '\n';
  out << "  chosen_instance delta=" << to_string(v.chosen_delta) << '\n';
  if (run.transcript.output) {
    out << "  output";
    for (const auto& q : *run.transcript.output) out << ' ' << to_string(q);
    out << '\n';
  }
  out << "  norm " << to_string(v.norm) << '\n';
  out << "  eps_hat " << to_string(v.eps_hat) << '\n';
  out << "  output_error " << to_string(v.output_error) << '\n';
  out << "  d0_lower_bound " << to_string(v.d0_lower_bound) << '\n';
  out << "  d1_lower_bound " << to_string(v.d1_lower_bound) << '\n';
  out << "  distance_lower_bound " << (v.infinite_distance ? std::string("inf") : to_string(v.distance_lower_bound))
      << '\n';
  out << "  threshold " << to_string(v.threshold) << '\n';
  out << "  sharp_threshold " << to_string(v.sharp_threshold) << '\n';
  out << "  consistent " << (v.consistent ? "true" : "false") << '\n';
  out << "  meets_threshold " << (v.meets_threshold ? "true" : "false") << '\n';
  return out.str();
}

nlohmann::json verdict_to_json(const AdversaryVerdict& v) {
  return {{"solver", v.solver},
          {"halted", v.halted},
          {"disqualified", v.disqualified},
          {"reason", v.reason},
          {"max_precision", v.max_precision},
          {"chosen_n", v.chosen_n},
          {"chosen_delta", to_string(v.chosen_delta)},
          {"norm", to_string(v.norm)},
          {"eps_hat", to_string(v.eps_hat)},
          {"output_error", to_string(v.output_error)},
          {"d0_lower_bound", to_string(v.d0_lower_bound)},
          {"d1_lower_bound", to_string(v.d1_lower_bound)},
          {"distance_lower_bound", v.infinite_distance ? std::string("inf") : to_string(v.distance_lower_bound)},
          {"threshold", to_string(v.threshold)},
          {"sharp_threshold", to_string(v.sharp_threshold)},
          {"consistent", v.consistent},
          {"meets_threshold", v.meets_threshold}};
}

bool families_disjoint(const Rational& a, const std::vector<Rational>& kappas, int r) {
  std::vector<std::set<Rational>> firsts;
  for (const auto& kappa : kappas) {
    ProblemInstance inst;
    inst.a = a;
    inst.kappa = kappa;
    validate(inst);
    std::set<Rational> coords;
    for (int k = 1; k <= r; ++k) coords.insert(grid_coordinate(inst, k));
    for (const auto& other : firsts) {
      for (const auto& x : coords) {
        if (other.count(x)) return false;
      }
    }
    firsts.push_back(std::move(coords));
  }
  return true;
}

}  // namespace advlab
