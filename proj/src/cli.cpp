#include "advlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/version.hpp>

#include "advlab/constructions.hpp"
#include "advlab/cost.hpp"
#include "advlab/monotone.hpp"
#include "advlab/montecarlo.hpp"
#include "advlab/noncomputability.hpp"
#include "advlab/parallel.hpp"
#include "advlab/problem.hpp"
#include "advlab/training.hpp"

namespace advlab::cli {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

namespace {

enum class Kind { integer, real, rational, rational_or_auto, dims, cost, norm, family, map, solvers, command, text };

struct KeySpec {
  const char* key;
  Kind kind;
  const char* fallback;
};

using Section = std::pair<std::string, std::vector<KeySpec>>;

const std::vector<Section>& schema() {
  static const std::vector<Section> table = {
      {"experiment",
       {{"schema", Kind::integer, "1"},
        {"command", Kind::command, "full-report"},
        {"seed", Kind::integer, "0"},
        {"out", Kind::text, "advlab-out"},
        {"threads", Kind::integer, "0"},
        {"preset", Kind::text, "probability-bounds"}}},
      {"construct",
       {{"a", Kind::rational, "1/2"},
        {"kappa", Kind::rational, "1/2"},
        {"delta", Kind::rational, "1/100"},
        {"dims", Kind::dims, "2,3,1"},
        {"k_max", Kind::integer, "1000"},
        {"K", Kind::integer, "50"},
        {"eps_rad", Kind::rational_or_auto, "auto"}}},
      {"attack",
       {{"a", Kind::rational, "1/2"},
        {"kappa", Kind::rational, "1/2"},
        {"delta", Kind::rational, "1/100"},
        {"dims", Kind::dims, "2,3,1"},
        {"k_max", Kind::integer, "100"},
        {"family", Kind::family, "even-case"},
        {"omega", Kind::rational, "0"},
        {"norm", Kind::norm, "linf"},
        {"g", Kind::map, "identity"},
        {"K", Kind::integer, "50"},
        {"eps_rad", Kind::rational_or_auto, "auto"}}},
      {"train",
       {{"a", Kind::rational, "1/2"},
        {"kappa", Kind::rational, "1/2"},
        {"delta", Kind::rational, "1/20"},
        {"dims", Kind::dims, "2,8,1"},
        {"r", Kind::integer, "50"},
        {"s", Kind::integer, "50"},
        {"gamma", Kind::real, "1.5"},
        {"cost", Kind::cost, "cross_entropy"},
        {"g", Kind::map, "sigmoid"},
        {"learning_rate", Kind::real, "0.5"},
        {"epochs", Kind::integer, "3000"},
        {"init_scale", Kind::real, "0.5"},
        {"budget", Kind::rational, "6/100"},
        {"norm", Kind::norm, "l1"},
        {"seeds", Kind::integer, "10"},
        {"min_accurate", Kind::integer, "7"}}},
      {"montecarlo",
       {{"gamma", Kind::real, "1.5"},
        {"unique_theta", Kind::integer, "1000000"},
        {"unique_trials", Kind::integer, "200"},
        {"max_theta", Kind::integer, "100"},
        {"max_n", Kind::integer, "1000000"},
        {"max_trials", Kind::integer, "10000"},
        {"alt_theta", Kind::integer, "10000"},
        {"alt_n_min", Kind::integer, "100"},
        {"alt_trials", Kind::integer, "20000"},
        {"event_r", Kind::integer, "200"},
        {"event_s", Kind::integer, "200"},
        {"event_p", Kind::real, "0.5"},
        {"event_q", Kind::integer, "1"},
        {"event_prod", Kind::integer, "2"},
        {"event_C", Kind::real, "10"},
        {"event_trials", Kind::integer, "200"}}},
      {"adversary",
       {{"a", Kind::rational, "1/2"},
        {"kappa", Kind::rational, "1/2"},
        {"r", Kind::integer, "6"},
        {"dims", Kind::dims, "2,1,1"},
        {"cost", Kind::cost, "mean_absolute"},
        {"eps", Kind::rational, "1/24"},
        {"norm", Kind::norm, "linf"},
        {"solver", Kind::solvers, "labels"},
        {"seeds", Kind::integer, "1"},
        {"query_budget", Kind::integer, "1000000"}}},
  };
  return table;
}

using Preset = std::vector<std::pair<std::string, std::string>>;

const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> table = {
      {"probability-bounds", {}},
      {"quick",
       {{"construct.k_max", "200"},
        {"train.seeds", "3"},
        {"train.min_accurate", "2"},
        {"montecarlo.unique_trials", "20"},
        {"montecarlo.max_trials", "1000"},
        {"montecarlo.alt_theta", "1000"},
        {"montecarlo.alt_n_min", "10"},
        {"montecarlo.alt_trials", "2000"},
        {"montecarlo.event_trials", "20"},
        {"adversary.solver", "all"},
        {"adversary.seeds", "3"}}},
  };
  return table;
}

const KeySpec* find_key(const std::string& section, const std::string& key) {
  for (const auto& [name, keys] : schema()) {
    if (name != section) continue;
    for (const auto& spec : keys) {
      if (key == spec.key) return &spec;
    }
  }
  return nullptr;
}

bool is_section(const std::string& section) {
  return std::any_of(schema().begin(), schema().end(), [&](const Section& s) { return s.first == section; });
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::size_t used = 0;
    const int n = std::stoi(part, &used);
    if (used != part.size() || n < 1) throw std::invalid_argument("bad width");
    dims.push_back(n);
  }
  if (dims.size() < 2) throw std::invalid_argument("need at least two widths");
  return dims;
}

std::vector<std::string> parse_solvers(const std::string& text) {
  if (text == "all") return baseline_solver_names();
  std::vector<std::string> names;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (std::find(baseline_solver_names().begin(), baseline_solver_names().end(), part) ==
            baseline_solver_names().end() &&
        part != "never-halt") {
      throw std::invalid_argument("unknown solver");
    }
    names.push_back(part);
  }
  if (names.empty()) throw std::invalid_argument("empty solver list");
  return names;
}

void check_value(const std::string& where, const KeySpec& spec, const std::string& value) {
  try {
    std::size_t used = 0;
    switch (spec.kind) {
      case Kind::integer:
        std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing text");
        break;
      case Kind::real:
        std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing text");
        break;
      case Kind::rational: parse_rational(value); break;
      case Kind::rational_or_auto:
        if (value != "auto") parse_rational(value);
        break;
      case Kind::dims: parse_dims(value); break;
      case Kind::cost: parse_cost_kind(value); break;
      case Kind::norm: parse_norm(value); break;
      case Kind::family: parse_family(value); break;
      case Kind::map: MonotoneMap::parse(value); break;
      case Kind::solvers: parse_solvers(value); break;
      case Kind::command:
        if (std::find(command_names().begin(), command_names().end(), value) == command_names().end()) {
          throw std::invalid_argument("unknown command");
        }
        break;
      case Kind::text: break;
    }
  } catch (const std::exception&) {
    throw SchemaError(where + ": invalid value '" + value + "'");
  }
}

std::string lookup(const ExperimentConfig& config, const std::string& section, const std::string& key) {
  if (auto v = config.tree.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.'))) return *v;
  const auto preset_name = config.tree.get<std::string>("experiment.preset", "probability-bounds");
  auto it = presets().find(preset_name);
  if (it != presets().end()) {
    for (const auto& [dotted, value] : it->second) {
      if (dotted == section + "." + key) return value;
    }
  }
  const KeySpec* spec = find_key(section, key);
  if (!spec) throw SchemaError("no schema entry for " + section + "." + key);
  return spec->fallback;
}

// Typed access to one section.
class Params {
 public:
  Params(const ExperimentConfig& config, std::string section) : config_(config), section_(std::move(section)) {}

  std::string text(const std::string& key) const { return lookup(config_, section_, key); }
  std::int64_t integer(const std::string& key) const { return std::stoll(text(key)); }
  double real(const std::string& key) const { return std::stod(text(key)); }
  Rational rational(const std::string& key) const { return parse_rational(text(key)); }
  std::vector<int> dims(const std::string& key) const { return parse_dims(text(key)); }

 private:
  const ExperimentConfig& config_;
  std::string section_;
};

std::string fmt(double x) { return ScalarTraits<double>::to_text(x); }

class Recorder {
 public:
  explicit Recorder(std::string source) : source_(std::move(source)) {}

  void artifact(const std::string& name, std::string contents) { result.artifacts[name] = std::move(contents); }
  void claim(const std::string& id, const std::string& status, const std::string& detail) {
    result.claims.push_back({id, status, source_, detail});
  }
  static std::string status(bool ok) { return ok ? "pass" : "fail"; }

  RunResult result;

 private:
  std::string source_;
};

ProblemInstance instance_of(const Params& p, int dim) {
  ProblemInstance inst;
  inst.a = p.rational("a");
  inst.kappa = p.rational("kappa");
  inst.delta = p.rational("delta");
  inst.dim = dim;
  validate(inst);
  return inst;
}

Rational eps_rad_of(const Params& p) {
  const std::string text = p.text("eps_rad");
  return text == "auto" ? Rational(separation_radius(p.integer("K")) / 2) : parse_rational(text);
}

RunResult run_construct(const ExperimentConfig& config) {
  const Params p(config, "construct");
  Recorder rec("construct");
  const auto dims = p.dims("dims");
  const auto inst = instance_of(p, dims.front());
  const auto k_max = p.integer("k_max");
  const auto K = p.integer("K");
  if (k_max < 1 || K < 1) throw PreconditionError("k_max and K must be >= 1");

  const auto matcher = build_unstable_matcher(dims, inst.delta);
  const Rational eps_rad = eps_rad_of(p);
  const auto alphas = stable_alphas(inst, K, eps_rad);
  const auto psi = build_stable_classifier(alphas, inst.dim);
  rec.artifact("matcher.json", network_to_json(matcher).dump(2) + "\n");
  rec.artifact("stable.json", network_to_json(psi).dump(2) + "\n");
  std::ostringstream alpha_csv;
  alpha_csv << "index,alpha\n";
  for (std::size_t i = 0; i < alphas.values.size(); ++i) alpha_csv << i + 1 << ',' << to_string(alphas.values[i]) << '\n';
  rec.artifact("alphas.csv", alpha_csv.str());

  std::ostringstream table;
  table << "k,x1,x2,label,matcher_output,matcher_exact,stable_output,stable_exact\n";
  std::int64_t matcher_bad = 0, stable_bad = 0;
  std::vector<VectorQ> first_points;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const VectorQ x = grid_point(inst, k);
    const int label = classify(inst, x);
    const Rational m = eval_network(matcher, x);
    matcher_bad += m != label;
    table << k << ',' << to_string(x(0)) << ',' << to_string(x(1)) << ',' << label << ',' << to_string(m) << ','
          << (m == label);
    if (k <= K) {
      const Rational s = eval_network(psi, x);
      stable_bad += s != label;
      table << ',' << to_string(s) << ',' << (s == label);
      first_points.push_back(x);
    } else {
      table << ",,";
    }
    table << '\n';
  }
  for (std::int64_t k = k_max + 1; k <= K; ++k) {
    const VectorQ x = grid_point(inst, k);
    stable_bad += eval_network(psi, x) != classify(inst, x);
    first_points.push_back(x);
  }
  rec.artifact("exactness.csv", table.str());

  const auto sep = is_well_separated(inst, first_points, separation_radius(K));
  rec.claim("separation-and-stability", Recorder::status(sep.ok),
            "x^1..x^" + std::to_string(K) + " with radius " + to_string(separation_radius(K)));
  rec.claim("matcher-exactness", Recorder::status(matcher_bad == 0),
            std::to_string(matcher_bad) + " mismatches over k <= " + std::to_string(k_max));
  rec.claim("stable-classifier-exactness", Recorder::status(stable_bad == 0),
            std::to_string(stable_bad) + " mismatches over k <= " + std::to_string(K));
  return std::move(rec.result);
}

RunResult run_attack(const ExperimentConfig& config) {
  const Params p(config, "attack");
  Recorder rec("attack");
  const auto dims = p.dims("dims");
  const auto inst = instance_of(p, dims.front());
  const auto k_max = p.integer("k_max");
  if (k_max < 1) throw PreconditionError("k_max must be >= 1");
  const auto g = MonotoneMap::parse(p.text("g"));
  const auto family = parse_family(p.text("family"));
  const Rational omega = p.rational("omega");
  const Norm norm = parse_norm(p.text("norm"));

  const auto matcher = build_unstable_matcher(dims, inst.delta);
  const auto data = enumerate_dataset(inst, 1, k_max);
  const auto eta = make_perturbation(family, omega, inst.delta, inst.dim);
  const auto report = verify_attack(matcher, g, data, eta, inst, norm);
  rec.artifact("attack.csv", attack_csv(report));

  std::vector<std::size_t> evens;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.indices[i] % 2 == 0) evens.push_back(i);
  }
  const Rational window = std::min(inst.delta, Rational(separation_radius(k_max) / 2));
  std::ostringstream sweep;
  sweep << "omega,flips,same_set\n";
  bool same = true;
  for (int i = 0; i < 100; ++i) {
    const Rational w = window * Rational(i, 100);
    const auto r = verify_attack(matcher, g, data, make_perturbation(PerturbationFamily::even_case, w, inst.delta,
                                                                     inst.dim), inst, norm);
    const bool eq = r.flipped == evens;
    same = same && eq;
    sweep << to_string(w) << ',' << r.flipped.size() << ',' << eq << '\n';
  }
  rec.artifact("omega_sweep.csv", sweep.str());
  std::string detail = std::to_string(report.flipped.size()) + " of " + std::to_string(data.size()) +
                       " points flipped by " + to_string(family) + " omega=" + to_string(omega) +
                       ", norm " + fmt(report.norm_value) + "; 100-point omega sweep " +
                       (same ? "flips exactly the even k" : "differs");
  if (family == PerturbationFamily::even_case && omega < window) {
    bool errors_one = true;
    for (auto i : report.flipped) errors_one = errors_one && report.rows[i].error && *report.rows[i].error == 1;
    rec.claim("universal-perturbation", Recorder::status(same && report.flipped == evens && errors_one), detail);
  } else {
    rec.claim("universal-perturbation", same ? "observed" : "fail", detail);
  }

  const auto K = p.integer("K");
  const Rational eps_rad = eps_rad_of(p);
  const auto psi = build_stable_classifier(stable_alphas(inst, K, eps_rad), inst.dim);
  const auto near = enumerate_dataset(inst, 1, K);
  std::ostringstream stable;
  stable << "family,omega,linf,flips\n";
  std::size_t total = 0;
  for (auto fam : {PerturbationFamily::even_case, PerturbationFamily::odd_case}) {
    for (const Rational& w : {Rational(0), Rational(eps_rad / 2), eps_rad}) {
      const auto e = make_perturbation(fam, w, eps_rad, inst.dim);
      const auto r = verify_attack(psi, MonotoneMap::threshold(), near, e, inst, Norm::linf);
      total += r.flipped.size();
      stable << to_string(fam) << ',' << to_string(w) << ',' << fmt(r.norm_value) << ',' << r.flipped.size()
             << '\n';
    }
  }
  rec.artifact("stable_attack.csv", stable.str());
  rec.claim("stable-classifier-robustness", Recorder::status(total == 0),
            std::to_string(total) + " flips under |eta|_inf <= " + to_string(eps_rad) + " on k <= " +
                std::to_string(K));
  return std::move(rec.result);
}

RunResult run_train(const ExperimentConfig& config) {
  const Params p(config, "train");
  Recorder rec("train");
  VulnerabilityConfig base;
  base.dims = p.dims("dims");
  base.inst = instance_of(p, base.dims.front());
  base.gamma = p.real("gamma");
  base.r = p.integer("r");
  base.s = p.integer("s");
  base.train.cost = parse_cost_kind(p.text("cost"));
  base.train.g = MonotoneMap::parse(p.text("g"));
  base.train.learning_rate = p.real("learning_rate");
  base.train.epochs = static_cast<int>(p.integer("epochs"));
  base.train.init_scale = p.real("init_scale");
  base.budget = p.rational("budget");
  base.norm = parse_norm(p.text("norm"));
  const auto seeds = p.integer("seeds");
  const auto min_accurate = p.integer("min_accurate");
  if (seeds < 1) throw PreconditionError("seeds must be >= 1");

  std::vector<VulnerabilityResult> results(static_cast<std::size_t>(seeds));
  std::vector<std::string> failures(static_cast<std::size_t>(seeds));
  parallel_for(seeds, config.threads(), [&](std::int64_t i, int) {
    VulnerabilityConfig cfg = base;
    cfg.train.seed = config.seed() + static_cast<std::uint64_t>(i);
    try {
      results[static_cast<std::size_t>(i)] = vulnerability_run(cfg);
    } catch (const InternalError& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
      results[static_cast<std::size_t>(i)].seed = cfg.train.seed;
    }
  });

  rec.artifact("train_summary.csv", vulnerability_csv(results));
  std::int64_t accurate = 0, vulnerable = 0, certified_ok = 0, extractor_runs = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    rec.artifact("history_seed" + std::to_string(r.seed) + ".csv", history_csv(r.outcome));
    if (!failures[i].empty()) continue;
    if (r.accurate()) {
      ++accurate;
      vulnerable += r.attack.flips >= 1;
    }
    if (r.extracted) ++extractor_runs;
    const auto found = r.extracted ? static_cast<std::int64_t>(r.extracted->indices.size()) : 0;
    certified_ok += found >= r.certified_floor;
  }
  const bool extractor_clean =
      std::all_of(failures.begin(), failures.end(), [](const std::string& f) { return f.empty(); });
  rec.claim("trained-accuracy", Recorder::status(accurate >= min_accurate),
            std::to_string(accurate) + " of " + std::to_string(seeds) + " seeds reach train and validation accuracy 1 (need " +
                std::to_string(min_accurate) + ")");
  rec.claim("accurate-then-vulnerable", accurate == 0 ? "vacuous" : Recorder::status(vulnerable == accurate),
            std::to_string(vulnerable) + " of " + std::to_string(accurate) +
                " accurate seeds lose >= 1 training point to a perturbation of norm < " + to_string(base.budget));
  rec.claim("line-misclassification-guarantee", Recorder::status(extractor_clean && certified_ok == seeds),
            "extractor ran on " + std::to_string(extractor_runs) + " seeds; " + std::to_string(certified_ok) + " of " +
                std::to_string(seeds) + " meet floor(alternations / (6 prod(N_l + 1)))");
  return std::move(rec.result);
}

RunResult run_montecarlo(const ExperimentConfig& config) {
  const Params p(config, "montecarlo");
  Recorder rec("montecarlo");
  const double gamma = p.real("gamma");
  const int threads = config.threads();
  const auto seed = config.seed();
  std::vector<TrialReport> reports;
  reports.push_back(verify_unique_count(gamma, p.integer("unique_theta"), p.integer("unique_trials"), seed, threads));
  reports.push_back(verify_max_bound(gamma, p.integer("max_theta"), p.integer("max_n"), p.integer("max_trials"),
                                     seed, threads));
  reports.push_back(verify_alternation_bound(gamma, p.integer("alt_theta"), p.integer("alt_n_min"),
                                             p.integer("alt_trials"), seed, threads));
  rec.artifact("reports.csv", reports_csv(reports));

  TheoremEventParams event;
  event.r = p.integer("event_r");
  event.s = p.integer("event_s");
  event.p = p.real("event_p");
  event.q = p.integer("event_q");
  event.hidden_product = p.integer("event_prod");
  event.gamma = gamma;
  const auto paper = verify_theorem_event(event, p.integer("event_trials"), seed, threads);
  event.C = p.real("event_C");
  const auto surrogate = verify_theorem_event(event, p.integer("event_trials"), seed, threads);
  rec.artifact("theorem_event.csv", reports_csv({paper, surrogate}));

  nlohmann::json doc;
  doc["reports"] = nlohmann::json::array();
  for (const auto& r : reports) doc["reports"].push_back(report_to_json(r));
  doc["theorem_event"] = {report_to_json(paper), report_to_json(surrogate)};
  rec.artifact("reports.json", doc.dump(2) + "\n");

  const char* ids[] = {"unique-count-bound", "max-index-bound", "alternation-bound"};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    rec.claim(ids[i], to_string(r.verdict),
              r.params + ": empirical " + fmt(r.empirical) + " vs bound " + fmt(r.bound) + " (slack " + fmt(r.slack) +
                  ", " + std::to_string(r.trials) + " trials)");
  }
  rec.claim("theorem-sample-event", to_string(paper.verdict), paper.note);
  rec.claim("theorem-event-surrogate", to_string(surrogate.verdict),
            surrogate.params + ": both conjuncts in " + fmt(surrogate.empirical) + " of trials; " + surrogate.note);
  return std::move(rec.result);
}

RunResult run_adversary_command(const ExperimentConfig& config) {
  const Params p(config, "adversary");
  Recorder rec("adversary");
  AdversaryParams params;
  params.a = p.rational("a");
  params.kappa = p.rational("kappa");
  params.r = static_cast<int>(p.integer("r"));
  params.dims = p.dims("dims");
  params.cost = parse_cost_kind(p.text("cost"));
  params.eps = p.rational("eps");
  params.norm = parse_norm(p.text("norm"));
  params.query_budget = p.integer("query_budget");
  validate(params);
  const auto solvers = parse_solvers(p.text("solver"));
  const auto seeds = p.integer("seeds");
  if (seeds < 1) throw PreconditionError("seeds must be >= 1");

  struct Job {
    std::string solver;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& name : solvers) {
    for (std::int64_t i = 0; i < seeds; ++i) jobs.push_back({name, config.seed() + static_cast<std::uint64_t>(i)});
  }
  std::vector<AdversaryRun> runs(jobs.size());
  parallel_for(static_cast<std::int64_t>(jobs.size()), config.threads(), [&](std::int64_t i, int) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    auto solver = make_solver(job.solver, job.seed);
    runs[static_cast<std::size_t>(i)] = run_adversary(*solver, params);
  });

  std::ostringstream csv;
  csv << "solver,seed,halted,queries,max_precision,chosen_delta,output_error,distance_lower_bound,threshold,"
         "consistent,meets_threshold\n";
  bool all_meet = true, all_consistent = true;
  Rational weakest = 1;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& v = runs[i].verdict;
    rec.artifact("transcript_" + jobs[i].solver + "_" + std::to_string(jobs[i].seed) + ".txt",
                 transcript_text(runs[i]));
    csv << jobs[i].solver << ',' << jobs[i].seed << ',' << v.halted << ',' << runs[i].transcript.entries.size() << ','
        << v.max_precision << ',' << to_string(v.chosen_delta) << ',' << to_string(v.output_error) << ','
        << (v.infinite_distance ? std::string("inf") : to_string(v.distance_lower_bound)) << ','
        << to_string(v.threshold) << ',' << v.consistent << ',' << v.meets_threshold << '\n';
    all_meet = all_meet && v.meets_threshold;
    all_consistent = all_consistent && v.consistent;
    if (!v.infinite_distance) weakest = std::min(weakest, v.distance_lower_bound);
  }
  rec.artifact("verdicts.csv", csv.str());
  const Rational threshold = Rational(1, 4) - 3 * eps_hat(params) / 4;
  rec.claim("breakdown-lower-bound", Recorder::status(all_meet),
            std::to_string(runs.size()) + " runs; smallest distance lower bound " + to_string(weakest) +
                " against 1/4 - 3 eps_hat/4 = " + to_string(threshold) + " in " + to_string(params.norm));
  rec.claim("oracle-consistency", Recorder::status(all_consistent),
            "every served answer replayed against delta = 0 and the chosen delta = 4^-n");
  return std::move(rec.result);
}

std::string claims_tsv(const std::vector<Claim>& claims) {
  std::ostringstream out;
  for (const auto& c : claims) out << c.id << '\t' << c.status << '\t' << c.source << '\t' << c.detail << '\n';
  return out.str();
}

const std::vector<std::pair<std::string, std::string>>& known_claims() {
  static const std::vector<std::pair<std::string, std::string>> list = {
      {"separation-and-stability", "grid points are well separated and f_a is constant near each"},
      {"matcher-exactness", "the unstable matcher equals f_a on every grid point"},
      {"stable-classifier-exactness", "the stable classifier equals f_a on the first K grid points"},
      {"universal-perturbation", "one perturbation of support <= 2 flips every even grid point"},
      {"stable-classifier-robustness", "the stable classifier keeps every label within eps_rad"},
      {"trained-accuracy", "gradient descent reaches full train and validation accuracy"},
      {"accurate-then-vulnerable", "every accurate trained net has a universal perturbation"},
      {"line-misclassification-guarantee", "the collapse extractor certifies misclassified line points"},
      {"unique-count-bound", "P(N >= c1 theta^(1/gamma)) bound"},
      {"max-index-bound", "P(max S <= n) bound"},
      {"alternation-bound", "conditional alternation bound"},
      {"theorem-sample-event", "sample event at the theorem's constant"},
      {"theorem-event-surrogate", "sample event at a surrogate constant"},
      {"breakdown-lower-bound", "every solver is >= 1/4 - 3 eps_hat/4 from a solution set"},
      {"oracle-consistency", "served answers fit both indistinguishable instances"},
  };
  return list;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

}  // namespace

std::string ExperimentConfig::command() const { return lookup(*this, "experiment", "command"); }
std::uint64_t ExperimentConfig::seed() const { return std::stoull(lookup(*this, "experiment", "seed")); }
fs::path ExperimentConfig::out_dir() const { return lookup(*this, "experiment", "out"); }
std::string ExperimentConfig::preset() const { return lookup(*this, "experiment", "preset"); }
int ExperimentConfig::threads() const {
  const int n = std::stoi(lookup(*this, "experiment", "threads"));
  return n > 0 ? n : default_threads();
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"construct", "attack", "train", "montecarlo", "adversary", "full-report"};
  return names;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : presets()) out.push_back(name);
    return out;
  }();
  return names;
}

void validate(const ExperimentConfig& config) {
  for (const auto& [section, body] : config.tree) {
    if (!is_section(section)) throw SchemaError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      const KeySpec* spec = find_key(section, key);
      if (!spec) throw SchemaError("unknown key " + section + "." + key);
      check_value(section + "." + key, *spec, value.data());
    }
  }
  const auto version = config.tree.get<std::string>("experiment.schema", std::to_string(kSchemaVersion));
  if (version != std::to_string(kSchemaVersion)) {
    throw SchemaError("schema version " + version + " is not supported (expected " + std::to_string(kSchemaVersion) +
                      ")");
  }
  if (!presets().count(config.preset())) throw SchemaError("unknown preset '" + config.preset() + "'");
  if (std::stoll(lookup(config, "experiment", "seed")) < 0) throw SchemaError("experiment.seed must be >= 0");
}

ExperimentConfig parse_config(const std::string& ini_text) {
  ExperimentConfig config;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, config.tree);
  } catch (const pt::ini_parser_error& e) {
    throw SchemaError(std::string("config does not parse: ") + e.what());
  }
  for (const auto& [key, value] : config.tree) {
    if (value.empty() && !value.data().empty()) throw SchemaError("key " + key + " outside any section");
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void set_value(ExperimentConfig& config, const std::string& dotted_key, const std::string& value) {
  const std::string full = dotted_key.find('.') == std::string::npos ? "experiment." + dotted_key : dotted_key;
  config.tree.put(pt::ptree::path_type(full, '.'), value);
  validate(config);
}

std::string effective_config_ini(const ExperimentConfig& config) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, keys] : schema()) {
    out << (first ? "" : "\n") << '[' << section << "]\n";
    first = false;
    for (const auto& spec : keys) {
      const std::string key = spec.key;
      if (section == "experiment" && (key == "out" || key == "threads")) continue;
      out << key << " = " << lookup(config, section, key) << '\n';
    }
  }
  return out.str();
}

std::string schema_text() {
  std::ostringstream out;
  out << "schema " << kSchemaVersion << '\n';
  for (const auto& [section, keys] : schema()) {
    out << '[' << section << "]\n";
    for (const auto& spec : keys) out << "  " << spec.key << " = " << spec.fallback << '\n';
  }
  out << "presets:";
  for (const auto& name : preset_names()) out << ' ' << name;
  out << '\n';
  return out.str();
}

RunResult execute(const ExperimentConfig& config) {
  validate(config);
  const std::string command = config.command();
  if (command == "full-report") {
    RunResult all;
    for (const auto& sub : command_names()) {
      if (sub == "full-report") continue;
      ExperimentConfig child = config;
      child.tree.put("experiment.command", sub);
      RunResult part = execute(child);
      for (auto& [name, contents] : part.artifacts) all.artifacts[sub + "/" + name] = std::move(contents);
      all.artifacts[sub + "/claims.tsv"] = claims_tsv(part.claims);
      all.claims.insert(all.claims.end(), part.claims.begin(), part.claims.end());
    }
    all.exit_code = std::any_of(all.claims.begin(), all.claims.end(), [](const Claim& c) { return c.status == "fail"; });
    return all;
  }
  RunResult result;
  if (command == "construct") result = run_construct(config);
  else if (command == "attack") result = run_attack(config);
  else if (command == "train") result = run_train(config);
  else if (command == "montecarlo") result = run_montecarlo(config);
  else if (command == "adversary") result = run_adversary_command(config);
  else throw SchemaError("unknown command '" + command + "'");
  result.artifacts["claims.tsv"] = claims_tsv(result.claims);
  result.artifacts["config.ini"] = effective_config_ini(config);
  result.exit_code =
      std::any_of(result.claims.begin(), result.claims.end(), [](const Claim& c) { return c.status == "fail"; });
  return result;
}

RunResult run(const ExperimentConfig& config) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result = execute(config);
  const fs::path out = config.out_dir();
  for (const auto& [name, contents] : result.artifacts) write_file(out / name, contents);
  if (config.command() == "full-report") {
    result.artifacts["config.ini"] = effective_config_ini(config);
    write_file(out / "config.ini", result.artifacts["config.ini"]);
    result.artifacts["summary.txt"] = emit_report(out);
    write_file(out / "summary.txt", result.artifacts["summary.txt"]);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::json manifest;
  manifest["command"] = config.command();
  manifest["seed"] = config.seed();
  manifest["threads"] = config.threads();
  manifest["preset"] = config.preset();
  manifest["schema"] = kSchemaVersion;
  std::ostringstream echo;
  pt::write_ini(echo, config.tree);
  manifest["config_file"] = echo.str();
  manifest["config_effective"] = effective_config_ini(config);
  manifest["versions"] = {{"advlab", "0.1.0"},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"boost", BOOST_LIB_VERSION},
                          {"compiler", __VERSION__}};
  manifest["started_utc"] = started;
  manifest["finished_utc"] = utc_now();
  manifest["wall_seconds"] = wall;
  manifest["exit_code"] = result.exit_code;
  manifest["artifacts"] = nlohmann::json::array();
  for (const auto& [name, _] : result.artifacts) manifest["artifacts"].push_back(name);
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

std::string emit_report(const fs::path& dir) {
  std::map<std::string, Claim> found;
  std::vector<fs::path> files;
  if (fs::exists(dir / "claims.tsv")) files.push_back(dir / "claims.tsv");
  for (const auto& sub : command_names()) {
    if (fs::exists(dir / sub / "claims.tsv")) files.push_back(dir / sub / "claims.tsv");
  }
  for (const auto& file : files) {
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) {
      std::stringstream row(line);
      Claim c;
      std::getline(row, c.id, '\t');
      std::getline(row, c.status, '\t');
      std::getline(row, c.source, '\t');
      std::getline(row, c.detail);
      if (!c.id.empty()) found[c.id] = c;
    }
  }
  std::ostringstream out;
  out << "advlab summary\n\n";
  out << std::left << std::setw(34) << "claim" << std::setw(26) << "status" << std::setw(12) << "source"
      << "detail\n";
  std::size_t run = 0, failed = 0;
  for (const auto& [id, description] : known_claims()) {
    auto it = found.find(id);
    std::string status = "not run", source = "-", detail = description;
    if (it != found.end()) {
      ++run;
      status = it->second.status == "infeasible" ? "infeasible-at-desk-scale" : it->second.status;
      source = it->second.source;
      detail = it->second.detail;
      failed += it->second.status == "fail";
    }
    out << std::setw(34) << id << std::setw(26) << status << std::setw(12) << source << detail << '\n';
  }
  out << '\n' << run << " of " << known_claims().size() << " claims run, " << failed << " failed\n";
  return out.str();
}

}  // namespace advlab::cli
