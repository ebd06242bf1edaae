#include "advlab/problem.hpp"

#include <algorithm>
#include <cmath>

#include "advlab/rng.hpp"
#include "advlab/zeta.hpp"

namespace advlab {

void validate(const ProblemInstance& inst) {
  if (inst.a < Rational(1, 2) || inst.a > 1) throw DomainError("a must lie in [1/2, 1], got " + to_string(inst.a));
  if (inst.kappa < Rational(1, 4) || inst.kappa > Rational(3, 4)) {
    throw DomainError("kappa must lie in [1/4, 3/4], got " + to_string(inst.kappa));
  }
  if (inst.delta < 0) throw DomainError("delta must be >= 0, got " + to_string(inst.delta));
  if (inst.dim < 2) throw DomainError("d must be >= 2, got " + std::to_string(inst.dim));
}

int classify_first(const Rational& a, const Rational& x1) {
  if (x1 <= 0 || x1 > 1) throw DomainError("f_a is only defined for x_1 in (0, 1], got " + to_string(x1));
  Integer c = ceil(Rational(a / x1));
  return boost::multiprecision::bit_test(c, 0) ? 1 : 0;
}

int classify(const ProblemInstance& inst, const VectorQ& x) {
  if (x.size() < 1) throw ShapeError("classify needs a non-empty point");
  return classify_first(inst.a, x(0));
}

Rational grid_coordinate(const ProblemInstance& inst, std::int64_t k) {
  if (k < 1) throw PreconditionError("grid index k must be >= 1");
  return inst.a / (Rational(k) + 1 - inst.kappa);
}

VectorQ grid_point_at(const ProblemInstance& inst, std::int64_t k, const Rational& delta) {
  VectorQ x = VectorQ::Constant(inst.dim, Rational(0));
  x(0) = grid_coordinate(inst, k);
  if (k % 2 == 0) x(1) = delta;
  return x;
}

VectorQ grid_point(const ProblemInstance& inst, std::int64_t k) { return grid_point_at(inst, k, inst.delta); }

Rational separation_radius(std::int64_t n) {
  if (n < 1) throw PreconditionError("separation_radius requires n >= 1");
  Integer m(n);
  return Rational(Integer(1), (4 * m + 3) * (4 * m + 4));
}

double theorem_radius(double C, double n) {
  if (!(C > 0.0) || !(n >= 1.0)) throw PreconditionError("theorem_radius requires C > 0 and n >= 1");
  return std::pow(C * n, -4.0);
}

double unique_count_constant(double gamma) { return (1.0 - std::exp(-zeta_normalizer(gamma))) / 2.0; }

double max_bound_constant(double gamma) { return zeta_normalizer(gamma) / (gamma - 1.0); }

TheoremConstants theorem_constant() {
  TheoremConstants k{};
  k.zeta_normalizer = zeta_normalizer(1.5);
  k.c1 = unique_count_constant(1.5);
  k.c2 = max_bound_constant(1.5);
  k.bound_unique = 64.0 * std::pow(k.c1, -6.0);
  k.bound_alternation = 200.0 * std::pow(std::log(8.0), 1.5) * std::pow(k.c1, -1.5);
  k.bound_max = 4.0 * std::pow(8.0 * k.c2, 2.0);
  k.C = std::max({k.bound_unique, k.bound_alternation, k.bound_max});
  return k;
}

namespace {

Rational linf_distance(const VectorQ& x, const VectorQ& y) {
  Rational best = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) best = std::max(best, abs(Rational(x(i) - y(i))));
  return best;
}

// ceil(a / y) is constant for y in (lo, hi) iff lo >= 0 and no breakpoint
// a/m (m >= 1) lies strictly inside; just left of a/m the value jumps to m+1.
bool ceil_constant_on(const Rational& a, const Rational& lo, const Rational& hi) {
  if (lo < 0) return false;
  Integer m = floor(Rational(a / hi)) + 1;  // smallest m with a/m < hi
  return !(Rational(a, Rational(m)) > lo);
}

}  // namespace

SeparationCheck is_well_separated(const ProblemInstance& inst, const std::vector<VectorQ>& points,
                                  const Rational& delta_sep) {
  SeparationCheck out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i](0) <= 0) throw PreconditionError("is_well_separated requires x_1 > 0");
    if (!ceil_constant_on(inst.a, points[i](0) - delta_sep, points[i](0) + delta_sep)) {
      out.ok = false;
      out.witness = SeparationWitness{SeparationWitness::Kind::unstable_point, i, i};
      return out;
    }
  }
  const Rational min_gap = 2 * delta_sep;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) continue;
      if (linf_distance(points[i], points[j]) < min_gap) {
        out.ok = false;
        out.witness = SeparationWitness{SeparationWitness::Kind::too_close, i, j};
        return out;
      }
    }
  }
  return out;
}

LabeledMultiset enumerate_dataset(const ProblemInstance& inst, std::int64_t first, std::int64_t last) {
  if (first < 1 || last < first) throw PreconditionError("enumerate_dataset requires 1 <= first <= last");
  LabeledMultiset data;
  data.provenance.kind = LabeledMultiset::Provenance::Kind::enumerated;
  data.provenance.k_first = first;
  data.provenance.k_last = last;
  for (std::int64_t k = first; k <= last; ++k) {
    data.points.push_back(grid_point(inst, k));
    data.labels.push_back(classify(inst, data.points.back()));
    data.indices.push_back(k);
  }
  return data;
}

LabeledMultiset sample_dataset(const ProblemInstance& inst, double gamma, std::int64_t theta, std::uint64_t seed) {
  validate(inst);
  if (theta < 1) throw PreconditionError("sample_dataset requires theta >= 1");
  ZetaDistribution dist(gamma);
  Rng rng(seed);
  LabeledMultiset data;
  data.provenance = {LabeledMultiset::Provenance::Kind::sampled, seed, theta, gamma, 0, 0};
  for (std::int64_t i = 0; i < theta; ++i) {
    const std::int64_t k = dist.sample(rng);
    data.points.push_back(grid_point(inst, k));
    data.labels.push_back(classify(inst, data.points.back()));
    data.indices.push_back(k);
  }
  return data;
}

nlohmann::json instance_to_json(const ProblemInstance& inst) {
  return {{"a", to_string(inst.a)}, {"kappa", to_string(inst.kappa)}, {"delta", to_string(inst.delta)}, {"d", inst.dim}};
}

ProblemInstance instance_from_json(const nlohmann::json& doc) {
  ProblemInstance inst;
  inst.a = parse_rational(doc.at("a").get<std::string>());
  inst.kappa = parse_rational(doc.at("kappa").get<std::string>());
  inst.delta = parse_rational(doc.at("delta").get<std::string>());
  inst.dim = doc.at("d").get<int>();
  validate(inst);
  return inst;
}

nlohmann::json dataset_to_json(const ProblemInstance& inst, const LabeledMultiset& data) {
  nlohmann::json doc;
  doc["instance"] = instance_to_json(inst);
  const auto& prov = data.provenance;
  if (prov.kind == LabeledMultiset::Provenance::Kind::sampled) {
    doc["provenance"] = {{"kind", "sampled"}, {"seed", prov.seed}, {"theta", prov.theta}, {"gamma", prov.gamma}};
  } else {
    doc["provenance"] = {{"kind", "enumerated"}, {"k_first", prov.k_first}, {"k_last", prov.k_last}};
  }
  doc["points"] = nlohmann::json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    nlohmann::json coords = nlohmann::json::array();
    for (Eigen::Index j = 0; j < data.points[i].size(); ++j) coords.push_back(to_string(data.points[i](j)));
    doc["points"].push_back({{"k", data.indices[i]}, {"x", std::move(coords)}, {"label", data.labels[i]}});
  }
  return doc;
}

LabeledMultiset dataset_from_json(const nlohmann::json& doc, ProblemInstance* inst_out) {
  ProblemInstance inst = instance_from_json(doc.at("instance"));
  LabeledMultiset data;
  const auto& prov = doc.at("provenance");
  if (prov.at("kind").get<std::string>() == "sampled") {
    data.provenance = {LabeledMultiset::Provenance::Kind::sampled, prov.at("seed").get<std::uint64_t>(),
                       prov.at("theta").get<std::int64_t>(), prov.at("gamma").get<double>(), 0, 0};
  } else {
    data.provenance.kind = LabeledMultiset::Provenance::Kind::enumerated;
    data.provenance.k_first = prov.at("k_first").get<std::int64_t>();
    data.provenance.k_last = prov.at("k_last").get<std::int64_t>();
  }
  for (const auto& entry : doc.at("points")) {
    const auto& coords = entry.at("x");
    VectorQ x(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t j = 0; j < coords.size(); ++j) x(static_cast<Eigen::Index>(j)) = parse_rational(coords[j].get<std::string>());
    const int label = entry.at("label").get<int>();
    if (label != classify(inst, x)) throw InvariantViolation("dataset label disagrees with f_a");
    data.points.push_back(std::move(x));
    data.labels.push_back(label);
    data.indices.push_back(entry.value("k", std::int64_t{0}));
  }
  if (inst_out) *inst_out = inst;
  return data;
}

}  // namespace advlab
