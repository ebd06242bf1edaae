#include "advlab/constructions.hpp"

#include <cmath>
#include <sstream>

namespace advlab {

std::string to_string(Norm norm) {
  switch (norm) {
    case Norm::l1: return "l1";
    case Norm::l2: return "l2";
    case Norm::linf: return "linf";
  }
  return "unknown";
}

Norm parse_norm(std::string_view text) {
  if (text == "l1") return Norm::l1;
  if (text == "l2") return Norm::l2;
  if (text == "linf") return Norm::linf;
  throw std::invalid_argument("unknown norm '" + std::string(text) + "'");
}

double vector_norm(const VectorQ& v, Norm norm) {
  const Eigen::VectorXd x = v.unaryExpr([](const Rational& q) { return to_double(q); });
  switch (norm) {
    case Norm::l1: return x.lpNorm<1>();
    case Norm::l2: return x.norm();
    case Norm::linf: return x.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

bool norm_within(const VectorQ& v, Norm norm, const Rational& bound, bool strict) {
  Rational value = 0;
  Rational limit = bound;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    switch (norm) {
      case Norm::l1: value += abs(v(i)); break;
      case Norm::l2: value += v(i) * v(i); break;
      case Norm::linf: value = std::max(value, abs(v(i))); break;
    }
  }
  if (norm == Norm::l2) {
    if (bound < 0) return false;
    limit = bound * bound;
  }
  return strict ? value < limit : value <= limit;
}

ReluNetwork<Rational> build_unstable_matcher(const std::vector<int>& dims, const Rational& delta) {
  if (delta <= 0) throw PreconditionError("the matcher needs delta > 0");
  if (dims.size() < 3) throw PreconditionError("the matcher needs L >= 2");
  if (dims.front() < 2) throw PreconditionError("the matcher needs d >= 2");
  ReluNetwork<Rational> net;
  net.dims = dims;
  for (std::size_t l = 1; l < dims.size(); ++l) {
    MatrixQ a = MatrixQ::Zero(dims[l], dims[l - 1]);
    if (l == 1) {
      a(0, 1) = 1 / delta;
    } else {
      a(0, 0) = 1;
    }
    net.layers.push_back({std::move(a), VectorQ::Zero(dims[l])});
  }
  require_valid(net);
  return net;
}

void validate_alphas(const AlphaSequence& alphas) {
  const auto& v = alphas.values;
  if (v.empty() || v.size() % 2 != 0) throw InvariantViolation("alpha sequence needs a positive even length");
  if (!(v.front() < 1) || !(v.back() > 0)) throw InvariantViolation("alphas must lie in (0, 1)");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) {
      throw InvariantViolation("alphas must strictly decrease, fails at index " + std::to_string(i + 1));
    }
  }
}

ReluNetwork<Rational> build_stable_classifier(const AlphaSequence& alphas, int d) {
  validate_alphas(alphas);
  if (d < 1) throw PreconditionError("input dimension must be positive");
  std::vector<Rational> a = alphas.values;
  if (a.size() % 4 != 0) {
    const Rational last = a.back();
    a.push_back(last / 2);
    a.push_back(last / 4);
  }
  const auto K = static_cast<int>(a.size());
  a.push_back(0);  // alpha_{K+1}
  auto alpha = [&a](int k) -> const Rational& { return a[static_cast<std::size_t>(k - 1)]; };

  MatrixQ hidden = MatrixQ::Zero(K, d);
  VectorQ bias(K);
  MatrixQ out(1, K);
  for (int l = 1; l <= K / 4; ++l) {
    const int row = 4 * (l - 1);
    const int ks[4] = {4 * l - 2, 4 * l - 1, 4 * l, 4 * l + 1};
    const Rational up = 1 / (alpha(ks[0]) - alpha(ks[1]));
    const Rational down = 1 / (alpha(ks[2]) - alpha(ks[3]));
    const Rational weights[4] = {up, -up, -down, down};
    for (int u = 0; u < 4; ++u) {
      hidden(row + u, 0) = -1;
      bias(row + u) = alpha(ks[u]);
      out(0, row + u) = weights[u];
    }
  }
  ReluNetwork<Rational> net;
  net.dims = {d, K, 1};
  net.layers.push_back({std::move(hidden), std::move(bias)});
  net.layers.push_back({std::move(out), VectorQ::Zero(1)});
  require_valid(net);
  return net;
}

AlphaSequence stable_alphas(const ProblemInstance& inst, std::int64_t K, const Rational& eps_rad) {
  validate(inst);
  if (K < 1) throw PreconditionError("stable_alphas needs K >= 1");
  if (eps_rad <= 0) throw PreconditionError("stable_alphas needs eps_rad > 0");
  AlphaSequence out;
  for (std::int64_t k = 1; k <= K; ++k) {
    const Rational x = grid_coordinate(inst, k);
    out.values.push_back(x + eps_rad);
    out.values.push_back(x - eps_rad);
  }
  // First pair whose intervals touch, if any.
  for (std::int64_t k = 1; k < K; ++k) {
    if (!(out.values[2 * k - 1] > out.values[2 * k])) {
      throw PreconditionError("intervals around x^" + std::to_string(k) + " and x^" + std::to_string(k + 1) +
                              " overlap (k = " + std::to_string(k) + ")");
    }
  }
  const Rational kk(K);
  const Rational gap = 1 / (2 * (kk + 1 - inst.kappa) * (kk - inst.kappa));
  if (!(2 * eps_rad < gap)) {
    throw PreconditionError("2 eps_rad must be below 1/(2(K+1-kappa)(K-kappa)) = " + to_string(gap) +
                            " (k = " + std::to_string(K) + ")");
  }
  if (!(out.values.front() < 1)) throw PreconditionError("alpha_1 >= 1 (k = 1)");
  if (!(out.values.back() > 0)) throw PreconditionError("alpha_2K <= 0 (k = " + std::to_string(K) + ")");
  validate_alphas(out);
  return out;
}

std::string to_string(PerturbationFamily family) {
  return family == PerturbationFamily::even_case ? "even-case" : "odd-case";
}

PerturbationFamily parse_family(std::string_view text) {
  if (text == "even-case") return PerturbationFamily::even_case;
  if (text == "odd-case") return PerturbationFamily::odd_case;
  throw std::invalid_argument("unknown perturbation family '" + std::string(text) + "'");
}

VectorQ Perturbation::vector() const {
  VectorQ v = VectorQ::Constant(dim, Rational(0));
  v(0) = omega;
  if (family == PerturbationFamily::even_case) v(1) = -delta;
  return v;
}

int Perturbation::support_size() const {
  int n = omega != 0 ? 1 : 0;
  if (family == PerturbationFamily::even_case && delta != 0) ++n;
  return n;
}

Perturbation make_perturbation(PerturbationFamily family, const Rational& omega, const Rational& delta, int dim) {
  if (omega < 0) throw PreconditionError("omega must be >= 0");
  if (dim < 2) throw PreconditionError("perturbations need d >= 2");
  return Perturbation{family, omega, delta, dim};
}

AttackReport verify_attack(const ReluNetwork<Rational>& net, const MonotoneMap& g, const LabeledMultiset& data,
                           const Perturbation& eta, const ProblemInstance& inst, Norm norm) {
  require_valid(net);
  const VectorQ shift = eta.vector();
  AttackReport report;
  report.norm = norm;
  report.norm_value = vector_norm(shift, norm);
  report.support_size = eta.support_size();
  report.rows.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const VectorQ& x = data.points[i];
    const VectorQ moved = x + shift;
    AttackRow row{i, i < data.indices.size() ? data.indices[i] : 0, data.labels[i], eval_network(net, x), 0,
                  std::nullopt, 0.0, false, false};
    if (moved(0) <= 0 || moved(0) > 1) {
      row.domain_exit = true;
      ++report.domain_exits;
      report.rows.push_back(std::move(row));
      continue;
    }
    row.label = classify(inst, moved);
    row.perturbed_output = eval_network(net, moved);
    if (g.exact()) {
      row.error = abs(Rational(g(row.perturbed_output) - row.label));
      row.error_approx = to_double(*row.error);
    } else {
      row.error_approx = std::abs(g(to_double(row.perturbed_output)) - row.label);
    }
    row.flipped = g.errs(row.perturbed_output, row.label);
    if (row.flipped) report.flipped.push_back(i);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string attack_csv(const AttackReport& report) {
  std::ostringstream out;
  out << "index,k,label,output,perturbed_output,error,flipped\n";
  for (const auto& row : report.rows) {
    out << row.index << ',' << row.k << ',' << row.label << ',' << to_string(row.output) << ',';
    if (row.domain_exit) {
      out << "domain_exit,,false\n";
      continue;
    }
    out << to_string(row.perturbed_output) << ',';
    if (row.error) {
      out << to_string(*row.error);
    } else {
      out << ScalarTraits<double>::to_text(row.error_approx);
    }
    out << ',' << (row.flipped ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace advlab
