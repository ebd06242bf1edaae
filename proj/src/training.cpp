#include "advlab/training.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "advlab/rng.hpp"

namespace advlab {

ReluNetwork<double> init_network(const std::vector<int>& dims, double scale, std::uint64_t seed) {
  if (dims.size() < 2) throw ShapeError("dims must list at least N_0 and N_L");
  Rng rng(stream_seed(seed, 0));
  ReluNetwork<double> net;
  net.dims = dims;
  for (std::size_t l = 1; l < dims.size(); ++l) {
    Eigen::MatrixXd a(dims[l], dims[l - 1]);
    Eigen::VectorXd b(dims[l]);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = uniform(rng, -scale, scale);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = uniform(rng, -scale, scale);
    net.layers.push_back({std::move(a), std::move(b)});
  }
  require_valid(net);
  return net;
}

Eigen::MatrixXd design_matrix(const LabeledMultiset& data) {
  if (data.empty()) return {};
  Eigen::MatrixXd X(data.points.front().size(), static_cast<Eigen::Index>(data.size()));
  for (std::size_t j = 0; j < data.size(); ++j) {
    X.col(static_cast<Eigen::Index>(j)) = data.points[j].unaryExpr([](const Rational& q) { return to_double(q); });
  }
  return X;
}

Eigen::VectorXd label_vector(const LabeledMultiset& data) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(data.size()));
  for (std::size_t j = 0; j < data.size(); ++j) w(static_cast<Eigen::Index>(j)) = data.labels[j];
  return w;
}

namespace {

double g_derivative(const MonotoneMap& g, double y) {
  switch (g.kind()) {
    case MonotoneMap::Kind::identity: return 1.0;
    case MonotoneMap::Kind::affine: return g(1.0) - g(0.0);
    case MonotoneMap::Kind::sigmoid: {
      const double s = g(y);
      return s * (1.0 - s);
    }
    default: break;
  }
  throw PreconditionError("training needs a differentiable g (identity, affine or sigmoid), got " + g.spec());
}

}  // namespace

CostGradient cost_and_gradient(const ReluNetwork<double>& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                               CostKind cost, const MonotoneMap& g) {
  const std::size_t L = net.layers.size();
  std::vector<Eigen::MatrixXd> pre(L), act(L + 1);
  act[0] = X;
  for (std::size_t l = 0; l < L; ++l) {
    pre[l] = (net.layers[l].weights * act[l]).colwise() + net.layers[l].bias;
    act[l + 1] = l + 1 < L ? pre[l].cwiseMax(0.0) : pre[l];
  }
  const Eigen::VectorXd y = pre[L - 1].row(0).transpose();
  const Eigen::VectorXd v = y.unaryExpr([&g](double t) { return g(t); });

  CostGradient out;
  out.cost = cost_eval(cost, v, w);
  Eigen::VectorXd dy;
  if (cost == CostKind::cross_entropy && g.kind() == MonotoneMap::Kind::sigmoid) {
    dy = (v - w) / static_cast<double>(v.size());
  } else {
    const Eigen::VectorXd dv = cost_gradient(cost, v, w);
    dy = dv.binaryExpr(y, [&g](double d, double t) { return d * g_derivative(g, t); });
  }

  out.dA.resize(L);
  out.db.resize(L);
  Eigen::MatrixXd delta = dy.transpose();
  for (std::size_t l = L; l-- > 0;) {
    out.dA[l] = delta * act[l].transpose();
    out.db[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = net.layers[l].weights.transpose() * delta;
      delta = delta.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return out;
}

TrainOutcome train(const std::vector<int>& dims, const LabeledMultiset& data, const LabeledMultiset& val,
                   const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw PreconditionError("learning_rate must be > 0");
  if (cfg.epochs < 1) throw PreconditionError("epochs must be >= 1");
  if (data.empty()) throw PreconditionError("training data must be non-empty");
  if (dims.empty() || dims.front() != static_cast<int>(data.points.front().size())) {
    throw ShapeError("dims[0] must equal the point dimension");
  }
  ReluNetwork<double> net = init_network(dims, cfg.init_scale, cfg.seed);
  const Eigen::MatrixXd X = design_matrix(data);
  const Eigen::VectorXd w = label_vector(data);

  TrainOutcome out;
  out.net = net;
  out.final_cost = std::numeric_limits<double>::infinity();
  out.history.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const CostGradient grad = cost_and_gradient(net, X, w, cfg.cost, cfg.g);
    out.history.push_back(grad.cost);
    if (!std::isfinite(grad.cost)) {
      out.diverged = true;
      out.history.resize(static_cast<std::size_t>(cfg.epochs), std::numeric_limits<double>::quiet_NaN());
      break;
    }
    if (grad.cost < out.final_cost) {
      out.final_cost = grad.cost;
      out.best_epoch = epoch;
      out.net = net;
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      net.layers[l].weights -= cfg.learning_rate * grad.dA[l];
      net.layers[l].bias -= cfg.learning_rate * grad.db[l];
    }
  }
  out.train_accuracy = accuracy(out.net, cfg.g, data);
  out.val_accuracy = val.empty() ? 1.0 : accuracy(out.net, cfg.g, val);
  return out;
}

GradientCheck check_gradient(const ReluNetwork<double>& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                             CostKind cost, const MonotoneMap& g, double step, double floor) {
  const CostGradient analytic = cost_and_gradient(net, X, w, cost, g);
  GradientCheck check;
  ReluNetwork<double> probe = net;
  auto compare = [&](double& param, double exact) {
    const double saved = param;
    param = saved + step;
    const double up = cost_and_gradient(probe, X, w, cost, g).cost;
    param = saved - step;
    const double down = cost_and_gradient(probe, X, w, cost, g).cost;
    param = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double err = std::abs(exact - numeric);
    check.max_abs_error = std::max(check.max_abs_error, err);
    check.max_rel_error = std::max(check.max_rel_error, err / std::max({std::abs(exact), std::abs(numeric), floor}));
    ++check.parameters;
  };
  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto& layer = probe.layers[l];
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) compare(layer.weights.data()[i], analytic.dA[l].data()[i]);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) compare(layer.bias(i), analytic.db[l](i));
  }
  return check;
}

double min_preactivation_margin(const ReluNetwork<double>& net, const Eigen::MatrixXd& X) {
  double margin = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd h = X;
  for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
    const Eigen::MatrixXd z = (net.layers[l].weights * h).colwise() + net.layers[l].bias;
    margin = std::min(margin, z.cwiseAbs().minCoeff());
    h = z.cwiseMax(0.0);
  }
  return margin;
}

std::string history_csv(const TrainOutcome& outcome) {
  std::ostringstream out;
  out << "epoch,cost\n";
  for (std::size_t e = 0; e < outcome.history.size(); ++e) {
    out << e << ',' << ScalarTraits<double>::to_text(outcome.history[e]) << '\n';
  }
  return out.str();
}

VulnerabilityResult vulnerability_run(const VulnerabilityConfig& cfg) {
  VulnerabilityResult res;
  const std::uint64_t seed = cfg.train.seed;
  res.seed = seed;
  res.train_set = sample_dataset(cfg.inst, cfg.gamma, cfg.r, stream_seed(seed, 1));
  res.val_set = sample_dataset(cfg.inst, cfg.gamma, cfg.s, stream_seed(seed, 2));
  res.outcome = train(cfg.dims, res.train_set, res.val_set, cfg.train);
  res.attack = universal_attack_search(res.outcome.net, cfg.train.g, res.train_set, cfg.inst, cfg.budget, cfg.norm);

  std::set<std::int64_t> distinct(res.train_set.indices.begin(), res.train_set.indices.end());
  distinct.insert(res.val_set.indices.begin(), res.val_set.indices.end());
  std::vector<VectorQ> line;
  std::vector<int> labels;
  for (std::int64_t k : distinct) {
    VectorQ x = grid_point_at(cfg.inst, k, 0);
    const int label = classify(cfg.inst, x);
    if (!labels.empty() && labels.back() == label) continue;
    line.push_back(std::move(x));
    labels.push_back(label);
  }
  res.alternations = static_cast<std::int64_t>(labels.size()) - 1;
  const auto product = res.outcome.net.hidden_product();
  res.certified_floor = res.alternations / (6 * product);
  if (static_cast<std::int64_t>(line.size()) >= 3 * product) {
    res.extracted = extract_misclassified(res.outcome.net.cast<Rational>(), cfg.train.g, line, labels);
  }
  return res;
}

std::string vulnerability_csv(const std::vector<VulnerabilityResult>& results) {
  std::ostringstream out;
  out << "seed,train_accuracy,val_accuracy,final_cost,diverged,flips,family,omega,alternations,certified_floor,"
         "extracted\n";
  auto num = [](double x) { return ScalarTraits<double>::to_text(x); };
  for (const auto& r : results) {
    out << r.seed << ',' << num(r.outcome.train_accuracy) << ',' << num(r.outcome.val_accuracy) << ','
        << num(r.outcome.final_cost) << ',' << (r.outcome.diverged ? 1 : 0) << ',' << r.attack.flips << ','
        << to_string(r.attack.best.family) << ',' << to_string(r.attack.best.omega) << ',' << r.alternations << ','
        << r.certified_floor << ',' << (r.extracted ? std::to_string(r.extracted->indices.size()) : std::string())
        << '\n';
  }
  return out.str();
}

}  // namespace advlab
