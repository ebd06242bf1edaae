#include "advlab/cost.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace advlab {

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::cross_entropy: return "cross_entropy";
    case CostKind::mean_square: return "mean_square";
    case CostKind::root_mean_square: return "root_mean_square";
    case CostKind::mean_absolute: return "mean_absolute";
  }
  return "unknown";
}

CostKind parse_cost_kind(std::string_view text) {
  if (text == "cross_entropy") return CostKind::cross_entropy;
  if (text == "mean_square") return CostKind::mean_square;
  if (text == "root_mean_square") return CostKind::root_mean_square;
  if (text == "mean_absolute") return CostKind::mean_absolute;
  throw std::invalid_argument("unknown cost kind '" + std::string(text) + "'");
}

namespace {

void check_lengths(const Eigen::Ref<const Eigen::VectorXd>& v, const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (v.size() != w.size() || v.size() == 0) {
    throw std::invalid_argument("cost vectors must have the same positive length");
  }
}

}  // namespace

double cost_eval(CostKind kind, const Eigen::Ref<const Eigen::VectorXd>& v,
                 const Eigen::Ref<const Eigen::VectorXd>& w) {
  check_lengths(v, w);
  const auto r = static_cast<double>(v.size());
  switch (kind) {
    case CostKind::cross_entropy: {
      double total = 0.0;
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (!(v(j) >= 0.0 && v(j) <= 1.0)) return std::numeric_limits<double>::infinity();
        if (w(j) != 0.0) total += w(j) * std::log(v(j));
        if (w(j) != 1.0) total += (1.0 - w(j)) * std::log(1.0 - v(j));
      }
      return -total / r;
    }
    case CostKind::mean_square: return (w - v).squaredNorm() / r;
    case CostKind::root_mean_square: return (w - v).norm() / r;
    case CostKind::mean_absolute: return (w - v).lpNorm<1>() / r;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Eigen::VectorXd cost_gradient(CostKind kind, const Eigen::Ref<const Eigen::VectorXd>& v,
                              const Eigen::Ref<const Eigen::VectorXd>& w) {
  check_lengths(v, w);
  const auto r = static_cast<double>(v.size());
  Eigen::VectorXd diff = v - w;
  switch (kind) {
    case CostKind::cross_entropy: {
      Eigen::VectorXd g(v.size());
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        double term = 0.0;
        if (w(j) != 0.0) term -= w(j) / v(j);
        if (w(j) != 1.0) term += (1.0 - w(j)) / (1.0 - v(j));
        g(j) = term / r;
      }
      return g;
    }
    case CostKind::mean_square: return 2.0 * diff / r;
    case CostKind::root_mean_square: {
      const double norm = diff.norm();
      if (norm == 0.0) return Eigen::VectorXd::Zero(v.size());
      return diff / (norm * r);
    }
    case CostKind::mean_absolute:
      return diff.unaryExpr([r](double x) { return (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0)) / r; });
  }
  return Eigen::VectorXd::Constant(v.size(), std::numeric_limits<double>::quiet_NaN());
}

double cf_eps_bound(CostKind kind, int r, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("cf_eps_bound requires eps > 0");
  if (r < 1) throw std::invalid_argument("cf_eps_bound requires r >= 1");
  const double re = static_cast<double>(r) * eps;
  switch (kind) {
    case CostKind::mean_square: return std::sqrt(re);    // |.|_inf^2 <= |.|_2^2 = r R
    case CostKind::root_mean_square: return re;          // |.|_inf <= |.|_2 = r R
    case CostKind::mean_absolute: return re;             // |.|_inf <= |.|_1 = r R
    case CostKind::cross_entropy: return -std::expm1(-re);  // each -log q_j <= r R
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace advlab
