#ifndef ADVLAB_COST_HPP_
#define ADVLAB_COST_HPP_

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace advlab {

enum class CostKind { cross_entropy, mean_square, root_mean_square, mean_absolute };

std::string to_string(CostKind kind);
CostKind parse_cost_kind(std::string_view text);

/// R(v, w) for network outputs v and targets w, both of length r >= 1.
///
///   cross_entropy     -(1/r) sum w log v + (1 - w) log(1 - v), +inf if some v_j is outside [0, 1]
///   mean_square       (1/r) |w - v|_2^2
///   root_mean_square  (1/r) |w - v|_2
///   mean_absolute     (1/r) |w - v|_1
///
/// Cross entropy uses 0 log 0 = 0, so R(w, w) = 0 for binary w.
double cost_eval(CostKind kind, const Eigen::Ref<const Eigen::VectorXd>& v,
                 const Eigen::Ref<const Eigen::VectorXd>& w);

/// dR/dv, same conventions as cost_eval. Entries may be infinite where the
/// cost is.
Eigen::VectorXd cost_gradient(CostKind kind, const Eigen::Ref<const Eigen::VectorXd>& v,
                              const Eigen::Ref<const Eigen::VectorXd>& w);

/// An eps_hat with R(v, w) <= eps  =>  |v - w|_inf <= eps_hat (binary w for
/// cross entropy).
double cf_eps_bound(CostKind kind, int r, double eps);

}  // namespace advlab

#endif  // ADVLAB_COST_HPP_
