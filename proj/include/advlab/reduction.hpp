#ifndef ADVLAB_REDUCTION_HPP_
#define ADVLAB_REDUCTION_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "advlab/errors.hpp"
#include "advlab/monotone.hpp"
#include "advlab/network.hpp"

namespace advlab {

// Collapse of ReLU layers along a "decreasing line": points whose first
// coordinates strictly decrease and whose other coordinates vanish. Along
// such a line every unit changes sign at most once, so a layer of N units
// sees at most N + 1 sign patterns and is affine on each contiguous run.
//
// Templated on the scalar. Rational gives exact results; double is for
// timing only, since sign decisions are discontinuous.

/// Contiguous run [start, start + length) of the input points on which the
/// map equals M w + z.
template <typename T>
struct AffineSegment {
  std::size_t start = 0;
  std::size_t length = 0;
  Matrix<T> M;
  Vector<T> z;
};

/// sgn(x) = +1 for x >= 0, -1 otherwise, stored as true / false.
using SignPattern = std::vector<bool>;

inline std::string pattern_string(const SignPattern& pattern) {
  std::string out;
  for (bool plus : pattern) out += plus ? '+' : '-';
  return out;
}

template <typename T>
struct ReduceResult {
  Matrix<T> C;
  Vector<T> v;
  AffineSegment<T> segment;  // M = C, z = v
  SignPattern pattern;       // pattern on the segment
  int distinct_patterns = 0;
};

struct LayerTrace {
  int layer = 0;            // hidden layer whose ReLU was removed
  std::size_t start = 0;    // absolute index into the original points
  std::size_t length = 0;
  int units = 0;
  int distinct_patterns = 0;
  std::string pattern;
};

template <typename T>
struct CollapseResult {
  AffineSegment<T> segment;  // M is 1 x d, z has length 1
  std::vector<LayerTrace> trace;
};

namespace detail {

template <typename T>
void require_decreasing_line(const std::vector<Vector<T>>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& w = points[i];
    if (w.size() < 1) throw PreconditionError("line points must be non-empty vectors");
    for (Eigen::Index j = 1; j < w.size(); ++j) {
      if (w(j) != T(0)) {
        throw PreconditionError("point " + std::to_string(i) + " has a nonzero coordinate beyond the first");
      }
    }
    if (i > 0 && !(w(0) < points[i - 1](0))) {
      throw PreconditionError("first coordinates must strictly decrease (fails at point " + std::to_string(i) + ")");
    }
  }
}

}  // namespace detail

/// B rho(A alpha + z) = C alpha + v on a contiguous run S of R with
/// |S| >= |R| / (N + 1). Among longest constant-sign runs the earliest wins.
/// C is zero outside column 1. `offset` is added to the returned start.
template <typename T>
ReduceResult<T> reduce_layer(const Matrix<T>& B, const Matrix<T>& A, const Vector<T>& z,
                             const std::vector<Vector<T>>& R, std::size_t offset = 0) {
  const auto N = A.rows();
  if (B.cols() != N || z.size() != N) throw ShapeError("reduce_layer: B, A and z disagree on N");
  if (static_cast<Eigen::Index>(R.size()) <= N) {
    throw PreconditionError("reduce_layer needs |R| >= N + 1 (|R| = " + std::to_string(R.size()) +
                            ", N = " + std::to_string(N) + ")");
  }
  detail::require_decreasing_line(R);
  for (const auto& w : R) {
    if (w.size() != A.cols()) throw ShapeError("reduce_layer: point length differs from A's columns");
  }

  std::vector<SignPattern> patterns(R.size(), SignPattern(static_cast<std::size_t>(N)));
  for (std::size_t i = 0; i < R.size(); ++i) {
    for (Eigen::Index j = 0; j < N; ++j) {
      const T pre = A(j, 0) * R[i](0) + z(j);
      patterns[i][static_cast<std::size_t>(j)] = pre >= T(0);
    }
  }
  const int distinct = static_cast<int>(std::set<SignPattern>(patterns.begin(), patterns.end()).size());
  if (distinct > N + 1) {
    throw InternalError("observed " + std::to_string(distinct) + " sign patterns for " + std::to_string(N) +
                        " units on a line");
  }

  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < R.size();) {
    std::size_t j = i + 1;
    while (j < R.size() && patterns[j] == patterns[i]) ++j;
    if (j - i > best_len) {
      best_start = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len * static_cast<std::size_t>(N + 1) < R.size()) {
    throw InternalError("longest constant-sign run is shorter than |R| / (N + 1)");
  }

  ReduceResult<T> out;
  out.pattern = patterns[best_start];
  out.distinct_patterns = distinct;
  out.C = Matrix<T>::Zero(B.rows(), A.cols());
  out.v = Vector<T>::Zero(B.rows());
  for (Eigen::Index j = 0; j < N; ++j) {
    if (!out.pattern[static_cast<std::size_t>(j)]) continue;
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
      out.C(i, 0) += B(i, j) * A(j, 0);
      out.v(i) += B(i, j) * z(j);
    }
  }
  out.segment = {offset + best_start, best_len, out.C, out.v};
  return out;
}

/// phi(w) = M w + z on a contiguous segment of R of length at least
/// |R| / ((N_1 + 1) ... (N_{L-1} + 1)), by applying reduce_layer through the
/// hidden layers and folding in the affine output layer.
template <typename T>
CollapseResult<T> collapse_on_line(const ReluNetwork<T>& net, const std::vector<Vector<T>>& R) {
  require_valid(net);
  if (R.empty()) throw PreconditionError("collapse_on_line needs at least one point");
  const auto product = static_cast<std::size_t>(net.hidden_product());
  if (R.size() < product) {
    throw PreconditionError("collapse_on_line needs |R| >= (N_1 + 1)...(N_{L-1} + 1) = " + std::to_string(product));
  }
  detail::require_decreasing_line(R);

  CollapseResult<T> out;
  Matrix<T> M = net.layers[0].weights;
  Vector<T> z = net.layers[0].bias;
  std::size_t start = 0;
  std::vector<Vector<T>> current = R;
  for (std::size_t l = 1; l < net.layers.size(); ++l) {
    auto step = reduce_layer<T>(net.layers[l].weights, M, z, current, start);
    out.trace.push_back({static_cast<int>(l), step.segment.start, step.segment.length,
                         static_cast<int>(M.rows()), step.distinct_patterns, pattern_string(step.pattern)});
    const std::size_t local = step.segment.start - start;
    current = std::vector<Vector<T>>(current.begin() + static_cast<std::ptrdiff_t>(local),
                                     current.begin() + static_cast<std::ptrdiff_t>(local + step.segment.length));
    start = step.segment.start;
    M = std::move(step.C);
    z = step.v + net.layers[l].bias;
  }
  if (current.size() * product < R.size()) {
    throw InternalError("collapsed segment is shorter than |R| / prod(N_l + 1)");
  }
  out.segment = {start, current.size(), std::move(M), std::move(z)};
  return out;
}

template <typename T>
nlohmann::json collapse_trace_to_json(const CollapseResult<T>& result) {
  nlohmann::json doc;
  doc["layers"] = nlohmann::json::array();
  for (const auto& t : result.trace) {
    doc["layers"].push_back({{"layer", t.layer},
                             {"start", t.start},
                             {"length", t.length},
                             {"units", t.units},
                             {"distinct_patterns", t.distinct_patterns},
                             {"pattern", t.pattern}});
  }
  doc["segment"] = {{"start", result.segment.start}, {"length", result.segment.length}};
  nlohmann::json m = nlohmann::json::array();
  for (Eigen::Index j = 0; j < result.segment.M.cols(); ++j) m.push_back(ScalarTraits<T>::to_text(result.segment.M(0, j)));
  doc["segment"]["M"] = std::move(m);
  doc["segment"]["z"] = ScalarTraits<T>::to_text(result.segment.z(0));
  return doc;
}

/// Points of W where |g(phi(w)) - f(w)| >= 1/2.
struct MisclassifiedSet {
  std::vector<std::size_t> indices;  // positions in W, increasing
  std::int64_t guarantee = 0;        // m
  std::size_t segment_start = 0;
  std::size_t segment_length = 0;
  int label_case = 1;                // 1: even positions (1-based) carry label 1
};

/// Collapses net on W, splits the segment by g(M w + z) >= 1/2 and keeps the
/// points on the wrong side of their label. Needs alternating labels and
/// |W| >= 3 m (N_1 + 1)...(N_{L-1} + 1); m defaults to the largest such
/// value. Every returned point is re-checked by direct evaluation.
template <typename T>
MisclassifiedSet extract_misclassified(const ReluNetwork<T>& net, const MonotoneMap& g,
                                       const std::vector<Vector<T>>& W, const std::vector<int>& labels,
                                       std::optional<std::int64_t> m = std::nullopt) {
  if (labels.size() != W.size()) throw ShapeError("extract_misclassified: one label per point");
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
    if (labels[i] == labels[i + 1] || (labels[i] != 0 && labels[i] != 1)) {
      throw PreconditionError("labels must alternate between 0 and 1 (fails at point " + std::to_string(i) + ")");
    }
  }
  const auto t = static_cast<std::int64_t>(W.size());
  const std::int64_t product = net.hidden_product();
  const std::int64_t guarantee = m.value_or(t / (3 * product));
  if (guarantee < 1 || t < 3 * guarantee * product) {
    throw PreconditionError("extract_misclassified needs |W| >= 3 m prod(N_l + 1) with m >= 1 (|W| = " +
                            std::to_string(t) + ", prod = " + std::to_string(product) + ")");
  }

  auto collapsed = collapse_on_line(net, W);
  const auto& seg = collapsed.segment;
  MisclassifiedSet out;
  out.guarantee = guarantee;
  out.segment_start = seg.start;
  out.segment_length = seg.length;
  out.label_case = labels.size() > 1 && labels[1] == 1 ? 1 : 2;

  for (std::size_t i = seg.start; i < seg.start + seg.length; ++i) {
    const T value = (seg.M.row(0) * W[i])(0) + seg.z(0);
    const bool high = g.at_least_half(value);
    const bool even = (i + 1) % 2 == 0;  // 1-based parity
    const bool take = out.label_case == 1 ? (even ? !high : high) : (even ? high : !high);
    if (take) out.indices.push_back(i);
  }
  for (std::size_t i : out.indices) {
    if (!g.errs(eval_network(net, W[i]), labels[i])) {
      throw InternalError("point " + std::to_string(i) + " was extracted but is classified within 1/2");
    }
  }
  if (static_cast<std::int64_t>(out.indices.size()) < guarantee) {
    throw InternalError("extracted " + std::to_string(out.indices.size()) + " points, fewer than m = " +
                        std::to_string(guarantee));
  }
  return out;
}

}  // namespace advlab

#endif  // ADVLAB_REDUCTION_HPP_
