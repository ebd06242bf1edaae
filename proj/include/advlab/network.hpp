#ifndef ADVLAB_NETWORK_HPP_
#define ADVLAB_NETWORK_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "advlab/errors.hpp"
#include "advlab/rational.hpp"

namespace advlab {

enum class ScalarMode { exact_rational, float64 };

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr ScalarMode mode = ScalarMode::exact_rational;
  static std::string to_text(const Rational& x) { return to_string(x); }
  static Rational from_text(std::string_view s) { return parse_rational(s); }
  static double to_double(const Rational& x) { return advlab::to_double(x); }
};

template <>
struct ScalarTraits<double> {
  static constexpr ScalarMode mode = ScalarMode::float64;
  static std::string to_text(double x);
  static double from_text(std::string_view s);
  static double to_double(double x) { return x; }
};

std::string to_string(ScalarMode mode);
ScalarMode parse_scalar_mode(std::string_view text);

/// rho(x) = 0 for x < 0 and x otherwise.
template <typename T>
T relu(const T& x) {
  return x < T(0) ? T(0) : x;
}

/// W x = A x + b, mapping R^{cols(A)} to R^{rows(A)}.
template <typename T>
struct AffineLayer {
  Matrix<T> weights;
  Vector<T> bias;

  Vector<T> apply(const Vector<T>& x) const { return weights * x + bias; }
};

/// phi = W^L rho W^{L-1} rho ... rho W^1 with dims (N_0 = d, N_1, ..., N_L = 1).
///
/// Plain value type; build it, check it with validate_network, then treat it
/// as immutable. Evaluation is const and safe from any number of threads.
template <typename T>
struct ReluNetwork {
  std::vector<int> dims;
  std::vector<AffineLayer<T>> layers;

  int input_dim() const { return dims.empty() ? 0 : dims.front(); }
  int depth() const { return static_cast<int>(layers.size()); }

  /// (N_1 + 1) ... (N_{L-1} + 1); the region-count factor for line collapse.
  std::int64_t hidden_product() const {
    std::int64_t product = 1;
    for (std::size_t l = 1; l + 1 < dims.size(); ++l) product *= dims[l] + 1;
    return product;
  }

  template <typename U>
  ReluNetwork<U> cast() const;
};

struct ShapeIssue {
  int layer;  // 1-based; 0 refers to the dims vector itself
  std::string message;
};

/// nullopt certifies that dims and every layer shape agree and N_L = 1.
template <typename T>
std::optional<ShapeIssue> validate_network(const ReluNetwork<T>& net) {
  const auto& dims = net.dims;
  if (dims.size() < 2) return ShapeIssue{0, "dims must list at least N_0 and N_L"};
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1) return ShapeIssue{0, "dims entries must be positive"};
  }
  if (net.layers.size() + 1 != dims.size()) {
    return ShapeIssue{0, "expected " + std::to_string(dims.size() - 1) + " layers, got " +
                             std::to_string(net.layers.size())};
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const int layer_no = static_cast<int>(l) + 1;
    if (layer.weights.rows() != dims[l + 1] || layer.weights.cols() != dims[l]) {
      return ShapeIssue{layer_no, "weights are " + std::to_string(layer.weights.rows()) + "x" +
                                      std::to_string(layer.weights.cols()) + ", expected " +
                                      std::to_string(dims[l + 1]) + "x" + std::to_string(dims[l])};
    }
    if (layer.bias.size() != dims[l + 1]) {
      return ShapeIssue{layer_no, "bias has length " + std::to_string(layer.bias.size()) +
                                      ", expected " + std::to_string(dims[l + 1])};
    }
  }
  if (dims.back() != 1) {
    return ShapeIssue{static_cast<int>(net.layers.size()), "output width must be 1"};
  }
  return std::nullopt;
}

template <typename T>
void require_valid(const ReluNetwork<T>& net) {
  if (auto issue = validate_network(net)) {
    throw ShapeError("invalid network at layer " + std::to_string(issue->layer) + ": " +
                     issue->message);
  }
}

/// Hidden activations are clamped by rho; the last layer stays affine.
template <typename T>
Vector<T> forward(const ReluNetwork<T>& net, const Vector<T>& x) {
  if (net.layers.empty()) throw ShapeError("network has no layers");
  if (x.size() != net.layers.front().weights.cols()) {
    throw ShapeError("input has length " + std::to_string(x.size()) + ", network expects " +
                     std::to_string(net.layers.front().weights.cols()));
  }
  Vector<T> h = x;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    if (layer.weights.cols() != h.size()) {
      throw ShapeError("layer " + std::to_string(l + 1) + " expects width " +
                       std::to_string(layer.weights.cols()));
    }
    h = layer.apply(h);
    if (l + 1 < net.layers.size()) h = h.unaryExpr([](const T& v) { return relu(v); });
  }
  return h;
}

template <typename T>
T eval_network(const ReluNetwork<T>& net, const Vector<T>& x) {
  Vector<T> out = forward(net, x);
  if (out.size() != 1) throw ShapeError("network output width must be 1");
  return out(0);
}

template <typename T>
template <typename U>
ReluNetwork<U> ReluNetwork<T>::cast() const {
  ReluNetwork<U> out;
  out.dims = dims;
  out.layers.reserve(layers.size());
  for (const auto& layer : layers) {
    if constexpr (std::is_same_v<U, Rational> && std::is_same_v<T, double>) {
      out.layers.push_back({layer.weights.unaryExpr([](double v) { return from_double(v); }),
                            layer.bias.unaryExpr([](double v) { return from_double(v); })});
    } else {
      out.layers.push_back({layer.weights.template cast<U>(), layer.bias.template cast<U>()});
    }
  }
  return out;
}

// JSON document: {"dims": [...], "scalar_mode": "exact-rational"|"float64",
//                 "layers": [{"A": [[..], ..], "b": [..]}]}, scalars as strings.
template <typename T>
nlohmann::json network_to_json(const ReluNetwork<T>& net) {
  nlohmann::json doc;
  doc["dims"] = net.dims;
  doc["scalar_mode"] = to_string(ScalarTraits<T>::mode);
  doc["layers"] = nlohmann::json::array();
  for (const auto& layer : net.layers) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        row.push_back(ScalarTraits<T>::to_text(layer.weights(i, j)));
      }
      rows.push_back(std::move(row));
    }
    nlohmann::json bias = nlohmann::json::array();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      bias.push_back(ScalarTraits<T>::to_text(layer.bias(i)));
    }
    doc["layers"].push_back({{"A", std::move(rows)}, {"b", std::move(bias)}});
  }
  return doc;
}

/// Reads any scalar_mode into the requested scalar type. Exact files load
/// into double by rounding; float files load into Rational exactly.
template <typename T>
ReluNetwork<T> network_from_json(const nlohmann::json& doc);

using AnyNetwork = std::variant<ReluNetwork<Rational>, ReluNetwork<double>>;

/// Dispatches on the document's scalar_mode.
AnyNetwork any_network_from_json(const nlohmann::json& doc);

}  // namespace advlab

#endif  // ADVLAB_NETWORK_HPP_
