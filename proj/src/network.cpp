#include "advlab/network.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace advlab {

std::string ScalarTraits<double>::to_text(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

double ScalarTraits<double>::from_text(std::string_view s) {
  if (s.find('/') != std::string_view::npos) return advlab::to_double(parse_rational(s));
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed float scalar: '" + std::string(s) + "'");
  }
  return value;
}

std::string to_string(ScalarMode mode) {
  return mode == ScalarMode::exact_rational ? "exact-rational" : "float64";
}

ScalarMode parse_scalar_mode(std::string_view text) {
  if (text == "exact-rational") return ScalarMode::exact_rational;
  if (text == "float64") return ScalarMode::float64;
  throw std::invalid_argument("unknown scalar_mode '" + std::string(text) + "'");
}

namespace {

template <typename T>
T scalar_from(const nlohmann::json& value, ScalarMode file_mode) {
  std::string text = value.is_string() ? value.get<std::string>() : value.dump();
  if constexpr (std::is_same_v<T, Rational>) {
    if (file_mode == ScalarMode::float64) return from_double(ScalarTraits<double>::from_text(text));
    return parse_rational(text);
  } else {
    return ScalarTraits<double>::from_text(text);
  }
}

}  // namespace

template <typename T>
ReluNetwork<T> network_from_json(const nlohmann::json& doc) {
  ScalarMode file_mode = parse_scalar_mode(doc.at("scalar_mode").get<std::string>());
  ReluNetwork<T> net;
  net.dims = doc.at("dims").get<std::vector<int>>();
  for (const auto& layer_doc : doc.at("layers")) {
    const auto& rows = layer_doc.at("A");
    const auto& bias = layer_doc.at("b");
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = n_rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows[0].size());
    AffineLayer<T> layer{Matrix<T>(n_rows, n_cols), Vector<T>(static_cast<Eigen::Index>(bias.size()))};
    for (Eigen::Index i = 0; i < n_rows; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != n_cols) {
        throw ShapeError("ragged weight matrix in layer " + std::to_string(net.layers.size() + 1));
      }
      for (Eigen::Index j = 0; j < n_cols; ++j) layer.weights(i, j) = scalar_from<T>(rows[i][j], file_mode);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = scalar_from<T>(bias[i], file_mode);
    net.layers.push_back(std::move(layer));
  }
  require_valid(net);
  return net;
}

template ReluNetwork<Rational> network_from_json<Rational>(const nlohmann::json&);
template ReluNetwork<double> network_from_json<double>(const nlohmann::json&);

AnyNetwork any_network_from_json(const nlohmann::json& doc) {
  if (parse_scalar_mode(doc.at("scalar_mode").get<std::string>()) == ScalarMode::exact_rational) {
    return network_from_json<Rational>(doc);
  }
  return network_from_json<double>(doc);
}

}  // namespace advlab
