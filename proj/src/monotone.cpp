#include "advlab/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace advlab {

namespace {

std::vector<Rational> split_rationals(std::string_view text) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_rational(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

MonotoneMap MonotoneMap::threshold() {
  MonotoneMap g;
  g.kind_ = Kind::threshold;
  return g;
}

MonotoneMap MonotoneMap::sigmoid() {
  MonotoneMap g;
  g.kind_ = Kind::sigmoid;
  return g;
}

MonotoneMap MonotoneMap::affine(Rational slope, Rational intercept) {
  MonotoneMap g;
  g.kind_ = Kind::affine;
  g.slope_ = std::move(slope);
  g.intercept_ = std::move(intercept);
  return g;
}

MonotoneMap MonotoneMap::step(std::vector<Rational> breakpoints, std::vector<Rational> values) {
  if (values.size() != breakpoints.size() + 1) {
    throw std::invalid_argument("step map needs one more value than breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i - 1] < breakpoints[i])) throw std::invalid_argument("step breakpoints must increase");
  }
  const bool up = std::is_sorted(values.begin(), values.end());
  const bool down = std::is_sorted(values.rbegin(), values.rend());
  if (!up && !down) throw std::invalid_argument("step values must be monotone");
  MonotoneMap g;
  g.kind_ = Kind::step;
  g.breakpoints_ = std::move(breakpoints);
  g.values_ = std::move(values);
  return g;
}

MonotoneMap MonotoneMap::parse(std::string_view spec) {
  if (spec == "identity") return identity();
  if (spec == "threshold") return threshold();
  if (spec == "sigmoid") return sigmoid();
  const auto colon = spec.find(':');
  if (colon != std::string_view::npos) {
    const auto head = spec.substr(0, colon);
    auto args = split_rationals(spec.substr(colon + 1));
    if (head == "affine") {
      if (args.size() != 2) throw std::invalid_argument("affine map takes slope,intercept");
      return affine(args[0], args[1]);
    }
    if (head == "step") {
      if (args.size() % 2 == 0) throw std::invalid_argument("step map takes V0,B1,V1,...,Bn,Vn");
      std::vector<Rational> breaks, values;
      for (std::size_t i = 0; i < args.size(); ++i) (i % 2 == 0 ? values : breaks).push_back(args[i]);
      return step(std::move(breaks), std::move(values));
    }
  }
  throw std::invalid_argument("unknown monotone map '" + std::string(spec) + "'");
}

std::string MonotoneMap::spec() const {
  switch (kind_) {
    case Kind::identity: return "identity";
    case Kind::threshold: return "threshold";
    case Kind::sigmoid: return "sigmoid";
    case Kind::affine: return "affine:" + to_string(slope_) + "," + to_string(intercept_);
    case Kind::step: {
      std::string out = "step:" + to_string(values_[0]);
      for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        out += "," + to_string(breakpoints_[i]) + "," + to_string(values_[i + 1]);
      }
      return out;
    }
  }
  return "";
}

Rational MonotoneMap::operator()(const Rational& y) const {
  switch (kind_) {
    case Kind::identity: return y;
    case Kind::threshold: return y >= Rational(1, 2) ? Rational(1) : Rational(0);
    case Kind::affine: return slope_ * y + intercept_;
    case Kind::step: {
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
      return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
    }
    case Kind::sigmoid: break;
  }
  throw std::logic_error("sigmoid has no exact rational value");
}

double MonotoneMap::operator()(double y) const {
  switch (kind_) {
    case Kind::identity: return y;
    case Kind::threshold: return y >= 0.5 ? 1.0 : 0.0;
    case Kind::affine: return to_double(slope_) * y + to_double(intercept_);
    case Kind::step: {
      std::size_t i = 0;
      while (i < breakpoints_.size() && to_double(breakpoints_[i]) <= y) ++i;
      return to_double(values_[i]);
    }
    case Kind::sigmoid: return 1.0 / (1.0 + std::exp(-y));
  }
  return y;
}

bool MonotoneMap::at_least_half(const Rational& y) const {
  if (kind_ == Kind::sigmoid) return y >= 0;
  return (*this)(y) >= Rational(1, 2);
}

bool MonotoneMap::errs(const Rational& y, int label) const {
  if (kind_ == Kind::sigmoid) return label == 0 ? y >= 0 : y <= 0;
  return abs(Rational((*this)(y) - label)) >= Rational(1, 2);
}

bool MonotoneMap::errs(double y, int label) const {
  if (kind_ == Kind::sigmoid) return label == 0 ? y >= 0.0 : y <= 0.0;
  return std::abs((*this)(y) - label) >= 0.5;
}

}  // namespace advlab
