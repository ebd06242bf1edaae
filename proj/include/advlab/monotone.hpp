#ifndef ADVLAB_MONOTONE_HPP_
#define ADVLAB_MONOTONE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "advlab/rational.hpp"

namespace advlab {

/// A monotone map g: R -> R applied after a network.
///
/// Spec strings:
///   identity
///   threshold                 1 for y >= 1/2, else 0
///   affine:SLOPE,INTERCEPT    slope of either sign, e.g. "affine:2,-1/2"
///   step:V0,B1,V1,...,Bn,Vn   V_i on [B_i, B_{i+1}); breakpoints increasing,
///                             values monotone
///   sigmoid                   1 / (1 + exp(-y)), float evaluation only
///
/// Every kind decides "g(y) >= 1/2" and "|g(y) - label| >= 1/2" exactly on
/// rationals, including sigmoid (through the sign of y).
class MonotoneMap {
 public:
  enum class Kind { identity, threshold, affine, step, sigmoid };

  MonotoneMap() = default;

  static MonotoneMap identity() { return MonotoneMap(); }
  static MonotoneMap threshold();
  static MonotoneMap sigmoid();
  static MonotoneMap affine(Rational slope, Rational intercept);
  /// values.size() == breakpoints.size() + 1.
  static MonotoneMap step(std::vector<Rational> breakpoints, std::vector<Rational> values);

  static MonotoneMap parse(std::string_view spec);
  std::string spec() const;

  Kind kind() const { return kind_; }
  bool exact() const { return kind_ != Kind::sigmoid; }

  /// g(y); throws std::logic_error for sigmoid.
  Rational operator()(const Rational& y) const;
  double operator()(double y) const;

  bool at_least_half(const Rational& y) const;
  bool at_least_half(double y) const { return (*this)(y) >= 0.5; }

  /// |g(y) - label| >= 1/2 for label in {0, 1}.
  bool errs(const Rational& y, int label) const;
  bool errs(double y, int label) const;

 private:
  Kind kind_ = Kind::identity;
  Rational slope_{1};
  Rational intercept_{0};
  std::vector<Rational> breakpoints_;
  std::vector<Rational> values_;
};

}  // namespace advlab

#endif  // ADVLAB_MONOTONE_HPP_
