#ifndef ADVLAB_RATIONAL_HPP_
#define ADVLAB_RATIONAL_HPP_

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace advlab {

// Arbitrary precision rational, always stored in lowest terms with a
// positive denominator. Expression templates are off so that Eigen sees a
// plain value type.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatrixQ = Matrix<Rational>;
using VectorQ = Vector<Rational>;

/// Parses "p/q", "p" or a finite decimal such as "-0.125" into an exact
/// rational. Throws std::invalid_argument on malformed input or q == 0.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form (q >= 1, lowest terms). Integers print as "p/1".
std::string to_string(const Rational& x);

Integer floor(const Rational& x);
Integer ceil(const Rational& x);

inline Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

double to_double(const Rational& x);

/// Exact rational value of a finite double.
Rational from_double(double x);

/// 2^e for any integer e.
Rational pow2(int e);

/// Nearest point of the grid {k 2^-n : k integer}, ties rounded up.
Rational dyadic_round(const Rational& x, int n);

}  // namespace advlab

#endif  // ADVLAB_RATIONAL_HPP_
