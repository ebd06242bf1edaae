#include "doctest.h"

#include "advlab/rational.hpp"

using advlab::Rational;

TEST_CASE("parse and print round trip") {
  CHECK(advlab::to_string(advlab::parse_rational("6/8")) == "3/4");
  CHECK(advlab::to_string(advlab::parse_rational("-5")) == "-5/1");
  CHECK(advlab::parse_rational("0.125") == Rational(1, 8));
  CHECK(advlab::parse_rational("-1.5") == Rational(-3, 2));
  CHECK(advlab::parse_rational("1/-2") == Rational(-1, 2));
  CHECK_THROWS(advlab::parse_rational("1/0"));
  CHECK_THROWS(advlab::parse_rational("abc"));
  CHECK_THROWS(advlab::parse_rational(""));
}

TEST_CASE("floor and ceil") {
  CHECK(advlab::floor(Rational(7, 2)) == 3);
  CHECK(advlab::floor(Rational(-7, 2)) == -4);
  CHECK(advlab::ceil(Rational(7, 2)) == 4);
  CHECK(advlab::ceil(Rational(-7, 2)) == -3);
  CHECK(advlab::ceil(Rational(4)) == 4);
  CHECK(advlab::floor(Rational(-4)) == -4);
}

TEST_CASE("doubles convert exactly") {
  CHECK(advlab::from_double(0.1) != Rational(1, 10));
  CHECK(advlab::to_double(advlab::from_double(0.1)) == 0.1);
  CHECK(advlab::from_double(-0.75) == Rational(-3, 4));
  CHECK(advlab::from_double(0.0) == 0);
  CHECK(advlab::pow2(-3) == Rational(1, 8));
  CHECK(advlab::pow2(4) == 16);
}

TEST_CASE("dyadic rounding") {
  CHECK(advlab::dyadic_round(Rational(1, 3), 5) == Rational(11, 32));
  CHECK(advlab::dyadic_round(Rational(1, 16), 3) == Rational(1, 8));  // tie rounds up
  CHECK(advlab::dyadic_round(Rational(-1, 16), 3) == 0);
  CHECK(advlab::dyadic_round(Rational(0), 60) == 0);
  for (int n = 1; n < 40; ++n) {
    Rational x(12345, 67891);
    CHECK(advlab::abs(Rational(advlab::dyadic_round(x, n) - x)) <= advlab::pow2(-n - 1));
  }
}

TEST_CASE("eigen products stay exact") {
  advlab::MatrixQ a(2, 2);
  a << Rational(1, 3), Rational(1, 2), Rational(-2), Rational(1, 7);
  advlab::VectorQ x(2);
  x << Rational(3), Rational(7);
  advlab::VectorQ y = a * x;
  CHECK(y(0) == Rational(9, 2));
  CHECK(y(1) == Rational(-5));
}
