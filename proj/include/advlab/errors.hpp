#ifndef ADVLAB_ERRORS_HPP_
#define ADVLAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace advlab {

/// Dimension mismatch between a network, its layers, or an input vector.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the domain where a function is defined (e.g. f_a at x1 <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A constructed object violates its own invariant (e.g. non-decreasing alphas).
class InvariantViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A certified property failed to hold on a result we built ourselves. Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace advlab

#endif  // ADVLAB_ERRORS_HPP_
