#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace snl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error categories. The CLI maps these onto exit codes.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class UnsupportedSize : public std::length_error {
 public:
  using std::length_error::length_error;
};

class RetryExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by the solver when the cost or gradient stops being finite.
/// Carries the last finite iterate so callers can inspect where it broke.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, Matrix last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}
  const Matrix& last_iterate() const { return last_iterate_; }

 private:
  Matrix last_iterate_;
};

inline double frobenius_inner(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace snl
