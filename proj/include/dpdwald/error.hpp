#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace dpd {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown names, unparseable files, malformed configs.
class InputError : public Error {
public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
  using Error::Error;
};

class NumericError : public Error {
public:
  using Error::Error;
};

class QuadratureError : public NumericError {
public:
  QuadratureError(const std::string& what, double best_estimate, double error_estimate)
      : NumericError(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

private:
  double best_estimate_;
  double error_estimate_;
};

class ConvergenceError : public NumericError {
public:
  ConvergenceError(const std::string& what, Eigen::VectorXd best_iterate)
      : NumericError(what), best_iterate_(std::move(best_iterate)) {}
  const Eigen::VectorXd& best_iterate() const noexcept { return best_iterate_; }

private:
  Eigen::VectorXd best_iterate_;
};

class DegenerateSampleError : public NumericError {
public:
  using NumericError::NumericError;
};

class MatrixError : public NumericError {
public:
  using NumericError::NumericError;
};

class RestrictionError : public NumericError {
public:
  using NumericError::NumericError;
};

}  // namespace dpd
