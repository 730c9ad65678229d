#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mlep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated state became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, double value);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Information matrix is not positive-definite, or too ill-conditioned to invert.
class DegenerateInformationError : public Error {
 public:
  DegenerateInformationError(const std::string& what, Eigen::MatrixXd matrix);
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
};

/// The requested operation exists only for scalar parameters.
class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// More replications failed than a Monte Carlo study tolerates.
class StudyError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlep
