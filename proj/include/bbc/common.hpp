#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bbc {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Point2d = Point2<double>;

// Error hierarchy. Each kind maps to a CLI exit code: data/format/shape
// problems exit with 2, optimization failures with 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidClassCount : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class FormatError : public DataError {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : DataError(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, long iteration)
      : Error(what + " at iteration " + std::to_string(iteration)), iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

// Internal invariant violated (never expected on valid input).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const OptimizationError*>(&e)) return 3;
  return 2;
}

}  // namespace bbc
