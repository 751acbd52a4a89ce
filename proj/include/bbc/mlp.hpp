#pragma once

// Single hidden layer perceptron: tanh hidden units, logistic outputs.

#include "bbc/data.hpp"
#include "bbc/geometry.hpp"
#include "bbc/metrics.hpp"

#include <cstdint>
#include <string_view>

namespace bbc {

enum class ErrorFunction { cross_entropy, sum_of_squares };

std::string_view to_string(ErrorFunction fn);
ErrorFunction error_function_from_string(std::string_view s);

struct MlpParams {
  MatrixXd w1;  // D x H
  VectorXd b1;  // H
  MatrixXd w2;  // H x K
  VectorXd b2;  // K

  Index inputs() const noexcept { return w1.rows(); }
  Index hidden() const noexcept { return w1.cols(); }
  Index outputs() const noexcept { return w2.cols(); }
  Index parameter_count() const noexcept { return w1.size() + b1.size() + w2.size() + b2.size(); }

  /// Flat layout: w1 row-major, b1, w2 row-major, b2.
  VectorXd pack() const;
  static MlpParams unpack(const VectorXd& flat, Index d, Index h, Index k);
  static MlpParams zeros(Index d, Index h, Index k);

  void validate() const;
};

/// Weights ~ N(0, 1/fan_in), biases zero. Deterministic per seed.
MlpParams mlp_init(Index d, Index h, Index k, std::uint64_t seed);

OutputMatrix mlp_forward(const MlpParams& p, const MatrixXd& x);

/// Data term plus (alpha/2) * sum of all squared parameters (biases
/// included). Cross-entropy is summed over every output of every row;
/// sum-of-squares is half the summed squared error.
double mlp_objective(const MlpParams& p, const MatrixXd& x, const MatrixXd& targets, double alpha,
                     ErrorFunction fn = ErrorFunction::cross_entropy);

/// Exact gradient of mlp_objective.
MlpParams mlp_gradient(const MlpParams& p, const MatrixXd& x, const MatrixXd& targets, double alpha,
                       ErrorFunction fn = ErrorFunction::cross_entropy);

enum class RestartSelection { best, worst };

struct TrainConfig {
  Index hidden_units = 3;
  long iterations = 100;
  double alpha = 0.0;
  Index restarts = 1;
  std::uint64_t seed = 0;
  ErrorFunction error_fn = ErrorFunction::cross_entropy;
  RestartSelection select = RestartSelection::best;

  void validate() const;
};

struct TrainedMlp {
  MlpParams params;
  FitReport report;
};

/// Trains `restarts` networks on data.features as given (standardize first),
/// restart r seeded with seed + r. Restarts run concurrently; the pick is a
/// deterministic reduction: fewest training errors, then lowest final
/// objective, then lowest restart index (most errors / highest objective for
/// RestartSelection::worst).
TrainedMlp mlp_train(const Dataset& data, const TrainConfig& config);

}  // namespace bbc
