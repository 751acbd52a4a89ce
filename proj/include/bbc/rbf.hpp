#pragma once

// Gaussian radial basis function classifier with a linear output layer.

#include "bbc/data.hpp"
#include "bbc/geometry.hpp"
#include "bbc/metrics.hpp"

#include <cstdint>

namespace bbc {

struct RbfParams {
  MatrixXd centers;  // M x D
  double width = 1;  // shared Gaussian width
  MatrixXd w;        // M x K
  VectorXd b;        // K

  Index basis_count() const noexcept { return centers.rows(); }
  Index inputs() const noexcept { return centers.cols(); }
  Index outputs() const noexcept { return w.cols(); }
  void validate() const;
};

struct RbfConfig {
  Index centers = 6;
  double ridge = 1e-6;
  Index restarts = 1;
  std::uint64_t seed = 0;
  Index kmeans_iterations = 100;

  void validate() const;
};

struct TrainedRbf {
  RbfParams params;
  FitReport report;
};

/// Lloyd's k-means from `m` distinct seeded data rows. A cluster that loses
/// all members is re-seeded from a random data row.
MatrixXd kmeans(const MatrixXd& x, Index m, std::uint64_t seed, Index max_iterations = 100);

/// Basis activations exp(-|x - c|^2 / (2 width^2)), N x M.
MatrixXd rbf_design(const RbfParams& p, const MatrixXd& x);

/// Linear outputs; not confined to [0, 1].
OutputMatrix rbf_forward(const RbfParams& p, const MatrixXd& x);

/// One fit: k-means centers, width = max inter-center distance, and
/// ridge-regularized least squares against one-hot targets.
TrainedRbf rbf_train(const Dataset& data, Index m, std::uint64_t seed, double ridge);

/// Restart r uses seed + r; the pick is fewest training errors, then lowest
/// squared error, then lowest restart index.
TrainedRbf rbf_train(const Dataset& data, const RbfConfig& config);

}  // namespace bbc
