#pragma once

#include "bbc/geometry.hpp"
#include "bbc/metrics.hpp"

#include <optional>
#include <span>
#include <vector>

namespace bbc {

struct ConcentrationReport {
  // Mean distance of correctly classified images to their class vertex;
  // nullopt for a class with no correct points.
  std::vector<std::optional<double>> per_class;
  // Mean over all correctly classified points.
  std::optional<double> overall;
};

/// `predicted[i]` is the classifier's decision for points[i]; a point is
/// correct when it equals points[i].class_label.
ConcentrationReport vertex_concentration(const PolygonMap<double>& map, std::span<const ImagePoint<double>> points,
                                         std::span<const int> predicted);

/// Convenience: project `outputs` and use their argmax as the decision.
ConcentrationReport vertex_concentration(const PolygonMap<double>& map, const MatrixXd& outputs,
                                         std::span<const int> labels);

inline constexpr Index kDefaultNeighbors = 10;

struct ReliabilityReport {
  Point2d image;
  int predicted_class = 0;
  std::vector<double> vertex_distances;
  // Distance to the centroid of each class's training images.
  std::vector<std::optional<double>> centroid_distances;
  // Fraction of the k nearest training images labelled predicted_class.
  double knn_agreement = 0;
  std::vector<Index> neighbors;  // source indices, nearest first
};

/// Places a new output vector among the training images. Neighbor ties are
/// broken by lower source index.
ReliabilityReport reliability(const PolygonMap<double>& map, std::span<const ImagePoint<double>> training,
                              const VectorXd& new_output, Index k = kDefaultNeighbors);

struct ThresholdResult {
  double threshold = 0;
  std::vector<Index> kept_rows;
  Index kept = 0;
  Index errors = 0;  // misclassified among kept
};

/// Keeps rows whose largest output is >= threshold.
ThresholdResult threshold_filter(const MatrixXd& outputs, std::span<const int> labels, double threshold);

}  // namespace bbc
