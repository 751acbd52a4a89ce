#include "bbc/analysis.hpp"

#include <algorithm>
#include <numeric>

namespace bbc {

ConcentrationReport vertex_concentration(const PolygonMap<double>& map, std::span<const ImagePoint<double>> points,
                                         std::span<const int> predicted) {
  if (points.empty()) throw DataError("vertex concentration needs at least one point");
  if (predicted.size() != points.size()) throw ShapeError("prediction count does not match point count");
  std::vector<double> sums(static_cast<std::size_t>(map.k), 0.0);
  std::vector<Index> counts(static_cast<std::size_t>(map.k), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int label = points[i].class_label;
    if (label < 0 || label >= map.k) throw DataError("class label " + std::to_string(label) + " out of range");
    if (predicted[i] != label) continue;
    sums[static_cast<std::size_t>(label)] += (points[i].position() - map.vertices[static_cast<std::size_t>(label)]).norm();
    ++counts[static_cast<std::size_t>(label)];
  }
  ConcentrationReport report;
  double total = 0;
  Index n = 0;
  for (std::size_t c = 0; c < sums.size(); ++c) {
    if (counts[c] == 0) {
      report.per_class.emplace_back();
      continue;
    }
    report.per_class.emplace_back(sums[c] / static_cast<double>(counts[c]));
    total += sums[c];
    n += counts[c];
  }
  if (n > 0) report.overall = total / static_cast<double>(n);
  return report;
}

ConcentrationReport vertex_concentration(const PolygonMap<double>& map, const MatrixXd& outputs,
                                         std::span<const int> labels) {
  const auto points = project(map, outputs, labels, PointKind::train);
  const auto predicted = predict_classes(outputs);
  return vertex_concentration(map, points, predicted);
}

ReliabilityReport reliability(const PolygonMap<double>& map, std::span<const ImagePoint<double>> training,
                              const VectorXd& new_output, Index k) {
  if (training.empty()) throw DataError("reliability needs a nonempty training set");
  if (k < 1 || k > static_cast<Index>(training.size()))
    throw DataError("neighbor count " + std::to_string(k) + " must lie in [1, " + std::to_string(training.size()) + "]");
  ReliabilityReport report;
  report.image = map.apply(new_output);
  report.predicted_class = predict_classes(new_output.transpose())[0];

  for (const auto& v : map.vertices) report.vertex_distances.push_back((report.image - v).norm());

  std::vector<Point2d> centroid_sums(static_cast<std::size_t>(map.k), Point2d::Zero());
  std::vector<Index> counts(static_cast<std::size_t>(map.k), 0);
  for (const auto& p : training) {
    if (p.class_label < 0 || p.class_label >= map.k) throw DataError("training label out of range");
    centroid_sums[static_cast<std::size_t>(p.class_label)] += p.position();
    ++counts[static_cast<std::size_t>(p.class_label)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0)
      report.centroid_distances.emplace_back();
    else
      report.centroid_distances.emplace_back(
          (report.image - centroid_sums[c] / static_cast<double>(counts[c])).norm());
  }

  std::vector<std::size_t> order(training.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> dist(training.size());
  for (std::size_t i = 0; i < training.size(); ++i) dist[i] = (training[i].position() - report.image).norm();
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && training[a].source_index < training[b].source_index);
  });
  Index agree = 0;
  for (Index i = 0; i < k; ++i) {
    const auto& p = training[order[static_cast<std::size_t>(i)]];
    report.neighbors.push_back(p.source_index);
    if (p.class_label == report.predicted_class) ++agree;
  }
  report.knn_agreement = static_cast<double>(agree) / static_cast<double>(k);
  return report;
}

ThresholdResult threshold_filter(const MatrixXd& outputs, std::span<const int> labels, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DataError("threshold must lie in [0, 1]");
  if (static_cast<Index>(labels.size()) != outputs.rows()) throw ShapeError("label count does not match output rows");
  ThresholdResult result;
  result.threshold = threshold;
  const auto predicted = predict_classes(outputs);
  for (Index i = 0; i < outputs.rows(); ++i) {
    if (outputs.row(i).maxCoeff() < threshold) continue;
    result.kept_rows.push_back(i);
    if (predicted[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(i)]) ++result.errors;
  }
  result.kept = static_cast<Index>(result.kept_rows.size());
  return result;
}

}  // namespace bbc
