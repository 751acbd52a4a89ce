#include "bbc/metrics.hpp"

namespace bbc {

std::vector<int> predict_classes(const MatrixXd& outputs) {
  std::vector<int> out(static_cast<std::size_t>(outputs.rows()));
  for (Index i = 0; i < outputs.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < outputs.cols(); ++j)
      if (outputs(i, j) > outputs(i, best)) best = j;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

CountMatrix confusion_matrix(const MatrixXd& outputs, std::span<const int> labels) {
  if (static_cast<Index>(labels.size()) != outputs.rows()) throw ShapeError("label count does not match output rows");
  const Index k = outputs.cols();
  CountMatrix confusion = CountMatrix::Zero(k, k);
  const auto predicted = predict_classes(outputs);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw DataError("label " + std::to_string(labels[i]) + " out of range");
    ++confusion(labels[i], predicted[i]);
  }
  return confusion;
}

Index count_errors(const MatrixXd& outputs, std::span<const int> labels) {
  const CountMatrix c = confusion_matrix(outputs, labels);
  return c.sum() - c.trace();
}

MatrixXd one_hot(std::span<const int> labels, int k) {
  MatrixXd t = MatrixXd::Zero(static_cast<Index>(labels.size()), k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw DataError("label " + std::to_string(labels[i]) + " out of range");
    t(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return t;
}

}  // namespace bbc
