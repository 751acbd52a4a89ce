#pragma once

#include "bbc/geometry.hpp"

#include <span>
#include <vector>

namespace bbc {

using CountMatrix = Matrix<Index>;

/// Index of the largest entry of each row; ties go to the lowest index.
std::vector<int> predict_classes(const MatrixXd& outputs);

/// Number of rows whose argmax differs from the label.
Index count_errors(const MatrixXd& outputs, std::span<const int> labels);

/// confusion(i, j) counts rows of true class i predicted as j.
CountMatrix confusion_matrix(const MatrixXd& outputs, std::span<const int> labels);

MatrixXd one_hot(std::span<const int> labels, int k);

struct FitReport {
  Index training_errors = 0;
  CountMatrix confusion;
  double final_objective = 0;
  Index chosen_restart = 0;
  std::vector<double> objective_trace;
  // Errors and final objective of every restart, by restart index.
  std::vector<Index> restart_errors;
  std::vector<double> restart_objectives;
};

}  // namespace bbc
