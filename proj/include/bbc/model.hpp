#pragma once

// A trained classifier of either family, with the feature standardization
// it was trained under.

#include "bbc/mlp.hpp"
#include "bbc/rbf.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bbc {

struct MlpModel {
  MlpParams params;
  TrainConfig config;
};

struct RbfModel {
  RbfParams params;
  RbfConfig config;
};

struct Model {
  std::variant<MlpModel, RbfModel> net;
  std::optional<Standardization> standardization;
  std::vector<std::string> class_names;

  bool is_mlp() const noexcept { return std::holds_alternative<MlpModel>(net); }
  std::string type() const { return is_mlp() ? "mlp" : "rbf"; }
  int num_classes() const;
  Index inputs() const;

  /// Outputs for raw (unstandardized) feature rows.
  OutputMatrix outputs(const MatrixXd& raw_features) const;
  /// Outputs for rows already in the model's standardized space.
  OutputMatrix outputs_standardized(const MatrixXd& features) const;
};

}  // namespace bbc
