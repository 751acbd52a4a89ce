#include "bbc/model.hpp"

#include "bbc/perturb.hpp"

namespace bbc {

int Model::num_classes() const {
  return static_cast<int>(std::visit([](const auto& m) { return m.params.outputs(); }, net));
}

Index Model::inputs() const {
  return std::visit([](const auto& m) { return m.params.inputs(); }, net);
}

OutputMatrix Model::outputs_standardized(const MatrixXd& features) const {
  if (const auto* mlp = std::get_if<MlpModel>(&net)) return mlp_forward(mlp->params, features);
  return rbf_forward(std::get<RbfModel>(net).params, features);
}

OutputMatrix Model::outputs(const MatrixXd& raw_features) const {
  if (!standardization) return outputs_standardized(raw_features);
  return outputs_standardized(apply_standardization(*standardization, raw_features));
}

}  // namespace bbc
