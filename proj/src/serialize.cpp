#include "bbc/serialize.hpp"

#include <fstream>
#include <sstream>

namespace bbc {

namespace {

Json row_major(const MatrixXd& m) {
  Json a = Json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

Json vec(const VectorXd& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

MatrixXd matrix_from(const Json& a, Index rows, Index cols, const char* name) {
  if (!a.is_array() || static_cast<Index>(a.size()) != rows * cols)
    throw FormatError(std::string("model field '") + name + "' must hold " + std::to_string(rows * cols) + " numbers");
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = a.at(static_cast<std::size_t>(i * cols + j)).get<double>();
  return m;
}

VectorXd vector_from(const Json& a, Index n, const char* name) {
  return matrix_from(a, n, 1, name);
}

template <typename T>
T field(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

Json to_json(const Model& model) {
  Json doc;
  doc["type"] = model.type();
  if (const auto* mlp = std::get_if<MlpModel>(&model.net)) {
    const auto& p = mlp->params;
    doc["inputs"] = p.inputs();
    doc["hidden"] = p.hidden();
    doc["outputs"] = p.outputs();
    doc["w1"] = row_major(p.w1);
    doc["b1"] = vec(p.b1);
    doc["w2"] = row_major(p.w2);
    doc["b2"] = vec(p.b2);
  } else {
    const auto& p = std::get<RbfModel>(model.net).params;
    doc["inputs"] = p.inputs();
    doc["centers_count"] = p.basis_count();
    doc["outputs"] = p.outputs();
    doc["width"] = p.width;
    doc["centers"] = row_major(p.centers);
    doc["w"] = row_major(p.w);
    doc["b"] = vec(p.b);
  }
  doc["class_names"] = model.class_names;
  if (model.standardization) {
    doc["standardization"] = {{"mean", vec(model.standardization->mean)}, {"std", vec(model.standardization->std)}};
  } else {
    doc["standardization"] = nullptr;
  }
  Json config;
  if (const auto* mlp = std::get_if<MlpModel>(&model.net)) {
    const auto& c = mlp->config;
    config["hidden_units"] = c.hidden_units;
    config["iterations"] = c.iterations;
    config["alpha"] = c.alpha;
    config["restarts"] = c.restarts;
    config["seed"] = c.seed;
    config["error_fn"] = std::string(to_string(c.error_fn));
    config["select"] = c.select == RestartSelection::best ? "best" : "worst";
  } else {
    const auto& c = std::get<RbfModel>(model.net).config;
    config["centers"] = c.centers;
    config["ridge"] = c.ridge;
    config["restarts"] = c.restarts;
    config["seed"] = c.seed;
    config["kmeans_iterations"] = c.kmeans_iterations;
  }
  doc["config"] = config;
  return doc;
}

Model model_from_json(const Json& doc) {
  if (!doc.is_object()) throw FormatError("model document must be a JSON object");
  const auto type = field<std::string>(doc, "type");
  Model model;
  const auto d = field<Index>(doc, "inputs");
  const auto k = field<Index>(doc, "outputs");
  if (d < 1 || k < 1) throw FormatError("model dimensions must be positive");
  const Json& config = doc.contains("config") ? doc.at("config") : Json::object();
  if (type == "mlp") {
    const auto h = field<Index>(doc, "hidden");
    if (h < 1) throw FormatError("hidden unit count must be positive");
    MlpModel m;
    m.params.w1 = matrix_from(doc.at("w1"), d, h, "w1");
    m.params.b1 = vector_from(doc.at("b1"), h, "b1");
    m.params.w2 = matrix_from(doc.at("w2"), h, k, "w2");
    m.params.b2 = vector_from(doc.at("b2"), k, "b2");
    m.params.validate();
    m.config.hidden_units = config.value("hidden_units", h);
    m.config.iterations = config.value("iterations", 1L);
    m.config.alpha = config.value("alpha", 0.0);
    m.config.restarts = config.value("restarts", Index{1});
    m.config.seed = config.value("seed", std::uint64_t{0});
    m.config.error_fn = error_function_from_string(config.value("error_fn", std::string("cross-entropy")));
    m.config.select = config.value("select", std::string("best")) == "worst" ? RestartSelection::worst
                                                                             : RestartSelection::best;
    model.net = std::move(m);
  } else if (type == "rbf") {
    const auto m_count = field<Index>(doc, "centers_count");
    if (m_count < 1) throw FormatError("center count must be positive");
    RbfModel m;
    m.params.width = field<double>(doc, "width");
    m.params.centers = matrix_from(doc.at("centers"), m_count, d, "centers");
    m.params.w = matrix_from(doc.at("w"), m_count, k, "w");
    m.params.b = vector_from(doc.at("b"), k, "b");
    m.params.validate();
    m.config.centers = config.value("centers", m_count);
    m.config.ridge = config.value("ridge", 0.0);
    m.config.restarts = config.value("restarts", Index{1});
    m.config.seed = config.value("seed", std::uint64_t{0});
    m.config.kmeans_iterations = config.value("kmeans_iterations", Index{100});
    model.net = std::move(m);
  } else {
    throw FormatError("unknown model type '" + type + "'");
  }
  model.class_names = doc.contains("class_names") ? doc.at("class_names").get<std::vector<std::string>>()
                                                  : std::vector<std::string>{};
  if (model.class_names.empty())
    for (Index c = 0; c < k; ++c) model.class_names.push_back(std::to_string(c));
  if (static_cast<Index>(model.class_names.size()) != k) throw FormatError("class_names length must equal outputs");
  if (doc.contains("standardization") && !doc.at("standardization").is_null()) {
    const Json& s = doc.at("standardization");
    Standardization st;
    st.mean = vector_from(s.at("mean"), d, "standardization.mean");
    st.std = vector_from(s.at("std"), d, "standardization.std");
    st.constant.assign(static_cast<std::size_t>(d), false);
    if ((st.std.array() <= 0.0).any()) throw FormatError("standardization std must be positive");
    model.standardization = std::move(st);
  }
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) { write_text(path, dump(to_json(model))); }

Model load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

Json to_json(const CountMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const FitReport& report) {
  Json doc;
  doc["training_errors"] = report.training_errors;
  doc["confusion"] = to_json(report.confusion);
  doc["final_objective"] = report.final_objective;
  doc["chosen_restart"] = report.chosen_restart;
  doc["restart_errors"] = report.restart_errors;
  doc["restart_objectives"] = report.restart_objectives;
  doc["objective_trace"] = report.objective_trace;
  return doc;
}

Json points_to_json(int k, std::span<const ImagePoint<double>> points) {
  Json doc;
  doc["k"] = k;
  Json arr = Json::array();
  for (const auto& p : points) {
    Json j;
    j["x"] = p.x;
    j["y"] = p.y;
    j["class"] = p.class_label;
    j["kind"] = std::string(to_string(p.kind));
    j["source"] = p.source_index;
    arr.push_back(std::move(j));
  }
  doc["points"] = std::move(arr);
  return doc;
}

std::vector<ImagePoint<double>> points_from_json(const Json& doc, int* k) {
  const int kk = field<int>(doc, "k");
  if (k) *k = kk;
  std::vector<ImagePoint<double>> points;
  for (const auto& j : doc.at("points")) {
    ImagePoint<double> p;
    p.x = field<double>(j, "x");
    p.y = field<double>(j, "y");
    p.class_label = field<int>(j, "class");
    p.kind = point_kind_from_string(field<std::string>(j, "kind"));
    p.source_index = field<Index>(j, "source");
    if (p.class_label < 0 || p.class_label >= kk) throw FormatError("point class out of range");
    points.push_back(p);
  }
  return points;
}

Json to_json(const ConcentrationReport& report) {
  Json doc;
  Json per = Json::array();
  for (const auto& c : report.per_class) per.push_back(c ? Json(*c) : Json(nullptr));
  doc["per_class"] = std::move(per);
  doc["overall"] = report.overall ? Json(*report.overall) : Json(nullptr);
  return doc;
}

Json to_json(const ReliabilityReport& report) {
  Json doc;
  doc["image"] = {report.image.x(), report.image.y()};
  doc["predicted_class"] = report.predicted_class;
  doc["vertex_distances"] = report.vertex_distances;
  Json cd = Json::array();
  for (const auto& c : report.centroid_distances) cd.push_back(c ? Json(*c) : Json(nullptr));
  doc["centroid_distances"] = std::move(cd);
  doc["knn_agreement"] = report.knn_agreement;
  doc["neighbors"] = report.neighbors;
  return doc;
}

Json to_json(const ThresholdResult& result) {
  Json doc;
  doc["threshold"] = result.threshold;
  doc["kept"] = result.kept;
  doc["errors"] = result.errors;
  return doc;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace bbc
