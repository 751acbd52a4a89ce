#include "bbc/pipeline.hpp"

#include "bbc/analysis.hpp"
#include "bbc/perturb.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef BBC_DEFAULT_DATA_DIR
#define BBC_DEFAULT_DATA_DIR "data"
#endif

namespace bbc {

namespace fs = std::filesystem;

std::filesystem::path data_root() {
  if (const char* env = std::getenv("BBC_DATA_DIR"); env && *env) return env;
  return BBC_DEFAULT_DATA_DIR;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string sha256_file(const fs::path& path) { return sha256_hex(read_bytes(path)); }

LoadedData load_named_dataset(const std::string& spec) {
  LoadedData out;
  if (spec == "wine") {
    out.path = data_root() / "wine.data";
  } else if (spec == "satimage") {
    out.path = data_root() / "sat.trn";
  } else {
    out.path = spec;
  }
  if (!fs::exists(out.path)) throw DataError("data file not found: '" + out.path.string() + "'");
  const std::string name = out.path.filename().string();
  if (spec == "wine" || name == "wine.data")
    out.data = load_wine(out.path);
  else if (spec == "satimage" || name == "sat.trn")
    out.data = load_satimage(out.path, true);
  else
    out.data = load_csv(out.path);
  out.sha256 = sha256_file(out.path);
  return out;
}

std::pair<Model, FitReport> train_model(const Dataset& raw, const TrainArgs& args) {
  raw.validate();
  const Dataset data = standardize(raw);
  Model model;
  model.standardization = data.standardization;
  model.class_names = data.class_names;
  FitReport report;
  if (args.model == "mlp") {
    TrainConfig config;
    config.hidden_units = args.hidden;
    config.iterations = args.iterations;
    config.alpha = args.alpha;
    config.restarts = args.restarts;
    config.seed = args.seed;
    config.error_fn = error_function_from_string(args.error_fn);
    if (args.select != "best" && args.select != "worst") throw DataError("--select must be best or worst");
    config.select = args.select == "worst" ? RestartSelection::worst : RestartSelection::best;
    auto trained = mlp_train(data, config);
    model.net = MlpModel{std::move(trained.params), config};
    report = std::move(trained.report);
  } else if (args.model == "rbf") {
    RbfConfig config;
    config.centers = args.centers;
    config.ridge = args.ridge;
    config.restarts = args.restarts;
    config.seed = args.seed;
    auto trained = rbf_train(data, config);
    model.net = RbfModel{std::move(trained.params), config};
    report = std::move(trained.report);
  } else {
    throw DataError("unknown model type '" + args.model + "' (expected mlp or rbf)");
  }
  return {std::move(model), std::move(report)};
}

TrainResult cmd_train(const TrainArgs& args, const std::string& command_echo) {
  const LoadedData loaded = load_named_dataset(args.data);
  auto [model, report] = train_model(loaded.data, args);
  TrainResult result;
  result.model = std::move(model);
  result.report = std::move(report);
  result.report_json = to_json(result.report);

  const fs::path model_path = args.out;
  result.report_path = fs::path(model_path.string() + ".report.json");
  result.manifest_path = fs::path(model_path.string() + ".manifest.json");
  const std::string model_text = dump(to_json(result.model));
  const std::string report_text = dump(result.report_json);
  write_text(model_path, model_text);
  write_text(result.report_path, report_text);

  Json manifest;
  manifest["command"] = command_echo;
  Json seeds = Json::array();
  for (Index r = 0; r < args.restarts; ++r) seeds.push_back(args.seed + static_cast<std::uint64_t>(r));
  manifest["seeds"] = seeds;
  manifest["dataset"] = {{"path", loaded.path.string()}, {"sha256", loaded.sha256}};
  manifest["model"] = model_path.filename().string();
  manifest["files"] = Json::array({Json{{"path", model_path.filename().string()}, {"sha256", sha256_hex(model_text)}},
                                   Json{{"path", result.report_path.filename().string()}, {"sha256", sha256_hex(report_text)}}});
  manifest["metrics"] = {{"training_errors", result.report.training_errors},
                         {"final_objective", result.report.final_objective},
                         {"chosen_restart", result.report.chosen_restart}};
  write_text(result.manifest_path, dump(manifest));
  return result;
}

PointKind default_kind(const Dataset& data) {
  return data.source_index.empty() ? PointKind::train : PointKind::perturbed;
}

std::vector<ImagePoint<double>> project_dataset(const Model& model, const Dataset& data, PointKind kind) {
  if (data.dims() != model.inputs())
    throw ShapeError("data has " + std::to_string(data.dims()) + " features, model expects " +
                     std::to_string(model.inputs()));
  if (data.num_classes() > model.num_classes())
    throw DataError("data has more classes than the model outputs");
  const OutputMatrix outputs = model.outputs(data.features);
  std::vector<Index> sources;
  for (Index i = 0; i < data.size(); ++i) sources.push_back(data.source_of(i));
  if (model.num_classes() == 2) return square_view(outputs, data.labels, kind, sources);
  const auto map = build_projection<double>(model.num_classes());
  return project(map, outputs, data.labels, kind, sources);
}

Json cmd_project(const fs::path& model_path, const std::string& data, std::optional<PointKind> kind) {
  const Model model = load_model(model_path);
  const LoadedData loaded = load_named_dataset(data);
  const auto points = project_dataset(model, loaded.data, kind.value_or(default_kind(loaded.data)));
  return points_to_json(model.num_classes(), points);
}

namespace {

Scene make_scene(int k, const std::vector<std::string>& class_names, std::vector<Layer> layers, bool mono,
                 std::string title) {
  Scene scene = Scene::for_classes(k);
  scene.class_names = class_names;
  scene.layers = std::move(layers);
  scene.monochrome = mono;
  scene.overlays.vertex_labels = true;
  scene.title = std::move(title);
  return scene;
}

}  // namespace

std::string cmd_render(const RenderArgs& args) {
  std::vector<Layer> layers;
  int k = 0;
  std::vector<std::string> class_names;
  if (!args.data.empty()) {
    if (!args.model) throw DataError("rendering datasets requires --model");
    const Model model = load_model(*args.model);
    k = model.num_classes();
    class_names = model.class_names;
    for (const auto& spec : args.data) {
      const LoadedData loaded = load_named_dataset(spec);
      const PointKind kind = default_kind(loaded.data);
      layers.push_back({kind, project_dataset(model, loaded.data, kind)});
    }
  }
  for (const auto& path : args.points) {
    int pk = 0;
    auto points = points_from_json(read_json(path), &pk);
    if (k != 0 && pk != k) throw DataError("points file '" + path.string() + "' has k=" + std::to_string(pk));
    k = pk;
    // Group by kind, keeping the file order within each kind.
    for (PointKind kind : {PointKind::perturbed, PointKind::train, PointKind::test, PointKind::new_sample}) {
      Layer layer{kind, {}};
      for (const auto& p : points)
        if (p.kind == kind) layer.points.push_back(p);
      if (!layer.points.empty()) layers.push_back(std::move(layer));
    }
  }
  if (k == 0) throw DataError("nothing to render: give --model with --data, or --points");
  Scene scene = make_scene(k, class_names, std::move(layers), args.monochrome, args.title);
  scene.overlays.hull = args.hull;
  scene.overlays.vertex_labels = args.vertex_labels;
  return render_svg(scene, args.width, args.height);
}

Dataset cmd_perturb(const PerturbArgs& args) {
  const LoadedData loaded = load_named_dataset(args.data);
  const Dataset standardized = standardize(loaded.data);
  PerturbationSpec spec;
  spec.fraction = args.fraction;
  spec.per_point = args.per_point;
  spec.seed = args.seed;
  spec.selection = args.rows;
  Dataset replicas = gaussian_perturb(standardized, spec);
  replicas.features = invert_standardization(*standardized.standardization, replicas.features);
  replicas.standardization.reset();
  return replicas;
}

Json metrics_report(const Model& model, const Dataset& data, std::optional<double> threshold) {
  if (data.dims() != model.inputs()) throw ShapeError("data width does not match the model");
  const OutputMatrix outputs = model.outputs(data.features);
  Json doc;
  const CountMatrix confusion = confusion_matrix(outputs.values(), data.labels);
  doc["rows"] = data.size();
  doc["errors"] = confusion.sum() - confusion.trace();
  doc["accuracy"] = 1.0 - static_cast<double>(confusion.sum() - confusion.trace()) / static_cast<double>(data.size());
  doc["confusion"] = to_json(confusion);
  doc["bounded_outputs"] = outputs.bounded();
  if (model.num_classes() >= 3) {
    const auto map = build_projection<double>(model.num_classes());
    doc["concentration"] = to_json(vertex_concentration(map, outputs.values(), data.labels));
  } else {
    doc["concentration"] = nullptr;
  }
  std::vector<double> sweep = kThresholdSweep;
  if (threshold) {
    sweep.push_back(*threshold);
    std::sort(sweep.begin(), sweep.end());
    sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());
  }
  Json table = Json::array();
  for (double t : sweep) table.push_back(to_json(threshold_filter(outputs.values(), data.labels, t)));
  doc["threshold_table"] = std::move(table);
  if (threshold) doc["threshold"] = to_json(threshold_filter(outputs.values(), data.labels, *threshold));
  return doc;
}

Json cmd_report(const fs::path& model_path, const std::string& data, std::optional<double> threshold) {
  const Model model = load_model(model_path);
  const LoadedData loaded = load_named_dataset(data);
  return metrics_report(model, loaded.data, threshold);
}

// ---------------------------------------------------------------------------
// Figure scenarios

namespace {

struct ScenarioContext {
  fs::path dir;
  std::uint64_t seed = 1;
  Json files = Json::array();
  Json datasets = Json::array();
  Json seeds = Json::array();
  Json metrics = Json::object();

  void emit(const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    files.push_back({{"path", name}, {"sha256", sha256_hex(text)}});
  }

  void use_dataset(const LoadedData& d) {
    for (const auto& e : datasets)
      if (e.at("sha256") == d.sha256) return;
    datasets.push_back({{"name", d.path.filename().string()}, {"sha256", d.sha256}});
  }
};

Dataset replicas_for(const Model& model, const Dataset& raw, double fraction, Index per_point, std::uint64_t seed,
                     std::optional<std::vector<Index>> rows = std::nullopt) {
  Dataset standardized = raw;
  standardized.features = apply_standardization(*model.standardization, raw.features);
  PerturbationSpec spec{fraction, per_point, seed, std::move(rows)};
  Dataset replicas = gaussian_perturb(standardized, spec);
  replicas.features = invert_standardization(*model.standardization, replicas.features);
  return replicas;
}

std::string scatterogram(const Model& model, const std::vector<std::pair<const Dataset*, PointKind>>& inputs,
                         const std::string& title) {
  std::vector<Layer> layers;
  for (const auto& [data, kind] : inputs) layers.push_back({kind, project_dataset(model, *data, kind)});
  Scene scene = make_scene(model.num_classes(), model.class_names, std::move(layers), false, title);
  return render_svg(scene);
}

Json summary(const FitReport& report) {
  return {{"training_errors", report.training_errors},
          {"final_objective", report.final_objective},
          {"chosen_restart", report.chosen_restart},
          {"restart_errors", report.restart_errors},
          {"confusion", to_json(report.confusion)}};
}

std::string fraction_tag(double f) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", static_cast<int>(std::lround(f * 100)));
  return buf;
}

void scenario_conv(ScenarioContext& ctx) {
  const LoadedData wine = load_named_dataset("wine");
  ctx.use_dataset(wine);
  for (long iters : {5L, 10L, 30L}) {
    for (const char* select : {"best", "worst"}) {
      TrainArgs args;
      args.hidden = 3;
      args.iterations = iters;
      args.restarts = 20;
      args.seed = ctx.seed;
      args.select = select;
      const auto [model, report] = train_model(wine.data, args);
      char name[64];
      std::snprintf(name, sizeof name, "conv_it%02ld_%s", iters, select);
      ctx.emit(std::string(name) + ".svg",
               scatterogram(model, {{&wine.data, PointKind::train}},
                            std::string(select) + " of 20, " + std::to_string(iters) + " iterations: " +
                                std::to_string(report.training_errors) + " errors"));
      ctx.metrics[name] = summary(report);
    }
  }
  for (Index r = 0; r < 20; ++r) ctx.seeds.push_back(ctx.seed + static_cast<std::uint64_t>(r));
}

void scenario_underfit(ScenarioContext& ctx) {
  const LoadedData wine = load_named_dataset("wine");
  ctx.use_dataset(wine);
  for (const char* select : {"best", "worst"}) {
    TrainArgs args;
    args.hidden = 1;
    args.iterations = 200;
    args.restarts = 20;
    args.seed = ctx.seed;
    args.select = select;
    const auto [model, report] = train_model(wine.data, args);
    const std::string name = std::string("underfit_") + select;
    ctx.emit(name + ".svg", scatterogram(model, {{&wine.data, PointKind::train}},
                                         "1 hidden unit, " + std::string(select) + ": " +
                                             std::to_string(report.training_errors) + " errors"));
    ctx.metrics[name] = summary(report);
  }
  for (Index r = 0; r < 20; ++r) ctx.seeds.push_back(ctx.seed + static_cast<std::uint64_t>(r));
}

void scenario_overfit(ScenarioContext& ctx) {
  const LoadedData wine = load_named_dataset("wine");
  ctx.use_dataset(wine);
  const auto [train, test] = split(wine.data, 2.0 / 3.0, ctx.seed);
  TrainArgs args;
  args.hidden = 30;
  args.iterations = 200;
  args.restarts = 5;
  args.seed = ctx.seed;
  const auto [model, report] = train_model(train, args);
  const Dataset noisy = replicas_for(model, wine.data, 0.02, 5, ctx.seed);
  ctx.emit("overfit_clean.svg", scatterogram(model, {{&train, PointKind::train}, {&test, PointKind::test}},
                                             "30 hidden units, train + test"));
  ctx.emit("overfit_noise02.svg",
           scatterogram(model, {{&noisy, PointKind::perturbed}, {&train, PointKind::train}, {&test, PointKind::test}},
                        "30 hidden units, 2% noise"));
  ctx.metrics["overfit"] = summary(report);
  ctx.metrics["overfit"]["test_errors"] = count_errors(model.outputs(test.features).values(), test.labels);
  ctx.metrics["overfit"]["noise_errors"] = count_errors(model.outputs(noisy.features).values(), noisy.labels);
  for (Index r = 0; r < args.restarts; ++r) ctx.seeds.push_back(ctx.seed + static_cast<std::uint64_t>(r));
}

void scenario_regsweep(ScenarioContext& ctx) {
  const LoadedData wine = load_named_dataset("wine");
  ctx.use_dataset(wine);
  const auto map = build_projection<double>(3);
  for (double alpha : {0.0, 0.05, 1.0, 5.0}) {
    TrainArgs args;
    args.hidden = 3;
    args.iterations = 200;
    args.restarts = 5;
    args.alpha = alpha;
    args.seed = ctx.seed;
    const auto [model, report] = train_model(wine.data, args);
    const Dataset noisy = replicas_for(model, wine.data, 0.05, 5, ctx.seed);
    char tag[32];
    std::snprintf(tag, sizeof tag, "regsweep_a%g", alpha);
    const std::string label = "alpha = " + std::string(tag + 10);
    ctx.emit(std::string(tag) + "_clean.svg", scatterogram(model, {{&wine.data, PointKind::train}}, label));
    ctx.emit(std::string(tag) + "_noise05.svg",
             scatterogram(model, {{&noisy, PointKind::perturbed}, {&wine.data, PointKind::train}}, label + ", 5% noise"));
    Json m = summary(report);
    m["alpha"] = alpha;
    m["concentration"] = to_json(vertex_concentration(map, model.outputs(wine.data.features).values(), wine.data.labels));
    m["noise_errors"] = count_errors(model.outputs(noisy.features).values(), noisy.labels);
    ctx.metrics[tag] = std::move(m);
  }
  for (Index r = 0; r < 5; ++r) ctx.seeds.push_back(ctx.seed + static_cast<std::uint64_t>(r));
}

void scenario_rbf_vs_mlp(ScenarioContext& ctx) {
  const LoadedData wine = load_named_dataset("wine");
  ctx.use_dataset(wine);
  TrainArgs rbf_args;
  rbf_args.model = "rbf";
  rbf_args.centers = 6;
  rbf_args.restarts = 10;
  rbf_args.seed = ctx.seed;
  const auto [rbf, rbf_report] = train_model(wine.data, rbf_args);

  TrainArgs mlp_args;
  mlp_args.hidden = 6;
  mlp_args.alpha = 0.1;
  mlp_args.iterations = 200;
  mlp_args.restarts = 5;
  mlp_args.seed = ctx.seed;
  const auto [mlp, mlp_report] = train_model(wine.data, mlp_args);

  const Dataset rbf_weak = replicas_for(rbf, wine.data, 0.02, 5, ctx.seed);
  const Dataset rbf_strong = replicas_for(rbf, wine.data, 0.15, 5, ctx.seed);
  const Dataset mlp_strong = replicas_for(mlp, wine.data, 0.15, 5, ctx.seed);
  ctx.emit("rbf_clean.svg", scatterogram(rbf, {{&wine.data, PointKind::train}}, "RBF, 6 Gaussians"));
  ctx.emit("rbf_noise" + fraction_tag(0.02) + ".svg",
           scatterogram(rbf, {{&rbf_weak, PointKind::perturbed}, {&wine.data, PointKind::train}}, "RBF, 2% noise"));
  ctx.emit("rbf_noise" + fraction_tag(0.15) + ".svg",
           scatterogram(rbf, {{&rbf_strong, PointKind::perturbed}, {&wine.data, PointKind::train}}, "RBF, 15% noise"));
  ctx.emit("mlp_noise" + fraction_tag(0.15) + ".svg",
           scatterogram(mlp, {{&mlp_strong, PointKind::perturbed}, {&wine.data, PointKind::train}},
                        "MLP alpha = 0.1, 15% noise"));
  ctx.metrics["rbf"] = summary(rbf_report);
  ctx.metrics["rbf"]["noise15_errors"] = count_errors(rbf.outputs(rbf_strong.features).values(), rbf_strong.labels);
  ctx.metrics["mlp"] = summary(mlp_report);
  ctx.metrics["mlp"]["noise15_errors"] = count_errors(mlp.outputs(mlp_strong.features).values(), mlp_strong.labels);
  for (Index r = 0; r < 10; ++r) ctx.seeds.push_back(ctx.seed + static_cast<std::uint64_t>(r));
}

void scenario_satimage(ScenarioContext& ctx) {
  const LoadedData sat = load_named_dataset("satimage");
  ctx.use_dataset(sat);
  TrainArgs args;
  args.hidden = 30;
  args.alpha = 0.05;
  args.iterations = 100;
  args.restarts = 1;
  args.seed = ctx.seed;
  const auto [model, report] = train_model(sat.data, args);

  // One correctly classified vector per class: the lowest row index.
  const auto predicted = predict_classes(model.outputs(sat.data.features).values());
  std::vector<Index> chosen;
  for (int c = 0; c < sat.data.num_classes(); ++c)
    for (Index i = 0; i < sat.data.size(); ++i)
      if (sat.data.labels[static_cast<std::size_t>(i)] == c && predicted[static_cast<std::size_t>(i)] == c) {
        chosen.push_back(i);
        break;
      }
  const Dataset noisy = replicas_for(model, sat.data, 0.03, 100, ctx.seed, chosen);
  ctx.emit("satimage_clean.svg", scatterogram(model, {{&sat.data, PointKind::train}}, "Satimage, 30 hidden, alpha = 0.05"));
  ctx.emit("satimage_noise03.svg",
           scatterogram(model, {{&noisy, PointKind::perturbed}, {&sat.data, PointKind::train}},
                        "Satimage, 100 replicas per class, 3% noise"));
  Json m = summary(report);
  m["accuracy"] = 1.0 - static_cast<double>(report.training_errors) / static_cast<double>(sat.data.size());
  m["selected_rows"] = chosen;
  m["noise_errors"] = count_errors(model.outputs(noisy.features).values(), noisy.labels);
  ctx.metrics["satimage"] = std::move(m);
  ctx.seeds.push_back(ctx.seed);
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"conv", "underfit", "overfit", "regsweep", "rbf-vs-mlp", "satimage"};
  return names;
}

Json cmd_reproduce(const std::string& scenario, const fs::path& out_dir, std::uint64_t seed) {
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw DataError("unknown scenario '" + scenario + "'; valid scenarios: " + list);
  }
  fs::create_directories(out_dir);
  ScenarioContext ctx;
  ctx.dir = out_dir;
  ctx.seed = seed;
  if (scenario == "conv") scenario_conv(ctx);
  else if (scenario == "underfit") scenario_underfit(ctx);
  else if (scenario == "overfit") scenario_overfit(ctx);
  else if (scenario == "regsweep") scenario_regsweep(ctx);
  else if (scenario == "rbf-vs-mlp") scenario_rbf_vs_mlp(ctx);
  else scenario_satimage(ctx);

  ctx.emit("metrics.json", dump(ctx.metrics));
  Json manifest;
  manifest["command"] = "reproduce " + scenario + " --seed " + std::to_string(seed);
  manifest["seeds"] = ctx.seeds;
  manifest["datasets"] = ctx.datasets;
  manifest["model"] = nullptr;
  manifest["files"] = ctx.files;
  manifest["metrics"] = ctx.metrics;
  write_text(out_dir / "manifest.json", dump(manifest));
  return manifest;
}

}  // namespace bbc
