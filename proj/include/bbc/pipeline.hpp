#pragma once

// Command implementations behind the `bbc` tool. Each returns the document
// it writes so tests can inspect results without spawning processes.

#include "bbc/data.hpp"
#include "bbc/model.hpp"
#include "bbc/render.hpp"
#include "bbc/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bbc {

/// Dataset root: $BBC_DATA_DIR, else the data/ directory of the source tree.
std::filesystem::path data_root();

struct LoadedData {
  Dataset data;
  std::filesystem::path path;
  std::string sha256;
};

/// `wine` and `satimage` resolve under data_root() (satimage drops the
/// mixed-soil class). Other values are paths: a file named like the UCI
/// originals uses that loader, anything else the generic CSV reader.
LoadedData load_named_dataset(const std::string& spec);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct TrainArgs {
  std::string data = "wine";
  std::string model = "mlp";
  Index hidden = 3;
  Index centers = 6;
  double alpha = 0.0;
  long iterations = 100;
  Index restarts = 1;
  std::uint64_t seed = 1;
  std::string select = "best";
  std::string error_fn = "cross-entropy";
  double ridge = 1e-6;
  std::filesystem::path out = "model.json";
};

struct TrainResult {
  Model model;
  FitReport report;
  Json report_json;
  std::filesystem::path report_path;
  std::filesystem::path manifest_path;
};

/// Standardizes the data, trains, and writes <out>, <out>.report.json and
/// <out>.manifest.json.
TrainResult cmd_train(const TrainArgs& args, const std::string& command_echo = "train");

/// Trains on an in-memory dataset (already raw; standardization applied here).
std::pair<Model, FitReport> train_model(const Dataset& raw, const TrainArgs& args);

/// Projects the model's outputs for `data`. K = 2 uses the square view.
std::vector<ImagePoint<double>> project_dataset(const Model& model, const Dataset& data, PointKind kind);

/// Rows with a source column are perturbed replicas; otherwise training data.
PointKind default_kind(const Dataset& data);

Json cmd_project(const std::filesystem::path& model_path, const std::string& data,
                 std::optional<PointKind> kind = std::nullopt);

struct RenderArgs {
  std::optional<std::filesystem::path> model;
  std::vector<std::string> data;                 // each becomes a layer (needs model)
  std::vector<std::filesystem::path> points;     // points JSON files, each a layer
  bool monochrome = false;
  bool hull = false;
  bool vertex_labels = true;
  std::string title;
  int width = 420;
  int height = 400;
};

std::string cmd_render(const RenderArgs& args);

struct PerturbArgs {
  std::string data = "wine";
  double fraction = 0.02;
  Index per_point = 1;
  std::uint64_t seed = 1;
  std::optional<std::vector<Index>> rows;
};

/// Replicas in raw feature units (noise is added in standardized space).
Dataset cmd_perturb(const PerturbArgs& args);

inline const std::vector<double> kThresholdSweep = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0};

/// errors, confusion, vertex concentration and a threshold-filter table
/// over kThresholdSweep plus `threshold` when given.
Json cmd_report(const std::filesystem::path& model_path, const std::string& data, std::optional<double> threshold);
Json metrics_report(const Model& model, const Dataset& data, std::optional<double> threshold);

const std::vector<std::string>& scenario_names();

/// Runs a named figure pipeline into `out_dir`: SVGs, metrics.json and
/// manifest.json listing every other file with its SHA-256.
Json cmd_reproduce(const std::string& scenario, const std::filesystem::path& out_dir, std::uint64_t seed = 1);

}  // namespace bbc
