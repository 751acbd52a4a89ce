#pragma once

// JSON documents exchanged by the command line tool. Keys are emitted in a
// fixed order so that output files diff cleanly.
//
//   model:   {"type": "mlp"|"rbf", shape fields, row-major parameter arrays,
//             "standardization", "class_names", "config"}
//   points:  {"k": K, "points": [{"x", "y", "class", "kind", "source"}]}
//   report:  training errors, confusion, objective and per-restart summary

#include "bbc/analysis.hpp"
#include "bbc/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace bbc {

using Json = nlohmann::ordered_json;

Json to_json(const Model& model);
Model model_from_json(const Json& doc);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

Json to_json(const FitReport& report);
Json to_json(const CountMatrix& m);

Json points_to_json(int k, std::span<const ImagePoint<double>> points);
std::vector<ImagePoint<double>> points_from_json(const Json& doc, int* k = nullptr);

Json to_json(const ConcentrationReport& report);
Json to_json(const ReliabilityReport& report);
Json to_json(const ThresholdResult& result);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);

}  // namespace bbc
