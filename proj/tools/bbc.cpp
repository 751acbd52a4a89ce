// bbc: train classifiers and draw polygon scatterograms of their outputs.
//
// Exit codes: 0 success, 2 data/format error, 3 optimization error.

#include "bbc/perturb.hpp"
#include "bbc/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

using namespace bbc;

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text(out, text);
}

std::vector<Index> parse_rows(const std::string& s) {
  std::vector<Index> rows;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      rows.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw DataError("--rows expects comma separated integers, got '" + item + "'");
    }
  }
  return rows;
}

std::string echo(int argc, char** argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) s += (i > 1 ? " " : "") + std::string(argv[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polygon scatterograms of classifier outputs"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train an MLP or RBF classifier");
  train_cmd->add_option("--data", train.data, "dataset: wine, satimage or a file path");
  train_cmd->add_option("--model", train.model, "mlp or rbf")->check(CLI::IsMember({"mlp", "rbf"}));
  train_cmd->add_option("--hidden", train.hidden, "MLP hidden units");
  train_cmd->add_option("--centers", train.centers, "RBF basis functions");
  train_cmd->add_option("--alpha", train.alpha, "weight decay coefficient");
  train_cmd->add_option("--iters", train.iterations, "SCG iterations");
  train_cmd->add_option("--restarts", train.restarts, "independent restarts");
  train_cmd->add_option("--seed", train.seed, "base seed; restart r uses seed + r");
  train_cmd->add_option("--select", train.select, "restart to keep")->check(CLI::IsMember({"best", "worst"}));
  train_cmd->add_option("--error", train.error_fn, "cross-entropy or sum-of-squares");
  train_cmd->add_option("--ridge", train.ridge, "RBF output-layer ridge");
  train_cmd->add_option("--out", train.out, "model file (report and manifest are written beside it)");

  std::string model_path, data = "wine", out, kind, format = "json";
  auto* project_cmd = app.add_subcommand("project", "project model outputs onto the polygon");
  project_cmd->add_option("--model", model_path, "model JSON")->required();
  project_cmd->add_option("--data", data, "dataset: wine, satimage or a file path");
  project_cmd->add_option("--kind", kind, "train, test, perturbed or new (default: inferred)");
  project_cmd->add_option("--out", out, "output file (default stdout)");
  project_cmd->add_option("--format", format, "json")->check(CLI::IsMember({"json"}));

  RenderArgs render;
  std::string render_model;
  std::vector<std::string> render_points;
  bool no_labels = false;
  auto* render_cmd = app.add_subcommand("render", "draw an SVG scatterogram");
  render_cmd->add_option("--model", render_model, "model JSON (required with --data)");
  render_cmd->add_option("--data", render.data, "dataset per layer; repeatable");
  render_cmd->add_option("--points", render_points, "points JSON per layer; repeatable");
  render_cmd->add_flag("--mono", render.monochrome, "black markers");
  render_cmd->add_flag("--hull", render.hull, "draw the image of the unit output cube");
  render_cmd->add_flag("--no-labels", no_labels, "omit vertex labels");
  render_cmd->add_option("--title", render.title, "caption");
  render_cmd->add_option("--width", render.width, "pixels");
  render_cmd->add_option("--height", render.height, "pixels");
  render_cmd->add_option("--out", out, "output file (default stdout)");
  render_cmd->add_option("--format", format, "svg")->check(CLI::IsMember({"svg"}));

  PerturbArgs perturb;
  std::string rows;
  auto* perturb_cmd = app.add_subcommand("perturb", "write Gaussian replicas of dataset rows as CSV");
  perturb_cmd->add_option("--data", perturb.data, "dataset: wine, satimage or a file path");
  perturb_cmd->add_option("--fraction", perturb.fraction, "noise std in standardized units");
  perturb_cmd->add_option("--per-point", perturb.per_point, "replicas per row");
  perturb_cmd->add_option("--seed", perturb.seed, "noise seed");
  perturb_cmd->add_option("--rows", rows, "comma separated row indices (default all)");
  perturb_cmd->add_option("--out", out, "output CSV (default stdout)");
  perturb_cmd->add_option("--format", format, "csv")->check(CLI::IsMember({"csv"}));

  double threshold = -1;
  auto* report_cmd = app.add_subcommand("report", "errors, confusion, concentration and threshold table");
  report_cmd->add_option("--model", model_path, "model JSON")->required();
  report_cmd->add_option("--data", data, "dataset: wine, satimage or a file path");
  auto* threshold_opt = report_cmd->add_option("--threshold", threshold, "detection threshold in [0, 1]");
  report_cmd->add_option("--out", out, "output file (default stdout)");
  report_cmd->add_option("--format", format, "json")->check(CLI::IsMember({"json"}));

  std::string scenario;
  std::string out_dir = "reproduce";
  std::uint64_t seed = 1;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "run a figure scenario");
  reproduce_cmd->add_option("scenario", scenario, "conv, underfit, overfit, regsweep, rbf-vs-mlp, satimage")->required();
  reproduce_cmd->add_option("--out", out_dir, "output directory");
  reproduce_cmd->add_option("--seed", seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      const auto result = cmd_train(train, echo(argc, argv));
      std::cout << dump(result.report_json);
      std::cerr << "model written to " << train.out.string() << " (training errors: " << result.report.training_errors
                << ")\n";
    } else if (*project_cmd) {
      std::optional<PointKind> k;
      if (!kind.empty()) k = point_kind_from_string(kind);
      emit(dump(cmd_project(model_path, data, k)), out);
    } else if (*render_cmd) {
      if (!render_model.empty()) render.model = render_model;
      for (const auto& p : render_points) render.points.emplace_back(p);
      render.vertex_labels = !no_labels;
      emit(cmd_render(render), out);
    } else if (*perturb_cmd) {
      if (!rows.empty()) perturb.rows = parse_rows(rows);
      emit(to_csv(cmd_perturb(perturb)), out);
    } else if (*report_cmd) {
      std::optional<double> t;
      if (threshold_opt->count() > 0) t = threshold;
      emit(dump(cmd_report(model_path, data, t)), out);
    } else if (*reproduce_cmd) {
      const Json manifest = cmd_reproduce(scenario, out_dir, seed);
      std::cerr << manifest.at("files").size() << " files written to " << out_dir << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
