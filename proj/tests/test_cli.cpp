#include "bbc/pipeline.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace bbc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the bbc binary inside `dir` and captures both streams.
Run run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" BBC_CLI_PATH "' " + args + " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

struct Workspace {
  fs::path dir = test::scratch_dir("cli");
  Workspace() { setenv("BBC_DATA_DIR", BBC_TEST_DATA_DIR, 1); }
  ~Workspace() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("train writes a model, report and manifest") {
  Workspace ws;
  const auto r = run_cli(ws.dir, "train --data wine --hidden 3 --iters 30 --restarts 4 --seed 1 --out m.json");
  REQUIRE(r.code == 0);
  const auto report = Json::parse(r.out);
  CHECK(report.at("training_errors").get<int>() == 0);
  CHECK(fs::exists(ws.dir / "m.json"));
  CHECK(fs::exists(ws.dir / "m.json.report.json"));
  const auto manifest = read_json(ws.dir / "m.json.manifest.json");
  CHECK(manifest.at("dataset").at("sha256") == sha256_file(test::data_file("wine.data")));
  for (const auto& f : manifest.at("files"))
    CHECK(f.at("sha256") == sha256_file(ws.dir / f.at("path").get<std::string>()));
  const Model m = load_model(ws.dir / "m.json");
  CHECK(m.is_mlp());
  CHECK(m.standardization.has_value());
}

TEST_CASE("project, perturb, render and report compose") {
  Workspace ws;
  REQUIRE(run_cli(ws.dir, "train --hidden 2 --iters 100 --restarts 3 --out m.json").code == 0);

  const auto proj = run_cli(ws.dir, "project --model m.json --data wine --out points.json");
  REQUIRE(proj.code == 0);
  const auto points = read_json(ws.dir / "points.json");
  CHECK(points.at("k") == 3);
  CHECK(points.at("points").size() == 178);
  CHECK(points.at("points")[0].at("kind") == "train");

  REQUIRE(run_cli(ws.dir, "perturb --data wine --fraction 0.05 --per-point 4 --rows 0,70,150 --seed 3 --out noisy.csv").code == 0);
  const auto noisy = load_csv(ws.dir / "noisy.csv");
  CHECK(noisy.size() == 12);
  CHECK(noisy.source_index == std::vector<Index>{0, 0, 0, 0, 70, 70, 70, 70, 150, 150, 150, 150});

  const auto np = run_cli(ws.dir, "project --model m.json --data noisy.csv");
  REQUIRE(np.code == 0);
  CHECK(Json::parse(np.out).at("points")[5].at("kind") == "perturbed");

  const auto svg = run_cli(ws.dir, "render --model m.json --data wine --data noisy.csv --hull --title demo --out fig.svg");
  REQUIRE(svg.code == 0);
  const auto text = slurp(ws.dir / "fig.svg");
  CHECK(text.find("layer-perturbed") < text.find("layer-train"));
  CHECK(text.find("class=\"hull\"") != std::string::npos);

  const auto from_points = run_cli(ws.dir, "render --points points.json --mono");
  REQUIRE(from_points.code == 0);
  CHECK(from_points.out.find("<svg") != std::string::npos);

  const auto rep = run_cli(ws.dir, "report --model m.json --data wine --threshold 0.9");
  REQUIRE(rep.code == 0);
  const auto doc = Json::parse(rep.out);
  CHECK(doc.at("rows") == 178);
  CHECK(doc.at("errors") == 0);
  CHECK(doc.at("bounded_outputs") == true);
  CHECK(doc.at("concentration").at("overall").is_number());
  long previous = 179;
  for (const auto& row : doc.at("threshold_table")) {
    CHECK(row.at("kept").get<long>() <= previous);
    previous = row.at("kept").get<long>();
  }
  CHECK(doc.at("threshold").at("threshold") == 0.9);
}

TEST_CASE("perturb with zero noise reproduces the data in raw units") {
  Workspace ws;
  REQUIRE(run_cli(ws.dir, "perturb --fraction 0 --rows 3 --out same.csv").code == 0);
  const auto d = load_csv(ws.dir / "same.csv");
  const auto wine = test::wine();
  CHECK((d.features.row(0) - wine.features.row(3)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("RBF models train and project with unbounded outputs") {
  Workspace ws;
  REQUIRE(run_cli(ws.dir, "train --model rbf --centers 6 --restarts 3 --out r.json").code == 0);
  const auto rep = run_cli(ws.dir, "report --model r.json");
  REQUIRE(rep.code == 0);
  CHECK(Json::parse(rep.out).at("errors").get<int>() <= 5);
}

TEST_CASE("errors map to exit codes") {
  Workspace ws;
  const auto missing = run_cli(ws.dir, "train --data no_such_file.csv --out m.json");
  CHECK(missing.code == 2);
  CHECK(missing.err.find("no_such_file.csv") != std::string::npos);

  std::ofstream(ws.dir / "bad.csv") << "label,x0\na,1\nb\n";
  CHECK(run_cli(ws.dir, "train --data bad.csv").code == 2);

  std::ofstream(ws.dir / "broken.json") << "{not json";
  CHECK(run_cli(ws.dir, "project --model broken.json").code == 2);

  REQUIRE(run_cli(ws.dir, "train --iters 5 --out m.json").code == 0);
  CHECK(run_cli(ws.dir, "report --model m.json --threshold 1.5").code == 2);
  CHECK(run_cli(ws.dir, "perturb --rows 500").code == 2);
  CHECK(run_cli(ws.dir, "perturb --rows x").code == 2);

  const auto unknown = run_cli(ws.dir, "reproduce fig99 --out r");
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("regsweep") != std::string::npos);

  CHECK(run_cli(ws.dir, "train --iters 0").code == 3);
  CHECK(run_cli(ws.dir, "train --select median").code != 0);
}

TEST_CASE("reproduce writes a manifest covering every file") {
  Workspace ws;
  const auto manifest = cmd_reproduce("regsweep", ws.dir / "out", 1);
  CHECK(manifest.at("model").is_null());
  std::size_t svgs = 0;
  for (const auto& f : manifest.at("files")) {
    const auto name = f.at("path").get<std::string>();
    CHECK(f.at("sha256") == sha256_file(ws.dir / "out" / name));
    if (name.ends_with(".svg")) ++svgs;
  }
  CHECK(svgs == 8);
  CHECK(fs::exists(ws.dir / "out" / "manifest.json"));
  CHECK(read_json(ws.dir / "out" / "metrics.json") == manifest.at("metrics"));
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("named datasets resolve under the data root") {
  Workspace ws;
  CHECK(load_named_dataset("wine").data.size() == 178);
  CHECK(load_named_dataset("satimage").data.size() == 3397);
  CHECK_THROWS_AS(load_named_dataset((ws.dir / "absent.data").string()), DataError);
}
