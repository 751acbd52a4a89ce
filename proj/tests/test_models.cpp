#include "bbc/metrics.hpp"
#include "bbc/mlp.hpp"
#include "bbc/model.hpp"
#include "bbc/perturb.hpp"
#include "bbc/rbf.hpp"
#include "bbc/scg.hpp"
#include "bbc/serialize.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace bbc;

namespace {

MatrixXd random_matrix(std::mt19937_64& rng, Index r, Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  MatrixXd m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

MlpParams random_params(std::mt19937_64& rng, Index d, Index h, Index k) {
  return {random_matrix(rng, d, h), random_matrix(rng, h, 1), random_matrix(rng, h, k), random_matrix(rng, k, 1)};
}

// Forward pass written out with scalar loops.
MatrixXd loop_forward(const MlpParams& p, const MatrixXd& x) {
  MatrixXd y(x.rows(), p.outputs());
  for (Index n = 0; n < x.rows(); ++n) {
    std::vector<double> z(static_cast<std::size_t>(p.hidden()));
    for (Index h = 0; h < p.hidden(); ++h) {
      double a = p.b1(h);
      for (Index d = 0; d < p.inputs(); ++d) a += x(n, d) * p.w1(d, h);
      z[static_cast<std::size_t>(h)] = std::tanh(a);
    }
    for (Index k = 0; k < p.outputs(); ++k) {
      double a = p.b2(k);
      for (Index h = 0; h < p.hidden(); ++h) a += z[static_cast<std::size_t>(h)] * p.w2(h, k);
      y(n, k) = 1 / (1 + std::exp(-a));
    }
  }
  return y;
}

double loop_objective(const MlpParams& p, const MatrixXd& x, const MatrixXd& t, double alpha, ErrorFunction fn) {
  const MatrixXd y = loop_forward(p, x);
  double e = 0;
  for (Index i = 0; i < y.size(); ++i) {
    const double yi = y.data()[i], ti = t.data()[i];
    if (fn == ErrorFunction::cross_entropy)
      e -= ti * std::log(yi) + (1 - ti) * std::log(1 - yi);
    else
      e += 0.5 * (yi - ti) * (yi - ti);
  }
  return e + 0.5 * alpha * p.pack().squaredNorm();
}

Dataset standardized_wine() { return standardize(test::wine()); }

}  // namespace

TEST_CASE("parameter packing") {
  std::mt19937_64 rng(3);
  const auto p = random_params(rng, 13, 3, 3);
  CHECK(p.parameter_count() == 54);
  const VectorXd flat = p.pack();
  REQUIRE(flat.size() == 54);
  // w1 row-major comes first, then b1.
  CHECK(flat(1) == p.w1(0, 1));
  CHECK(flat(3) == p.w1(1, 0));
  CHECK(flat(39) == p.b1(0));
  CHECK(flat(42) == p.w2(0, 0));
  CHECK(flat(53) == p.b2(2));
  const auto q = MlpParams::unpack(flat, 13, 3, 3);
  CHECK(q.pack() == flat);
  CHECK_THROWS_AS(MlpParams::unpack(flat, 13, 4, 3), ShapeError);
}

TEST_CASE("zero network outputs one half everywhere") {
  const auto p = MlpParams::zeros(13, 3, 3);
  const auto y = mlp_forward(p, MatrixXd::Random(4, 13));
  CHECK((y.values().array() == 0.5).all());
  CHECK(y.bounded());
}

TEST_CASE("forward pass and objective match scalar loops") {
  std::mt19937_64 rng(11);
  const auto p = random_params(rng, 5, 4, 3);
  const MatrixXd x = random_matrix(rng, 9, 5);
  MatrixXd t = MatrixXd::Zero(9, 3);
  for (Index i = 0; i < 9; ++i) t(i, i % 3) = 1;
  CHECK((mlp_forward(p, x).values() - loop_forward(p, x)).cwiseAbs().maxCoeff() < 1e-14);
  for (auto fn : {ErrorFunction::cross_entropy, ErrorFunction::sum_of_squares})
    for (double alpha : {0.0, 0.7})
      CHECK(mlp_objective(p, x, t, alpha, fn) ==
            doctest::Approx(loop_objective(p, x, t, alpha, fn)).epsilon(1e-12));
}

TEST_CASE("cross-entropy stays finite for saturated outputs") {
  auto p = MlpParams::zeros(1, 1, 2);
  p.b2 << 800, -800;
  MatrixXd x = MatrixXd::Zero(1, 1);
  MatrixXd t(1, 2);
  t << 0, 1;
  const double e = mlp_objective(p, x, t, 0.0);
  CHECK(std::isfinite(e));
  CHECK(e == doctest::Approx(1600.0));
}

TEST_CASE("analytic gradient matches central differences") {
  struct Case {
    Index d, h, k;
    double alpha;
    ErrorFunction fn;
  };
  const Case cases[] = {{4, 3, 3, 0.0, ErrorFunction::cross_entropy},
                        {13, 2, 3, 0.5, ErrorFunction::cross_entropy},
                        {6, 5, 4, 0.0, ErrorFunction::sum_of_squares},
                        {3, 1, 2, 2.0, ErrorFunction::sum_of_squares},
                        {7, 6, 5, 0.05, ErrorFunction::cross_entropy}};
  std::mt19937_64 rng(42);
  for (const auto& c : cases) {
    CAPTURE(c.d);
    const auto p = random_params(rng, c.d, c.h, c.k);
    const MatrixXd x = random_matrix(rng, 15, c.d);
    MatrixXd t = MatrixXd::Zero(15, c.k);
    for (Index i = 0; i < 15; ++i) t(i, static_cast<Index>(rng() % c.k)) = 1;
    const VectorXd analytic = mlp_gradient(p, x, t, c.alpha, c.fn).pack();
    const VectorXd w = p.pack();
    VectorXd numeric(w.size());
    const double step = 1e-5;
    for (Index i = 0; i < w.size(); ++i) {
      VectorXd hi = w, lo = w;
      hi(i) += step;
      lo(i) -= step;
      numeric(i) = (loop_objective(MlpParams::unpack(hi, c.d, c.h, c.k), x, t, c.alpha, c.fn) -
                    loop_objective(MlpParams::unpack(lo, c.d, c.h, c.k), x, t, c.alpha, c.fn)) /
                   (2 * step);
    }
    const double rel = (analytic - numeric).norm() / std::max(analytic.norm(), numeric.norm());
    CHECK(rel < 1e-6);
  }
}

TEST_CASE("weight decay term is quadratic in the parameters") {
  std::mt19937_64 rng(19);
  const auto p = random_params(rng, 3, 2, 3);
  const MatrixXd x = random_matrix(rng, 6, 3);
  MatrixXd t = MatrixXd::Zero(6, 3);
  for (Index i = 0; i < 6; ++i) t(i, i % 3) = 1;
  const double data = mlp_objective(p, x, t, 0.0);
  const double pen1 = mlp_objective(p, x, t, 0.4) - data;
  const double pen2 = mlp_objective(p, x, t, 0.8) - data;
  CHECK(pen2 == doctest::Approx(2 * pen1).epsilon(1e-12));
  CHECK(pen1 == doctest::Approx(0.2 * p.pack().squaredNorm()).epsilon(1e-12));
  const VectorXd g_alpha = mlp_gradient(p, x, t, 0.4).pack() - mlp_gradient(p, x, t, 0.0).pack();
  CHECK((g_alpha - 0.4 * p.pack()).cwiseAbs().maxCoeff() < 1e-12);
  const auto zero = MlpParams::zeros(3, 2, 3);
  CHECK(mlp_objective(zero, x, t, 3.0) == mlp_objective(zero, x, t, 0.0));
}

TEST_CASE("initialization is seeded and scaled by fan-in") {
  const auto a = mlp_init(400, 50, 3, 9);
  const auto b = mlp_init(400, 50, 3, 9);
  const auto c = mlp_init(400, 50, 3, 10);
  CHECK(a.pack() == b.pack());
  CHECK(a.pack() != c.pack());
  CHECK(a.b1.isZero());
  CHECK(a.b2.isZero());
  const double var = a.w1.squaredNorm() / static_cast<double>(a.w1.size());
  CHECK(var == doctest::Approx(1.0 / 400).epsilon(0.1));
}

TEST_CASE("SCG finds the minimizer of a convex quadratic") {
  std::mt19937_64 rng(5);
  const MatrixXd m = random_matrix(rng, 6, 6);
  const MatrixXd q = m * m.transpose() + MatrixXd::Identity(6, 6);
  const VectorXd b = random_matrix(rng, 6, 1);
  const VectorXd expected = q.ldlt().solve(b);
  auto f = [&](const VectorXd& x) { return 0.5 * x.dot(q * x) - b.dot(x); };
  auto g = [&](const VectorXd& x) -> VectorXd { return q * x - b; };
  ScgOptions opt;
  opt.iterations = 200;
  const auto r = scg_minimize<double>(f, g, VectorXd::Zero(6), opt);
  CHECK((r.x - expected).norm() < 1e-8);
  CHECK(r.converged);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
  CHECK(r.trace.front() == 0.0);
  CHECK(g(r.x).norm() < 1e-6);
}

TEST_CASE("SCG in long double minimizes a Rosenbrock valley") {
  using LD = long double;
  auto f = [](const Vector<LD>& x) { return (1 - x(0)) * (1 - x(0)) + 100 * (x(1) - x(0) * x(0)) * (x(1) - x(0) * x(0)); };
  auto g = [](const Vector<LD>& x) {
    Vector<LD> d(2);
    d(0) = -2 * (1 - x(0)) - 400 * x(0) * (x(1) - x(0) * x(0));
    d(1) = 200 * (x(1) - x(0) * x(0));
    return d;
  };
  Vector<LD> x0(2);
  x0 << -1.2L, 1.0L;
  ScgOptions opt;
  opt.iterations = 2000;
  const auto r = scg_minimize<LD>(f, g, x0, opt);
  CHECK(std::abs(static_cast<double>(r.x(0)) - 1.0) < 1e-4);
  CHECK(std::abs(static_cast<double>(r.x(1)) - 1.0) < 1e-4);
}

TEST_CASE("SCG rejects an empty budget and non-finite values") {
  auto f = [](const VectorXd& x) { return x.squaredNorm(); };
  auto g = [](const VectorXd& x) -> VectorXd { return 2 * x; };
  ScgOptions opt;
  opt.iterations = 0;
  CHECK_THROWS_AS(scg_minimize<double>(f, g, VectorXd::Ones(2), opt), OptimizationError);
  opt.iterations = 10;
  auto bad = [](const VectorXd&) { return std::numeric_limits<double>::quiet_NaN(); };
  try {
    scg_minimize<double>(bad, g, VectorXd::Ones(2), opt);
    FAIL("expected OptimizationError");
  } catch (const OptimizationError& e) {
    CHECK(e.iteration() == 0);
  }
}

TEST_CASE("one SCG iteration records two trace entries") {
  auto f = [](const VectorXd& x) { return x.squaredNorm(); };
  auto g = [](const VectorXd& x) -> VectorXd { return 2 * x; };
  ScgOptions opt;
  opt.iterations = 1;
  const auto r = scg_minimize<double>(f, g, VectorXd::Ones(3), opt);
  CHECK(r.trace.size() == 2);
  CHECK(r.iterations == 1);
  CHECK(r.trace[1] < r.trace[0]);
}

TEST_CASE("argmax ties go to the lowest index") {
  MatrixXd y(3, 3);
  y << 0.5, 0.5, 0.1, 0.2, 0.7, 0.7, 0.3, 0.3, 0.3;
  CHECK(predict_classes(y) == std::vector<int>{0, 1, 0});
  const std::vector<int> labels = {0, 2, 1};
  CHECK(count_errors(y, labels) == 2);
  const auto c = confusion_matrix(y, labels);
  CHECK(c(0, 0) == 1);
  CHECK(c(2, 1) == 1);
  CHECK(c(1, 0) == 1);
  CHECK(c.sum() == 3);
  const auto oh = one_hot(labels, 3);
  CHECK(oh(1, 2) == 1);
  CHECK(oh.sum() == 3);
}

TEST_CASE("training is reproducible and restarts are seeded independently") {
  const auto data = standardized_wine();
  TrainConfig cfg;
  cfg.hidden_units = 3;
  cfg.iterations = 20;
  cfg.restarts = 4;
  cfg.seed = 7;
  const auto a = mlp_train(data, cfg);
  const auto b = mlp_train(data, cfg);
  CHECK(a.params.pack() == b.params.pack());
  CHECK(a.report.objective_trace == b.report.objective_trace);
  CHECK(a.report.restart_objectives == b.report.restart_objectives);
  REQUIRE(a.report.restart_errors.size() == 4);

  // Restart r of seed s equals restart 0 of seed s + r.
  TrainConfig single = cfg;
  single.restarts = 1;
  single.seed = cfg.seed + 2;
  CHECK(mlp_train(data, single).report.restart_objectives[0] == a.report.restart_objectives[2]);

  const auto best = *std::min_element(a.report.restart_errors.begin(), a.report.restart_errors.end());
  CHECK(a.report.training_errors == best);
  CHECK(a.report.training_errors ==
        a.report.restart_errors[static_cast<std::size_t>(a.report.chosen_restart)]);
  CHECK(a.report.confusion.sum() == data.size());
  for (std::size_t i = 1; i < a.report.objective_trace.size(); ++i)
    CHECK(a.report.objective_trace[i] <= a.report.objective_trace[i - 1]);

  cfg.select = RestartSelection::worst;
  const auto w = mlp_train(data, cfg);
  const auto worst = *std::max_element(w.report.restart_errors.begin(), w.report.restart_errors.end());
  CHECK(w.report.training_errors == worst);
}

TEST_CASE("training rejects bad configurations") {
  auto data = standardized_wine();
  TrainConfig cfg;
  cfg.iterations = 0;
  CHECK_THROWS_AS(mlp_train(data, cfg), OptimizationError);
  cfg.iterations = 5;
  cfg.hidden_units = 0;
  CHECK_THROWS_AS(mlp_train(data, cfg), DataError);
  cfg.hidden_units = 2;
  auto one_class = subset(data, {0, 1, 2, 3});
  CHECK_THROWS_AS(mlp_train(one_class, cfg), DataError);
}

TEST_CASE("stronger weight decay gives smaller weights") {
  const auto data = standardized_wine();
  std::vector<double> medians;
  for (double alpha : {0.0, 0.05, 1.0, 5.0}) {
    std::vector<double> norms;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      TrainConfig cfg;
      cfg.hidden_units = 3;
      cfg.iterations = 200;
      cfg.alpha = alpha;
      cfg.seed = seed;
      norms.push_back(mlp_train(data, cfg).params.pack().squaredNorm());
    }
    std::nth_element(norms.begin(), norms.begin() + 2, norms.end());
    medians.push_back(norms[2]);
  }
  for (std::size_t i = 1; i < medians.size(); ++i) CHECK(medians[i] <= medians[i - 1]);
}

TEST_CASE("k-means returns distinct centers and is seeded") {
  const auto data = standardized_wine();
  const MatrixXd a = kmeans(data.features, 6, 3);
  const MatrixXd b = kmeans(data.features, 6, 3);
  CHECK(a == b);
  REQUIRE(a.rows() == 6);
  for (Index i = 0; i < 6; ++i)
    for (Index j = i + 1; j < 6; ++j) CHECK((a.row(i) - a.row(j)).norm() > 1e-6);
  CHECK_THROWS_AS(kmeans(data.features, 0, 1), DataError);
  CHECK_THROWS_AS(kmeans(data.features, data.size() + 1, 1), DataError);
}

TEST_CASE("k-means recovers well separated clusters") {
  MatrixXd x(6, 2);
  x << 0, 0, 0.1, 0, 0, 0.1, 10, 10, 10.1, 10, 10, 10.1;
  const MatrixXd c = kmeans(x, 2, 1);
  const Eigen::RowVector2d lo(1.0 / 30, 1.0 / 30), hi(10 + 1.0 / 30, 10 + 1.0 / 30);
  const bool order = (c.row(0) - lo).norm() < 1e-12;
  CHECK((c.row(order ? 0 : 1) - lo).norm() < 1e-12);
  CHECK((c.row(order ? 1 : 0) - hi).norm() < 1e-12);
}

TEST_CASE("RBF basis activations follow the Gaussian") {
  RbfParams p;
  p.centers = MatrixXd::Zero(1, 2);
  p.width = 2;
  p.w = MatrixXd::Ones(1, 2);
  p.b = VectorXd::Zero(2);
  MatrixXd x(2, 2);
  x << 0, 0, 2, 0;
  const MatrixXd phi = rbf_design(p, x);
  CHECK(phi(0, 0) == 1.0);
  CHECK(phi(1, 0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  p.w(0, 0) = 3;
  const auto y = rbf_forward(p, x);
  CHECK_FALSE(y.bounded());
}

TEST_CASE("RBF with one center per training row interpolates") {
  const auto wine = standardized_wine();
  std::vector<Index> rows;
  for (Index i = 0; i < wine.size(); i += 9) rows.push_back(i);
  const auto small = subset(wine, rows);
  const auto fit = rbf_train(small, small.size(), 1, 1e-12);
  CHECK(fit.report.training_errors == 0);
  const auto y = rbf_forward(fit.params, small.features).values();
  CHECK((y - one_hot(small.labels, 3)).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("RBF restarts pick the fewest errors") {
  const auto data = standardized_wine();
  RbfConfig cfg;
  cfg.restarts = 5;
  cfg.seed = 3;
  const auto fit = rbf_train(data, cfg);
  const auto best = *std::min_element(fit.report.restart_errors.begin(), fit.report.restart_errors.end());
  CHECK(fit.report.training_errors == best);
  CHECK(fit.params.width > 0);
  const auto again = rbf_train(data, cfg);
  CHECK(again.params.w == fit.params.w);
  cfg.centers = 0;
  CHECK_THROWS_AS(rbf_train(data, cfg), DataError);
}

TEST_CASE("model JSON round-trips every parameter bit-exactly") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_params(rng, 4, 3, 3);
    // Awkward values that a fixed-precision printer would alter.
    p.w1(0, 0) = 0.1 + 0.2;
    p.w1(1, 1) = 1e-300;
    p.w2(0, 0) = -std::numeric_limits<double>::denorm_min();
    p.b2(1) = std::nextafter(1.0, 2.0);
    Model m;
    m.net = MlpModel{p, TrainConfig{}};
    m.class_names = {"1", "2", "3"};
    Standardization st;
    st.mean = random_matrix(rng, 4, 1);
    st.std = random_matrix(rng, 4, 1).cwiseAbs().array() + 0.1;
    st.constant = {false, true, false, false};
    m.standardization = st;
    const Model back = model_from_json(Json::parse(dump(to_json(m))));
    const auto& q = std::get<MlpModel>(back.net).params;
    CHECK(q.pack() == p.pack());
    CHECK(back.standardization->mean == st.mean);
    CHECK(back.standardization->std == st.std);
    CHECK(back.class_names == m.class_names);
    CHECK(dump(to_json(back)) == dump(to_json(m)));
  }
}

TEST_CASE("RBF model round-trips through a file") {
  const auto data = standardized_wine();
  RbfConfig cfg;
  const auto fit = rbf_train(data, cfg);
  Model m;
  m.net = RbfModel{fit.params, cfg};
  m.class_names = data.class_names;
  const auto dir = test::scratch_dir("rbf");
  save_model(m, dir / "m.json");
  const Model back = load_model(dir / "m.json");
  const auto& q = std::get<RbfModel>(back.net).params;
  CHECK(q.centers == fit.params.centers);
  CHECK(q.width == fit.params.width);
  CHECK(q.w == fit.params.w);
  CHECK(q.b == fit.params.b);
  CHECK(back.outputs(data.features).values() == m.outputs(data.features).values());
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed model documents are rejected") {
  CHECK_THROWS_AS(model_from_json(Json::parse("[]")), FormatError);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"type":"svm"})")), FormatError);
  Model m;
  m.net = MlpModel{MlpParams::zeros(2, 2, 3), TrainConfig{}};
  m.class_names = {"a", "b", "c"};
  Json doc = to_json(m);
  doc["w1"].erase(0);
  CHECK_THROWS_AS(model_from_json(doc), FormatError);
}

TEST_CASE("model applies its standardization to raw input") {
  const auto raw = test::wine();
  const auto st = fit_standardization(raw.features);
  Model m;
  m.net = MlpModel{mlp_init(13, 2, 3, 1), TrainConfig{}};
  m.standardization = st;
  m.class_names = raw.class_names;
  const MatrixXd z = apply_standardization(st, raw.features);
  CHECK((m.outputs(raw.features).values() - m.outputs_standardized(z).values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.num_classes() == 3);
  CHECK(m.inputs() == 13);
  CHECK_THROWS_AS(m.outputs(MatrixXd::Zero(2, 5)), ShapeError);
}
