#include "bbc/mlp.hpp"

#include "bbc/scg.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

namespace bbc {

namespace {

// log(1 + exp(a)) without overflow.
double softplus(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))); }

double logistic(double a) {
  if (a >= 0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

struct Activations {
  MatrixXd hidden;  // N x H, tanh
  MatrixXd logits;  // N x K
};

Activations activate(const MlpParams& p, const MatrixXd& x) {
  if (x.cols() != p.inputs())
    throw ShapeError("input has " + std::to_string(x.cols()) + " features, network expects " +
                     std::to_string(p.inputs()));
  Activations a;
  a.hidden = ((x * p.w1).rowwise() + p.b1.transpose()).array().tanh().matrix();
  a.logits = (a.hidden * p.w2).rowwise() + p.b2.transpose();
  return a;
}

void check_targets(const MlpParams& p, const MatrixXd& x, const MatrixXd& targets) {
  if (targets.rows() != x.rows() || targets.cols() != p.outputs())
    throw ShapeError("targets must be " + std::to_string(x.rows()) + " x " + std::to_string(p.outputs()));
}

double penalty(const MlpParams& p) {
  return p.w1.squaredNorm() + p.b1.squaredNorm() + p.w2.squaredNorm() + p.b2.squaredNorm();
}

}  // namespace

std::string_view to_string(ErrorFunction fn) {
  return fn == ErrorFunction::cross_entropy ? "cross-entropy" : "sum-of-squares";
}

ErrorFunction error_function_from_string(std::string_view s) {
  if (s == "cross-entropy" || s == "ce") return ErrorFunction::cross_entropy;
  if (s == "sum-of-squares" || s == "sse") return ErrorFunction::sum_of_squares;
  throw FormatError("unknown error function '" + std::string(s) + "'");
}

VectorXd MlpParams::pack() const {
  VectorXd flat(parameter_count());
  Index o = 0;
  for (Index i = 0; i < w1.rows(); ++i)
    for (Index j = 0; j < w1.cols(); ++j) flat(o++) = w1(i, j);
  flat.segment(o, b1.size()) = b1;
  o += b1.size();
  for (Index i = 0; i < w2.rows(); ++i)
    for (Index j = 0; j < w2.cols(); ++j) flat(o++) = w2(i, j);
  flat.segment(o, b2.size()) = b2;
  return flat;
}

MlpParams MlpParams::unpack(const VectorXd& flat, Index d, Index h, Index k) {
  MlpParams p = zeros(d, h, k);
  if (flat.size() != p.parameter_count())
    throw ShapeError("expected " + std::to_string(p.parameter_count()) + " parameters, got " +
                     std::to_string(flat.size()));
  Index o = 0;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < h; ++j) p.w1(i, j) = flat(o++);
  p.b1 = flat.segment(o, h);
  o += h;
  for (Index i = 0; i < h; ++i)
    for (Index j = 0; j < k; ++j) p.w2(i, j) = flat(o++);
  p.b2 = flat.segment(o, k);
  return p;
}

MlpParams MlpParams::zeros(Index d, Index h, Index k) {
  if (d < 1 || h < 1 || k < 1) throw ShapeError("network dimensions must be >= 1");
  return {MatrixXd::Zero(d, h), VectorXd::Zero(h), MatrixXd::Zero(h, k), VectorXd::Zero(k)};
}

void MlpParams::validate() const {
  if (b1.size() != hidden() || w2.rows() != hidden() || b2.size() != outputs())
    throw ShapeError("inconsistent MLP parameter shapes");
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite())
    throw DataError("MLP parameters contain non-finite values");
}

MlpParams mlp_init(Index d, Index h, Index k, std::uint64_t seed) {
  MlpParams p = MlpParams::zeros(d, h, k);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> w1_dist(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  std::normal_distribution<double> w2_dist(0.0, 1.0 / std::sqrt(static_cast<double>(h)));
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < h; ++j) p.w1(i, j) = w1_dist(rng);
  for (Index i = 0; i < h; ++i)
    for (Index j = 0; j < k; ++j) p.w2(i, j) = w2_dist(rng);
  return p;
}

OutputMatrix mlp_forward(const MlpParams& p, const MatrixXd& x) {
  const Activations a = activate(p, x);
  return OutputMatrix(a.logits.unaryExpr([](double v) { return logistic(v); }));
}

double mlp_objective(const MlpParams& p, const MatrixXd& x, const MatrixXd& targets, double alpha,
                     ErrorFunction fn) {
  check_targets(p, x, targets);
  const Activations a = activate(p, x);
  double data_term = 0;
  if (fn == ErrorFunction::cross_entropy) {
    // -[t log y + (1 - t) log(1 - y)] with y = logistic(a) equals softplus(a) - t a.
    data_term = (a.logits.unaryExpr([](double v) { return softplus(v); }).array() - targets.array() * a.logits.array())
                    .sum();
  } else {
    data_term = 0.5 * (a.logits.unaryExpr([](double v) { return logistic(v); }) - targets).squaredNorm();
  }
  return data_term + 0.5 * alpha * penalty(p);
}

MlpParams mlp_gradient(const MlpParams& p, const MatrixXd& x, const MatrixXd& targets, double alpha,
                       ErrorFunction fn) {
  check_targets(p, x, targets);
  const Activations a = activate(p, x);
  const MatrixXd y = a.logits.unaryExpr([](double v) { return logistic(v); });
  MatrixXd delta_out = y - targets;
  if (fn == ErrorFunction::sum_of_squares) delta_out.array() *= y.array() * (1.0 - y.array());
  const MatrixXd delta_hidden = ((delta_out * p.w2.transpose()).array() * (1.0 - a.hidden.array().square())).matrix();

  MlpParams g;
  g.w2 = a.hidden.transpose() * delta_out + alpha * p.w2;
  g.b2 = delta_out.colwise().sum().transpose() + alpha * p.b2;
  g.w1 = x.transpose() * delta_hidden + alpha * p.w1;
  g.b1 = delta_hidden.colwise().sum().transpose() + alpha * p.b1;
  return g;
}

void TrainConfig::validate() const {
  if (hidden_units < 1) throw DataError("hidden_units must be >= 1");
  if (iterations < 1) throw OptimizationError("iteration budget must be at least 1", 0);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DataError("alpha must be finite and >= 0");
  if (restarts < 1) throw DataError("restarts must be >= 1");
}

namespace {

struct RestartOutcome {
  MlpParams params;
  Index errors = 0;
  double objective = 0;
  std::vector<double> trace;
};

RestartOutcome train_once(const MatrixXd& x, const std::vector<int>& labels, const MatrixXd& targets, Index k,
                          const TrainConfig& config, std::uint64_t seed) {
  const Index d = x.cols();
  const Index h = config.hidden_units;
  const MlpParams init = mlp_init(d, h, k, seed);
  auto f = [&](const VectorXd& w) { return mlp_objective(MlpParams::unpack(w, d, h, k), x, targets, config.alpha, config.error_fn); };
  auto g = [&](const VectorXd& w) {
    return mlp_gradient(MlpParams::unpack(w, d, h, k), x, targets, config.alpha, config.error_fn).pack();
  };
  ScgOptions options;
  options.iterations = config.iterations;
  auto result = scg_minimize<double>(f, g, init.pack(), options);

  RestartOutcome out;
  out.params = MlpParams::unpack(result.x, d, h, k);
  out.errors = count_errors(mlp_forward(out.params, x).values(), labels);
  out.objective = result.trace.back();
  out.trace = std::move(result.trace);
  return out;
}

}  // namespace

TrainedMlp mlp_train(const Dataset& data, const TrainConfig& config) {
  config.validate();
  data.validate();
  const int k = data.num_classes();
  const auto counts = data.class_counts();
  if (k < 2 || std::count_if(counts.begin(), counts.end(), [](Index c) { return c > 0; }) < 2)
    throw DataError("training data must contain at least two classes");

  const MatrixXd targets = one_hot(data.labels, k);
  std::vector<std::future<RestartOutcome>> jobs;
  jobs.reserve(static_cast<std::size_t>(config.restarts));
  for (Index r = 0; r < config.restarts; ++r)
    jobs.push_back(std::async(std::launch::async, train_once, std::cref(data.features), std::cref(data.labels),
                              std::cref(targets), Index{k}, std::cref(config),
                              config.seed + static_cast<std::uint64_t>(r)));
  std::vector<RestartOutcome> outcomes;
  outcomes.reserve(jobs.size());
  for (auto& job : jobs) outcomes.push_back(job.get());

  std::size_t chosen = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    const auto& a = outcomes[r];
    const auto& b = outcomes[chosen];
    const bool better = config.select == RestartSelection::best
                            ? (a.errors < b.errors || (a.errors == b.errors && a.objective < b.objective))
                            : (a.errors > b.errors || (a.errors == b.errors && a.objective > b.objective));
    if (better) chosen = r;
  }

  TrainedMlp out;
  auto& best = outcomes[chosen];
  out.params = std::move(best.params);
  out.report.training_errors = best.errors;
  out.report.confusion = confusion_matrix(mlp_forward(out.params, data.features).values(), data.labels);
  out.report.final_objective = best.objective;
  out.report.chosen_restart = static_cast<Index>(chosen);
  out.report.objective_trace = std::move(best.trace);
  for (const auto& o : outcomes) {
    out.report.restart_errors.push_back(o.errors);
    out.report.restart_objectives.push_back(o.objective);
  }
  return out;
}

}  // namespace bbc
