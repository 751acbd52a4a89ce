#include "bbc/rbf.hpp"

#include <cmath>
#include <future>
#include <numeric>
#include <random>

namespace bbc {

void RbfParams::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw DataError("RBF width must be positive");
  if (w.rows() != centers.rows() || b.size() != w.cols()) throw ShapeError("inconsistent RBF parameter shapes");
  if (!centers.allFinite() || !w.allFinite() || !b.allFinite())
    throw DataError("RBF parameters contain non-finite values");
}

void RbfConfig::validate() const {
  if (centers < 1) throw DataError("RBF needs at least one center");
  if (!(ridge >= 0.0)) throw DataError("ridge must be >= 0");
  if (restarts < 1) throw DataError("restarts must be >= 1");
  if (kmeans_iterations < 1) throw DataError("k-means iterations must be >= 1");
}

MatrixXd kmeans(const MatrixXd& x, Index m, std::uint64_t seed, Index max_iterations) {
  const Index n = x.rows();
  if (m < 1 || m > n)
    throw DataError("k-means needs 1 <= m <= N (m=" + std::to_string(m) + ", N=" + std::to_string(n) + ")");
  std::mt19937_64 rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  MatrixXd centers(m, x.cols());
  for (Index c = 0; c < m; ++c) centers.row(c) = x.row(order[static_cast<std::size_t>(c)]);

  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::vector<Index> assignment(static_cast<std::size_t>(n), -1);
  for (Index it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = (x.row(i) - centers.row(0)).squaredNorm();
      for (Index c = 1; c < m; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assignment[static_cast<std::size_t>(i)] != best) {
        assignment[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && it > 0) break;

    MatrixXd sums = MatrixXd::Zero(m, x.cols());
    std::vector<Index> members(static_cast<std::size_t>(m), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(assignment[static_cast<std::size_t>(i)]) += x.row(i);
      ++members[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
    }
    for (Index c = 0; c < m; ++c) {
      if (members[static_cast<std::size_t>(c)] == 0)
        centers.row(c) = x.row(pick(rng));
      else
        centers.row(c) = sums.row(c) / static_cast<double>(members[static_cast<std::size_t>(c)]);
    }
  }
  return centers;
}

MatrixXd rbf_design(const RbfParams& p, const MatrixXd& x) {
  if (x.cols() != p.inputs())
    throw ShapeError("input has " + std::to_string(x.cols()) + " features, RBF expects " + std::to_string(p.inputs()));
  const double scale = 1.0 / (2.0 * p.width * p.width);
  MatrixXd phi(x.rows(), p.basis_count());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index c = 0; c < p.basis_count(); ++c) phi(i, c) = std::exp(-scale * (x.row(i) - p.centers.row(c)).squaredNorm());
  return phi;
}

OutputMatrix rbf_forward(const RbfParams& p, const MatrixXd& x) {
  return OutputMatrix((rbf_design(p, x) * p.w).rowwise() + p.b.transpose());
}

TrainedRbf rbf_train(const Dataset& data, Index m, std::uint64_t seed, double ridge) {
  data.validate();
  if (m < 1 || m > data.size())
    throw DataError("basis count " + std::to_string(m) + " must lie in [1, " + std::to_string(data.size()) + "]");
  if (!(ridge >= 0.0)) throw DataError("ridge must be >= 0");
  const int k = data.num_classes();

  RbfParams p;
  p.centers = kmeans(data.features, m, seed);
  double max_dist = 0;
  for (Index a = 0; a < m; ++a)
    for (Index b = a + 1; b < m; ++b) max_dist = std::max(max_dist, (p.centers.row(a) - p.centers.row(b)).norm());
  p.width = max_dist > 0 ? max_dist : 1.0;

  // Augmented least squares [Phi 1; sqrt(ridge) I] W = [T; 0].
  const Index n = data.size();
  const MatrixXd phi = rbf_design(p, data.features);
  MatrixXd lhs = MatrixXd::Zero(n + m + 1, m + 1);
  lhs.topLeftCorner(n, m) = phi;
  lhs.block(0, m, n, 1).setOnes();
  lhs.bottomRows(m + 1).diagonal().setConstant(std::sqrt(ridge));
  MatrixXd rhs = MatrixXd::Zero(n + m + 1, k);
  rhs.topRows(n) = one_hot(data.labels, k);
  const MatrixXd sol = lhs.colPivHouseholderQr().solve(rhs);
  p.w = sol.topRows(m);
  p.b = sol.row(m).transpose();
  p.validate();

  TrainedRbf out;
  out.params = std::move(p);
  const MatrixXd y = rbf_forward(out.params, data.features).values();
  out.report.confusion = confusion_matrix(y, data.labels);
  out.report.training_errors = out.report.confusion.sum() - out.report.confusion.trace();
  out.report.final_objective = 0.5 * (y - rhs.topRows(n)).squaredNorm();
  out.report.objective_trace = {out.report.final_objective};
  return out;
}

TrainedRbf rbf_train(const Dataset& data, const RbfConfig& config) {
  config.validate();
  std::vector<std::future<TrainedRbf>> jobs;
  for (Index r = 0; r < config.restarts; ++r)
    jobs.push_back(std::async(std::launch::async, [&data, &config, r] {
      return rbf_train(data, config.centers, config.seed + static_cast<std::uint64_t>(r), config.ridge);
    }));
  std::vector<TrainedRbf> fits;
  for (auto& j : jobs) fits.push_back(j.get());

  std::size_t chosen = 0;
  for (std::size_t r = 1; r < fits.size(); ++r) {
    const auto& a = fits[r].report;
    const auto& b = fits[chosen].report;
    if (a.training_errors < b.training_errors ||
        (a.training_errors == b.training_errors && a.final_objective < b.final_objective))
      chosen = r;
  }
  TrainedRbf out = fits[chosen];
  out.report.chosen_restart = static_cast<Index>(chosen);
  for (const auto& f : fits) {
    out.report.restart_errors.push_back(f.report.training_errors);
    out.report.restart_objectives.push_back(f.report.final_objective);
  }
  return out;
}

}  // namespace bbc
