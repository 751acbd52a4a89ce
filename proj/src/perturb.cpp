#include "bbc/perturb.hpp"

#include <cmath>
#include <random>

namespace bbc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Standardization fit_standardization(const MatrixXd& features) {
  if (features.rows() == 0) throw DataError("cannot standardize empty data");
  Standardization st;
  const double n = static_cast<double>(features.rows());
  st.mean = features.colwise().mean().transpose();
  st.std.resize(features.cols());
  st.constant.assign(static_cast<std::size_t>(features.cols()), false);
  for (Index j = 0; j < features.cols(); ++j) {
    const double var = (features.col(j).array() - st.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    if (!(sd > 0.0)) {
      st.std(j) = 1.0;
      st.constant[static_cast<std::size_t>(j)] = true;
    } else {
      st.std(j) = sd;
    }
  }
  return st;
}

MatrixXd apply_standardization(const Standardization& st, const MatrixXd& features) {
  if (features.cols() != st.mean.size())
    throw ShapeError("standardization has " + std::to_string(st.mean.size()) + " features, data has " +
                     std::to_string(features.cols()));
  return ((features.rowwise() - st.mean.transpose()).array().rowwise() / st.std.transpose().array()).matrix();
}

MatrixXd invert_standardization(const Standardization& st, const MatrixXd& standardized) {
  if (standardized.cols() != st.mean.size()) throw ShapeError("standardization width mismatch");
  return ((standardized.array().rowwise() * st.std.transpose().array()).rowwise() + st.mean.transpose().array())
      .matrix();
}

Dataset standardize(const Dataset& data) {
  data.validate();
  Dataset out = data;
  const Standardization st = fit_standardization(data.features);
  out.features = apply_standardization(st, data.features);
  out.standardization = st;
  return out;
}

void PerturbationSpec::validate(Index rows) const {
  if (!(fraction >= 0.0) || !std::isfinite(fraction)) throw DataError("noise fraction must be finite and >= 0");
  if (per_point < 1) throw DataError("per_point must be >= 1");
  if (selection)
    for (Index i : *selection)
      if (i < 0 || i >= rows)
        throw DataError("selected row " + std::to_string(i) + " out of range [0, " + std::to_string(rows) + ")");
}

std::uint64_t replica_stream(std::uint64_t seed, Index row, Index replica) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(row));
  return splitmix64(h ^ static_cast<std::uint64_t>(replica));
}

Dataset gaussian_perturb(const Dataset& standardized, const PerturbationSpec& spec) {
  standardized.validate();
  spec.validate(standardized.size());
  std::vector<Index> rows;
  if (spec.selection) {
    rows = *spec.selection;
  } else {
    rows.resize(static_cast<std::size_t>(standardized.size()));
    for (Index i = 0; i < standardized.size(); ++i) rows[static_cast<std::size_t>(i)] = i;
  }

  Dataset out;
  out.class_names = standardized.class_names;
  out.standardization = standardized.standardization;
  const Index total = static_cast<Index>(rows.size()) * spec.per_point;
  const Index dims = standardized.dims();
  out.features.resize(total, dims);
  out.labels.resize(static_cast<std::size_t>(total));
  out.source_index.resize(static_cast<std::size_t>(total));

  Index r = 0;
  for (Index row : rows) {
    for (Index rep = 0; rep < spec.per_point; ++rep, ++r) {
      std::mt19937_64 rng(replica_stream(spec.seed, row, rep));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index j = 0; j < dims; ++j) out.features(r, j) = standardized.features(row, j) + spec.fraction * normal(rng);
      out.labels[static_cast<std::size_t>(r)] = standardized.labels[static_cast<std::size_t>(row)];
      out.source_index[static_cast<std::size_t>(r)] = standardized.source_of(row);
    }
  }
  return out;
}

}  // namespace bbc
