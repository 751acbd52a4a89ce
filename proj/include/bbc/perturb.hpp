#pragma once

#include "bbc/data.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace bbc {

/// Per-feature mean 0 / population std 1. Constant features keep std = 1
/// and are flagged in Standardization::constant.
Standardization fit_standardization(const MatrixXd& features);
MatrixXd apply_standardization(const Standardization& st, const MatrixXd& features);
MatrixXd invert_standardization(const Standardization& st, const MatrixXd& standardized);

/// Standardized copy of `data` (standardization recorded on the result).
Dataset standardize(const Dataset& data);

struct PerturbationSpec {
  double fraction = 0.0;  // noise std in standardized units
  Index per_point = 1;
  std::uint64_t seed = 0;
  std::optional<std::vector<Index>> selection;  // nullopt = every row

  void validate(Index rows) const;
};

/// Replica rows x_i + fraction * eps, eps ~ N(0, I). Each (seed, row,
/// replica) triple owns its RNG stream, so output does not depend on
/// generation order. Labels are inherited and source_index names row i.
Dataset gaussian_perturb(const Dataset& standardized, const PerturbationSpec& spec);

/// Stream seed for one replica.
std::uint64_t replica_stream(std::uint64_t seed, Index row, Index replica);

}  // namespace bbc
