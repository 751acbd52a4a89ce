#pragma once

#include "bbc/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bbc {

/// Per-feature affine normalization z = (x - mean) / std.
struct Standardization {
  VectorXd mean;
  VectorXd std;
  std::vector<bool> constant;  // feature had zero spread; std forced to 1
};

struct Dataset {
  MatrixXd features;  // N x D
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::optional<Standardization> standardization;
  // Row of the originating dataset for each row; empty means identity.
  std::vector<Index> source_index;

  Index size() const noexcept { return features.rows(); }
  Index dims() const noexcept { return features.cols(); }
  int num_classes() const noexcept { return static_cast<int>(class_names.size()); }
  std::vector<Index> class_counts() const;
  Index source_of(Index row) const { return source_index.empty() ? row : source_index[static_cast<std::size_t>(row)]; }

  /// Throws DataError when a Dataset invariant does not hold.
  void validate() const;
};

/// UCI wine format: comma separated, class 1-3 first, then 13 features.
Dataset load_wine(const std::filesystem::path& path);

/// UCI satimage format: 36 whitespace separated integer features then the
/// label in {1,2,3,4,5,7}. With drop_last_class the label-7 rows are removed.
Dataset load_satimage(const std::filesystem::path& path, bool drop_last_class);

/// Generic CSV reader. An optional `# classes: a,b,...` comment fixes the
/// class order; labels are then indices into it. Otherwise distinct label
/// strings are sorted (numerically when all numeric). A header row is
/// detected by non-numeric fields; its `label` (or `class`) column holds the
/// labels and an optional `source` column the provenance index. Without a
/// header the label is the first column, or the last when `label_last`.
Dataset load_csv(const std::filesystem::path& path, bool label_last = false);

/// Writes the format read by load_csv, with 17 significant digits so a
/// reload reproduces every feature bit-exactly.
void save_csv(const Dataset& data, const std::filesystem::path& path);
std::string to_csv(const Dataset& data);

/// Seeded uniform shuffle; the first ceil(fraction * N) rows train, the rest
/// test. Each side records original row numbers in source_index.
std::pair<Dataset, Dataset> split(const Dataset& data, double fraction, std::uint64_t seed);

/// Rows `rows` of `data`, keeping provenance.
Dataset subset(const Dataset& data, const std::vector<Index>& rows);

}  // namespace bbc
