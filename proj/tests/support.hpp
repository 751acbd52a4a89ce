#pragma once

#include "bbc/data.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace bbc::test {

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(BBC_TEST_DATA_DIR) / name;
}

inline Dataset wine() { return load_wine(data_file("wine.data")); }

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() / ("bbc-" + tag + "-" + std::to_string(rng() % 1000000000));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace bbc::test
