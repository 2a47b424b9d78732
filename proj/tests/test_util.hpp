#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "trimix/numeric/rng.hpp"
#include "trimix/numeric/tensor.hpp"

namespace trimix::test {

inline Tensor random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double& x : t.data()) x = scale * (2.0 * rng.uniform() - 1.0);
  return t;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::filesystem::path golden(const std::string& name) { return std::filesystem::path(TRIMIX_GOLDEN_DIR) / name; }
inline std::filesystem::path data_file(const std::string& name) { return std::filesystem::path(TRIMIX_DATA_DIR) / name; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("trimix_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace trimix::test
