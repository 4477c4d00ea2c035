#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "ddt/domain.hpp"
#include "ddt/random.hpp"

namespace testing {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ddt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

inline ddt::CovariateSchema mixed_schema() {
  return ddt::CovariateSchema({{"x1", ddt::ContinuousDomain{0.0, 2.0}},
                               {"colour", ddt::CategoricalDomain{{"red", "green", "blue"}}}},
                              {});
}

}  // namespace testing
