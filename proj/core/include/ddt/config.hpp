#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddt/domain.hpp"
#include "ddt/forest.hpp"
#include "ddt/induction.hpp"
#include "ddt/teacher.hpp"

namespace ddt {

enum class TeacherType { step, piecewise, two_cut, plateau, grid, forest, external };

struct TeacherSpec {
  TeacherType type = TeacherType::step;
  // Unary builtins.
  std::string name = "x";
  double lo = 0.0;
  double hi = 1.0;
  double cut = 0.5;
  double left = 0.0;
  double right = 1.0;
  std::vector<double> breaks;
  std::vector<double> values;
  double plateau_lo = 0.4;
  double plateau_hi = 0.6;
  // grid: lookup table; forest: training data.
  std::filesystem::path data;
  ForestConfig forest;
  // external
  std::string command;
  std::chrono::milliseconds timeout{60000};
  std::optional<std::string> schema_json;
};

struct RunConfig {
  InductionConfig induction;
  TeacherSpec teacher;
  std::optional<std::filesystem::path> observed;
  double domain_margin = 0.0;
  std::optional<std::filesystem::path> output;
  // Canonical JSON of the parsed document.
  std::string echo;
};

// Relative paths resolve against `base_dir`. Throws ConfigError on unknown
// keys, missing seed, or invalid values.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

struct RunInputs {
  CovariateSchema schema;
  TeacherPtr teacher;
  Dataset observed;
  std::vector<std::string> warnings;
};

// Loads datasets and builds (or connects to) the teacher.
RunInputs prepare_run(const RunConfig& config);

}  // namespace ddt
