#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ddt/forest.hpp"
#include "ddt/induction.hpp"
#include "ddt/odt.hpp"

namespace ddt {

// Step teacher on [lo, hi] with its jump at `cut`; SSE stumps on uniform samples.
struct StepExperiment {
  double lo = 0.0;
  double hi = 2.0;
  double cut = 1.0;
};

struct ConvergenceOptions {
  StepExperiment step;
  std::vector<std::size_t> sizes{250, 500, 1000, 2000, 4000};
  std::size_t repeats = 200;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

struct ConvergenceRow {
  std::size_t n = 0;
  double median_error = 0.0;
  // median error at the previous size over this one (0 on the first row).
  double ratio = 0.0;
};

std::vector<ConvergenceRow> run_convergence(const ConvergenceOptions& options);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

struct CoverageOptions {
  StepExperiment step;
  std::vector<std::size_t> sizes{100, 500, 1000};
  std::size_t outer = 100;
  std::size_t inner = 1000;
  std::uint64_t seed = 2;
  unsigned workers = 0;
};

struct CoverageRow {
  std::size_t n = 0;
  std::vector<double> rates;  // one per outer repetition
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

std::vector<CoverageRow> run_coverage(const CoverageOptions& options);
std::string coverage_csv(const std::vector<CoverageRow>& rows);

struct InterpretationOptions {
  std::size_t runs = 100;
  std::size_t samples = 50;
  std::size_t grid_per_axis = 51;
  std::uint64_t seed = 3;
  unsigned workers = 0;
  ForestConfig forest;
  InductionConfig ddt;
  // Greedy tree fitted to the observed sample.
  OdtConfig baseline;
  // Tree fitted to the full grid; its predictions are the reference partition.
  OdtConfig truth;
};

InterpretationOptions default_interpretation_options();

struct InterpretationRun {
  std::size_t run = 0;
  double odt_mse = 0.0;
  double ddt_mse = 0.0;
  std::size_t interpretable = 0;
  // Smallest first-level mass of a winning covariate over the tree's splits.
  double min_first_level = 1.0;
};

struct InterpretationResult {
  std::vector<InterpretationRun> runs;
  std::size_t ddt_wins = 0;
};

InterpretationResult run_interpretation(const InterpretationOptions& options);
std::string interpretation_csv(const InterpretationResult& result);

}  // namespace ddt
