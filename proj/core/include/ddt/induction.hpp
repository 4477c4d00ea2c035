#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ddt/odt.hpp"
#include "ddt/stability.hpp"
#include "ddt/teacher.hpp"
#include "ddt/tree.hpp"

namespace ddt {

enum class StrategyKind { breadth_first, path_based, parallel };

struct Strategy {
  StrategyKind kind = StrategyKind::breadth_first;
  // Path-based: split directions from the root, 'L' or 'R' per level.
  std::string target;
  // Parallel: concurrent node fits (0 uses the global worker count).
  unsigned workers = 0;

  bool operator==(const Strategy&) const = default;
};

// Node id reached by following `directions` from the root. Throws
// ConfigError on characters other than L and R.
std::uint64_t path_target_id(const std::string& directions);

struct StoppingConfig {
  std::size_t max_interpretable_depth = 4;
  std::size_t max_interpretable_nodes = 15;
  double pxi_threshold = 0.10;
  // Splits that would leave a child with fewer observed rows are refused.
  std::size_t min_region_observed = 0;
};

struct InductionConfig {
  SplitCriterion criterion;
  StabilityConfig stability;
  StoppingConfig stopping;
  OdtConfig odt;
  Strategy strategy;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::size_t eval_sample_size = 10000;
  Source weight_source = Source::observed;
  Source impurity_source = Source::pseudo;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Batches of node ids in processing order. Breadth-first emits whole depth
// levels; path-based keeps only the nodes on the root-to-target path;
// parallel groups nodes whose sampling paths do not intersect, each batch
// following the batches of its ancestors.
std::vector<std::vector<std::uint64_t>> schedule(const Strategy& strategy, std::vector<std::uint64_t> frontier);

// Grows the hybrid tree and computes its explanation indices. `observed` may
// be empty; node counts are then zero and the weights fall back to region
// mass.
DdtTree induce_ddt(const Teacher& teacher, const CovariateSchema& schema, const Dataset& observed,
                   const InductionConfig& config);

// Full prediction: interpretable splits, then the predictive subtree.
double predict(const DdtTree& tree, std::span<const double> row);
// Value of the frontier node reached through the interpretable splits only.
double predict_partition(const DdtTree& tree, std::span<const double> row);

}  // namespace ddt
