#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ddt/criteria.hpp"
#include "ddt/domain.hpp"
#include "ddt/random.hpp"

namespace ddt {

// Fitted statistics of one side of a split (or of any node).
struct NodeStat {
  std::size_t count = 0;
  double mean = 0.0;
  double sse = 0.0;
  ClassDistribution classes;  // empty counts for continuous responses

  bool is_categorical() const { return !classes.counts.empty(); }
  // Mean response, or the modal class code.
  double value() const;
  // Variance for continuous responses, entropy under `criterion` otherwise.
  double impurity(const SplitCriterion& criterion) const;

  bool operator==(const NodeStat&) const = default;
};

// class_count == 0 means a continuous response.
NodeStat make_node_stat(std::span<const double> y, std::size_t class_count);

struct SplitCandidate {
  SplitRule rule;
  // Loss (sse/mse, lower is better) or gain (entropy kinds, higher is better).
  double criterion_value = 0.0;
  NodeStat left;
  NodeStat right;

  std::size_t covariate() const { return rule.covariate; }
};

struct StumpOptions {
  std::size_t min_samples_leaf = 1;
  // Number of response classes; 0 for continuous responses.
  std::size_t class_count = 0;
  // Covariates searched; empty means all.
  std::vector<bool> allowed;
};

// Candidate cuts in deterministic order: covariates ascending, thresholds
// ascending (midpoints of consecutive distinct values), levels ascending.
std::vector<SplitRule> enumerate_candidates(const Dataset& data, const Region& region);
std::vector<SplitRule> enumerate_candidates(const RowMatrix& x, std::span<const std::size_t> rows,
                                            const Region& region);

// Greedy single split. Returns nullopt when the split would be uninformative
// (fewer than two rows, no admissible cut, constant response or zero gain).
// Exact ties are broken uniformly at random through `rng`.
std::optional<SplitCandidate> fit_stump(const Dataset& data, const Region& region, const SplitCriterion& criterion,
                                        Rng& rng, const StumpOptions& options = {});
std::optional<SplitCandidate> fit_stump(const RowMatrix& x, std::span<const double> y,
                                        std::span<const std::size_t> rows, const Region& region,
                                        const SplitCriterion& criterion, Rng& rng, const StumpOptions& options = {});

// Criterion value of an explicit partition, computed directly.
double partition_criterion(std::span<const double> left_y, std::span<const double> right_y,
                           const SplitCriterion& criterion, std::size_t class_count);

// Statistics of `rule` applied to the given rows.
SplitCandidate evaluate_rule(const RowMatrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                             const SplitRule& rule, const SplitCriterion& criterion, std::size_t class_count);

// True when criterion value a beats b.
inline bool criterion_better(double a, double b, const SplitCriterion& criterion) {
  return criterion.is_regression() ? a < b : a > b;
}

}  // namespace ddt
