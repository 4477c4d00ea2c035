#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ddt/criteria.hpp"
#include "ddt/domain.hpp"
#include "ddt/random.hpp"
#include "ddt/stump.hpp"

namespace ddt {

struct OdtConfig {
  std::size_t max_depth = 4;
  std::size_t min_leaf = 1;
  // Upper bound on internal splits (0 = unbounded). When it binds, the
  // largest impurity decreases are expanded first.
  std::size_t max_splits = 0;
  // Rows drawn for a predictive subtree.
  std::size_t pseudo_sample_size = 10000;
  // Share of covariates offered to each node's split search.
  double feature_fraction = 1.0;
};

struct OdtNode {
  std::optional<SplitRule> rule;  // nullopt on leaves
  int left = -1;
  int right = -1;
  std::size_t depth = 0;
  NodeStat stat;                  // fitting rows
  std::optional<NodeStat> eval;   // evaluation rows, when annotated

  bool is_leaf() const { return !rule.has_value(); }
  bool operator==(const OdtNode&) const = default;
};

// Binary CART tree. nodes[0] is the root.
struct OdtSubtree {
  std::vector<OdtNode> nodes;
  std::size_t max_depth = 0;
  std::size_t min_leaf = 1;

  std::size_t leaf_index(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return nodes[leaf_index(row)].stat.value(); }
  std::size_t split_count() const;
  std::size_t depth() const;

  // Routes evaluation rows through the tree and stores per-node statistics.
  void annotate(const RowMatrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                std::size_t class_count);
  // Root impurity minus the weighted leaf impurity, from eval (or fitting)
  // statistics. Weighted by node counts relative to the root.
  double impurity_decrease(const SplitCriterion& criterion) const;
  // Per-covariate sum of count-weighted impurity decreases (unnormalised,
  // scaled by `scale / root count`).
  void accumulate_importance(std::vector<double>& out, const SplitCriterion& criterion, double scale) const;

  bool operator==(const OdtSubtree&) const = default;
};

OdtSubtree induce_odt(const RowMatrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                      const Region& region, const SplitCriterion& criterion, const OdtConfig& config, Rng& rng,
                      std::size_t class_count);
OdtSubtree induce_odt(const Dataset& data, const Region& region, const SplitCriterion& criterion,
                      const OdtConfig& config, Rng& rng, std::size_t class_count);

}  // namespace ddt
