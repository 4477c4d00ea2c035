#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddt/criteria.hpp"
#include "ddt/domain.hpp"
#include "ddt/odt.hpp"
#include "ddt/stability.hpp"
#include "ddt/stump.hpp"

namespace ddt {

enum class NodeKind { interpretable, predictive, leaf };

enum class Source { observed, pseudo };

struct DdtNode {
  std::uint64_t id = 1;
  NodeKind kind = NodeKind::leaf;
  std::size_t depth = 0;
  Region region;
  std::size_t observed_count = 0;
  // Fitted value of the node (pilot sample mean or modal class).
  double value = 0.0;

  // Interpretable nodes.
  std::optional<SplitCandidate> split;
  std::optional<StabilityReport> stability;
  // Predictive nodes.
  std::optional<OdtSubtree> subtree;

  // Evaluation-sample statistics of the node and, for interpretable nodes,
  // of its two sides under the chosen split.
  NodeStat eval;
  std::optional<NodeStat> eval_left;
  std::optional<NodeStat> eval_right;

  // PXI estimate computed from the pilot subtree before the stop decision.
  double provisional_pxi = 0.0;
  std::string stop_reason;

  bool is_frontier() const { return kind != NodeKind::interpretable; }
};

struct NodeIndex {
  std::uint64_t id = 1;
  NodeKind kind = NodeKind::leaf;
  double weight = 0.0;  // n_i / n
  double delta = 0.0;   // impurity decrease of the split or subtree
  double index = 0.0;   // XI (interpretable) or PXI (predictive)
  double observed_percent = 0.0;
  bool weak_support = false;
};

struct PathIndex {
  std::uint64_t id = 1;  // predictive node j
  double path_xi = 0.0;  // XI summed over the interpretable nodes from the root to j's parent
  double pxi = 0.0;
  double degree_interpretable = 0.0;
  double degree_predictive = 0.0;
};

struct ExplanationSummary {
  Source weight_source = Source::observed;
  Source impurity_source = Source::pseudo;
  bool weight_fallback = false;
  double delta_total = 0.0;
  std::vector<NodeIndex> nodes;  // ascending id
  std::vector<PathIndex> paths;  // ascending id of predictive nodes
  std::vector<double> variable_importance;
  std::vector<std::string> warnings;

  const NodeIndex* find(std::uint64_t id) const;
};

struct DdtTree {
  CovariateSchema schema;
  SplitCriterion criterion;
  std::string teacher;
  std::uint64_t seed = 0;
  std::size_t observed_total = 0;
  std::map<std::uint64_t, DdtNode> nodes;
  ExplanationSummary explanation;
  std::vector<std::string> warnings;
  // Serialized run configuration, echoed verbatim into the tree document.
  std::string config_echo = "{}";

  const DdtNode& node(std::uint64_t id) const;
  const DdtNode& root() const { return node(1); }
  // Id of the frontier node (predictive or leaf) containing `row`.
  std::uint64_t frontier_id(std::span<const double> row) const;
  std::size_t interpretable_count() const;
};

constexpr std::uint64_t parent_id(std::uint64_t id) { return id / 2; }
constexpr std::uint64_t left_id(std::uint64_t id) { return 2 * id; }
constexpr std::uint64_t right_id(std::uint64_t id) { return 2 * id + 1; }
constexpr bool is_ancestor(std::uint64_t ancestor, std::uint64_t id) {
  while (id > ancestor) id /= 2;
  return id == ancestor;
}
std::size_t depth_of(std::uint64_t id);

std::string to_string(NodeKind kind);
std::string to_string(Source source);

}  // namespace ddt
