#include "ddt/odt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddt/error.hpp"

namespace ddt {

namespace {

struct Pending {
  std::size_t node;
  std::vector<std::size_t> rows;
  Region region;
  std::optional<SplitCandidate> split;
  double decrease = 0.0;
};

std::vector<bool> feature_mask(std::size_t p, double fraction, Rng& rng) {
  if (fraction >= 1.0) return {};
  const auto m = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(fraction * static_cast<double>(p))),
                                         1, p);
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) std::swap(order[i], order[i + rng.below(p - i)]);
  std::vector<bool> mask(p, false);
  for (std::size_t i = 0; i < m; ++i) mask[order[i]] = true;
  return mask;
}

double weighted_impurity(const NodeStat& s, const SplitCriterion& criterion) {
  return static_cast<double>(s.count) * s.impurity(criterion);
}

const NodeStat& stat_of(const OdtNode& n) { return n.eval ? *n.eval : n.stat; }

}  // namespace

std::size_t OdtSubtree::leaf_index(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].rule) i = static_cast<std::size_t>(nodes[i].rule->goes_left(row) ? nodes[i].left : nodes[i].right);
  return i;
}

std::size_t OdtSubtree::split_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return !n.is_leaf(); }));
}

std::size_t OdtSubtree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

void OdtSubtree::annotate(const RowMatrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                          std::size_t class_count) {
  std::vector<std::vector<double>> per(nodes.size());
  for (auto r : rows) {
    std::size_t i = 0;
    per[0].push_back(y[r]);
    while (nodes[i].rule) {
      i = static_cast<std::size_t>(nodes[i].rule->goes_left(x.row(r)) ? nodes[i].left : nodes[i].right);
      per[i].push_back(y[r]);
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].eval = make_node_stat(per[i], class_count);
}

double OdtSubtree::impurity_decrease(const SplitCriterion& criterion) const {
  if (nodes.empty()) return 0.0;
  const double n = static_cast<double>(stat_of(nodes[0]).count);
  if (n == 0.0) return 0.0;
  double total = 0.0;
  for (const auto& node : nodes) {
    if (node.is_leaf()) continue;
    const auto& s = stat_of(node);
    const auto& l = stat_of(nodes[static_cast<std::size_t>(node.left)]);
    const auto& r = stat_of(nodes[static_cast<std::size_t>(node.right)]);
    total += weighted_impurity(s, criterion) - weighted_impurity(l, criterion) - weighted_impurity(r, criterion);
  }
  return total / n;
}

void OdtSubtree::accumulate_importance(std::vector<double>& out, const SplitCriterion& criterion,
                                       double scale) const {
  if (nodes.empty()) return;
  const double n = static_cast<double>(stat_of(nodes[0]).count);
  if (n == 0.0) return;
  for (const auto& node : nodes) {
    if (node.is_leaf()) continue;
    const auto& s = stat_of(node);
    const auto& l = stat_of(nodes[static_cast<std::size_t>(node.left)]);
    const auto& r = stat_of(nodes[static_cast<std::size_t>(node.right)]);
    const double d = weighted_impurity(s, criterion) - weighted_impurity(l, criterion) - weighted_impurity(r, criterion);
    out[node.rule->covariate] += scale * std::max(0.0, d) / n;
  }
}

OdtSubtree induce_odt(const Dataset& data, const Region& region, const SplitCriterion& criterion,
                      const OdtConfig& config, Rng& rng, std::size_t class_count) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return induce_odt(data.x, data.y, rows, region, criterion, config, rng, class_count);
}

OdtSubtree induce_odt(const RowMatrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                      const Region& region, const SplitCriterion& criterion, const OdtConfig& config, Rng& rng,
                      std::size_t class_count) {
  if (rows.empty()) throw ContractError("induce_odt on empty data");
  OdtSubtree tree;
  tree.max_depth = config.max_depth;
  tree.min_leaf = std::max<std::size_t>(1, config.min_leaf);

  StumpOptions options;
  options.min_samples_leaf = tree.min_leaf;
  options.class_count = class_count;

  std::vector<Pending> open;
  auto make_node = [&](std::vector<std::size_t> node_rows, Region node_region, std::size_t depth) {
    std::vector<double> ys;
    ys.reserve(node_rows.size());
    for (auto r : node_rows) ys.push_back(y[r]);
    OdtNode node;
    node.depth = depth;
    node.stat = make_node_stat(ys, class_count);
    tree.nodes.push_back(node);
    const std::size_t id = tree.nodes.size() - 1;
    if (depth >= config.max_depth || node_rows.size() < 2 * tree.min_leaf) return;
    options.allowed = feature_mask(x.cols(), config.feature_fraction, rng);
    auto split = fit_stump(x, y, node_rows, node_region, criterion, rng, options);
    if (!split) return;
    const double decrease = weighted_impurity(tree.nodes[id].stat, criterion) -
                            weighted_impurity(split->left, criterion) - weighted_impurity(split->right, criterion);
    open.push_back({id, std::move(node_rows), std::move(node_region), std::move(split), decrease});
  };

  make_node(std::vector<std::size_t>(rows.begin(), rows.end()), region, 0);
  std::size_t splits = 0;
  while (!open.empty() && (config.max_splits == 0 || splits < config.max_splits)) {
    // Largest decrease first; earlier nodes win ties.
    auto it = std::max_element(open.begin(), open.end(), [](const Pending& a, const Pending& b) {
      return a.decrease < b.decrease || (a.decrease == b.decrease && a.node > b.node);
    });
    Pending p = std::move(*it);
    open.erase(it);
    const SplitRule rule = p.split->rule;
    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : p.rows) (rule.goes_left(x.row(r)) ? left_rows : right_rows).push_back(r);
    auto [left_region, right_region] = split_region(p.region, rule);
    const std::size_t depth = tree.nodes[p.node].depth + 1;
    tree.nodes[p.node].rule = rule;
    tree.nodes[p.node].left = static_cast<int>(tree.nodes.size());
    make_node(std::move(left_rows), std::move(left_region), depth);
    tree.nodes[p.node].right = static_cast<int>(tree.nodes.size());
    make_node(std::move(right_rows), std::move(right_region), depth);
    ++splits;
  }
  return tree;
}

}  // namespace ddt
