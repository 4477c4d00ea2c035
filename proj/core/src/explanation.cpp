#include "ddt/explanation.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "ddt/error.hpp"

namespace ddt {

namespace {

double weighted(const NodeStat& s, const SplitCriterion& criterion) {
  return static_cast<double>(s.count) * s.impurity(criterion);
}

double split_delta(const NodeStat& parent, const NodeStat& left, const NodeStat& right,
                   const SplitCriterion& criterion) {
  if (parent.count == 0) return 0.0;
  return (weighted(parent, criterion) - weighted(left, criterion) - weighted(right, criterion)) /
         static_cast<double>(parent.count);
}

std::vector<std::size_t> rows_in(const Dataset& data, const Region& region) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (region.contains(data.x.row(i))) rows.push_back(i);
  }
  return rows;
}

double observed_delta(const DdtTree& tree, const DdtNode& node, const Dataset& observed, std::size_t classes) {
  const auto rows = rows_in(observed, node.region);
  if (rows.empty()) {
    throw DataError("node " + std::to_string(node.id) +
                    " holds no observed rows, so its impurity decrease is undefined; use the pseudo impurity source");
  }
  if (node.kind == NodeKind::interpretable) {
    std::vector<double> all, left, right;
    for (auto r : rows) {
      all.push_back(observed.y[r]);
      (node.split->rule.goes_left(observed.x.row(r)) ? left : right).push_back(observed.y[r]);
    }
    return split_delta(make_node_stat(all, classes), make_node_stat(left, classes), make_node_stat(right, classes),
                       tree.criterion);
  }
  OdtSubtree copy = *node.subtree;
  copy.annotate(observed.x, observed.y, rows, classes);
  return copy.impurity_decrease(tree.criterion);
}

}  // namespace

ExplanationSummary compute_indices(const DdtTree& tree, const Dataset* observed, Source weight_source,
                                   Source impurity_source) {
  ExplanationSummary out;
  out.weight_source = weight_source;
  out.impurity_source = impurity_source;
  const bool have_observed = observed != nullptr && !observed->empty() && tree.observed_total > 0;
  if (weight_source == Source::observed && !have_observed) {
    out.weight_fallback = true;
    out.warnings.push_back("no observed data; weights use region mass");
  }
  if (impurity_source == Source::observed && !have_observed) {
    throw DataError("observed impurity source requested without observed data; use the pseudo impurity source");
  }
  const std::size_t classes =
      tree.schema.response().is_categorical() ? tree.schema.response().class_count() : 0;
  const Region root = Region::full(tree.schema);

  for (const auto& [id, node] : tree.nodes) {
    NodeIndex ix;
    ix.id = id;
    ix.kind = node.kind;
    if (tree.observed_total > 0) {
      ix.observed_percent = static_cast<double>(node.observed_count) / static_cast<double>(tree.observed_total);
      ix.weak_support = ix.observed_percent < kWeakSupportShare;
    }
    ix.weight = (weight_source == Source::observed && have_observed) ? ix.observed_percent
                                                                     : node.region.mass_within(root);
    if (node.kind != NodeKind::leaf) {
      if (impurity_source == Source::observed) {
        ix.delta = observed_delta(tree, node, *observed, classes);
      } else if (node.kind == NodeKind::interpretable) {
        ix.delta = split_delta(node.eval, *node.eval_left, *node.eval_right, tree.criterion);
      } else {
        ix.delta = node.subtree->impurity_decrease(tree.criterion);
      }
      ix.delta = std::max(0.0, ix.delta);
    }
    out.delta_total += ix.weight * ix.delta;
    out.nodes.push_back(ix);
  }

  if (out.delta_total > 0.0) {
    for (auto& ix : out.nodes) ix.index = ix.weight * ix.delta / out.delta_total;
  } else {
    out.warnings.push_back("tree explains no impurity; all indices are zero");
  }

  for (const auto& ix : out.nodes) {
    if (ix.kind != NodeKind::predictive) continue;
    PathIndex p;
    p.id = ix.id;
    p.pxi = ix.index;
    p.path_xi = ix.id > 1 ? path_xi(out, 1, ix.id) : 0.0;
    std::tie(p.degree_interpretable, p.degree_predictive) = interpretation_degree(p.path_xi, p.pxi);
    out.paths.push_back(p);
  }
  out.variable_importance = variable_importance(tree, out);
  if (std::all_of(out.variable_importance.begin(), out.variable_importance.end(), [](double v) { return v == 0.0; })) {
    out.warnings.push_back("no split carries impurity; variable importance is zero");
  }
  return out;
}

double path_xi(const ExplanationSummary& summary, std::uint64_t from, std::uint64_t to) {
  if (from == to || !is_ancestor(from, to)) {
    throw ContractError("node " + std::to_string(from) + " is not a proper ancestor of " + std::to_string(to));
  }
  double sum = 0.0;
  for (std::uint64_t k = parent_id(to);; k = parent_id(k)) {
    const NodeIndex* ix = summary.find(k);
    if (ix == nullptr) throw ContractError("node " + std::to_string(k) + " is missing from the summary");
    if (ix->kind != NodeKind::interpretable) {
      throw ContractError("node " + std::to_string(k) + " on the path is not interpretable");
    }
    sum += ix->index;
    if (k == from) break;
  }
  return sum;
}

std::pair<double, double> interpretation_degree(double path_xi, double pxi) {
  const double total = path_xi + pxi;
  if (!(total > 0.0)) return {0.0, 0.0};
  return {path_xi / total, pxi / total};
}

std::vector<double> variable_importance(const DdtTree& tree, const ExplanationSummary& summary) {
  std::vector<double> imp(tree.schema.size(), 0.0);
  for (const auto& ix : summary.nodes) {
    const DdtNode& node = tree.node(ix.id);
    if (node.kind == NodeKind::interpretable) {
      imp[node.split->rule.covariate] += ix.weight * ix.delta;
    } else if (node.kind == NodeKind::predictive) {
      node.subtree->accumulate_importance(imp, tree.criterion, ix.weight);
    }
  }
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : imp) v /= total;
  }
  return imp;
}

}  // namespace ddt
