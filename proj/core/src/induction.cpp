#include "ddt/induction.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include "ddt/error.hpp"
#include "ddt/explanation.hpp"
#include "ddt/parallel.hpp"

namespace ddt {

const NodeIndex* ExplanationSummary::find(std::uint64_t id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const DdtNode& DdtTree::node(std::uint64_t id) const {
  const auto it = nodes.find(id);
  if (it == nodes.end()) throw ContractError("tree has no node " + std::to_string(id));
  return it->second;
}

std::uint64_t DdtTree::frontier_id(std::span<const double> row) const {
  if (!Region::full(schema).contains(row)) throw ContractError("row lies outside the schema domain");
  std::uint64_t id = 1;
  for (;;) {
    const DdtNode& n = node(id);
    if (n.kind != NodeKind::interpretable) return id;
    id = n.split->rule.goes_left(row) ? left_id(id) : right_id(id);
  }
}

std::size_t DdtTree::interpretable_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const auto& kv) { return kv.second.kind == NodeKind::interpretable; }));
}

std::size_t depth_of(std::uint64_t id) {
  std::size_t d = 0;
  while (id > 1) {
    id /= 2;
    ++d;
  }
  return d;
}

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::interpretable: return "interpretable";
    case NodeKind::predictive: return "predictive";
    case NodeKind::leaf: return "leaf";
  }
  return "?";
}

std::string to_string(Source source) { return source == Source::observed ? "observed" : "pseudo"; }

std::uint64_t path_target_id(const std::string& directions) {
  std::uint64_t id = 1;
  for (char c : directions) {
    if (c == 'L' || c == 'l') {
      id = left_id(id);
    } else if (c == 'R' || c == 'r') {
      id = right_id(id);
    } else {
      throw ConfigError(std::string("path direction '") + c + "' is not L or R");
    }
    if (id > (std::uint64_t{1} << 62)) throw ConfigError("path target is too deep");
  }
  return id;
}

void InductionConfig::validate() const {
  criterion.validate();
  if (!(stopping.pxi_threshold > 0.0 && stopping.pxi_threshold <= 1.0)) {
    throw ConfigError("pxi_threshold must lie in (0, 1]");
  }
  if (stability.repeats < 1) throw ConfigError("repeats must be at least 1");
  if (stability.sample_size == 1) throw ConfigError("sample_size must be at least 2");
  if (!(stability.auto_d_fraction > 0.0 && stability.auto_d_fraction <= 0.5)) {
    throw ConfigError("auto_d_fraction must lie in (0, 0.5]");
  }
  if (odt.pseudo_sample_size < 2) throw ConfigError("odt pseudo_sample_size must be at least 2");
  if (odt.min_leaf < 1) throw ConfigError("odt min_leaf must be at least 1");
  if (eval_sample_size < 2) throw ConfigError("eval_sample_size must be at least 2");
  if (strategy.kind == StrategyKind::path_based) path_target_id(strategy.target);
}

std::vector<std::vector<std::uint64_t>> schedule(const Strategy& strategy, std::vector<std::uint64_t> frontier) {
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
  if (frontier.empty()) throw ContractError("schedule needs at least one node");
  if (frontier.front() == 0) throw ContractError("node ids start at 1");

  if (strategy.kind == StrategyKind::path_based) {
    const std::uint64_t target = path_target_id(strategy.target);
    std::vector<std::vector<std::uint64_t>> out;
    for (auto id : frontier) {
      if (is_ancestor(id, target)) out.push_back({id});
    }
    return out;
  }
  if (strategy.kind == StrategyKind::breadth_first) {
    std::map<std::size_t, std::vector<std::uint64_t>> levels;
    for (auto id : frontier) levels[depth_of(id)].push_back(id);
    std::vector<std::vector<std::uint64_t>> out;
    for (auto& [depth, ids] : levels) out.push_back(std::move(ids));
    return out;
  }
  // Sampling paths of two nodes intersect exactly when one node is an
  // ancestor of the other.
  std::map<std::uint64_t, std::size_t> batch_of;
  std::vector<std::vector<std::uint64_t>> out;
  for (auto id : frontier) {
    std::size_t batch = 0;
    for (const auto& [other, b] : batch_of) {
      if (is_ancestor(other, id)) batch = std::max(batch, b + 1);
    }
    batch_of[id] = batch;
    if (out.size() <= batch) out.resize(batch + 1);
    out[batch].push_back(id);
  }
  return out;
}

namespace {

struct Work {
  std::uint64_t id = 1;
  RowMatrix eval_x;
  std::vector<double> eval_y;
  OdtSubtree pilot;
  double pilot_delta = 0.0;
  std::optional<StabilityReport> report;
  std::string uninformative;
};

std::size_t count_in(const Dataset& observed, const Region& region) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) n += region.contains(observed.x.row(i)) ? 1 : 0;
  return n;
}

}  // namespace

DdtTree induce_ddt(const Teacher& teacher, const CovariateSchema& schema, const Dataset& observed,
                   const InductionConfig& config) {
  config.validate();
  if (teacher.response_kind() != schema.response()) throw ContractError("teacher response kind differs from the schema");
  if (config.criterion.is_regression() == schema.response().is_categorical()) {
    throw ConfigError("criterion " + config.criterion.name() + " does not fit a " +
                      (schema.response().is_categorical() ? "categorical" : "continuous") + " response");
  }
  if (!observed.empty()) observed.validate(schema);

  DdtTree tree{schema, config.criterion, teacher.descriptor(), config.seed, observed.size(), {}, {}, {}};
  if (observed.empty()) tree.warnings.push_back("no observed data; node counts are zero");
  const std::size_t classes = schema.response().is_categorical() ? schema.response().class_count() : 0;
  const unsigned workers = resolve_workers(config.workers);
  const bool parallel_nodes = config.strategy.kind == StrategyKind::parallel;
  const unsigned node_workers =
      parallel_nodes ? (config.strategy.workers > 0 ? std::min(config.strategy.workers, workers) : workers) : 1;
  const Region root_region = Region::full(schema);
  const std::uint64_t path_target =
      config.strategy.kind == StrategyKind::path_based ? path_target_id(config.strategy.target) : 0;

  auto weight_of = [&](const DdtNode& n) {
    if (config.weight_source == Source::observed && tree.observed_total > 0) {
      return static_cast<double>(n.observed_count) / static_cast<double>(tree.observed_total);
    }
    return n.region.mass_within(root_region);
  };

  {
    DdtNode root;
    root.id = 1;
    root.region = root_region;
    root.observed_count = observed.size();
    tree.nodes.emplace(1, std::move(root));
  }
  std::vector<std::uint64_t> level{1};
  std::size_t budget = config.stopping.max_interpretable_nodes;
  double root_impurity = 0.0;

  while (!level.empty()) {
    std::vector<Work> work(level.size());
    // Evaluation sample and pilot subtree for every node of the level.
    parallel_for(level.size(), workers, [&](std::size_t k) {
      Work& w = work[k];
      w.id = level[k];
      const DdtNode& node = tree.nodes.at(w.id);
      Rng eval_rng = stream_rng(config.seed, w.id, Stream::evaluation);
      w.eval_x = sample_region(node.region, config.eval_sample_size, eval_rng);
      w.eval_y = predict_batch(teacher, w.eval_x);
      Rng pilot_rng = stream_rng(config.seed, w.id, Stream::pilot);
      const RowMatrix px = sample_region(node.region, config.odt.pseudo_sample_size, pilot_rng);
      const auto py = predict_batch(teacher, px);
      std::vector<std::size_t> rows(px.rows());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      w.pilot = induce_odt(px, py, rows, node.region, config.criterion, config.odt, pilot_rng, classes);
      std::vector<std::size_t> eval_rows(w.eval_x.rows());
      std::iota(eval_rows.begin(), eval_rows.end(), std::size_t{0});
      w.pilot.annotate(w.eval_x, w.eval_y, eval_rows, classes);
      w.pilot_delta = std::max(0.0, w.pilot.impurity_decrease(config.criterion));
    });

    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < work.size(); ++k) {
      DdtNode& node = tree.nodes.at(work[k].id);
      node.eval = make_node_stat(work[k].eval_y, classes);
      node.value = work[k].pilot.nodes.front().stat.value();
      if (node.id == 1) root_impurity = node.eval.impurity(config.criterion);
      node.provisional_pxi = root_impurity > 0.0 ? weight_of(node) * work[k].pilot_delta / root_impurity : 0.0;

      if (root_impurity <= 0.0) {
        node.stop_reason = "teacher is constant";
      } else if (node.eval.impurity(config.criterion) <= 0.0) {
        node.stop_reason = "pure region";
      } else if (node.depth >= config.stopping.max_interpretable_depth) {
        node.stop_reason = "depth limit";
      } else if (path_target != 0 && !is_ancestor(node.id, path_target)) {
        node.stop_reason = "off the target path";
      } else if (node.provisional_pxi < config.stopping.pxi_threshold) {
        node.stop_reason = "pxi below threshold";
      } else {
        candidates.push_back(k);
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
      const double pa = tree.nodes.at(work[a].id).provisional_pxi;
      const double pb = tree.nodes.at(work[b].id).provisional_pxi;
      return pa > pb || (pa == pb && work[a].id < work[b].id);
    });
    if (candidates.size() > budget) {
      for (std::size_t k = budget; k < candidates.size(); ++k) {
        tree.nodes.at(work[candidates[k]].id).stop_reason = "interpretable node budget";
      }
      candidates.resize(budget);
    }

    const unsigned repeat_workers = candidates.size() > 1 && parallel_nodes ? 1 : workers;
    parallel_for(candidates.size(), parallel_nodes ? node_workers : 1, [&](std::size_t c) {
      Work& w = work[candidates[c]];
      const DdtNode& node = tree.nodes.at(w.id);
      StabilityContext ctx{config.seed, w.id, repeat_workers, classes};
      try {
        w.report = measure_split_stability(teacher, node.region, config.criterion, config.stability, ctx);
      } catch (const UninformativeSplit& e) {
        w.uninformative = e.what();
      }
    });

    std::sort(candidates.begin(), candidates.end());
    std::vector<std::uint64_t> next;
    for (std::size_t k : candidates) {
      Work& w = work[k];
      DdtNode& node = tree.nodes.at(w.id);
      if (!w.report) {
        node.stop_reason = "uninformative split";
        continue;
      }
      const SplitRule rule = w.report->chosen.rule;
      auto [left_region, right_region] = split_region(node.region, rule);
      const std::size_t left_obs = count_in(observed, left_region);
      const std::size_t right_obs = node.observed_count - std::min(node.observed_count, left_obs);
      if (std::min(left_obs, right_obs) < config.stopping.min_region_observed) {
        node.stop_reason = "child below min_region_observed";
        continue;
      }
      std::vector<double> ly, ry;
      for (std::size_t i = 0; i < w.eval_x.rows(); ++i) (rule.goes_left(w.eval_x.row(i)) ? ly : ry).push_back(w.eval_y[i]);
      node.kind = NodeKind::interpretable;
      node.split = w.report->chosen;
      node.stability = std::move(*w.report);
      node.eval_left = make_node_stat(ly, classes);
      node.eval_right = make_node_stat(ry, classes);
      node.stop_reason.clear();
      --budget;

      DdtNode left, right;
      left.id = left_id(node.id);
      right.id = right_id(node.id);
      left.depth = right.depth = node.depth + 1;
      left.region = std::move(left_region);
      right.region = std::move(right_region);
      left.observed_count = left_obs;
      right.observed_count = right_obs;
      next.push_back(left.id);
      next.push_back(right.id);
      tree.nodes.emplace(left.id, std::move(left));
      tree.nodes.emplace(right.id, std::move(right));
    }

    for (auto& w : work) {
      DdtNode& node = tree.nodes.at(w.id);
      if (node.kind == NodeKind::interpretable) continue;
      if (w.pilot.split_count() > 0) {
        node.kind = NodeKind::predictive;
        node.subtree = std::move(w.pilot);
      } else {
        node.kind = NodeKind::leaf;
      }
    }
    level = std::move(next);
  }

  tree.explanation = compute_indices(tree, observed.empty() ? nullptr : &observed, config.weight_source,
                                     config.impurity_source);
  return tree;
}

double predict(const DdtTree& tree, std::span<const double> row) {
  const DdtNode& n = tree.node(tree.frontier_id(row));
  if (n.kind == NodeKind::predictive) return n.subtree->predict(row);
  return n.value;
}

double predict_partition(const DdtTree& tree, std::span<const double> row) {
  return tree.node(tree.frontier_id(row)).value;
}

}  // namespace ddt
