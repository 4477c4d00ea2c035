#include "ddt/forest.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ddt/error.hpp"
#include "ddt/parallel.hpp"

namespace ddt {

ForestTeacher::ForestTeacher(CovariateSchema schema, std::vector<OdtSubtree> trees, std::string descriptor)
    : schema_(std::move(schema)), trees_(std::move(trees)), descriptor_(std::move(descriptor)) {
  if (trees_.empty()) throw ContractError("forest needs at least one tree");
  for (const auto& t : trees_) {
    const std::size_t base = flat_.size();
    roots_.push_back(base);
    for (const auto& n : t.nodes) {
      FlatNode f;
      f.value = n.stat.value();
      if (n.rule) {
        f.left = static_cast<std::int32_t>(base) + n.left;
        f.right = static_cast<std::int32_t>(base) + n.right;
        f.covariate = static_cast<std::uint32_t>(n.rule->covariate);
        f.level_cut = !n.rule->is_continuous();
        f.cut = f.level_cut ? static_cast<double>(n.rule->level()) : n.rule->threshold();
      }
      flat_.push_back(f);
    }
  }
}

double ForestTeacher::tree_value(std::size_t tree, std::span<const double> row) const {
  const FlatNode* n = &flat_[roots_[tree]];
  while (n->left >= 0) {
    const double v = row[n->covariate];
    const bool left = n->level_cut ? static_cast<std::size_t>(v) == static_cast<std::size_t>(n->cut) : v < n->cut;
    n = &flat_[static_cast<std::size_t>(left ? n->left : n->right)];
  }
  return n->value;
}

std::vector<double> ForestTeacher::evaluate(const RowMatrix& rows) const {
  std::vector<double> out(rows.rows(), 0.0);
  if (!schema_.response().is_categorical()) {
    for (std::size_t t = 0; t < roots_.size(); ++t) {
      for (std::size_t i = 0; i < rows.rows(); ++i) out[i] += tree_value(t, rows.row(i));
    }
    for (auto& v : out) v /= static_cast<double>(trees_.size());
    return out;
  }
  std::vector<std::size_t> votes(schema_.response().class_count());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t t = 0; t < roots_.size(); ++t) ++votes[static_cast<std::size_t>(tree_value(t, rows.row(i)))];
    out[i] = static_cast<double>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return out;
}

std::vector<double> ForestTeacher::impurity_importance() const {
  std::vector<double> imp(schema_.size(), 0.0);
  const SplitCriterion criterion = schema_.response().is_categorical() ? SplitCriterion::gini() : SplitCriterion::sse();
  for (const auto& t : trees_) t.accumulate_importance(imp, criterion, 1.0);
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : imp) v /= total;
  }
  return imp;
}

ForestFit fit_forest_teacher(const CovariateSchema& schema, const Dataset& data, const ForestConfig& config) {
  if (data.empty()) throw DataError("forest teacher needs training data");
  if (config.trees == 0) throw ConfigError("forest needs at least one tree");
  data.validate(schema);

  ForestFit fit;
  const auto& response = schema.response();
  const std::size_t classes = response.is_categorical() ? response.class_count() : 0;
  if (classes > 0) {
    const auto dist = ClassDistribution::from_labels(data.y, classes);
    if (dist.is_pure()) {
      const double label = data.y.front();
      fit.warnings.push_back("training data holds a single class ('" + schema.format_response(label) +
                             "'); using a constant teacher");
      fit.teacher = std::make_shared<FunctionTeacher>([label](std::span<const double>) { return label; }, response,
                                                      "constant(" + schema.format_response(label) + ")");
      return fit;
    }
  }

  const SplitCriterion criterion = classes > 0 ? SplitCriterion::gini() : SplitCriterion::sse();
  const Region root = Region::full(schema);
  OdtConfig tree_config;
  tree_config.max_depth = config.max_depth;
  tree_config.min_leaf = config.min_leaf;
  tree_config.feature_fraction = config.feature_fraction;

  std::vector<OdtSubtree> trees(config.trees);
  parallel_for(config.trees, resolve_workers(config.workers), [&](std::size_t t) {
    Rng rng = stream_rng(config.seed, 0, Stream::forest, t);
    std::vector<std::size_t> rows(data.size());
    if (config.bootstrap) {
      for (auto& r : rows) r = rng.below(data.size());
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees[t] = induce_odt(data.x, data.y, rows, root, criterion, tree_config, rng, classes);
  });

  std::ostringstream desc;
  desc << "forest(trees=" << config.trees << ", depth=" << config.max_depth << ", min_leaf=" << config.min_leaf
       << ", features=" << config.feature_fraction << ", seed=" << config.seed << ")";
  fit.teacher = std::make_shared<ForestTeacher>(schema, std::move(trees), desc.str());
  return fit;
}

}  // namespace ddt
