#include "ddt/stump.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddt/error.hpp"

namespace ddt {

namespace {

constexpr double kTieTolerance = 1e-9;

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// Midpoint that is guaranteed to separate a < b under the v < threshold rule.
double midpoint(double a, double b) {
  const double mid = a + (b - a) / 2.0;
  return mid > a ? mid : b;
}

bool searched(const StumpOptions& options, std::size_t j) {
  return options.allowed.empty() || options.allowed[j];
}

std::vector<std::size_t> sorted_by(const RowMatrix& x, std::span<const std::size_t> rows, std::size_t j) {
  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = x(a, j), vb = x(b, j);
    return va < vb || (va == vb && a < b);
  });
  return order;
}

// Keeps the best-scoring rules (higher score wins) within the tie tolerance.
class BestSet {
 public:
  void offer(const SplitRule& rule, double score) {
    if (!std::isfinite(score)) return;
    if (entries_.empty() || score > best_) {
      best_ = score;
      entries_.emplace_back(rule, score);
      std::erase_if(entries_, [&](const auto& e) { return e.second < best_ - tol(best_); });
    } else if (score >= best_ - tol(best_)) {
      entries_.emplace_back(rule, score);
    }
  }

  bool empty() const { return entries_.empty(); }
  double best() const { return best_; }

  const SplitRule& pick(Rng& rng) {
    if (entries_.size() == 1) return entries_.front().first;
    return entries_[rng.below(entries_.size())].first;
  }

 private:
  static double tol(double v) { return kTieTolerance * std::max(1.0, std::abs(v)); }

  double best_ = 0.0;
  std::vector<std::pair<SplitRule, double>> entries_;
};

struct RegressionSums {
  double n = 0, s = 0, s2 = 0;
  void add(double v) {
    n += 1;
    s += v;
    s2 += v * v;
  }
  double sse() const { return n > 0 ? std::max(0.0, s2 - s * s / n) : 0.0; }
};

double regression_score(const RegressionSums& l, const RegressionSums& r, CriterionKind kind) {
  if (kind == CriterionKind::sse) return -(l.sse() + r.sse());
  return -(l.sse() / l.n + r.sse() / r.n);
}

double entropy_score(const ClassDistribution& parent, const ClassDistribution& l, const ClassDistribution& r,
                     const SplitCriterion& criterion) {
  return impurity_gain(parent, l, r, criterion);
}

}  // namespace

double NodeStat::value() const {
  return is_categorical() ? static_cast<double>(classes.mode()) : mean;
}

double NodeStat::impurity(const SplitCriterion& criterion) const {
  if (count == 0) return 0.0;
  if (!is_categorical()) return sse / static_cast<double>(count);
  return node_entropy(classes, criterion.is_regression() ? SplitCriterion::gini() : criterion);
}

NodeStat make_node_stat(std::span<const double> y, std::size_t class_count) {
  NodeStat s;
  s.count = y.size();
  if (class_count > 0) {
    s.classes = ClassDistribution::from_labels(y, class_count);
    return s;
  }
  if (y.empty()) return s;
  s.mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  for (double v : y) s.sse += (v - s.mean) * (v - s.mean);
  return s;
}

std::vector<SplitRule> enumerate_candidates(const Dataset& data, const Region& region) {
  if (data.empty()) throw ContractError("enumerate_candidates on empty data");
  const auto rows = all_rows(data.size());
  return enumerate_candidates(data.x, rows, region);
}

std::vector<SplitRule> enumerate_candidates(const RowMatrix& x, std::span<const std::size_t> rows,
                                            const Region& region) {
  if (rows.empty()) throw ContractError("enumerate_candidates on empty data");
  if (x.cols() != region.size()) throw ContractError("data width does not match the region");
  std::vector<SplitRule> out;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (region.is_interval(j)) {
      std::vector<double> values;
      values.reserve(rows.size());
      for (auto r : rows) values.push_back(x(r, j));
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      for (std::size_t i = 1; i < values.size(); ++i) {
        out.push_back({j, ThresholdCut{midpoint(values[i - 1], values[i])}});
      }
    } else {
      std::vector<std::size_t> present(region.levels(j).allowed.size(), 0);
      for (auto r : rows) ++present[static_cast<std::size_t>(x(r, j))];
      std::size_t distinct = 0;
      for (auto c : present) distinct += c > 0 ? 1 : 0;
      if (distinct < 2) continue;
      for (std::size_t k : region.levels(j).codes()) {
        if (present[k] > 0) out.push_back({j, LevelCut{k}});
      }
    }
  }
  return out;
}

double partition_criterion(std::span<const double> left_y, std::span<const double> right_y,
                           const SplitCriterion& criterion, std::size_t class_count) {
  if (criterion.is_regression()) return regression_split_loss(left_y, right_y, criterion.kind);
  const auto l = ClassDistribution::from_labels(left_y, class_count);
  const auto r = ClassDistribution::from_labels(right_y, class_count);
  ClassDistribution parent = l;
  for (std::size_t c = 0; c < class_count; ++c) parent.add(c, r.counts[c]);
  return impurity_gain(parent, l, r, criterion);
}

SplitCandidate evaluate_rule(const RowMatrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                             const SplitRule& rule, const SplitCriterion& criterion, std::size_t class_count) {
  std::vector<double> left, right;
  for (auto r : rows) (rule.goes_left(x.row(r)) ? left : right).push_back(y[r]);
  SplitCandidate c;
  c.rule = rule;
  c.left = make_node_stat(left, class_count);
  c.right = make_node_stat(right, class_count);
  if (!left.empty() && !right.empty()) c.criterion_value = partition_criterion(left, right, criterion, class_count);
  return c;
}

std::optional<SplitCandidate> fit_stump(const Dataset& data, const Region& region, const SplitCriterion& criterion,
                                        Rng& rng, const StumpOptions& options) {
  if (data.empty()) throw ContractError("fit_stump on empty data");
  const auto rows = all_rows(data.size());
  return fit_stump(data.x, data.y, rows, region, criterion, rng, options);
}

std::optional<SplitCandidate> fit_stump(const RowMatrix& x, std::span<const double> y,
                                        std::span<const std::size_t> rows, const Region& region,
                                        const SplitCriterion& criterion, Rng& rng, const StumpOptions& options) {
  if (rows.empty()) throw ContractError("fit_stump on empty data");
  if (x.cols() != region.size()) throw ContractError("data width does not match the region");
  if (!criterion.is_regression() && options.class_count == 0) {
    throw ContractError("entropy criterion needs a categorical response");
  }
  if (rows.size() < 2) return std::nullopt;

  const bool regression = criterion.is_regression();
  const std::size_t n = rows.size();
  const std::size_t min_leaf = std::max<std::size_t>(1, options.min_samples_leaf);
  const std::size_t classes = regression ? 0 : options.class_count;

  // Response statistics of the whole node; regression values are centred to
  // keep the prefix-sum losses accurate.
  double centre = 0.0;
  ClassDistribution parent(classes);
  if (regression) {
    for (auto r : rows) centre += y[r];
    centre /= static_cast<double>(n);
  } else {
    for (auto r : rows) parent.add(static_cast<std::size_t>(y[r]));
    if (parent.is_pure()) return std::nullopt;
  }
  if (regression) {
    bool constant = true;
    for (auto r : rows) constant = constant && y[r] == y[rows[0]];
    if (constant) return std::nullopt;
  }

  BestSet best;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (!searched(options, j)) continue;
    if (region.is_interval(j)) {
      const auto order = sorted_by(x, rows, j);
      const auto& iv = region.interval(j);
      if (regression) {
        RegressionSums left, right;
        for (auto r : order) right.add(y[r] - centre);
        for (std::size_t i = 1; i < n; ++i) {
          const double v = y[order[i - 1]] - centre;
          left.add(v);
          right.n -= 1;
          right.s -= v;
          right.s2 -= v * v;
          const double a = x(order[i - 1], j), b = x(order[i], j);
          if (!(a < b) || i < min_leaf || n - i < min_leaf) continue;
          const double cut = midpoint(a, b);
          if (!(cut > iv.lo && cut < iv.hi)) continue;
          best.offer({j, ThresholdCut{cut}}, regression_score(left, right, criterion.kind));
        }
      } else {
        ClassDistribution left(classes), right = parent;
        for (std::size_t i = 1; i < n; ++i) {
          const auto c = static_cast<std::size_t>(y[order[i - 1]]);
          left.add(c);
          right.remove(c);
          const double a = x(order[i - 1], j), b = x(order[i], j);
          if (!(a < b) || i < min_leaf || n - i < min_leaf) continue;
          const double cut = midpoint(a, b);
          if (!(cut > iv.lo && cut < iv.hi)) continue;
          best.offer({j, ThresholdCut{cut}}, entropy_score(parent, left, right, criterion));
        }
      }
    } else {
      const auto& subset = region.levels(j);
      const std::size_t levels = subset.allowed.size();
      if (regression) {
        std::vector<RegressionSums> per(levels);
        RegressionSums all;
        for (auto r : rows) {
          const double v = y[r] - centre;
          per[static_cast<std::size_t>(x(r, j))].add(v);
          all.add(v);
        }
        for (std::size_t k : subset.codes()) {
          const auto& l = per[k];
          if (l.n < static_cast<double>(min_leaf) || all.n - l.n < static_cast<double>(min_leaf)) continue;
          RegressionSums rest{all.n - l.n, all.s - l.s, all.s2 - l.s2};
          best.offer({j, LevelCut{k}}, regression_score(l, rest, criterion.kind));
        }
      } else {
        std::vector<ClassDistribution> per(levels, ClassDistribution(classes));
        for (auto r : rows) per[static_cast<std::size_t>(x(r, j))].add(static_cast<std::size_t>(y[r]));
        for (std::size_t k : subset.codes()) {
          const auto& l = per[k];
          if (l.total < min_leaf || n - l.total < min_leaf) continue;
          ClassDistribution rest = parent;
          for (std::size_t c = 0; c < classes; ++c) rest.remove(c, l.counts[c]);
          best.offer({j, LevelCut{k}}, entropy_score(parent, l, rest, criterion));
        }
      }
    }
  }
  if (best.empty()) return std::nullopt;

  SplitCandidate chosen = evaluate_rule(x, y, rows, best.pick(rng), criterion, classes);
  if (regression) {
    const double parent_sse = chosen.left.sse + chosen.right.sse +
                              static_cast<double>(chosen.left.count) * static_cast<double>(chosen.right.count) /
                                  static_cast<double>(n) * std::pow(chosen.left.mean - chosen.right.mean, 2);
    const double reduction = parent_sse - (chosen.left.sse + chosen.right.sse);
    if (!(reduction > 1e-12 * parent_sse)) return std::nullopt;
  } else if (!(chosen.criterion_value > 1e-12)) {
    return std::nullopt;
  }
  return chosen;
}

}  // namespace ddt
