#include "ddt/criteria.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ddt/error.hpp"

namespace ddt {

namespace {

void require_nonempty(const ClassDistribution& dist) {
  if (dist.total == 0) throw ContractError("entropy of an empty distribution");
}

double pow_q(double p, double q) {
  if (p == 0.0) return 0.0;
  if (q == 2.0) return p * p;
  return std::pow(p, q);
}

}  // namespace

SplitCriterion SplitCriterion::tsallis(double q) {
  SplitCriterion c{CriterionKind::tsallis, q};
  c.validate();
  return c;
}

SplitCriterion SplitCriterion::parse(std::string_view text) {
  if (text == "sse") return sse();
  if (text == "mse") return mse();
  if (text == "shannon") return shannon();
  if (text == "gini") return gini();
  if (text == "gain_ratio") return gain_ratio();
  if (text == "tsallis") return tsallis(2.0);
  if (text.starts_with("tsallis:")) {
    const auto num = text.substr(8);
    double q = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), q);
    if (ec != std::errc() || ptr != num.data() + num.size()) {
      throw ConfigError("bad tsallis parameter '" + std::string(num) + "'");
    }
    SplitCriterion c{CriterionKind::tsallis, q};
    c.validate();
    return c;
  }
  throw ConfigError("unknown criterion '" + std::string(text) + "'");
}

std::string SplitCriterion::name() const {
  switch (kind) {
    case CriterionKind::sse: return "sse";
    case CriterionKind::mse: return "mse";
    case CriterionKind::shannon: return "shannon";
    case CriterionKind::gini: return "gini";
    case CriterionKind::gain_ratio: return "gain_ratio";
    case CriterionKind::tsallis: {
      std::ostringstream out;
      out.precision(17);
      out << "tsallis:" << q;
      return out.str();
    }
  }
  return "?";
}

void SplitCriterion::validate() const {
  if (kind == CriterionKind::tsallis) {
    if (!std::isfinite(q) || q <= 0.0) throw ConfigError("tsallis q must be a positive finite number");
    if (q == 1.0) throw ConfigError("tsallis q = 1 is the shannon criterion");
  }
}

ClassDistribution::ClassDistribution(std::vector<std::uint64_t> c)
    : counts(std::move(c)), total(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0})) {}

ClassDistribution ClassDistribution::from_labels(std::span<const double> labels, std::size_t classes) {
  ClassDistribution d(classes);
  for (double y : labels) d.add(static_cast<std::size_t>(y));
  return d;
}

std::size_t ClassDistribution::mode() const {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

bool ClassDistribution::is_pure() const {
  return std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
}

double tsallis_entropy(const ClassDistribution& dist, double q) {
  require_nonempty(dist);
  if (q == 1.0) throw ContractError("tsallis entropy at q = 1; use shannon_entropy");
  double sum = 0.0;
  for (std::size_t i = 0; i < dist.counts.size(); ++i) sum += pow_q(dist.probability(i), q);
  return (sum - 1.0) / (1.0 - q);
}

double shannon_entropy(const ClassDistribution& dist) {
  require_nonempty(dist);
  double h = 0.0;
  for (std::size_t i = 0; i < dist.counts.size(); ++i) {
    const double p = dist.probability(i);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double gini_index(const ClassDistribution& dist) {
  require_nonempty(dist);
  double sum = 0.0;
  for (std::size_t i = 0; i < dist.counts.size(); ++i) {
    const double p = dist.probability(i);
    sum += p * p;
  }
  return 1.0 - sum;
}

double split_information(std::uint64_t n_left, std::uint64_t n_right) {
  const double n = static_cast<double>(n_left + n_right);
  double s = 0.0;
  for (const auto k : {n_left, n_right}) {
    if (k == 0) continue;
    const double w = static_cast<double>(k) / n;
    s -= w * std::log(w);
  }
  return s;
}

double node_entropy(const ClassDistribution& dist, const SplitCriterion& criterion) {
  switch (criterion.kind) {
    case CriterionKind::shannon:
    case CriterionKind::gain_ratio: return shannon_entropy(dist);
    case CriterionKind::gini: return gini_index(dist);
    case CriterionKind::tsallis: return tsallis_entropy(dist, criterion.q);
    default: throw ContractError("entropy requested under a regression criterion");
  }
}

double sum_squared_error(std::span<const double> y) {
  if (y.empty()) return 0.0;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double s = 0.0;
  for (double v : y) s += (v - mean) * (v - mean);
  return s;
}

double regression_split_loss(std::span<const double> left_y, std::span<const double> right_y, CriterionKind kind) {
  if (left_y.empty() || right_y.empty()) throw ContractError("regression split loss needs both sides non-empty");
  const double l = sum_squared_error(left_y);
  const double r = sum_squared_error(right_y);
  if (kind == CriterionKind::sse) return l + r;
  if (kind == CriterionKind::mse) return l / static_cast<double>(left_y.size()) + r / static_cast<double>(right_y.size());
  throw ContractError("regression split loss needs sse or mse");
}

double impurity_gain(const ClassDistribution& parent, const ClassDistribution& left, const ClassDistribution& right,
                     const SplitCriterion& criterion) {
  require_nonempty(parent);
  if (left.total + right.total != parent.total) throw ContractError("child totals do not add up to the parent");
  if (criterion.is_regression()) throw ContractError("impurity gain needs an entropy criterion");

  auto child = [&](const ClassDistribution& d) {
    if (d.total == 0) return 0.0;
    const double e = node_entropy(d, criterion);
    if (!criterion.weighted_children) return e;
    return static_cast<double>(d.total) / static_cast<double>(parent.total) * e;
  };
  const double gain = node_entropy(parent, criterion) - (child(left) + child(right));
  if (criterion.kind != CriterionKind::gain_ratio) return gain;
  const double info = split_information(left.total, right.total);
  if (info == 0.0) throw UninformativeSplit("gain ratio with zero split information");
  return gain / info;
}

}  // namespace ddt
