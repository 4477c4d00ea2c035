#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ddt {

enum class CriterionKind { sse, mse, tsallis, shannon, gini, gain_ratio };

struct SplitCriterion {
  CriterionKind kind = CriterionKind::sse;
  double q = 2.0;  // tsallis only
  // Child entropies weighted by n_t/n in impurity_gain. Off gives E - (E_l + E_r).
  bool weighted_children = true;

  static SplitCriterion sse() { return {CriterionKind::sse}; }
  static SplitCriterion mse() { return {CriterionKind::mse}; }
  static SplitCriterion shannon() { return {CriterionKind::shannon}; }
  static SplitCriterion gini() { return {CriterionKind::gini}; }
  static SplitCriterion gain_ratio() { return {CriterionKind::gain_ratio}; }
  static SplitCriterion tsallis(double q);

  // Accepts sse, mse, shannon, gini, gain_ratio, tsallis, tsallis:<q>.
  static SplitCriterion parse(std::string_view text);
  std::string name() const;

  bool is_regression() const { return kind == CriterionKind::sse || kind == CriterionKind::mse; }
  // Throws ConfigError on q == 1 or non-finite q.
  void validate() const;

  bool operator==(const SplitCriterion&) const = default;
};

struct ClassDistribution {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  ClassDistribution() = default;
  explicit ClassDistribution(std::size_t classes) : counts(classes, 0) {}
  explicit ClassDistribution(std::vector<std::uint64_t> c);
  static ClassDistribution from_labels(std::span<const double> labels, std::size_t classes);

  void add(std::size_t cls, std::uint64_t n = 1) {
    counts[cls] += n;
    total += n;
  }
  void remove(std::size_t cls, std::uint64_t n = 1) {
    counts[cls] -= n;
    total -= n;
  }
  double probability(std::size_t cls) const { return static_cast<double>(counts[cls]) / static_cast<double>(total); }
  // Most frequent class; ties go to the smallest index.
  std::size_t mode() const;
  bool is_pure() const;

  bool operator==(const ClassDistribution&) const = default;
};

double tsallis_entropy(const ClassDistribution& dist, double q);
double shannon_entropy(const ClassDistribution& dist);
double gini_index(const ClassDistribution& dist);
// -sum_t (n_t/n) ln(n_t/n) over the two sides.
double split_information(std::uint64_t n_left, std::uint64_t n_right);

// Impurity of a single node under an entropy criterion (gain ratio uses Shannon).
double node_entropy(const ClassDistribution& dist, const SplitCriterion& criterion);

// SSE or MSE of the two-sided partition.
double regression_split_loss(std::span<const double> left_y, std::span<const double> right_y, CriterionKind kind);

// Reduction in impurity; for gain ratio the Shannon gain over the split
// information. Throws UninformativeSplit when the gain-ratio denominator is 0.
double impurity_gain(const ClassDistribution& parent, const ClassDistribution& left,
                     const ClassDistribution& right, const SplitCriterion& criterion);

// Sum of squared deviations from the mean (two-pass).
double sum_squared_error(std::span<const double> y);

}  // namespace ddt
