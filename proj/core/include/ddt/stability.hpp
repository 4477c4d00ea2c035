#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddt/criteria.hpp"
#include "ddt/domain.hpp"
#include "ddt/stump.hpp"
#include "ddt/teacher.hpp"

namespace ddt {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

struct OscillationConfig {
  // Single-linkage gap as a share of the region width.
  double gap_fraction = 0.05;
  // Relative tolerance on cluster criterion values; the standard error of
  // the cluster means is added on top.
  double criterion_rel_tol = 1e-3;
  // Clusters holding less mass than this are treated as noise.
  double min_cluster_mass = 0.05;
  // Interval screen: the cluster span is cut into `uniform_bins` bins and
  // each must hold at least `uniform_bin_floor` times its expected count.
  std::size_t uniform_bins = 10;
  double uniform_bin_floor = 0.25;
  std::size_t min_values = 30;
};

enum class OscillationKind { none, finite_points, interval };

struct Atom {
  double value = 0.0;
  double mass = 0.0;
  bool operator==(const Atom&) const = default;
};

struct Oscillation {
  OscillationKind kind = OscillationKind::none;
  std::vector<Atom> atoms;  // finite_points
  Interval interval;        // interval
  double ks_uniform = 0.0;  // KS distance of the widest cluster to uniform
  std::string note;
};

// Split values of the winning covariate (thresholds) with the criterion
// value of each draw; `width` is the searched interval width.
Oscillation detect_oscillation(std::span<const double> values, std::span<const double> criterion_values,
                               double width, const OscillationConfig& config = {});

struct Draw {
  std::size_t covariate = 0;
  double value = 0.0;  // threshold or level code
  double criterion = 0.0;
};

struct SecondLevel {
  std::size_t covariate = 0;
  std::size_t count = 0;
  bool continuous = true;
  // Categorical: mass per level code (n_kj / n_k).
  std::vector<double> level_mass;
  // Continuous: histogram over the region interval and the density summary.
  std::vector<double> histogram_edges;
  std::vector<std::size_t> histogram_counts;
  double bandwidth = 0.0;
  double mode = 0.0;
  double iqr = 0.0;
};

struct StabilityReport {
  std::size_t repeats = 0;             // N_i
  std::size_t pseudo_sample_size = 0;  // n_i
  std::size_t informative = 0;         // repeats that produced a split
  std::vector<double> first_level;     // mass per covariate
  std::vector<SecondLevel> second_level;
  std::vector<Draw> draws;
  SplitCandidate chosen;
  bool first_level_tie = false;
  bool second_level_tie = false;
  bool escalated = false;
  std::optional<Interval> ci;
  Oscillation oscillation;
  std::vector<std::string> notes;

  const SecondLevel* second(std::size_t covariate) const;
};

struct StabilityConfig {
  std::size_t repeats = 100;
  // 0 selects required_sample_size with half-width d = auto_d_fraction * width.
  std::size_t sample_size = 0;
  double auto_d_fraction = 0.005;
  std::size_t max_sample_size = 60000;
  // Auto sample sizes double once when the second-level IQR exceeds
  // escalation_iqr_factor CI half-widths.
  bool escalate = true;
  double escalation_iqr_factor = 2.0;
  std::size_t min_samples_leaf = 1;
  std::size_t histogram_bins = 20;
  OscillationConfig oscillation;
};

struct StabilityContext {
  std::uint64_t seed = 0;
  std::uint64_t node_id = 1;
  unsigned workers = 1;
  std::size_t class_count = 0;
};

// Widest continuous interval of the region, or 1 when all covariates are
// categorical.
double reference_width(const Region& region);
std::size_t auto_sample_size(const Region& region, const StabilityConfig& config);

// Repeats `repeats` stump fits on fresh uniform pseudo samples of the region
// and summarises the split distribution. Throws UninformativeSplit when no
// repeat finds a split, TeacherError when the teacher fails.
StabilityReport measure_split_stability(const Teacher& teacher, const Region& region,
                                        const SplitCriterion& criterion, const StabilityConfig& config,
                                        const StabilityContext& context);

// Modal covariate, then the modal value of its second level. Ties at either
// level are broken through `rng` and flagged in the report.
SplitRule choose_split(StabilityReport& report, const Region& region, Rng& rng);

// choose_split plus node statistics refit on one fresh pseudo sample.
SplitCandidate select_best_split(StabilityReport& report, const Teacher& teacher, const Region& region,
                                 const SplitCriterion& criterion, const StabilityContext& context);

// [x - 3w/(2n), x + 3w/(2n)], optionally clipped.
Interval split_confidence_interval(double split_value, double region_width, std::size_t sample_size,
                                   std::optional<Interval> clip = std::nullopt);

// ceil(3w / (2d)); requires 0 < d <= w/2.
std::size_t required_sample_size(double region_width, double half_width_d);

}  // namespace ddt
