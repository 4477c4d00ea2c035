#include "ddt/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddt/error.hpp"
#include "ddt/kde.hpp"
#include "ddt/parallel.hpp"

namespace ddt {

namespace {

struct Cluster {
  std::size_t begin = 0, end = 0;  // range in sorted order
  double mass = 0.0;
  double crit_mean = 0.0;
  double crit_se = 0.0;
};

double ks_to_uniform(std::span<const double> sorted, double lo, double hi) {
  if (!(hi > lo)) return 1.0;
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double u = std::clamp((sorted[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - u), std::abs(u - static_cast<double>(i) / n)});
  }
  return d;
}

bool passes_bin_screen(std::span<const double> sorted, double lo, double hi, const OscillationConfig& config) {
  const std::size_t bins = std::max<std::size_t>(1, config.uniform_bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : sorted) {
    auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)]++;
  }
  const double expected = static_cast<double>(sorted.size()) / static_cast<double>(bins);
  return std::all_of(counts.begin(), counts.end(),
                     [&](std::size_t c) { return static_cast<double>(c) >= config.uniform_bin_floor * expected; });
}

}  // namespace

Oscillation detect_oscillation(std::span<const double> values, std::span<const double> criterion_values, double width,
                               const OscillationConfig& config) {
  Oscillation out;
  if (values.size() != criterion_values.size()) throw ContractError("values and criterion values differ in length");
  if (values.size() < config.min_values) {
    out.note = "insufficient repeats (" + std::to_string(values.size()) + " < " + std::to_string(config.min_values) +
               ")";
    return out;
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> sorted(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = values[order[i]];

  const double gap = config.gap_fraction * width;
  const double n = static_cast<double>(values.size());
  std::vector<Cluster> clusters;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || sorted[i] - sorted[i - 1] > gap) {
      Cluster c{start, i, static_cast<double>(i - start) / n};
      double s = 0.0, s2 = 0.0;
      for (std::size_t k = start; k < i; ++k) {
        const double v = criterion_values[order[k]];
        s += v;
        s2 += v * v;
      }
      const double m = static_cast<double>(i - start);
      c.crit_mean = s / m;
      const double var = m > 1 ? std::max(0.0, (s2 - s * s / m) / (m - 1)) : 0.0;
      c.crit_se = std::sqrt(var / m);
      clusters.push_back(c);
      start = i;
    }
  }
  std::erase_if(clusters, [&](const Cluster& c) { return c.mass < config.min_cluster_mass; });
  if (clusters.empty()) {
    out.note = "no cluster above the noise floor";
    return out;
  }

  if (clusters.size() >= 2) {
    double scale = 0.0;
    for (const auto& c : clusters) scale = std::max(scale, std::abs(c.crit_mean));
    bool agree = true;
    for (std::size_t a = 0; a < clusters.size() && agree; ++a) {
      for (std::size_t b = a + 1; b < clusters.size() && agree; ++b) {
        const double diff = std::abs(clusters[a].crit_mean - clusters[b].crit_mean);
        const double se = std::hypot(clusters[a].crit_se, clusters[b].crit_se);
        agree = diff <= config.criterion_rel_tol * scale + 3.0 * se;
      }
    }
    if (!agree) {
      out.note = std::to_string(clusters.size()) + " clusters with different criterion values";
      return out;
    }
    out.kind = OscillationKind::finite_points;
    for (const auto& c : clusters) {
      std::vector<double> members(sorted.begin() + static_cast<std::ptrdiff_t>(c.begin),
                                  sorted.begin() + static_cast<std::ptrdiff_t>(c.end));
      out.atoms.push_back({quantile(std::move(members), 0.5), c.mass});
    }
    return out;
  }

  const auto& c = clusters.front();
  const std::span<const double> members(sorted.data() + c.begin, c.end - c.begin);
  const double lo = members.front(), hi = members.back();
  out.ks_uniform = ks_to_uniform(members, lo, hi);
  if (hi - lo < gap) {
    out.note = "single narrow cluster";
    return out;
  }
  if (!passes_bin_screen(members, lo, hi, config)) {
    out.note = "wide cluster is not spread evenly";
    return out;
  }
  out.kind = OscillationKind::interval;
  out.interval = {lo, hi};
  return out;
}

const SecondLevel* StabilityReport::second(std::size_t covariate) const {
  for (const auto& s : second_level) {
    if (s.covariate == covariate) return &s;
  }
  return nullptr;
}

double reference_width(const Region& region) {
  double w = 0.0;
  for (std::size_t j = 0; j < region.size(); ++j) {
    if (region.is_interval(j)) w = std::max(w, region.interval(j).width());
  }
  return w > 0.0 ? w : 1.0;
}

std::size_t auto_sample_size(const Region& region, const StabilityConfig& config) {
  const double w = reference_width(region);
  return std::min(required_sample_size(w, config.auto_d_fraction * w), config.max_sample_size);
}

Interval split_confidence_interval(double split_value, double region_width, std::size_t sample_size,
                                   std::optional<Interval> clip) {
  if (!(region_width > 0)) throw ContractError("region width must be positive");
  if (sample_size < 1) throw ContractError("sample size must be at least 1");
  const double half = 3.0 * region_width / (2.0 * static_cast<double>(sample_size));
  Interval ci{split_value - half, split_value + half};
  if (clip) {
    ci.lo = std::max(ci.lo, clip->lo);
    ci.hi = std::min(ci.hi, clip->hi);
  }
  return ci;
}

std::size_t required_sample_size(double region_width, double half_width_d) {
  if (!(region_width > 0)) throw ContractError("region width must be positive");
  if (!(half_width_d > 0) || half_width_d > region_width / 2) {
    throw ContractError("half width d must satisfy 0 < d <= w/2");
  }
  const double v = 3.0 * region_width / (2.0 * half_width_d);
  // Shave rounding noise so that 3*2/0.002 gives 3000, not 3001.
  return static_cast<std::size_t>(std::ceil(v * (1.0 - 1e-12)));
}

namespace {

void summarise(StabilityReport& report, const Region& region, const StabilityConfig& config) {
  const std::size_t p = region.size();
  std::vector<std::size_t> counts(p, 0);
  for (const auto& d : report.draws) ++counts[d.covariate];
  const double n = static_cast<double>(report.draws.size());
  report.first_level.assign(p, 0.0);
  report.second_level.clear();
  for (std::size_t j = 0; j < p; ++j) {
    report.first_level[j] = static_cast<double>(counts[j]) / n;
    if (counts[j] == 0) continue;
    SecondLevel s;
    s.covariate = j;
    s.count = counts[j];
    std::vector<double> values;
    for (const auto& d : report.draws) {
      if (d.covariate == j) values.push_back(d.value);
    }
    if (region.is_interval(j)) {
      const auto& iv = region.interval(j);
      const std::size_t bins = std::max<std::size_t>(1, config.histogram_bins);
      s.histogram_counts.assign(bins, 0);
      for (std::size_t b = 0; b <= bins; ++b) {
        s.histogram_edges.push_back(iv.lo + iv.width() * static_cast<double>(b) / static_cast<double>(bins));
      }
      for (double v : values) {
        const auto b = static_cast<std::size_t>((v - iv.lo) / iv.width() * static_cast<double>(bins));
        s.histogram_counts[std::min(b, bins - 1)]++;
      }
      const auto kde = gaussian_kde(values, iv.lo, iv.hi);
      s.bandwidth = kde.bandwidth;
      s.mode = kde.mode;
      s.iqr = quantile(values, 0.75) - quantile(values, 0.25);
    } else {
      s.continuous = false;
      s.level_mass.assign(region.levels(j).allowed.size(), 0.0);
      std::vector<std::size_t> per(s.level_mass.size(), 0);
      for (double v : values) ++per[static_cast<std::size_t>(v)];
      for (std::size_t k = 0; k < per.size(); ++k) {
        s.level_mass[k] = static_cast<double>(per[k]) / static_cast<double>(counts[j]);
      }
    }
    report.second_level.push_back(std::move(s));
  }
}

void run_repeats(StabilityReport& report, const Teacher& teacher, const Region& region,
                 const SplitCriterion& criterion, const StabilityConfig& config, const StabilityContext& context,
                 std::uint64_t stream_offset) {
  std::vector<std::optional<Draw>> draws(config.repeats);
  StumpOptions options;
  options.min_samples_leaf = config.min_samples_leaf;
  options.class_count = context.class_count;
  const std::size_t n = report.pseudo_sample_size;
  parallel_for(config.repeats, resolve_workers(context.workers), [&](std::size_t r) {
    Rng rng = stream_rng(context.seed, context.node_id, Stream::repeat, stream_offset + r);
    Dataset sample;
    sample.provenance = Provenance::pseudo;
    sample.x = sample_region(region, n, rng);
    sample.y = predict_batch(teacher, sample.x);
    const auto split = fit_stump(sample, region, criterion, rng, options);
    if (!split) return;
    const auto& rule = split->rule;
    draws[r] = Draw{rule.covariate, rule.is_continuous() ? rule.threshold() : static_cast<double>(rule.level()),
                    split->criterion_value};
  });
  report.draws.clear();
  for (const auto& d : draws) {
    if (d) report.draws.push_back(*d);
  }
  report.informative = report.draws.size();
}

}  // namespace

SplitRule choose_split(StabilityReport& report, const Region& region, Rng& rng) {
  if (report.draws.empty()) throw ContractError("stability report has no draws");
  const double top = *std::max_element(report.first_level.begin(), report.first_level.end());
  std::vector<std::size_t> leaders;
  for (std::size_t j = 0; j < report.first_level.size(); ++j) {
    if (report.first_level[j] == top) leaders.push_back(j);
  }
  report.first_level_tie = leaders.size() > 1;
  const std::size_t j = leaders.size() == 1 ? leaders.front() : leaders[rng.below(leaders.size())];
  const SecondLevel* s = report.second(j);

  if (!s->continuous) {
    const double best = *std::max_element(s->level_mass.begin(), s->level_mass.end());
    std::vector<std::size_t> modal;
    for (std::size_t k = 0; k < s->level_mass.size(); ++k) {
      if (s->level_mass[k] == best) modal.push_back(k);
    }
    report.second_level_tie = modal.size() > 1;
    const std::size_t k = modal.size() == 1 ? modal.front() : modal[rng.below(modal.size())];
    return {j, LevelCut{k}};
  }
  const auto& iv = region.interval(j);
  double cut = s->mode;
  if (!(cut > iv.lo && cut < iv.hi)) {
    std::vector<double> values;
    for (const auto& d : report.draws) {
      if (d.covariate == j) values.push_back(d.value);
    }
    cut = quantile(std::move(values), 0.5);
  }
  return {j, ThresholdCut{cut}};
}

SplitCandidate select_best_split(StabilityReport& report, const Teacher& teacher, const Region& region,
                                 const SplitCriterion& criterion, const StabilityContext& context) {
  Rng tie = stream_rng(context.seed, context.node_id, Stream::tie_break);
  const SplitRule rule = choose_split(report, region, tie);
  Rng rng = stream_rng(context.seed, context.node_id, Stream::refit);
  const std::size_t n = std::max<std::size_t>(report.pseudo_sample_size, 2);
  RowMatrix x = sample_region(region, n, rng);
  const auto y = predict_batch(teacher, x);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return evaluate_rule(x, y, rows, rule, criterion, context.class_count);
}

StabilityReport measure_split_stability(const Teacher& teacher, const Region& region,
                                        const SplitCriterion& criterion, const StabilityConfig& config,
                                        const StabilityContext& context) {
  if (config.repeats < 1) throw ContractError("stability needs at least one repeat");
  const bool automatic = config.sample_size == 0;
  StabilityReport report;
  report.repeats = config.repeats;
  report.pseudo_sample_size = automatic ? auto_sample_size(region, config) : config.sample_size;
  if (report.pseudo_sample_size < 2) throw ContractError("stability needs a sample size of at least 2");

  run_repeats(report, teacher, region, criterion, config, context, 0);
  if (report.draws.empty()) throw UninformativeSplit("no repeat found an informative split");
  summarise(report, region, config);

  if (automatic && config.escalate) {
    const auto lead = static_cast<std::size_t>(
        std::max_element(report.first_level.begin(), report.first_level.end()) - report.first_level.begin());
    const SecondLevel* s = report.second(lead);
    if (s->continuous) {
      const double w = region.interval(lead).width();
      const double half = 3.0 * w / (2.0 * static_cast<double>(report.pseudo_sample_size));
      const std::size_t doubled = std::min(report.pseudo_sample_size * 2, config.max_sample_size);
      if (s->iqr > config.escalation_iqr_factor * half && doubled > report.pseudo_sample_size) {
        report.pseudo_sample_size = doubled;
        report.escalated = true;
        run_repeats(report, teacher, region, criterion, config, context, config.repeats);
        if (report.draws.empty()) throw UninformativeSplit("no repeat found an informative split");
        summarise(report, region, config);
      }
    }
  }
  if (report.informative < report.repeats) {
    report.notes.push_back(std::to_string(report.repeats - report.informative) + " of " +
                           std::to_string(report.repeats) + " repeats found no informative split");
  }

  report.chosen = select_best_split(report, teacher, region, criterion, context);
  const std::size_t j = report.chosen.rule.covariate;
  if (report.chosen.rule.is_continuous()) {
    const auto& iv = region.interval(j);
    report.ci = split_confidence_interval(report.chosen.rule.threshold(), iv.width(), report.pseudo_sample_size,
                                          Interval{iv.lo, iv.hi});
    std::vector<double> values, crit;
    for (const auto& d : report.draws) {
      if (d.covariate == j) {
        values.push_back(d.value);
        crit.push_back(d.criterion);
      }
    }
    report.oscillation = detect_oscillation(values, crit, iv.width(), config.oscillation);
  } else {
    report.oscillation.note = "categorical split";
  }
  return report;
}

}  // namespace ddt
