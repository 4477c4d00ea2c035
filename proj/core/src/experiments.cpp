#include "ddt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>

#include "ddt/error.hpp"
#include "ddt/kde.hpp"
#include "ddt/parallel.hpp"
#include "ddt/simulation.hpp"
#include "ddt/stability.hpp"
#include "ddt/stump.hpp"
#include "ddt/teacher.hpp"

namespace ddt {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Fitted cut of one SSE stump on n uniform draws, or nullopt when every
// draw fell on one side of the jump.
std::optional<double> step_cut(const StepExperiment& step, const Teacher& teacher, std::size_t n, Rng& rng) {
  const Region region({IntervalBound{step.lo, step.hi, true}});
  Dataset data;
  data.x = sample_region(region, n, rng);
  data.y = predict_batch(teacher, data.x);
  const auto fit = fit_stump(data, region, SplitCriterion::sse(), rng);
  if (!fit) return std::nullopt;
  return fit->rule.threshold();
}

std::uint64_t size_key(std::size_t n) { return 1000000 + n; }

}  // namespace

std::vector<ConvergenceRow> run_convergence(const ConvergenceOptions& options) {
  const auto teacher = make_step_teacher(options.step.lo, options.step.hi, options.step.cut, 0.0, 1.0);
  std::vector<ConvergenceRow> rows;
  for (std::size_t n : options.sizes) {
    std::vector<double> errors(options.repeats, 0.0);
    parallel_for(options.repeats, resolve_workers(options.workers), [&](std::size_t r) {
      Rng rng = stream_rng(options.seed, size_key(n), Stream::experiment, r);
      const auto cut = step_cut(options.step, *teacher, n, rng);
      errors[r] = cut ? std::abs(*cut - options.step.cut) : options.step.hi - options.step.lo;
    });
    ConvergenceRow row{n, quantile(errors, 0.5), 0.0};
    if (!rows.empty() && row.median_error > 0.0) row.ratio = rows.back().median_error / row.median_error;
    rows.push_back(row);
  }
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "n,median_abs_error,ratio_to_previous\n";
  for (const auto& r : rows) out << r.n << ',' << fmt(r.median_error) << ',' << fmt(r.ratio) << '\n';
  return out.str();
}

std::vector<CoverageRow> run_coverage(const CoverageOptions& options) {
  const auto teacher = make_step_teacher(options.step.lo, options.step.hi, options.step.cut, 0.0, 1.0);
  const double width = options.step.hi - options.step.lo;
  const Interval clip{options.step.lo, options.step.hi};
  std::vector<CoverageRow> rows;
  for (std::size_t n : options.sizes) {
    CoverageRow row;
    row.n = n;
    row.rates.assign(options.outer, 0.0);
    parallel_for(options.outer, resolve_workers(options.workers), [&](std::size_t o) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < options.inner; ++i) {
        Rng rng = stream_rng(options.seed, size_key(n), Stream::experiment, o * options.inner + i);
        const auto cut = step_cut(options.step, *teacher, n, rng);
        if (!cut) continue;
        const Interval ci = split_confidence_interval(*cut, width, n, clip);
        if (ci.lo <= options.step.cut && options.step.cut <= ci.hi) ++hits;
      }
      row.rates[o] = static_cast<double>(hits) / static_cast<double>(options.inner);
    });
    row.mean = std::accumulate(row.rates.begin(), row.rates.end(), 0.0) / static_cast<double>(row.rates.size());
    row.min = *std::min_element(row.rates.begin(), row.rates.end());
    row.max = *std::max_element(row.rates.begin(), row.rates.end());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string coverage_csv(const std::vector<CoverageRow>& rows) {
  std::ostringstream out;
  out << "n,outer,coverage\n";
  for (const auto& r : rows) {
    for (std::size_t o = 0; o < r.rates.size(); ++o) out << r.n << ',' << o << ',' << fmt(r.rates[o]) << '\n';
  }
  return out.str();
}

InterpretationOptions default_interpretation_options() {
  InterpretationOptions o;
  o.forest.trees = 200;
  o.forest.max_depth = 32;
  o.forest.min_leaf = 1;
  o.forest.feature_fraction = 1.0;

  o.ddt.criterion = SplitCriterion::sse();
  o.ddt.stopping.max_interpretable_depth = 4;
  o.ddt.stopping.max_interpretable_nodes = 9;
  o.ddt.stopping.pxi_threshold = 1e-6;
  o.ddt.stability.repeats = 100;
  o.ddt.odt.max_depth = 4;
  o.ddt.odt.pseudo_sample_size = 5000;
  o.ddt.eval_sample_size = 5000;
  o.ddt.weight_source = Source::pseudo;

  o.baseline.max_depth = 4;
  o.baseline.max_splits = 9;
  o.baseline.min_leaf = 7;

  o.truth.max_depth = 4;
  o.truth.max_splits = 9;
  o.truth.min_leaf = 1;
  return o;
}

InterpretationResult run_interpretation(const InterpretationOptions& options) {
  const CovariateSchema schema = sim2d_schema();
  const Region root = Region::full(schema);
  const Dataset grid = sim2d_grid(options.grid_per_axis);

  Rng truth_rng = stream_rng(options.seed, 0, Stream::experiment, 0);
  const OdtSubtree truth = induce_odt(grid, root, SplitCriterion::sse(), options.truth, truth_rng, 0);
  std::vector<double> reference(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) reference[i] = truth.predict(grid.x.row(i));

  InterpretationResult result;
  result.runs.resize(options.runs);
  parallel_for(options.runs, resolve_workers(options.workers), [&](std::size_t r) {
    const std::uint64_t run_seed = derive_seed(options.seed, {r + 1});
    Rng sample_rng = stream_rng(run_seed, 0, Stream::experiment, 1);
    const Dataset observed = subsample(grid, options.samples, sample_rng);

    Rng odt_rng = stream_rng(run_seed, 0, Stream::experiment, 2);
    const OdtSubtree odt = induce_odt(observed, root, SplitCriterion::sse(), options.baseline, odt_rng, 0);

    ForestConfig fc = options.forest;
    fc.seed = run_seed;
    fc.workers = 1;
    const auto forest = fit_forest_teacher(schema, observed, fc);

    InductionConfig ic = options.ddt;
    ic.seed = run_seed;
    ic.workers = 1;
    const DdtTree tree = induce_ddt(*forest.teacher, schema, observed, ic);

    std::vector<double> odt_pred(grid.size()), ddt_pred(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      odt_pred[i] = odt.predict(grid.x.row(i));
      ddt_pred[i] = predict_partition(tree, grid.x.row(i));
    }
    InterpretationRun& out = result.runs[r];
    out.run = r;
    out.odt_mse = mean_squared_difference(odt_pred, reference);
    out.ddt_mse = mean_squared_difference(ddt_pred, reference);
    out.interpretable = tree.interpretable_count();
    for (const auto& [id, node] : tree.nodes) {
      if (node.kind != NodeKind::interpretable) continue;
      out.min_first_level = std::min(out.min_first_level, node.stability->first_level[node.split->covariate()]);
    }
  });
  for (const auto& run : result.runs) result.ddt_wins += run.ddt_mse < run.odt_mse ? 1 : 0;
  return result;
}

std::string interpretation_csv(const InterpretationResult& result) {
  std::ostringstream out;
  out << "run,odt_mse,ddt_mse,ddt_wins,interpretable_nodes,min_first_level\n";
  for (const auto& r : result.runs) {
    out << r.run << ',' << fmt(r.odt_mse) << ',' << fmt(r.ddt_mse) << ',' << (r.ddt_mse < r.odt_mse ? 1 : 0) << ','
        << r.interpretable << ',' << fmt(r.min_first_level) << '\n';
  }
  return out.str();
}

}  // namespace ddt
