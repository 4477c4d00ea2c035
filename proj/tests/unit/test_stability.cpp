#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "ddt/error.hpp"
#include "ddt/kde.hpp"
#include "ddt/simulation.hpp"
#include "ddt/stability.hpp"
#include "ddt/teacher.hpp"

using namespace ddt;

namespace {

const Region kStepRegion({IntervalBound{0.0, 2.0, true}});

StabilityReport measure(const Teacher& t, const Region& region, std::size_t repeats, std::size_t n,
                        std::uint64_t seed = 1) {
  StabilityConfig cfg;
  cfg.repeats = repeats;
  cfg.sample_size = n;
  return measure_split_stability(t, region, SplitCriterion::sse(), cfg, StabilityContext{seed, 1, 2, 0});
}

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_SUITE("stability") {
  TEST_CASE("confidence interval") {
    const Interval ci = split_confidence_interval(1.0, 2.0, 1000);
    CHECK(ci.lo == doctest::Approx(0.997));
    CHECK(ci.hi == doctest::Approx(1.003));
    const Interval clipped = split_confidence_interval(1.0, 2.0, 3, Interval{0.0, 2.0});
    CHECK(clipped.lo == 0.0);
    CHECK(clipped.hi == 2.0);
  }

  TEST_CASE("required sample size") {
    CHECK(required_sample_size(2.0, 0.001) == 3000);
    CHECK(required_sample_size(1.0, 0.5) == 3);
    CHECK_THROWS(required_sample_size(1.0, 0.6));
    CHECK_THROWS(required_sample_size(1.0, 0.0));
  }

  TEST_CASE("step teacher is stable") {
    const auto t = make_step_teacher(0.0, 2.0, 1.0, 0.0, 10.0);
    const auto r = measure(*t, kStepRegion, 100, 1000);
    REQUIRE(r.first_level.size() == 1);
    CHECK(r.first_level[0] == 1.0);
    REQUIRE(r.second(0));
    CHECK(std::abs(r.second(0)->mode - 1.0) <= 0.003);
    CHECK(r.chosen.rule.covariate == 0);
    CHECK(std::abs(r.chosen.rule.threshold() - 1.0) <= 0.003);
    REQUIRE(r.ci);
    CHECK(r.ci->hi - r.ci->lo == doctest::Approx(2.0 * 3.0 * 2.0 / (2.0 * 1000)));
    CHECK(r.oscillation.kind == OscillationKind::none);
  }

  TEST_CASE("report masses are normalised") {
    const Dataset grid = sim2d_grid(21);
    const auto t = make_grid_teacher(sim2d_schema(), grid);
    const Region region = Region::full(sim2d_schema());
    const auto r = measure(*t, region, 60, 400, 5);
    CHECK(std::abs(total(r.first_level) - 1.0) <= 1e-12);
    for (const auto& s : r.second_level) {
      const auto hist = std::accumulate(s.histogram_counts.begin(), s.histogram_counts.end(), std::size_t{0});
      CHECK(hist == s.count);
    }
    std::size_t counted = 0;
    for (const auto& s : r.second_level) counted += s.count;
    CHECK(counted == r.informative);
    REQUIRE(r.ci);
    const double w = region.interval(r.chosen.rule.covariate).width();
    const double half = 3.0 * w / (2.0 * static_cast<double>(r.pseudo_sample_size));
    const double x = r.chosen.rule.threshold();
    CHECK(r.ci->lo == doctest::Approx(std::max(0.0, x - half)));
    CHECK(r.ci->hi == doctest::Approx(std::min(10.0, x + half)));
  }

  TEST_CASE("categorical second level sums to one") {
    const CovariateSchema schema({{"g", CategoricalDomain{{"a", "b", "c"}}}, {"x", ContinuousDomain{0.0, 1.0}}}, {});
    const FunctionTeacher t([](std::span<const double> r) { return r[0] == 1.0 ? 5.0 : r[1]; }, {}, "cat");
    const auto r = measure(t, Region::full(schema), 50, 300);
    CHECK(r.first_level[0] >= 0.9);
    const SecondLevel* s = r.second(0);
    REQUIRE(s);
    CHECK_FALSE(s->continuous);
    CHECK(total(s->level_mass) == doctest::Approx(1.0));
    CHECK(r.chosen.rule.level() == 1);
    CHECK_FALSE(r.ci);
  }

  TEST_CASE("simulation grid teacher at the root") {
    const auto t = make_grid_teacher(sim2d_schema(), sim2d_grid());
    StabilityConfig cfg;
    const auto r =
        measure_split_stability(*t, Region::full(sim2d_schema()), SplitCriterion::sse(), cfg, StabilityContext{3, 1, 2, 0});
    CHECK(*std::max_element(r.first_level.begin(), r.first_level.end()) >= 0.97);
  }

  TEST_CASE("a single repeat") {
    const auto t = make_step_teacher(0.0, 2.0, 1.0, 0.0, 10.0);
    const auto r = measure(*t, kStepRegion, 1, 500);
    CHECK(r.informative == 1);
    CHECK(r.draws.size() == 1);
    CHECK(r.second(0)->count == 1);
    CHECK(r.oscillation.kind == OscillationKind::none);
    CHECK(r.oscillation.note.find("insufficient repeats") != std::string::npos);
  }

  TEST_CASE("constant teacher is uninformative") {
    const auto t = make_step_teacher(0.0, 2.0, 1.0, 5.0, 5.0);
    CHECK_THROWS_AS(measure(*t, kStepRegion, 10, 100), UninformativeSplit);
  }

  TEST_CASE("results do not depend on the worker count") {
    const auto t = make_grid_teacher(sim2d_schema(), sim2d_grid(21));
    StabilityConfig cfg;
    cfg.repeats = 30;
    cfg.sample_size = 300;
    const Region region = Region::full(sim2d_schema());
    const auto a = measure_split_stability(*t, region, SplitCriterion::sse(), cfg, StabilityContext{8, 1, 1, 0});
    const auto b = measure_split_stability(*t, region, SplitCriterion::sse(), cfg, StabilityContext{8, 1, 4, 0});
    REQUIRE(a.draws.size() == b.draws.size());
    for (std::size_t i = 0; i < a.draws.size(); ++i) {
      CHECK(a.draws[i].covariate == b.draws[i].covariate);
      CHECK(a.draws[i].value == b.draws[i].value);
    }
    CHECK(a.chosen.rule == b.chosen.rule);
  }

  TEST_CASE("auto sample size escalates on a wide spread") {
    const auto t = make_plateau_teacher(0.0, 1.0, 0.4, 0.6, 0.0, 1.0);
    StabilityConfig cfg;
    cfg.repeats = 40;
    const Region region({IntervalBound{0.0, 1.0, true}});
    const auto r = measure_split_stability(*t, region, SplitCriterion::sse(), cfg, StabilityContext{2, 1, 2, 0});
    CHECK(r.escalated);
    CHECK(r.pseudo_sample_size == 2 * auto_sample_size(region, cfg));
    CHECK(r.repeats == 40);
  }

  TEST_CASE("choose_split picks the modal covariate") {
    StabilityReport r;
    r.first_level = {0.97, 0.03};
    SecondLevel s0;
    s0.covariate = 0;
    s0.count = 97;
    s0.mode = 0.4;
    SecondLevel s1;
    s1.covariate = 1;
    s1.count = 3;
    s1.mode = 0.2;
    r.second_level = {s0, s1};
    r.draws = {Draw{0, 0.4, 0.0}};
    const Region region({IntervalBound{0.0, 1.0, true}, IntervalBound{0.0, 1.0, true}});
    Rng rng(1);
    const SplitRule rule = choose_split(r, region, rng);
    CHECK(rule.covariate == 0);
    CHECK(rule.threshold() == 0.4);
    CHECK_FALSE(r.first_level_tie);
  }

  TEST_CASE("first-level ties are flagged and seeded") {
    StabilityReport r;
    r.first_level = {0.5, 0.5};
    SecondLevel s0;
    s0.covariate = 0;
    s0.mode = 0.4;
    SecondLevel s1;
    s1.covariate = 1;
    s1.mode = 0.6;
    r.second_level = {s0, s1};
    r.draws = {Draw{0, 0.4, 0.0}, Draw{1, 0.6, 0.0}};
    const Region region({IntervalBound{0.0, 1.0, true}, IntervalBound{0.0, 1.0, true}});
    std::size_t zero = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      Rng rng(s);
      StabilityReport copy = r;
      zero += choose_split(copy, region, rng).covariate == 0 ? 1 : 0;
      CHECK(copy.first_level_tie);
      Rng a(s), b(s);
      CHECK(choose_split(copy, region, a).covariate == choose_split(copy, region, b).covariate);
    }
    CHECK(zero > 20);
    CHECK(zero < 80);
  }

  TEST_CASE("kde mode of a tight cluster") {
    Rng rng(4);
    std::vector<double> v;
    for (int i = 0; i < 200; ++i) v.push_back(1.0 + rng.uniform(-0.002, 0.002));
    const auto k = gaussian_kde(v, 0.0, 2.0);
    CHECK(std::abs(k.mode - 1.0) < 0.002);
    CHECK(k.bandwidth > 0.0);
  }

  TEST_CASE("kde density integrates to about one") {
    Rng rng(5);
    std::vector<double> v;
    for (int i = 0; i < 500; ++i) v.push_back(rng.uniform(0.3, 0.7));
    const auto k = gaussian_kde(v, -10.0, 10.0);
    double area = 0.0;
    for (std::size_t i = 1; i < k.grid.size(); ++i) {
      area += 0.5 * (k.density[i] + k.density[i - 1]) * (k.grid[i] - k.grid[i - 1]);
    }
    CHECK(area == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("quantiles") {
    CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.0) == 1.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 1.0) == 4.0);
  }

  TEST_CASE("oscillation between two equal cuts") {
    const auto t = make_piecewise_teacher(0.0, 2.0, {0.5, 1.5}, {0.0, 1.0, 0.0});
    const auto r = measure(*t, kStepRegion, 200, 2000, 6);
    REQUIRE(r.oscillation.kind == OscillationKind::finite_points);
    REQUIRE(r.oscillation.atoms.size() == 2);
    CHECK(r.oscillation.atoms[0].value == doctest::Approx(0.5).epsilon(0.01));
    CHECK(r.oscillation.atoms[1].value == doctest::Approx(1.5).epsilon(0.01));
    CHECK(std::abs(r.oscillation.atoms[0].mass - 0.5) < 0.1);
  }

  TEST_CASE("oscillation over a plateau") {
    const auto t = make_plateau_teacher(0.0, 1.0, 0.4, 0.6, 0.0, 1.0);
    const auto r = measure(*t, Region({IntervalBound{0.0, 1.0, true}}), 200, 2000, 7);
    REQUIRE(r.oscillation.kind == OscillationKind::interval);
    CHECK(std::abs(r.oscillation.interval.lo - 0.4) < 0.05);
    CHECK(std::abs(r.oscillation.interval.hi - 0.6) < 0.05);
  }

  TEST_CASE("unequal clusters are not oscillation") {
    std::vector<double> values, crit;
    for (int i = 0; i < 50; ++i) {
      values.push_back(0.5 + i * 1e-4);
      crit.push_back(1.0);
      values.push_back(1.5 + i * 1e-4);
      crit.push_back(2.0);
    }
    const auto o = detect_oscillation(values, crit, 2.0);
    CHECK(o.kind == OscillationKind::none);
  }
}
