#include <cmath>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "ddt/error.hpp"
#include "ddt/simulation.hpp"

using namespace ddt;

TEST_SUITE("domain") {
  TEST_CASE("schema rejects bad covariates") {
    CHECK_THROWS_AS(CovariateSchema({{"a", ContinuousDomain{1.0, 1.0}}}, {}), DataError);
    CHECK_THROWS_AS(CovariateSchema({{"a", ContinuousDomain{0.0, INFINITY}}}, {}), DataError);
    CHECK_THROWS_AS(CovariateSchema({{"a", CategoricalDomain{{"only"}}}}, {}), DataError);
    CHECK_THROWS_AS(CovariateSchema({{"a", ContinuousDomain{}}, {"a", ContinuousDomain{}}}, {}), DataError);
  }

  TEST_CASE("load a numeric csv") {
    const auto dir = testing::scratch_dir("domain_load");
    std::ostringstream csv;
    csv << "a,b,y\n";
    for (int i = 0; i < 50; ++i) csv << i * 0.1 << ',' << 50 - i << ',' << i % 7 << '\n';
    const auto path = testing::write_text(dir / "d.csv", csv.str());
    const auto [schema, data] = load_dataset(path);
    CHECK(schema.size() == 2);
    CHECK(schema[0].is_continuous());
    CHECK(schema[1].is_continuous());
    CHECK_FALSE(schema.response().is_categorical());
    CHECK(data.size() == 50);
    CHECK(schema[0].continuous().lo == doctest::Approx(0.0));
    CHECK(schema[0].continuous().hi == doctest::Approx(4.9));
  }

  TEST_CASE("unknown level against a schema hint") {
    const auto dir = testing::scratch_dir("domain_level");
    const auto path = testing::write_text(dir / "d.csv", "x1,colour,y\n0.5,red,1\n1.0,purple,2\n");
    try {
      load_dataset(path, testing::mixed_schema());
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("unknown level") != std::string::npos);
    }
  }

  TEST_CASE("bundled simulation grid") {
    const auto [schema, data] = load_dataset(std::string(DDT_DATA_DIR) + "/sim2d_grid.csv");
    CHECK(schema.size() == 2);
    CHECK(schema[0].name == "x1");
    CHECK(schema[1].name == "x2");
    CHECK_FALSE(schema.response().is_categorical());
    CHECK(data.size() == 2601);
    const Dataset generated = sim2d_grid();
    CHECK(generated.x == data.x);
  }

  TEST_CASE("margin widens continuous domains") {
    const auto dir = testing::scratch_dir("domain_margin");
    const auto path = testing::write_text(dir / "d.csv", "a,y\n0,1\n10,2\n");
    LoadOptions opts;
    opts.domain_margin = 0.1;
    const auto [schema, data] = load_dataset(path, std::nullopt, opts);
    CHECK(schema[0].continuous().lo == doctest::Approx(-1.0));
    CHECK(schema[0].continuous().hi == doctest::Approx(11.0));
  }

  TEST_CASE("region membership") {
    const CovariateSchema schema({{"x1", ContinuousDomain{0.0, 2.0}}}, {});
    const Region full = Region::full(schema);
    const double inside[] = {1.3};
    const double top[] = {2.0};
    CHECK(full.contains(inside));
    CHECK(full.contains(top));

    const Region half({IntervalBound{0.0, 1.0, false}});
    const double one[] = {1.0};
    CHECK_FALSE(half.contains(one));

    const Region cat({LevelSubset{{true, false, false}}});
    const double level_b[] = {1.0};
    CHECK_FALSE(cat.contains(level_b));
  }

  TEST_CASE("split_region on a continuous cut") {
    const Region r({IntervalBound{0.0, 2.0, true}});
    const auto [l, rr] = split_region(r, SplitRule{0, ThresholdCut{1.0}});
    CHECK(l.interval(0) == IntervalBound{0.0, 1.0, false});
    CHECK(rr.interval(0) == IntervalBound{1.0, 2.0, true});
    CHECK_THROWS_AS(split_region(r, SplitRule{0, ThresholdCut{3.0}}), ContractError);
    CHECK_THROWS_AS(split_region(r, SplitRule{0, ThresholdCut{0.0}}), ContractError);
  }

  TEST_CASE("split_region one-vs-rest") {
    const Region r({LevelSubset{{true, true, true}}});
    const auto [l, rr] = split_region(r, SplitRule{0, LevelCut{0}});
    CHECK(l.levels(0).codes() == std::vector<std::size_t>{0});
    CHECK(rr.levels(0).codes() == std::vector<std::size_t>{1, 2});
    const Region single({LevelSubset{{false, true, false}}});
    CHECK_THROWS_AS(split_region(single, SplitRule{0, LevelCut{1}}), ContractError);
  }

  TEST_CASE("children partition the parent") {
    const auto schema = testing::mixed_schema();
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      Region parent = Region::full(schema);
      SplitRule rule = trial % 2 == 0 ? SplitRule{0, ThresholdCut{rng.uniform(0.01, 1.99)}}
                                      : SplitRule{1, LevelCut{static_cast<std::size_t>(rng.below(3))}};
      const auto [l, r] = split_region(parent, rule);
      CHECK(l.is_subset_of(parent));
      CHECK(r.is_subset_of(parent));
      CHECK(l.mass_within(parent) + r.mass_within(parent) == doctest::Approx(1.0));
      const RowMatrix rows = sample_region(parent, 400, rng);
      for (std::size_t i = 0; i < rows.rows(); ++i) {
        const bool in_l = l.contains(rows.row(i));
        const bool in_r = r.contains(rows.row(i));
        REQUIRE(in_l != in_r);
        REQUIRE(in_l == rule.goes_left(rows.row(i)));
      }
    }
  }

  TEST_CASE("child differs from its parent on exactly one covariate") {
    const auto schema = testing::mixed_schema();
    const Region parent = Region::full(schema);
    const auto [l, r] = split_region(parent, SplitRule{1, LevelCut{2}});
    CHECK(l[0] == parent[0]);
    CHECK(r[0] == parent[0]);
    CHECK_FALSE(l[1] == parent[1]);
    CHECK_FALSE(r[1] == parent[1]);
  }

  TEST_CASE("sampled rows stay in the region") {
    const Region r({IntervalBound{0.25, 0.5, false}, LevelSubset{{false, true, true}}});
    Rng rng(3);
    const RowMatrix rows = sample_region(r, 1000, rng);
    for (std::size_t i = 0; i < rows.rows(); ++i) REQUIRE(r.contains(rows.row(i)));
  }

  TEST_CASE("sampling paths must be nested") {
    const Region a({IntervalBound{0.0, 2.0, true}});
    const Region b({IntervalBound{0.0, 1.0, false}});
    const Region c({IntervalBound{1.0, 2.0, true}});
    CHECK_NOTHROW(SamplingPath({a, b}));
    CHECK_THROWS_AS(SamplingPath({b, c}), ContractError);
    CHECK(SamplingPath({a, b}).intersects(SamplingPath({a, c})));
    CHECK_FALSE(SamplingPath({b}).intersects(SamplingPath({c})));
  }

  TEST_CASE("dataset validation") {
    const auto schema = testing::mixed_schema();
    Dataset d;
    d.x = RowMatrix(2);
    const double good[] = {0.5, 1.0};
    const double bad[] = {2.5, 1.0};
    d.x.push_back(good);
    d.y = {1.0};
    CHECK_NOTHROW(d.validate(schema));
    d.x.push_back(bad);
    d.y.push_back(2.0);
    CHECK_THROWS_AS(d.validate(schema), DataError);
    d.y.pop_back();
    CHECK_THROWS_AS(d.validate(schema), DataError);
  }

  TEST_CASE("write then load reproduces the data") {
    const auto dir = testing::scratch_dir("domain_roundtrip");
    const auto schema = testing::mixed_schema();
    Rng rng(5);
    Dataset d;
    d.x = sample_region(Region::full(schema), 30, rng);
    for (std::size_t i = 0; i < 30; ++i) d.y.push_back(rng.uniform(-1.0, 1.0));
    write_dataset(dir / "d.csv", schema, d);
    const auto [s2, d2] = load_dataset(dir / "d.csv", schema);
    CHECK(d2.x == d.x);
    CHECK(d2.y == d.y);
  }
}
