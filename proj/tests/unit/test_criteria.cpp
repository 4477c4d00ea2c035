#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "ddt/criteria.hpp"
#include "ddt/error.hpp"
#include "ddt/random.hpp"

using namespace ddt;

namespace {

ClassDistribution random_distribution(Rng& rng, std::size_t classes) {
  ClassDistribution d(classes);
  for (std::size_t c = 0; c < classes; ++c) d.add(c, rng.below(50));
  if (d.total == 0) d.add(0);
  return d;
}

// Direct evaluation of the Tsallis sum from probabilities.
double tsallis_oracle(const ClassDistribution& d, double q) {
  double s = 0.0;
  for (auto c : d.counts) {
    const double p = static_cast<double>(c) / static_cast<double>(d.total);
    if (c > 0) s += std::pow(p, q);
  }
  return (1.0 - s) / (q - 1.0);
}

}  // namespace

TEST_SUITE("criteria") {
  TEST_CASE("tsallis examples") {
    CHECK(tsallis_entropy(ClassDistribution({1, 1}), 2.0) == doctest::Approx(0.5));
    CHECK(tsallis_entropy(ClassDistribution({5, 0}), 0.5) == 0.0);
    CHECK(tsallis_entropy(ClassDistribution({5, 0}), 3.0) == 0.0);
    CHECK(std::abs(tsallis_entropy(ClassDistribution({1, 1}), 1.000001) - shannon_entropy(ClassDistribution({1, 1}))) <
          1e-5);
    CHECK_THROWS_AS(tsallis_entropy(ClassDistribution({1, 1}), 1.0), ContractError);
  }

  TEST_CASE("shannon examples") {
    CHECK(shannon_entropy(ClassDistribution({3, 3})) == doctest::Approx(std::log(2.0)));
    CHECK(shannon_entropy(ClassDistribution(std::vector<std::uint64_t>{4})) == 0.0);
    CHECK(shannon_entropy(ClassDistribution({2, 2, 2, 2})) == doctest::Approx(std::log(4.0)));
  }

  TEST_CASE("gini examples") {
    CHECK(gini_index(ClassDistribution({1, 1})) == doctest::Approx(0.5));
    CHECK(gini_index(ClassDistribution({1, 0})) == 0.0);
  }

  TEST_CASE("tsallis q=2 equals gini exactly") {
    Rng rng(21);
    for (int i = 0; i < 1000; ++i) {
      const auto d = random_distribution(rng, 2 + rng.below(5));
      REQUIRE(tsallis_entropy(d, 2.0) == gini_index(d));
    }
  }

  TEST_CASE("tsallis approaches shannon as q tends to 1") {
    Rng rng(22);
    for (int i = 0; i < 200; ++i) {
      const auto d = random_distribution(rng, 2 + rng.below(5));
      REQUIRE(std::abs(tsallis_entropy(d, 1.0 + 1e-6) - shannon_entropy(d)) < 1e-4);
      REQUIRE(std::abs(tsallis_entropy(d, 1.0 - 1e-6) - shannon_entropy(d)) < 1e-4);
    }
  }

  TEST_CASE("tsallis matches the direct sum") {
    Rng rng(23);
    for (double q : {0.5, 1.5, 3.0}) {
      for (int i = 0; i < 100; ++i) {
        const auto d = random_distribution(rng, 3);
        REQUIRE(tsallis_entropy(d, q) == doctest::Approx(tsallis_oracle(d, q)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("regression split loss") {
    const double l0[] = {0, 0}, r0[] = {10, 10};
    CHECK(regression_split_loss(l0, r0, CriterionKind::sse) == 0.0);
    const double l1[] = {0, 2}, r1[] = {5};
    CHECK(regression_split_loss(l1, r1, CriterionKind::sse) == doctest::Approx(2.0));
    CHECK(regression_split_loss(l1, r1, CriterionKind::mse) == doctest::Approx(1.0));
  }

  TEST_CASE("sse loss is symmetric under reordering and side swaps") {
    Rng rng(24);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> l(1 + rng.below(20)), r(1 + rng.below(20));
      for (auto& v : l) v = rng.uniform(-5, 5);
      for (auto& v : r) v = rng.uniform(-5, 5);
      const double base = regression_split_loss(l, r, CriterionKind::sse);
      CHECK(regression_split_loss(r, l, CriterionKind::sse) == doctest::Approx(base).epsilon(1e-12));
      std::shuffle(l.begin(), l.end(), rng);
      CHECK(regression_split_loss(l, r, CriterionKind::sse) == doctest::Approx(base).epsilon(1e-12));
    }
  }

  TEST_CASE("impurity gain examples") {
    const ClassDistribution parent({10, 10});
    CHECK(impurity_gain(parent, ClassDistribution({10, 0}), ClassDistribution({0, 10}), SplitCriterion::shannon()) ==
          doctest::Approx(std::log(2.0)));
    CHECK(std::abs(impurity_gain(parent, ClassDistribution({5, 5}), ClassDistribution({5, 5}),
                                 SplitCriterion::shannon())) < 1e-12);
    // ln 2 over the split information -2 * (1/2) ln(1/2) = ln 2.
    CHECK(impurity_gain(parent, ClassDistribution({10, 0}), ClassDistribution({0, 10}),
                        SplitCriterion::gain_ratio()) == doctest::Approx(1.0));
    CHECK_THROWS_AS(impurity_gain(parent, ClassDistribution({10, 10}), ClassDistribution({0, 0}),
                                  SplitCriterion::gain_ratio()),
                    UninformativeSplit);
  }

  TEST_CASE("uninformative splits gain nothing under every entropy") {
    for (const auto& c : {SplitCriterion::shannon(), SplitCriterion::gini(), SplitCriterion::tsallis(3.0),
                          SplitCriterion::gain_ratio()}) {
      const ClassDistribution parent({6, 12, 18});
      CHECK(std::abs(impurity_gain(parent, ClassDistribution({2, 4, 6}), ClassDistribution({4, 8, 12}), c)) < 1e-12);
    }
  }

  TEST_CASE("unweighted children") {
    SplitCriterion c = SplitCriterion::shannon();
    c.weighted_children = false;
    const ClassDistribution parent({10, 10});
    const ClassDistribution l({5, 5}), r({5, 5});
    CHECK(impurity_gain(parent, l, r, c) == doctest::Approx(-std::log(2.0)));
  }

  TEST_CASE("shannon gain is never negative") {
    Rng rng(25);
    for (int i = 0; i < 1000; ++i) {
      const auto l = random_distribution(rng, 3);
      const auto r = random_distribution(rng, 3);
      ClassDistribution parent(3);
      for (std::size_t c = 0; c < 3; ++c) parent.add(c, l.counts[c] + r.counts[c]);
      REQUIRE(impurity_gain(parent, l, r, SplitCriterion::shannon()) >= -1e-12);
    }
  }

  TEST_CASE("criterion parsing") {
    CHECK(SplitCriterion::parse("gini") == SplitCriterion::gini());
    CHECK(SplitCriterion::parse("tsallis:1.5").q == 1.5);
    CHECK_THROWS_AS(SplitCriterion::parse("tsallis:1"), ConfigError);
    CHECK_THROWS_AS(SplitCriterion::parse("entropy"), ConfigError);
    CHECK(SplitCriterion::parse(SplitCriterion::tsallis(0.5).name()) == SplitCriterion::tsallis(0.5));
  }

  TEST_CASE("split information") {
    CHECK(split_information(5, 5) == doctest::Approx(std::log(2.0)));
    CHECK(split_information(5, 0) == 0.0);
  }
}
