#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "tradeoff/discrete.hpp"
#include "tradeoff/error.hpp"
#include "tradeoff/stats.hpp"

using namespace tradeoff;

TEST_CASE("from_atoms canonicalizes support") {
  // Unsorted input, a near-duplicate value, and a sub-threshold atom.
  std::vector<std::pair<double, double>> atoms{
      {2.0, 0.25}, {1.0, 0.5}, {1.0 + 1e-13, 0.25 - 1e-16}, {7.0, 1e-16}};
  const DiscreteDist d = DiscreteDist::from_atoms(atoms);
  REQUIRE(d.size() == 2);
  // Near-ties merge to their mass-weighted mean.
  CHECK(std::abs(d.values[0] - 1.0) < 1e-13);
  CHECK(d.values[1] == 2.0);
  CHECK(std::abs(d.masses[0] - (0.75 - 1e-16)) < 1e-15);
  CHECK(d.deficit == 1e-16);
  CHECK(std::abs(d.total_mass() + d.deficit - 1.0) < 1e-15);
  CHECK_NOTHROW(d.validate_probability());
}

TEST_CASE("point mass and mean") {
  const DiscreteDist p = DiscreteDist::point(3.5);
  CHECK(p.size() == 1);
  CHECK(p.mean() == 3.5);
  CHECK(p.total_mass() == 1.0);
}

TEST_CASE("poisson distribution matches the recurrence") {
  const double lambda = 3.0;
  const DiscreteDist d = poisson_dist(lambda);
  CHECK(d.deficit < 1e-11);
  CHECK(std::abs(d.total_mass() + d.deficit - 1.0) < 1e-13);
  CHECK(std::abs(d.mean() - lambda) < 1e-10);
  // Independent evaluation: upward pmf recurrence from e^-lambda.
  double pk = std::exp(-lambda);
  std::size_t idx = 0;
  for (long long k = 0; k <= 12; ++k) {
    REQUIRE(idx < d.size());
    CHECK(d.values[idx] == static_cast<double>(k));
    CHECK(std::abs(d.masses[idx] / pk - 1.0) < 1e-12);
    pk *= lambda / static_cast<double>(k + 1);
    ++idx;
  }
}

TEST_CASE("probability validation catches broken inputs") {
  DiscreteDist bad;
  bad.values = {0.0, 1.0};
  bad.masses = {0.7, -0.1};
  CHECK_THROWS_AS(bad.validate_probability(), ConsistencyError);
  bad.masses = {0.7, 0.7};
  CHECK_THROWS_AS(bad.validate_probability(), ConsistencyError);
}

TEST_CASE("esscher tilt multiplies masses by e^x") {
  DiscreteDist d;
  d.values = {std::log(0.5), std::log(2.0)};
  d.masses = {0.5, 0.5};
  const TiltResult t = esscher_tilt(d);
  CHECK(std::abs(t.normalizer - 1.25) < 1e-15);
  REQUIRE(t.measure.size() == 2);
  // The tilted measure keeps raw masses e^x p(x); normalization is the
  // caller's decision.
  CHECK(std::abs(t.measure.masses[0] - 0.25) < 1e-15);
  CHECK(std::abs(t.measure.masses[1] - 1.0) < 1e-15);
  CHECK(std::abs(t.measure.total_mass() - t.normalizer) < 1e-14);
}

TEST_CASE("esscher tilt of a poisson law has the known normalizer") {
  // E[e^K] for K ~ Poisson(lambda) is exp(lambda (e - 1)). The tilt weights
  // the truncated tail by e^k, which leaves a ~8e-10 relative gap at the
  // support the pmf can represent.
  const DiscreteDist d = poisson_dist(1.0, 1e-15);
  const TiltResult t = esscher_tilt(d);
  CHECK(std::abs(t.normalizer / std::exp(std::expm1(1.0)) - 1.0) < 1e-8);
}

TEST_CASE("poisson superposition kernel on a point mass") {
  const DiscreteDist row =
      apply_kernel(PoissonSuperpose{2.0, 1e-12}, DiscreteDist::point(1.0));
  // Shifted poisson: mass at 1 + k.
  const DiscreteDist ref = poisson_dist(2.0);
  REQUIRE(row.size() >= 10);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(row.values[k] == 1.0 + ref.values[k]);
    CHECK(std::abs(row.masses[k] / ref.masses[k] - 1.0) < 1e-13);
  }
}

TEST_CASE("binomial thinning kernel on a point mass") {
  const DiscreteDist row = apply_kernel(BinomialThin{0.3}, DiscreteDist::point(5.0));
  REQUIRE(row.size() == 6);
  double total = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    CHECK(row.values[k] == static_cast<double>(k));
    const double direct = binomial_pmf(5, static_cast<long long>(k), 0.3);
    CHECK(std::abs(row.masses[k] / direct - 1.0) < 1e-13);
    total += row.masses[k];
  }
  CHECK(std::abs(total - 1.0) < 1e-14);
}

TEST_CASE("interval partition kernel aggregates bins") {
  DiscreteDist d;
  d.values = {0.0, 1.0, 2.0, 3.0};
  d.masses = {0.1, 0.2, 0.3, 0.4};
  // Cuts at 1.5: bin 0 is (-inf, 1.5), bin 1 is [1.5, inf).
  const DiscreteDist row = apply_kernel(IntervalPartition{{1.5}}, d);
  REQUIRE(row.size() == 2);
  CHECK(std::abs(row.masses[0] - 0.3) < 1e-15);
  CHECK(std::abs(row.masses[1] - 0.7) < 1e-15);
}

TEST_CASE("kernel rows are probability distributions") {
  for (double n : {0.0, 1.0, 4.0}) {
    const DiscreteDist row = kernel_row(PoissonSuperpose{1.5, 1e-12}, n);
    CHECK(std::abs(row.total_mass() + row.deficit - 1.0) < 1e-12);
    const DiscreteDist thin = kernel_row(BinomialThin{0.4}, n);
    CHECK(std::abs(thin.total_mass() + thin.deficit - 1.0) < 1e-12);
  }
}

TEST_CASE("sampling is deterministic per seed and distributionally sane") {
  const DiscreteDist d = poisson_dist(3.0);
  const auto a = sample(d, 12345, 2000);
  const auto b = sample(d, 12345, 2000);
  CHECK(a == b);
  const auto c = sample(d, 54321, 2000);
  CHECK(a != c);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  // Frozen seed; the sample mean sits well within five standard errors.
  CHECK(std::abs(mean - 3.0) < 5.0 * std::sqrt(3.0 / 2000.0));
}
