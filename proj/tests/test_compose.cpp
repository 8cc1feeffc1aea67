#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "tradeoff/compose.hpp"
#include "tradeoff/curve.hpp"
#include "tradeoff/error.hpp"
#include "tradeoff/neyman.hpp"

using namespace tradeoff;
using testutil::max_gap;

namespace {

DiscretePair swapped(DiscretePair e) {
  std::swap(e.p, e.q);
  std::swap(e.p_deficit, e.q_deficit);
  return e;
}

// Brute-force product experiment of two discrete pairs: every outcome pair
// becomes its own label with product masses.
DiscretePair product_pair(const DiscretePair& a, const DiscretePair& b) {
  DiscretePair out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out.labels.push_back(static_cast<double>(out.labels.size()));
      out.p.push_back(a.p[i] * b.p[j]);
      out.q.push_back(a.q[i] * b.q[j]);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("gaussian compositions stay symbolic") {
  const TradeoffCurve f = self_compose(AnalyticGaussianPair{1.0}, 9);
  CHECK(f.form() == CurveForm::gaussian);
  CHECK(std::abs(f.gaussian_mu() - 3.0) < 1e-15);
  const TradeoffCurve t = tensor(TradeoffCurve::gaussian(3.0),
                                 TradeoffCurve::gaussian(4.0));
  CHECK(t.form() == CurveForm::gaussian);
  CHECK(std::abs(t.gaussian_mu() - 5.0) < 1e-15);
}

TEST_CASE("identity is the tensor unit") {
  const DiscretePair e = bernoulli_pair(0.3, 0.7);
  const TradeoffCurve f = curve(e);
  CHECK(tensor(TradeoffCurve::identity(), Composable(e)).sup_distance(f) == 0.0);
  CHECK(tensor(Composable(e), TradeoffCurve::identity()).sup_distance(f) == 0.0);
}

TEST_CASE("non-symbolic operands need a discrete realization") {
  const TradeoffCurve pl = TradeoffCurve::from_breakpoints(
      {{0.0, 1.0}, {0.3, 0.3}, {1.0, 0.0}});
  CHECK_THROWS_AS(tensor(pl, pl), ContractError);
}

TEST_CASE("convolution agrees with the brute-force product experiment") {
  DiscretePair a;
  a.labels = {0.0, 1.0};
  a.p = {0.6, 0.4};
  a.q = {0.2, 0.8};
  DiscretePair b;
  b.labels = {0.0, 1.0, 2.0};
  b.p = {0.5, 0.3, 0.2};
  b.q = {0.1, 0.3, 0.6};
  const TradeoffCurve via_atoms =
      curve_from_llr(convolve(llr_atoms(a), llr_atoms(b)));
  const TradeoffCurve direct = curve(product_pair(a, b));
  CHECK(via_atoms.sup_distance(direct) < 1e-12);
}

TEST_CASE("convolution multiplies out singular masses") {
  DiscretePair e;
  e.labels = {0.0, 1.0};
  e.p = {0.5, 0.5};
  e.q = {0.0, 1.0};
  const LlrAtoms a = llr_atoms(e);
  REQUIRE(a.p_at_neg_inf == 0.5);
  const LlrAtoms c = convolve(a, a);
  // The product sees -inf unless both factors are finite.
  CHECK(std::abs(c.p_at_neg_inf - 0.75) < 1e-15);
  CHECK(c.q_at_pos_inf == 0.0);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c.x[0] - 2.0 * std::log(2.0)) < 1e-14);
  CHECK(std::abs(c.p[0] - 0.25) < 1e-15);
  CHECK(std::abs(c.q[0] - 1.0) < 1e-14);
}

TEST_CASE("two-fold self composition equals the hand product") {
  const DiscretePair e = bernoulli_pair(0.3, 0.7);
  const TradeoffCurve composed = self_compose(e, 2);
  const TradeoffCurve direct = curve(product_pair(e, e));
  CHECK(composed.sup_distance(direct) < 1e-12);
  CHECK(self_compose(e, 1).sup_distance(curve(e)) < 1e-15);
}

TEST_CASE("tensor is commutative and associative") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 3; ++rep) {
    const DiscretePair a = testutil::random_pair(rng, 3);
    const DiscretePair b = testutil::random_pair(rng, 4);
    const DiscretePair c = testutil::random_pair(rng, 3);
    CHECK(tensor(Composable(a), Composable(b))
              .sup_distance(tensor(Composable(b), Composable(a))) < 1e-9);
    const LlrAtoms ab_c = convolve(convolve(llr_atoms(a), llr_atoms(b)), llr_atoms(c));
    const LlrAtoms a_bc = convolve(llr_atoms(a), convolve(llr_atoms(b), llr_atoms(c)));
    CHECK(curve_from_llr(ab_c).sup_distance(curve_from_llr(a_bc)) < 1e-9);
  }
}

TEST_CASE("inverse distributes over the tensor") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 3; ++rep) {
    const DiscretePair a = testutil::random_pair(rng, 4);
    const DiscretePair b = testutil::random_pair(rng, 3);
    const TradeoffCurve lhs = tensor(Composable(a), Composable(b)).inverse();
    const TradeoffCurve rhs = tensor(Composable(swapped(a)), Composable(swapped(b)));
    CHECK(lhs.sup_distance(rhs) < 1e-9);
  }
}

TEST_CASE("tensor is monotone in each operand") {
  // A narrower bernoulli gap is a weaker experiment: its curve dominates.
  const DiscretePair strong = bernoulli_pair(0.3, 0.7);
  const DiscretePair weak = bernoulli_pair(0.4, 0.6);
  REQUIRE(max_gap(curve(strong), curve(weak)) <= 1e-12);
  std::mt19937_64 rng(13);
  const DiscretePair f = testutil::random_pair(rng, 4);
  const TradeoffCurve with_weak = tensor(Composable(f), Composable(weak));
  const TradeoffCurve with_strong = tensor(Composable(f), Composable(strong));
  CHECK(max_gap(with_strong, with_weak) <= 1e-9);
}

TEST_CASE("products contract sup distance") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    const DiscretePair g = testutil::random_pair(rng, 3);
    const DiscretePair f1 = testutil::random_pair(rng, 4);
    const DiscretePair f2 = testutil::random_pair(rng, 4);
    const double lhs = tensor(Composable(g), Composable(f1))
                           .sup_distance(tensor(Composable(g), Composable(f2)));
    const double rhs = curve(f1).sup_distance(curve(f2));
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("rebinning under a tight atom cap stays within its error bound") {
  const DiscretePair e = bernoulli_pair(0.2, 0.5);
  ComposeOptions tight;
  tight.atom_cap = 50;
  const TradeoffCurve capped = self_compose(e, 64, tight);
  const TradeoffCurve full = self_compose(e, 64);
  REQUIRE(capped.metadata().composition_error_bound.has_value());
  const double bound = capped.metadata().composition_error_bound.value();
  CHECK(bound > 0.0);
  CHECK(bound < 1e-2);
  CHECK(capped.sup_distance(full) <= std::max(1e-9, 3.0 * bound));
  CHECK_FALSE(full.metadata().composition_error_bound.has_value());
}

TEST_CASE("rebinning conserves both masses") {
  // Poisson(2,4) LLR atoms step by log 2 per count, so a grid wider than
  // that must actually merge neighbors.
  const LlrAtoms atoms = llr_atoms(poisson_pair(2.0, 4.0));
  const LlrAtoms binned = rebin_atoms(atoms, 1.5);
  CHECK(binned.size() < atoms.size());
  CHECK(binned.rebin_error_bound > 0.0);
  double p0 = 0.0, q0 = 0.0, p1 = 0.0, q1 = 0.0;
  for (double v : atoms.p) p0 += v;
  for (double v : atoms.q) q0 += v;
  for (double v : binned.p) p1 += v;
  for (double v : binned.q) q1 += v;
  CHECK(std::abs(p0 - p1) < 1e-14);
  CHECK(std::abs(q0 - q1) < 1e-14);
}

TEST_CASE("curves convert to canonical atoms and back") {
  const TradeoffCurve f = curve(bernoulli_pair(0.3, 0.7));
  const LlrAtoms atoms = atoms_from_curve(f);
  REQUIRE(atoms.size() == 2);
  CHECK(std::abs(atoms.x[0] - std::log(3.0 / 7.0)) < 1e-12);
  CHECK(std::abs(atoms.x[1] - std::log(7.0 / 3.0)) < 1e-12);
  CHECK(std::abs(atoms.p[0] - 0.7) < 1e-12);
  CHECK(std::abs(atoms.p[1] - 0.3) < 1e-12);
  CHECK(std::abs(atoms.q[0] - 0.3) < 1e-12);
  CHECK(std::abs(atoms.q[1] - 0.7) < 1e-12);
  CHECK(curve_from_llr(atoms).sup_distance(f) < 1e-12);
}

TEST_CASE("the gaussian comparator reproduces gaussian steps exactly") {
  const TradeoffCurve limit = clt_limit(0.5, 1.0);
  CHECK(limit.form() == CurveForm::gaussian);
  CHECK(limit.gaussian_mu() == 1.0);

  const ConvergenceReport r = compose_convergence(AnalyticGaussianPair{0.25}, 16);
  CHECK(r.n == 16);
  CHECK(r.sup_distance_to_limit < 1e-12);
  CHECK(r.levy_distance_to_limit < 1e-12);
}

TEST_CASE("bernoulli compositions drift toward their gaussian comparator") {
  const DiscretePair e = bernoulli_pair(0.4, 0.6);
  const ConvergenceReport r10 = compose_convergence(e, 10);
  const ConvergenceReport r40 = compose_convergence(e, 40);
  CHECK(r40.sup_distance_to_limit < r10.sup_distance_to_limit);
  CHECK(r40.levy_distance_to_limit < r10.levy_distance_to_limit + 1e-12);
}

TEST_CASE("identity curve has zero decay rate") {
  const LdpReport r = ldp_rate(TradeoffCurve::identity(), {100, 200});
  CHECK(r.analytic_rate == 0.0);
  CHECK(std::abs(r.empirical.back()) < 0.05);
}

TEST_CASE("gaussian decay rate matches the quadrature") {
  const LdpReport r = ldp_rate(TradeoffCurve::gaussian(1.0), {200, 400});
  CHECK(std::abs(r.analytic_rate - (-0.5)) < 1e-9);
  CHECK(r.gap < 0.05);
  REQUIRE(r.empirical.size() == 2);
}

TEST_CASE("bernoulli decay rate approaches its analytic value monotonely") {
  const TradeoffCurve f = curve(bernoulli_pair(0.3, 0.7));
  const LdpReport r = ldp_rate(f, {50, 100, 200});
  const double expected = -0.4 * std::log(7.0 / 3.0);
  CHECK(std::abs(r.analytic_rate - expected) < 1e-12);
  CHECK(r.gap < 0.05);
  for (std::size_t i = 1; i < r.empirical.size(); ++i) {
    CHECK(r.empirical[i] <= r.empirical[i - 1] + 1e-12);
  }
}

TEST_CASE("nontrivial fixed curves compose to the trivial limit") {
  double prev = 1.0;
  for (long long n : {1, 4, 16, 64, 200}) {
    const double value = self_compose(AnalyticGaussianPair{1.0}, n).eval(0.5);
    CHECK(value < prev);
    prev = value;
  }
  CHECK(prev < 1e-3);
}
