#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "tradeoff/compose.hpp"
#include "tradeoff/curve.hpp"
#include "tradeoff/divisible.hpp"
#include "tradeoff/error.hpp"
#include "tradeoff/neyman.hpp"

using namespace tradeoff;
using testutil::max_gap;

namespace {

MixtureSpec three_component() {
  MixtureSpec spec;
  spec.components = {{1.0 / 3.0, 0.5}, {1.0 / 3.0, 1.0}, {1.0 / 3.0, 2.0}};
  spec.sigma = 1.0;
  return spec;
}

}  // namespace

TEST_CASE("spec validation rejects broken parameters") {
  IDPCurveSpec bad;
  bad.k = -1.0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad.k = 0.5;
  bad.poisson = PoissonComponent{0.0, 3.0};
  CHECK_THROWS_AS(bad.validate(), ContractError);

  MixtureSpec m;
  CHECK_THROWS_AS(m.validate(), ContractError);
  m.components = {{0.6, 1.0}, {0.5, 2.0}};
  CHECK_THROWS_AS(m.validate(), ConsistencyError);
  m.components = {{0.5, 1.0}, {0.5, -2.0}};
  CHECK_THROWS_AS(m.validate(), ContractError);
}

TEST_CASE("pure jump specs reproduce the poisson curve") {
  IDPCurveSpec spec;
  spec.k = 0.0;
  spec.poisson = PoissonComponent{1.0, 3.0};
  const TradeoffCurve limit = idp_curve(spec);
  const TradeoffCurve direct = curve(poisson_pair(1.0, 3.0));
  CHECK(limit.sup_distance(direct) < 1e-9);
}

TEST_CASE("pure gaussian specs reproduce the gaussian curve") {
  IDPCurveSpec spec;
  spec.k = 0.5;  // variance 2k = 1, so the curve is gaussian(1)
  const TradeoffCurve limit = idp_curve(spec);
  CHECK(limit.sup_distance(TradeoffCurve::gaussian(1.0)) < 1e-5);
}

TEST_CASE("the tilt normalizer certifies the variance convention") {
  for (double k : {0.125, 0.5, 2.0}) {
    IDPCurveSpec spec;
    spec.k = k;
    CHECK(std::abs(idp_llr_atoms(spec).tilt_normalizer() - 1.0) < 1e-9);
    const TradeoffCurve limit = idp_curve(spec);
    REQUIRE(limit.metadata().tilt_normalizer.has_value());
    CHECK(std::abs(limit.metadata().tilt_normalizer.value() - 1.0) < 1e-9);
  }
}

TEST_CASE("a combined spec is stronger than either part") {
  IDPCurveSpec spec;
  spec.k = 0.5;
  spec.poisson = PoissonComponent{1.0, 3.0};
  const TradeoffCurve limit = idp_curve(spec);
  CHECK_NOTHROW(limit.validate());
  // The product experiment is at least as informative as each factor, so
  // its curve sits below both factors' curves.
  CHECK(max_gap(limit, TradeoffCurve::gaussian(1.0)) <= 1e-9);
  CHECK(max_gap(limit, curve(poisson_pair(1.0, 3.0))) <= 1e-9);
}

TEST_CASE("dividing a spec splits every parameter n ways") {
  IDPCurveSpec spec;
  spec.k = 0.5;
  spec.poisson = PoissonComponent{1.0, 3.0};
  const IDPCurveSpec part = divide_spec(spec, 4);
  CHECK(part.k == 0.125);
  CHECK(part.poisson->lambda1 == 0.25);
  CHECK(part.poisson->lambda2 == 0.75);

  IDPCurveSpec rebuilt = part;
  for (int i = 1; i < 4; ++i) rebuilt = add_specs(rebuilt, part);
  CHECK(std::abs(rebuilt.k - spec.k) < 1e-15);
  CHECK(std::abs(rebuilt.poisson->lambda1 - 1.0) < 1e-15);
  CHECK(std::abs(rebuilt.poisson->lambda2 - 3.0) < 1e-15);
}

TEST_CASE("an n-th part composed n times recovers the original curve") {
  IDPCurveSpec spec;
  spec.k = 0.5;
  spec.poisson = PoissonComponent{1.0, 3.0};
  const IDPCurveSpec part = divide_spec(spec, 4);
  const LlrAtoms unit = idp_llr_atoms(part);
  LlrAtoms four = convolve(unit, unit);
  four = convolve(four, four);
  const TradeoffCurve composed = curve_from_llr(four);
  CHECK(composed.sup_distance(idp_curve(spec)) < 1e-4);
}

TEST_CASE("adding specs requires proportional jump parts") {
  IDPCurveSpec a;
  a.poisson = PoissonComponent{1.0, 3.0};
  IDPCurveSpec b;
  b.poisson = PoissonComponent{2.0, 6.0};
  const IDPCurveSpec sum = add_specs(a, b);
  CHECK(sum.poisson->lambda1 == 3.0);
  CHECK(sum.poisson->lambda2 == 9.0);

  IDPCurveSpec c;
  c.poisson = PoissonComponent{1.0, 4.0};
  CHECK_THROWS_AS(add_specs(a, c), UsageError);

  IDPCurveSpec g;
  g.k = 0.5;
  const IDPCurveSpec mixed = add_specs(g, a);
  CHECK(mixed.k == 0.5);
  CHECK(mixed.poisson->lambda2 == 3.0);
}

TEST_CASE("mixture solvers agree and bracket between the extreme times") {
  const MixtureResult r = mixture_curve_detail(three_component());
  CHECK(r.crosscheck_gap < 1e-6);
  CHECK_NOTHROW(r.curve.validate());
  CHECK_NOTHROW(r.direct.validate());
  REQUIRE(r.curve.metadata().crosscheck_gap.has_value());
  CHECK(r.curve.metadata().crosscheck_gap.value() == r.crosscheck_gap);
  // Sandwiched between the strongest and weakest components.
  const TradeoffCurve strongest = TradeoffCurve::gaussian(std::sqrt(2.0));
  const TradeoffCurve weakest = TradeoffCurve::gaussian(std::sqrt(0.5));
  CHECK(max_gap(strongest, r.curve) <= 1e-7);
  CHECK(max_gap(r.curve, weakest) <= 1e-7);
  CHECK(mixture_curve(three_component()).eval(0.25) ==
        doctest::Approx(r.curve.eval(0.25)).epsilon(1e-12));
}

TEST_CASE("degenerate mixtures collapse to a symbolic gaussian") {
  MixtureSpec merged;
  merged.components = {{0.5, 1.0}, {0.5, 1.0}};
  const TradeoffCurve f = mixture_curve(merged);
  CHECK(f.form() == CurveForm::gaussian);
  CHECK(std::abs(f.gaussian_mu() - 1.0) < 1e-15);

  MixtureSpec single;
  single.components = {{1.0, 2.0}};
  single.sigma = 1.5;
  const MixtureResult r = mixture_curve_detail(single);
  CHECK(r.curve.form() == CurveForm::gaussian);
  CHECK(std::abs(r.curve.gaussian_mu() - 1.5 * std::sqrt(2.0)) < 1e-15);
  CHECK(r.crosscheck_gap == 0.0);
}

TEST_CASE("random stopping simulation is deterministic and close") {
  const MixtureSpec spec = three_component();
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
  const StoppingReport a = random_stopping_sim(spec, 100, seeds);
  const StoppingReport b = random_stopping_sim(spec, 100, seeds);
  CHECK(a.levy_to_mixture == b.levy_to_mixture);
  CHECK(a.draw_counts == b.draw_counts);
  REQUIRE(a.draw_counts.size() == seeds.size());
  for (long long d : a.draw_counts) {
    CHECK((d == 50 || d == 100 || d == 200));
  }
  CHECK_NOTHROW(a.empirical.validate());
  // Eight draws only; the empirical mixture is close in the weak metric.
  CHECK(a.levy_to_mixture < 0.2);
}

TEST_CASE("gaussian fit recovers a gaussian target") {
  const GaussianFit fit = best_gaussian_fit(TradeoffCurve::gaussian(1.0));
  CHECK(std::abs(fit.k - 0.5) < 1e-3);
  CHECK(fit.sup_distance < 1e-6);
}

TEST_CASE("no gaussian fits the mixture well") {
  const MixtureResult r = mixture_curve_detail(three_component());
  const GaussianFit fit = best_gaussian_fit(r.curve);
  CHECK(fit.sup_distance > 10.0 * std::max(r.crosscheck_gap, 1e-12));
  CHECK(fit.sup_distance > 1e-3);
}
