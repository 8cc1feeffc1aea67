// Acceptance gate: every release criterion runs here, one verdict line
// each, exit status 1 if any fails. Criteria are self-contained so a
// failure in one never hides another.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "tradeoff/compose.hpp"
#include "tradeoff/coarsen.hpp"
#include "tradeoff/divisible.hpp"
#include "tradeoff/mechanism.hpp"
#include "tradeoff/neyman.hpp"
#include "tradeoff/stats.hpp"

using namespace tradeoff;

namespace {

int g_failures = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs one criterion body, enforcing its runtime budget, and prints a
// single verdict line. The body returns pass/fail and appends detail.
template <typename Fn>
void criterion(const std::string& name, double time_budget_s, Fn&& body) {
  auto t0 = Clock::now();
  bool pass = false;
  std::ostringstream detail;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
    pass = false;
  }
  double secs = seconds_since(t0);
  if (secs > time_budget_s) {
    pass = false;
    detail << " [over time budget " << time_budget_s << "s]";
  }
  std::printf("[%s] %-28s (%6.2fs) %s\n", pass ? "PASS" : "FAIL", name.c_str(),
              secs, detail.str().c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

bool binomial_poisson_limit(std::ostringstream& detail) {
  bool ok = true;
  const std::pair<double, double> rates[] = {{1.0, 3.0}, {2.0, 4.0}, {1.0, 2.0}};
  for (auto [l1, l2] : rates) {
    TradeoffCurve target = curve(poisson_pair(l1, l2));
    auto dist_at = [&](long long n) {
      TradeoffCurve comp = self_compose(
          ExperimentPair(bernoulli_pair(l1 / double(n), l2 / double(n))), n);
      return comp.sup_distance(target);
    };
    double d200 = dist_at(200);
    double d50 = dist_at(50);
    ok = ok && d200 <= 0.02 && d50 > d200;
    detail << "(" << l1 << "," << l2 << "): n50=" << d50 << " n200=" << d200
           << "; ";
  }
  return ok;
}

bool gaussian_clt_consistency(std::ostringstream& detail) {
  bool ok = true;
  const long long n = 1000;
  for (double mu : {1.0, 2.0}) {
    TradeoffCurve step = TradeoffCurve::gaussian(mu / std::sqrt(double(n)));
    MomentFunctionals m = moment_functionals(step);
    double kl_sum = double(n) * m.kl;
    double var_sum = double(n) * (m.kappa2 - m.kl * m.kl);
    double kl_err = std::abs(kl_sum - mu * mu / 2.0);
    double var_err = std::abs(var_sum - mu * mu);
    ok = ok && kl_err <= 1e-4 && var_err <= 1e-3;

    TradeoffCurve limit = clt_limit(kl_sum, var_sum);
    bool symbolic = limit.form() == CurveForm::gaussian;
    double mu_err = symbolic ? std::abs(limit.gaussian_mu() - mu) : 1.0;
    ok = ok && symbolic && mu_err <= 1e-9;
    detail << "mu=" << mu << ": klerr=" << kl_err << " varerr=" << var_err
           << " limerr=" << mu_err << "; ";
  }
  for (double k : {0.125, 0.5, 2.0}) {
    IDPCurveSpec spec;
    spec.k = k;
    double tn = idp_llr_atoms(spec).tilt_normalizer();
    double err = std::abs(tn - 1.0);
    ok = ok && err <= 1e-9;
    detail << "tilt(k=" << k << ")err=" << err << "; ";
  }
  return ok;
}

bool mechanism_tightness(std::ostringstream& detail) {
  bool ok = true;
  PoissonMechanismParams p = calibrate(1.0, 3.0, StatRange{0.0, 1.0, 1.0});
  bool exact = p.intensity(0.0) == 1.0 && p.intensity(1.0) == 3.0;
  ok = ok && exact;
  detail << "endpoints " << (exact ? "exact" : "OFF") << "; ";

  GuaranteeReport g = verify_guarantee(p, {{0.0, 1.0}});
  ok = ok && std::abs(g.min_slack) <= 1e-8;
  detail << "equality slack=" << g.min_slack << "; ";

  // The four intensity orderings, each applicable in at least one setting.
  struct Case {
    double l1, l2, c, lambda;
  };
  const Case cases[] = {{2.0, 4.0, 2.0, 1.0},   // scale-up, translations
                        {2.0, 4.0, 0.5, 1.0},   // scale-down
                        {1.0, 3.0, 1.0, 0.5}};  // degenerate scale, translate
  std::map<std::string, bool> seen;
  double worst = 0.0;
  for (const Case& c : cases) {
    KernelLemmaReport r = kernel_lemma_check(c.l1, c.l2, c.c, c.lambda);
    for (const OrderingCheck& chk : r.checks) {
      if (!chk.applicable) continue;
      seen[chk.name] = true;
      worst = std::min(worst, chk.min_slack);
    }
  }
  bool all_four = seen.size() == 4;
  ok = ok && all_four && worst >= -1e-8;
  detail << "orderings=" << seen.size() << "/4 worst slack=" << worst;
  return ok;
}

bool mixture_crosscheck(std::ostringstream& detail) {
  MixtureSpec spec;
  spec.sigma = 1.0;
  spec.components = {{1.0 / 3.0, 0.5}, {1.0 / 3.0, 1.0}, {1.0 / 3.0, 2.0}};
  MixtureResult r = mixture_curve_detail(spec);
  bool agree = r.crosscheck_gap <= 1e-4;

  GaussianFit fit = best_gaussian_fit(r.curve);
  // The fit error must dwarf the solver disagreement: the mixture genuinely
  // sits outside the one-parameter family.
  bool far = fit.sup_distance >= 10.0 * std::max(r.crosscheck_gap, 1e-12) &&
             fit.sup_distance > 1e-3;
  detail << "solver gap=" << r.crosscheck_gap
         << " best-fit dist=" << fit.sup_distance << " (k=" << fit.k << ")";
  return agree && far;
}

bool coarsening_domination(std::ostringstream& detail) {
  bool ok = true;
  TradeoffCurve binned = binned_shift_curve(ShiftFamily{}, 1.0, 1.0);
  double worst_touch = 0.0;
  for (int k = -4; k <= 4; ++k) {
    double alpha_k = norm_cdf(-double(k));  // 1 - Phi(k), computed stably
    double expect = norm_cdf(double(k) - 1.0);
    worst_touch = std::max(worst_touch, std::abs(binned.eval(alpha_k) - expect));
  }
  ok = ok && worst_touch <= 1e-12;
  detail << "gaussian touch err=" << worst_touch << "; ";

  TradeoffCurve exact = TradeoffCurve::gaussian(1.0);
  double below = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    double a = i * 1e-3;
    below = std::max(below, exact.eval(a) - binned.eval(a));
  }
  ok = ok && below <= 1e-12;
  detail << "gaussian domination slack=" << below << "; ";

  TradeoffCurve lap_binned =
      binned_shift_curve(ShiftFamily{ShiftFamily::Kind::laplace}, 1.0, 1.0);
  double lap_below = 0.0;
  for (int i = 1; i < 1000; ++i) {
    double a = i * 1e-3;
    double lap_exact = laplace_cdf(laplace_quantile(1.0 - a) - 1.0);
    lap_below = std::max(lap_below, lap_exact - lap_binned.eval(a));
  }
  ok = ok && lap_below <= 1e-12;
  detail << "laplace domination slack=" << lap_below;
  return ok;
}

bool property_suites(std::ostringstream& detail) {
  bool ok = true;
  std::mt19937_64 rng(2024);
  const DiscretePair unit = bernoulli_pair(0.5, 0.5);  // identity experiment

  // Every curve the battery constructs gets its convexity certificate;
  // validate throws on violation, failing the criterion with the message.
  auto certified = [](TradeoffCurve f) {
    f.validate(1e-9);
    return f;
  };

  double worst_alg = 0.0;  // algebraic identities
  double worst_mono = 0.0;
  for (int i = 0; i < 50; ++i) {
    DiscretePair a = testutil::random_pair(rng, 2 + int(i % 5));
    DiscretePair b = testutil::random_pair(rng, 2 + int((i + 2) % 4));
    DiscretePair c = testutil::random_pair(rng, 2 + int((i + 1) % 3));

    TradeoffCurve ab = certified(tensor(a, b));
    TradeoffCurve ba = certified(tensor(b, a));
    worst_alg = std::max(worst_alg, ab.sup_distance(ba));

    LlrAtoms A = llr_atoms(a), B = llr_atoms(b), C = llr_atoms(c);
    TradeoffCurve left = certified(curve_from_llr(convolve(convolve(A, B), C)));
    TradeoffCurve right = certified(curve_from_llr(convolve(A, convolve(B, C))));
    worst_alg = std::max(worst_alg, left.sup_distance(right));

    TradeoffCurve with_unit = certified(tensor(a, unit));
    worst_alg = std::max(worst_alg, with_unit.sup_distance(curve(a)));

    DiscretePair a_swap = a, b_swap = b;
    std::swap(a_swap.p, a_swap.q);
    std::swap(a_swap.p_deficit, a_swap.q_deficit);
    std::swap(b_swap.p, b_swap.q);
    std::swap(b_swap.p_deficit, b_swap.q_deficit);
    TradeoffCurve inv_of_tensor = certified(ab.inverse());
    TradeoffCurve tensor_of_inv = certified(tensor(a_swap, b_swap));
    worst_alg = std::max(worst_alg, inv_of_tensor.sup_distance(tensor_of_inv));

    // Coarsening b can only raise its curve; tensoring with a fixed factor
    // must preserve that order.
    std::size_t nbins = 1 + std::size_t(rng() % b.size());
    std::vector<std::vector<std::size_t>> bins(nbins);
    for (std::size_t j = 0; j < b.size(); ++j) bins[j % nbins].push_back(j);
    DiscretePair b_coarse = coarsen_pair(b, bins);
    TradeoffCurve low = certified(tensor(a, b));
    TradeoffCurve high = certified(tensor(a, b_coarse));
    worst_mono = std::max(worst_mono, testutil::max_gap(low, high, 1e-3));
  }
  ok = ok && worst_alg <= 1e-9 && worst_mono <= 1e-9;
  detail << "algebra=" << worst_alg << " monotone=" << worst_mono << "; ";

  // Composition is 1-Lipschitz in each factor under the sup metric.
  double worst_lip = 0.0;
  for (int i = 0; i < 50; ++i) {
    DiscretePair g = testutil::random_pair(rng, 2 + int(i % 4));
    DiscretePair f1 = testutil::random_pair(rng, 2 + int((i + 1) % 4));
    DiscretePair f2 = testutil::random_pair(rng, 2 + int((i + 3) % 4));
    double lhs = tensor(g, f1).sup_distance(tensor(g, f2));
    double rhs = curve(f1).sup_distance(curve(f2));
    worst_lip = std::max(worst_lip, lhs - rhs);
  }
  ok = ok && worst_lip <= 1e-9;
  detail << "lipschitz excess=" << worst_lip << "; ";

  // Post-processing through any partition kernel only raises the curve.
  double worst_dp = 0.0;
  for (int i = 0; i < 100; ++i) {
    DiscretePair e = testutil::random_pair(rng, 3 + int(i % 6));
    std::size_t nbins = 1 + std::size_t(rng() % e.size());
    std::vector<std::vector<std::size_t>> bins(nbins);
    for (std::size_t j = 0; j < e.size(); ++j) bins[j % nbins].push_back(j);
    TradeoffCurve original = certified(curve(e));
    TradeoffCurve degraded = certified(curve(coarsen_pair(e, bins)));
    worst_dp = std::max(worst_dp, testutil::max_gap(original, degraded, 1e-3));
  }
  ok = ok && worst_dp <= 1e-9;
  detail << "data-processing=" << worst_dp << "; ";

  // The likelihood ratio is sufficient: rebuilding each built-in experiment
  // from its LLR law reproduces the curve.
  double worst_llr = 0.0;
  const ExperimentPair builtins[] = {
      ExperimentPair(bernoulli_pair(0.3, 0.7)),
      ExperimentPair(poisson_pair(1.0, 3.0)),
      ExperimentPair(AnalyticGaussianPair{1.0}),
      ExperimentPair(ShiftPair{ShiftFamily{}, 1.0}),
      ExperimentPair(ShiftPair{ShiftFamily{ShiftFamily::Kind::laplace}, 1.0}),
  };
  for (const ExperimentPair& e : builtins) {
    worst_llr = std::max(worst_llr, llr_identity_check(e));
  }
  ok = ok && worst_llr <= 1e-8;
  detail << "llr identity=" << worst_llr << "; ";

  // Large-deviation rate of the composed power at fixed type-I level.
  LdpReport g_ldp = ldp_rate(TradeoffCurve::gaussian(1.0), {200, 400});
  LdpReport b_ldp = ldp_rate(curve(bernoulli_pair(0.3, 0.7)), {200});
  ok = ok && g_ldp.gap <= 0.05 && b_ldp.gap <= 0.05;
  detail << "ldp gaps=" << g_ldp.gap << "," << b_ldp.gap;
  return ok;
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  criterion("binomial-poisson-limit", 10.0, binomial_poisson_limit);
  criterion("gaussian-clt-consistency", 180.0, gaussian_clt_consistency);
  criterion("mechanism-tightness", 5.0, mechanism_tightness);
  criterion("mixture-crosscheck", 30.0, mixture_crosscheck);
  criterion("coarsening-domination", 180.0, coarsening_domination);
  criterion("property-suites", 180.0, property_suites);
  double total = seconds_since(t0);
  std::printf("%s: %d criterion(s) failed, %.2fs total\n",
              g_failures == 0 ? "OK" : "FAILED", g_failures, total);
  return g_failures == 0 ? 0 : 1;
}
