#include "tradeoff/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "tradeoff/error.hpp"
#include "tradeoff/neyman.hpp"

namespace tradeoff {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Smallest observed difference candidate - reference over a shared alpha
// grid (1e-3 steps plus every breakpoint of both curves).
struct SlackScan {
  double min_slack = std::numeric_limits<double>::infinity();
  double at_alpha = 0.0;
};

SlackScan min_slack_over_grid(const TradeoffCurve& candidate,
                              const TradeoffCurve& reference) {
  std::vector<double> grid;
  grid.reserve(1001 + 4096);
  for (int i = 0; i <= 1000; ++i) grid.push_back(i / 1000.0);
  auto add_breaks = [&grid](const TradeoffCurve& f) {
    if (f.form() != CurveForm::piecewise_linear) return;
    for (const CurvePoint& p : f.breakpoints()) grid.push_back(p.alpha);
  };
  add_breaks(candidate);
  add_breaks(reference);

  SlackScan out;
  for (double a : grid) {
    double s = candidate.eval(a) - reference.eval(a);
    if (s < out.min_slack) {
      out.min_slack = s;
      out.at_alpha = a;
    }
  }
  return out;
}

TradeoffCurve poisson_curve(double l1, double l2) {
  return curve(ExperimentPair(poisson_pair(l1, l2)));
}

}  // namespace

void StatRange::validate() const {
  if (!(w_g > 0.0) || !std::isfinite(w_g)) {
    throw UsageError("statistic sensitivity w_g must be finite and > 0");
  }
  if (std::isnan(g_min) || std::isnan(g_max) || !(g_max >= g_min)) {
    throw UsageError("statistic range needs g_max >= g_min");
  }
  if (std::isfinite(g_min) && std::isfinite(g_max) && w_g > g_max - g_min) {
    throw UsageError("w_g exceeds the width of the statistic range");
  }
}

double PoissonMechanismParams::intensity(double y) const {
  // pow keeps integer exponents exact, so the calibrated endpoints are hit
  // bit-for-bit when y/w_g is integral.
  return N2 * std::pow(mu2 / mu1, y / w_g);
}

void PoissonMechanismParams::validate() const {
  if (!(mu1 > 0.0) || !(mu2 > mu1) || !std::isfinite(mu2)) {
    throw UsageError("mechanism params need mu2 > mu1 > 0");
  }
  if (!(w_g > 0.0) || !std::isfinite(w_g) || !(w_hg > 0.0) ||
      !std::isfinite(w_hg)) {
    throw UsageError("mechanism params need positive finite w_g and w_hg");
  }
  if (N1 != std::log(mu2 / mu1) / w_g) {
    throw UsageError("stored N1 disagrees with log(mu2/mu1)/w_g");
  }
  if (N2 != (mu2 - mu1) / w_hg) {
    throw UsageError("stored N2 disagrees with (mu2-mu1)/w_hg");
  }
  if (!(N1 > 0.0) || !(N2 > 0.0)) {
    throw UsageError("mechanism params need N1 > 0 and N2 > 0");
  }
}

PoissonMechanismParams calibrate(double mu1, double mu2,
                                 const StatRange& range,
                                 std::optional<double> w_hg_override) {
  if (!(mu1 > 0.0) || !std::isfinite(mu1) || !(mu2 > mu1) ||
      !std::isfinite(mu2)) {
    throw UsageError("calibrate needs mu2 > mu1 > 0; got mu1=" + fmt(mu1) +
                     ", mu2=" + fmt(mu2));
  }
  range.validate();

  PoissonMechanismParams p;
  p.mu1 = mu1;
  p.mu2 = mu2;
  p.w_g = range.w_g;
  p.N1 = std::log(mu2 / mu1) / range.w_g;

  if (w_hg_override) {
    if (!(*w_hg_override > 0.0) || !std::isfinite(*w_hg_override)) {
      throw UsageError("supplied w_hg must be finite and > 0");
    }
    p.w_hg = *w_hg_override;
  } else {
    if (!std::isfinite(range.g_max)) {
      throw UsageError(
          "the transformed statistic e^{N1 g} has unbounded increments on an "
          "unbounded range; supply w_hg directly");
    }
    // h(y) = e^{N1 y} = r^{y/w_g} is increasing and convex, so the largest
    // increment over a neighbor move sits at the top of the range.
    double r = mu2 / mu1;
    p.w_hg = std::pow(r, range.g_max / range.w_g) -
             std::pow(r, (range.g_max - range.w_g) / range.w_g);
  }
  p.N2 = (mu2 - mu1) / p.w_hg;
  p.validate();
  return p;
}

long long release(const PoissonMechanismParams& params, double g_value,
                  std::uint64_t seed) {
  params.validate();
  if (!std::isfinite(g_value)) {
    throw UsageError("release needs a finite statistic value");
  }
  double lam = params.intensity(g_value);
  if (!std::isfinite(lam) || lam > 1e12) {
    throw RangeError("release intensity " + fmt(lam) +
                     " too large to sample exactly");
  }

  std::mt19937_64 gen(seed);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(gen);

  if (lam <= 700.0) {
    // Inverse CDF by the pmf recurrence: return the smallest k with F(k) > u.
    double pk = std::exp(-lam);
    double cum = pk;
    long long k = 0;
    long long cap =
        static_cast<long long>(lam + 40.0 * std::sqrt(lam + 1.0) + 64.0);
    while (cum <= u && k < cap) {
      ++k;
      pk *= lam / static_cast<double>(k);
      cum += pk;
    }
    return k;
  }

  // Large intensities: binary search the CDF F(k) = Q(k+1, lam) instead of
  // walking ~lam pmf terms.
  auto cdf = [lam](long long k) {
    return boost::math::gamma_q(static_cast<double>(k) + 1.0, lam);
  };
  long long lo = 0;
  long long hi =
      static_cast<long long>(lam + 40.0 * std::sqrt(lam) + 64.0);
  if (cdf(hi) <= u) return hi;  // beyond any mass representable in a double
  while (lo < hi) {
    long long mid = lo + (hi - lo) / 2;
    if (cdf(mid) > u) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

GuaranteeReport verify_guarantee(
    const PoissonMechanismParams& params,
    const std::vector<std::pair<double, double>>& neighbor_values) {
  params.validate();

  GuaranteeReport report;
  report.guarantee = poisson_curve(params.mu1, params.mu2);
  report.symmetric_guarantee = report.guarantee.symmetrize();
  const TradeoffCurve reverse_guarantee = report.guarantee.inverse();

  const double ratio_cap = (params.mu2 / params.mu1) * (1.0 + 1e-12);
  const double gap_cap = (params.mu2 - params.mu1) * (1.0 + 1e-12);

  report.min_slack = std::numeric_limits<double>::infinity();
  report.pairs.reserve(neighbor_values.size());

  for (std::size_t idx = 0; idx < neighbor_values.size(); ++idx) {
    const auto& [g1, g2] = neighbor_values[idx];
    if (!std::isfinite(g1) || !std::isfinite(g2)) {
      throw UsageError("neighbor values must be finite");
    }
    if (std::abs(g1 - g2) > params.w_g * (1.0 + 1e-12)) {
      throw UsageError("neighbor pair (" + fmt(g1) + ", " + fmt(g2) +
                       ") moves the statistic by more than w_g");
    }

    PairVerdict v;
    v.g1 = g1;
    v.g2 = g2;

    double la = params.intensity(g1);
    double lb = params.intensity(g2);
    double ratio = std::max(la, lb) / std::min(la, lb);
    double gap = std::abs(lb - la);
    v.within_hypotheses = ratio <= ratio_cap && gap <= gap_cap;

    SlackScan scan;
    if (la == lb) {
      v.direction = "equal";
      scan = min_slack_over_grid(TradeoffCurve::identity(), report.guarantee);
    } else if (lb > la) {
      v.direction = "forward";
      scan = min_slack_over_grid(poisson_curve(la, lb), report.guarantee);
    } else {
      v.direction = "reverse";
      scan = min_slack_over_grid(poisson_curve(la, lb), reverse_guarantee);
    }
    v.min_slack = scan.min_slack;
    v.min_slack_alpha = scan.at_alpha;

    if (v.within_hypotheses) {
      if (v.min_slack < -1e-8) {
        throw VerificationError(
            "release curve for neighbor pair (" + fmt(g1) + ", " + fmt(g2) +
            ") falls below the guarantee by " + fmt(-v.min_slack) +
            " at alpha=" + fmt(v.min_slack_alpha));
      }
      if (v.min_slack < report.min_slack) {
        report.min_slack = v.min_slack;
        report.min_slack_alpha = v.min_slack_alpha;
        report.min_slack_pair = idx;
      }
    }
    report.pairs.push_back(std::move(v));
  }

  if (!std::isfinite(report.min_slack)) report.min_slack = 0.0;
  return report;
}

KernelLemmaReport kernel_lemma_check(double lambda1, double lambda2, double c,
                                     double lambda) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !std::isfinite(lambda1) ||
      !std::isfinite(lambda2)) {
    throw UsageError("kernel lemma check needs positive finite intensities");
  }
  if (!(c > 0.0) || !std::isfinite(c) || !(lambda >= 0.0) ||
      !std::isfinite(lambda)) {
    throw UsageError("kernel lemma check needs c > 0 and lambda >= 0");
  }

  KernelLemmaReport report;
  report.lambda1 = lambda1;
  report.lambda2 = lambda2;
  report.c = c;
  report.lambda = lambda;

  const TradeoffCurve base = poisson_curve(lambda1, lambda2);

  struct Case {
    std::string name;
    bool applicable;
    // Curve that must dominate, then the dominated one.
    TradeoffCurve upper, lower;
  };
  std::vector<Case> cases;

  // Scaling both intensities by c >= 1 sharpens the experiment, by c <= 1
  // (thinning) degrades it.
  if (c >= 1.0) {
    cases.push_back(
        {"scale-up", true, base, poisson_curve(c * lambda1, c * lambda2)});
  }
  if (c <= 1.0) {
    cases.push_back(
        {"scale-down", true, poisson_curve(c * lambda1, c * lambda2), base});
  }
  // Translating both intensities up adds common noise and degrades the
  // experiment; translating down (when still positive) sharpens it.
  cases.push_back({"translate-up", true,
                   poisson_curve(lambda1 + lambda, lambda2 + lambda), base});
  if (lambda1 - lambda > 0.0 && lambda2 - lambda > 0.0) {
    cases.push_back({"translate-down", true, base,
                     poisson_curve(lambda1 - lambda, lambda2 - lambda)});
  } else {
    OrderingCheck skipped;
    skipped.name = "translate-down";
    skipped.applicable = false;
    report.checks.push_back(std::move(skipped));
  }

  report.min_slack = std::numeric_limits<double>::infinity();
  for (const Case& k : cases) {
    SlackScan scan = min_slack_over_grid(k.upper, k.lower);
    OrderingCheck chk;
    chk.name = k.name;
    chk.applicable = true;
    chk.min_slack = scan.min_slack;
    chk.min_slack_alpha = scan.at_alpha;
    if (chk.min_slack < -1e-8) {
      throw VerificationError("ordering " + k.name + " violated by " +
                              fmt(-chk.min_slack) + " at alpha=" +
                              fmt(chk.min_slack_alpha));
    }
    report.min_slack = std::min(report.min_slack, chk.min_slack);
    report.checks.push_back(std::move(chk));
  }
  if (!std::isfinite(report.min_slack)) report.min_slack = 0.0;
  return report;
}

}  // namespace tradeoff
