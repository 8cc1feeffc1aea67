#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tradeoff/curve.hpp"

namespace tradeoff {

// Observable range of a statistic g together with its neighbor sensitivity
// w_g: the largest move |g(x) - g(x')| over neighboring datasets.
struct StatRange {
  double g_min = 0.0;
  double g_max = 0.0;
  double w_g = 0.0;

  // Throws UsageError unless w_g > 0, g_max >= g_min, and w_g <= g_max - g_min
  // whenever both ends are finite.
  void validate() const;
};

// Calibrated parameters of the exponential-intensity Poisson release
// mechanism: the published value is one draw from Poisson(N2 * e^{N1 y})
// at y = g(dataset).
struct PoissonMechanismParams {
  double mu1 = 0.0;  // intensity floor, reached at the bottom of the range
  double mu2 = 0.0;  // intensity ceiling over any neighbor move
  double w_g = 0.0;  // sensitivity of g
  double w_hg = 0.0; // sensitivity of e^{N1 g}, the transformed statistic
  double N1 = 0.0;
  double N2 = 0.0;

  double intensity(double y) const;  // N2 * (mu2/mu1)^(y / w_g)

  // Throws UsageError unless mu2 > mu1 > 0, the widths are positive, and
  // N1, N2 equal their defining expressions exactly as stored.
  void validate() const;
};

// Computes N1 = log(mu2/mu1) / w_g and N2 = (mu2 - mu1) / w_hg. For a
// bounded range, w_hg is the top increment h(g_max) - h(g_max - w_g) of the
// increasing convex map h(y) = e^{N1 y}; for an unbounded range it cannot be
// derived and must be supplied through w_hg_override.
PoissonMechanismParams calibrate(double mu1, double mu2,
                                 const StatRange& range,
                                 std::optional<double> w_hg_override = {});

// One draw from Poisson(intensity(g_value)) by inversion: the smallest k
// with F(k) > U for a single seeded uniform U. Deterministic per
// (params, g_value, seed). Throws RangeError when the intensity is too
// large to sample exactly.
long long release(const PoissonMechanismParams& params, double g_value,
                  std::uint64_t seed);

// Outcome of checking one neighbor pair against the calibrated guarantee.
struct PairVerdict {
  double g1 = 0.0;
  double g2 = 0.0;
  std::string direction;         // "forward", "reverse", or "equal"
  bool within_hypotheses = true; // intensity ratio/gap inside the calibrated envelope
  double min_slack = 0.0;
  double min_slack_alpha = 0.0;
};

struct GuaranteeReport {
  std::vector<PairVerdict> pairs;
  double min_slack = 0.0;        // over pairs within hypotheses
  double min_slack_alpha = 0.0;
  std::size_t min_slack_pair = 0;
  TradeoffCurve guarantee;           // curve of the calibrated endpoint pair
  TradeoffCurve symmetric_guarantee; // its symmetrization (double conjugate)
};

// For each neighbor pair, builds the curve of the two release intensities
// and asserts it dominates the endpoint guarantee (its inverse when the
// statistic decreases) with slack >= -1e-8 on a 1e-3 grid plus all
// breakpoints. Pairs whose intensities fall outside the calibrated
// ratio/gap envelope carry no guarantee and are reported as outside the
// hypotheses instead of failing. Throws VerificationError on a violation,
// naming the pair and the worst alpha.
GuaranteeReport verify_guarantee(
    const PoissonMechanismParams& params,
    const std::vector<std::pair<double, double>>& neighbor_values);

// One of the four Poisson curve orderings under scaling or translation of
// both intensities.
struct OrderingCheck {
  std::string name;
  bool applicable = false;
  double min_slack = 0.0;
  double min_slack_alpha = 0.0;
};

struct KernelLemmaReport {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double c = 0.0;
  double lambda = 0.0;
  std::vector<OrderingCheck> checks;
  double min_slack = 0.0;  // over applicable checks
};

// Checks, pointwise on a 1e-3 grid plus breakpoints, that scaling both
// intensities by c >= 1 lowers the curve while c <= 1 raises it, and that
// translating both up by lambda raises it while translating down (when the
// result stays positive) lowers it. Side conditions that fail make a check
// inapplicable rather than a failure; a genuine violation beyond -1e-8
// throws VerificationError.
KernelLemmaReport kernel_lemma_check(double lambda1, double lambda2, double c,
                                     double lambda);

}  // namespace tradeoff
