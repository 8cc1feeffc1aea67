#pragma once

#include <variant>
#include <vector>

#include "tradeoff/curve.hpp"
#include "tradeoff/discrete.hpp"
#include "tradeoff/stats.hpp"

namespace tradeoff {

// A binary experiment: two candidate distributions on a shared sample space.
struct DiscretePair {
  std::vector<double> labels;  // strictly increasing shared label set
  std::vector<double> p;       // null masses, aligned with labels
  std::vector<double> q;       // alternative masses
  double p_deficit = 0.0;      // truncated null mass
  double q_deficit = 0.0;      // truncated alternative mass

  // Aligns two distributions onto the union of their supports (values within
  // the merge tolerance are treated as the same label).
  static DiscretePair from_dists(const DiscreteDist& null_dist,
                                 const DiscreteDist& alt_dist,
                                 const DiscreteOptions& opt = {});
  std::size_t size() const { return labels.size(); }
  void validate(double tol = 1e-12) const;
};

// Location shift within a symmetric family: null F, alternative F(. - mu).
struct ShiftPair {
  ShiftFamily family;
  double mu = 0.0;
};

// Unit-variance gaussian shift kept symbolic: curves and compositions stay
// in closed form.
struct AnalyticGaussianPair {
  double mu = 0.0;
};

using ExperimentPair = std::variant<DiscretePair, ShiftPair, AnalyticGaussianPair>;

DiscretePair poisson_pair(double lambda1, double lambda2, double tail = 1e-12,
                          const DiscreteOptions& opt = {});
DiscretePair bernoulli_pair(double p1, double p2);

// Log-likelihood-ratio atoms in dual-mass form: each finite atom carries its
// null mass p and alternative mass q (= e^x p in exact arithmetic; stored
// separately so tilting never amplifies rounding at extreme x). Singular
// parts live in the two infinity masses. Composition convolves these atoms.
struct LlrAtoms {
  std::vector<double> x;  // strictly increasing finite log-ratios
  std::vector<double> p;
  std::vector<double> q;
  double p_at_neg_inf = 0.0;  // null mass where the alternative vanishes
  double q_at_pos_inf = 0.0;  // alternative mass where the null vanishes
  double p_deficit = 0.0;
  double q_deficit = 0.0;
  double rebin_error_bound = 0.0;  // accumulated curve-error estimate

  std::size_t size() const { return x.size(); }
  // Alternative mass of the absolutely continuous part: sum of q. Equals 1
  // exactly when the alternative is the Esscher tilt of the null and nothing
  // escaped the window.
  double tilt_normalizer() const;
};

// Law of log(dQ/dP) under the null, with the singular masses split out.
struct LLRDist {
  DiscreteDist under_null;      // finite atoms only
  double plus_inf_mass = 0.0;   // alternative-only mass (zero when Q << P)
  double minus_inf_mass = 0.0;  // null mass on which the alternative vanishes
  double tilt_normalizer = 1.0;
};

struct GaussianDiscretization {
  double window_sigmas = 8.0;   // half-width of the value window, in sigmas
  double step_divisor = 2000.0; // bin width = sigma / step_divisor
};

// The four moment functionals of log|f'| over [0,1]. When log|f'| fails to
// integrate (the curve has a flat segment of positive width) all fields are
// +infinity and finite is false.
struct MomentFunctionals {
  double kl = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa3_centered = 0.0;  // third absolute moment about -kl
  bool finite = true;
};

// Exact trade-off curve of the experiment via the Neyman-Pearson
// construction: atoms grouped by likelihood ratio (ties merged), sorted by
// decreasing ratio, breakpoints at the cumulative error pairs. Gaussian
// shifts return the symbolic closed form; other shift families are sampled
// on a quantile grid of `quantile_cells` cells.
TradeoffCurve curve(const ExperimentPair& e, int quantile_cells = 10000);

// LLR atoms of a discrete pair (ratio ties merged at 1e-12 relative).
LlrAtoms llr_atoms(const DiscretePair& e);
// LLR atoms realizing any experiment pair: discrete pairs exactly, gaussian
// shifts through the windowed normal discretization, other shift families
// through a quantile-cell grid.
LlrAtoms experiment_llr_atoms(const ExperimentPair& e,
                              const GaussianDiscretization& d = {},
                              int quantile_cells = 10000);
// Exact-binned LLR atoms of the gaussian shift experiment: the null LLR law
// N(-mu^2/2, mu^2) with bin masses taken as CDF differences under both the
// null and its tilt.
LlrAtoms gaussian_llr_atoms(double mu, const GaussianDiscretization& d = {});
// NP curve of the atoms (initial drop from the alternative-only mass,
// terminal flat segment from the null-only mass).
TradeoffCurve curve_from_llr(const LlrAtoms& atoms);
// The atoms as an explicit experiment whose labels are the log-ratios.
DiscretePair pair_from_llr(const LlrAtoms& atoms);

// Law of the log-likelihood ratio under the null. Throws ContiguityError
// (carrying the escaping mass) when the alternative is not absolutely
// continuous with respect to the null.
LLRDist llr(const ExperimentPair& e, const GaussianDiscretization& d = {},
            int quantile_cells = 10000);

MomentFunctionals moment_functionals(const TradeoffCurve& f);

// Dual-route consistency: sup distance between curve(e) and the curve of the
// experiment formed by the LLR law under both measures (reconstructing the
// alternative masses as e^x times the null masses). Small by the sufficiency
// of the likelihood ratio.
double llr_identity_check(const ExperimentPair& e);

}  // namespace tradeoff
