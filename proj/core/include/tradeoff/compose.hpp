#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tradeoff/curve.hpp"
#include "tradeoff/neyman.hpp"

namespace tradeoff {

// Size and accuracy policy for sparse log-ratio convolutions.
struct ComposeOptions {
  std::size_t atom_cap = 200000;      // rebin results larger than this
  std::size_t working_cap = 4000000;  // pre-rebin operands so products fit
  double error_budget = 1e-6;         // advisory budget for rebin_error_bound
};

// One operand of a product experiment: the curve plus whatever realization
// the product needs. Gaussian (and identity) curves compose symbolically;
// every other curve must be backed by a discrete pair.
class Composable {
 public:
  Composable(TradeoffCurve f);    // NOLINT(google-explicit-constructor)
  Composable(DiscretePair pair);  // NOLINT(google-explicit-constructor)
  Composable(TradeoffCurve f, DiscretePair pair);

  const TradeoffCurve& curve() const { return curve_; }
  const std::optional<DiscretePair>& pair() const { return pair_; }

 private:
  TradeoffCurve curve_;
  std::optional<DiscretePair> pair_;
};

// Sparse convolution of two log-ratio atom sets: the log-ratio law of the
// product experiment. Singular masses multiply out exactly; results above
// the atom cap are rebinned with the error estimate accumulated.
LlrAtoms convolve(const LlrAtoms& a, const LlrAtoms& b,
                  const ComposeOptions& opt = {});

// Collapse atoms onto a uniform grid of the given width. The bin-conditional
// log-ratio replaces members' values; the induced sup-error estimate
// (grid modulus) joins rebin_error_bound.
LlrAtoms rebin_atoms(const LlrAtoms& a, double grid_width);

// Canonical discrete realization of a curve: one atom per linear segment
// with null mass equal to the segment width and log-ratio log|slope|.
// Closed forms are discretized first.
LlrAtoms atoms_from_curve(const TradeoffCurve& f);

// Trade-off curve of the product experiment. Gaussian operands combine into
// gaussian(sqrt(mu1^2 + mu2^2)); an identity operand returns the other
// curve; otherwise both operands need discrete realizations.
TradeoffCurve tensor(const Composable& f, const Composable& g,
                     const ComposeOptions& opt = {});

// n-fold product of one experiment with itself, by binary doubling of the
// log-ratio convolution. Gaussian pairs stay symbolic: gaussian(mu sqrt(n)).
TradeoffCurve self_compose(const ExperimentPair& pair, long long n,
                           const ComposeOptions& opt = {});

// Gaussian comparator for a composition whose per-step moment functionals
// accumulate to the given sums: gaussian(2 kl_sum / sqrt(kappa2_sum)).
TradeoffCurve clt_limit(double kl_sum, double kappa2_sum);

// Distance of an n-fold self-composition to its gaussian comparator, with
// the comparator parameter taken from the per-step moments (variance
// centered, so the comparator is exact for gaussian steps at every n).
struct ConvergenceReport {
  long long n = 0;
  double sup_distance_to_limit = 0.0;
  double levy_distance_to_limit = 0.0;
};
ConvergenceReport compose_convergence(const ExperimentPair& pair, long long n,
                                      const ComposeOptions& opt = {});

// Exponential decay rate of the composed curve at a fixed type-I budget:
// empirical (1/n) log f^{(n)}(alpha) against the analytic integral of
// log|f'| over [0, f^{-1}(0)].
struct LdpReport {
  double alpha = 0.5;
  double analytic_rate = 0.0;
  std::vector<long long> n;
  std::vector<double> empirical;  // (1/n) log f^{(n)}(alpha), aligned with n
  double gap = 0.0;               // |empirical.back() - analytic_rate|
};
LdpReport ldp_rate(const TradeoffCurve& f, const std::vector<long long>& n_list,
                   double alpha = 0.5, const ComposeOptions& opt = {});

}  // namespace tradeoff
