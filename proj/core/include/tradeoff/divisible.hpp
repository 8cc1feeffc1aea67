#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tradeoff/compose.hpp"
#include "tradeoff/curve.hpp"
#include "tradeoff/neyman.hpp"

namespace tradeoff {

// Jump part of a divisible log-ratio law: the affine Poisson variable
// lambda1 - lambda2 + log(lambda2/lambda1) K with K ~ Poisson(lambda1),
// whose Esscher tilt is exactly Poisson(lambda2).
struct PoissonComponent {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// An infinitely divisible limit experiment: the null law is the independent
// sum of N(-k, 2k) (variance forced to twice the mean shift, so e^x has
// unit expectation) and an optional affine Poisson part; the alternative is
// its Esscher tilt.
struct IDPCurveSpec {
  double k = 0.0;
  std::optional<PoissonComponent> poisson;
  void validate() const;
};

struct MixtureComponent {
  double weight = 0.0;
  double time = 0.0;
};

// Scale mixture of gaussian experiments: component i runs the sigma-scaled
// gaussian to time t_i with prior weight_i. Weights must sum to 1; equal
// times merge.
struct MixtureSpec {
  std::vector<MixtureComponent> components;
  double sigma = 1.0;
  void validate() const;
};

// The null law's log-ratio atoms (gaussian part discretized, Poisson part
// exact, convolved). Throws ConsistencyError when the tilt normalizer ends
// up farther than 1e-6 from 1.
LlrAtoms idp_llr_atoms(const IDPCurveSpec& spec, const ComposeOptions& opt = {});
TradeoffCurve idp_curve(const IDPCurveSpec& spec, const ComposeOptions& opt = {});

// Divide the spec into n identical tensor factors.
IDPCurveSpec divide_spec(const IDPCurveSpec& spec, long long n);
// Component-wise sum: the product experiment inside the divisible class.
// The Poisson parts must share their intensity ratio; otherwise the sum
// leaves the two-parameter family and this throws.
IDPCurveSpec add_specs(const IDPCurveSpec& a, const IDPCurveSpec& b);

struct MixtureResult {
  TradeoffCurve curve;          // variational (allocation) solution
  TradeoffCurve direct;         // NP curve of the discretized mixture laws
  double crosscheck_gap = 0.0;  // sup distance between the two
};
// Solves the mixture two ways: equal-slope allocation across the component
// curves, and Neyman-Pearson on the mixture densities directly. Returns the
// variational curve; a cross-check gap above 1e-4 throws ConsistencyError.
MixtureResult mixture_curve_detail(const MixtureSpec& spec);
TradeoffCurve mixture_curve(const MixtureSpec& spec);

// Random-stopping composition study: per seed, a stopping time T is drawn
// from the mixing weights, a gaussian pair is composed round(n T) times
// symbolically, and the resulting curves are mixed through their Bayes-risk
// vectors (the functional is affine under mixtures).
struct StoppingReport {
  TradeoffCurve empirical;
  double levy_to_mixture = 0.0;
  std::vector<long long> draw_counts;  // composition length per seed
};
StoppingReport random_stopping_sim(const MixtureSpec& spec, long long n,
                                   const std::vector<std::uint64_t>& seeds);

// Best gaussian-only divisible approximation to a target curve: minimizes
// the sup distance over the parameter k (coarse scan plus golden-section).
struct GaussianFit {
  double k = 0.0;
  double sup_distance = 0.0;
};
GaussianFit best_gaussian_fit(const TradeoffCurve& target);

}  // namespace tradeoff
