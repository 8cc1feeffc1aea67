#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "tradeoff/error.hpp"

namespace tradeoff {

struct DiscreteOptions {
  // Atoms with mass below this are dropped (added to the deficit).
  double prune_threshold = 1e-15;
  // Values closer than this (absolute) are merged into one atom.
  double value_merge_tol = 1e-12;
};

// A finite atomic measure over real-valued labels: sorted unique values with
// nonnegative masses. Probability distributions carry any truncated mass in
// `deficit`; truncation is never silently renormalized away because curves
// are sensitive to missing mass at extreme likelihood ratios.
struct DiscreteDist {
  std::vector<double> values;  // strictly increasing
  std::vector<double> masses;  // >= 0, aligned with values
  double deficit = 0.0;        // probability mass lost to truncation/pruning

  DiscreteDist() = default;

  // Canonicalizes: sorts, merges near-equal values, prunes tiny atoms.
  static DiscreteDist from_atoms(std::vector<std::pair<double, double>> atoms,
                                 const DiscreteOptions& opt = {});
  static DiscreteDist point(double value);

  std::size_t size() const { return values.size(); }
  double total_mass() const;
  double mean() const;

  // Throws unless total_mass() + deficit is 1 within tol and no mass exceeds
  // the probability range.
  void validate_probability(double tol = 1e-12) const;
};

// Truncated Poisson pmf on {0..K} with upper-tail mass < tail. The omitted
// mass (tail truncation plus pruning) is recorded in the deficit, not
// redistributed.
DiscreteDist poisson_dist(double lambda, double tail = 1e-12,
                          const DiscreteOptions& opt = {});

struct TiltResult {
  DiscreteDist measure;  // mass e^x * p(x) per atom; a measure, not validated
  double normalizer;     // Z = sum e^x p(x); callers assert Z ~= 1 when needed
};

// Exponential change of measure dQ(x) = e^x dP(x).
TiltResult esscher_tilt(const DiscreteDist& p);

// Markov kernels on nonnegative-integer supports plus interval partitions.
struct PoissonSuperpose {
  double lambda;        // adds independent Poisson(lambda) noise
  double tail = 1e-12;  // truncation for the noise rows
};
struct BinomialThin {
  double c;  // keeps each unit independently with probability c, 0 < c <= 1
};
// Interval partition of the real line: cut points c_0 < c_1 < ... define bins
// (-inf, c_0), [c_0, c_1), ..., [c_last, +inf); each atom maps to its bin
// index.
struct IntervalPartition {
  std::vector<double> cuts;
};
using Kernel = std::variant<PoissonSuperpose, BinomialThin, IntervalPartition>;

// Pushforward of p through the kernel. Poisson/thinning kernels require a
// nonnegative-integer support.
DiscreteDist apply_kernel(const Kernel& k, const DiscreteDist& p,
                          const DiscreteOptions& opt = {});

// One kernel row K(n, .) as a distribution (for row-stochasticity checks).
DiscreteDist kernel_row(const Kernel& k, double n, const DiscreteOptions& opt = {});

// n inverse-CDF draws from d on a seeded uniform stream; the draw is the
// atom k with F(k-1) <= U < F(k). Identical (d, seed, n) give identical
// output.
std::vector<double> sample(const DiscreteDist& d, std::uint64_t seed, std::size_t n);

}  // namespace tradeoff
