#pragma once

#include <string>

#include "tradeoff/error.hpp"

namespace tradeoff {

// Scalar distribution functions used throughout. Thin wrappers so the rest
// of the library does not care which backend provides them.

double norm_pdf(double x);
double norm_cdf(double x);
// Inverse of norm_cdf; u in (0,1).
double norm_quantile(double u);
// The x with P(X > x) = q; accurate for tiny q where norm_quantile(1 - q)
// would lose the tail to rounding.
double norm_quantile_upper(double q);
// log(norm_cdf(x)), stable for very negative x where the cdf underflows.
double log_norm_cdf(double x);

double laplace_cdf(double x);
double laplace_quantile(double u);

double lgamma_fn(double x);
// Binomial pmf C(n,k) c^k (1-c)^(n-k), computed stably in log space.
double binomial_pmf(long long n, long long k, double c);

// A location-scale family with a symmetric log-concave standard density.
// Shifting its location is the canonical continuous binary experiment here:
// the trade-off curve for testing X vs X+mu has the closed form
// F(F^{-1}(1-alpha) - mu/scale) in standardized units.
struct ShiftFamily {
  enum class Kind { gaussian, laplace };

  Kind kind = Kind::gaussian;
  double location = 0.0;
  double scale = 1.0;

  ShiftFamily() = default;
  ShiftFamily(Kind kind, double location = 0.0, double scale = 1.0);

  // Cumulative distribution function at x (in natural units).
  double cdf(double x) const;
  // P(X > x), accurate in the right tail where 1 - cdf(x) would cancel.
  double survival(double x) const;
  // Quantile (inverse cdf) at u in (0,1). Exact inverse of cdf to ~1e-15.
  double quantile(double u) const;
  // The x with P(X > x) = q, accurate for tiny q.
  double quantile_upper(double q) const;

  static ShiftFamily parse(const std::string& name);  // "gaussian" | "laplace"
  std::string name() const;
};

}  // namespace tradeoff
