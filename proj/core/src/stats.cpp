#include "tradeoff/stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

namespace tradeoff {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw UsageError("norm_quantile: argument must lie strictly inside (0,1)");
  }
  return boost::math::quantile(kStdNormal, u);
}

double norm_quantile_upper(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw UsageError("norm_quantile_upper: argument must lie strictly inside (0,1)");
  }
  return boost::math::quantile(boost::math::complement(kStdNormal, q));
}

double log_norm_cdf(double x) {
  if (x > -8.0) return std::log(norm_cdf(x));
  // Asymptotic expansion of the Mills ratio: for x << 0,
  // Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
  const double z = -x;
  const double z2 = z * z;
  double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z * z - kLogSqrt2Pi - std::log(z) + std::log(series);
}

double laplace_cdf(double x) {
  return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
}

double laplace_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw UsageError("laplace_quantile: argument must lie strictly inside (0,1)");
  }
  return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
}

double lgamma_fn(double x) { return boost::math::lgamma(x); }

double binomial_pmf(long long n, long long k, double c) {
  if (k < 0 || k > n) return 0.0;
  if (c <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (c >= 1.0) return k == n ? 1.0 : 0.0;
  const double logp = lgamma_fn(double(n) + 1.0) - lgamma_fn(double(k) + 1.0) -
                      lgamma_fn(double(n - k) + 1.0) +
                      double(k) * std::log(c) +
                      double(n - k) * std::log1p(-c);
  return std::exp(logp);
}

ShiftFamily::ShiftFamily(Kind kind, double location, double scale)
    : kind(kind), location(location), scale(scale) {
  if (!(scale > 0.0)) throw UsageError("ShiftFamily: scale must be positive");
}

double ShiftFamily::cdf(double x) const {
  const double z = (x - location) / scale;
  return kind == Kind::gaussian ? norm_cdf(z) : laplace_cdf(z);
}

double ShiftFamily::survival(double x) const {
  const double z = (x - location) / scale;
  if (kind == Kind::gaussian) return norm_cdf(-z);
  // Standard Laplace: S(z) = e^{-z}/2 for z >= 0, else 1 - e^{z}/2.
  return z >= 0.0 ? 0.5 * std::exp(-z) : 1.0 - 0.5 * std::exp(z);
}

double ShiftFamily::quantile(double u) const {
  const double z = kind == Kind::gaussian ? norm_quantile(u) : laplace_quantile(u);
  return location + scale * z;
}

double ShiftFamily::quantile_upper(double q) const {
  // Both standard densities are symmetric about zero.
  const double z =
      kind == Kind::gaussian ? norm_quantile_upper(q) : -laplace_quantile(q);
  return location + scale * z;
}

ShiftFamily ShiftFamily::parse(const std::string& name) {
  if (name == "gaussian") return ShiftFamily(Kind::gaussian);
  if (name == "laplace") return ShiftFamily(Kind::laplace);
  throw UsageError("unknown shift family '" + name + "' (expected gaussian or laplace)");
}

std::string ShiftFamily::name() const {
  return kind == Kind::gaussian ? "gaussian" : "laplace";
}

}  // namespace tradeoff
