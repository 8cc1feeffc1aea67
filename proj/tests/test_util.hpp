#pragma once

// Helpers shared by the test binaries: grid scans over curves and seeded
// random experiment generators.

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "tradeoff/curve.hpp"
#include "tradeoff/neyman.hpp"

namespace testutil {

// Evaluation abscissas for comparing two curves: a uniform grid plus every
// breakpoint either operand exposes. For piecewise linear operands the
// difference is also piecewise linear, so its extrema live on this set and
// the scan is exact.
inline std::vector<double> scan_alphas(const tradeoff::TradeoffCurve& f,
                                       const tradeoff::TradeoffCurve& g,
                                       double step = 1e-3) {
  std::vector<double> xs;
  const auto n = static_cast<std::size_t>(1.0 / step);
  xs.reserve(2 * n);
  for (std::size_t i = 0; i <= n; ++i) xs.push_back(std::min(1.0, i * step));
  const auto add_breaks = [&xs](const tradeoff::TradeoffCurve& c) {
    if (c.form() != tradeoff::CurveForm::piecewise_linear) return;
    for (const auto& pt : c.breakpoints()) xs.push_back(pt.alpha);
  };
  add_breaks(f);
  add_breaks(g);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// max over the scan of f(alpha) - g(alpha); positive where f pokes above g.
inline double max_gap(const tradeoff::TradeoffCurve& f,
                      const tradeoff::TradeoffCurve& g, double step = 1e-3) {
  double worst = -2.0;
  for (double a : scan_alphas(f, g, step)) {
    worst = std::max(worst, f.eval(a) - g.eval(a));
  }
  return worst;
}

inline double sup_gap(const tradeoff::TradeoffCurve& f,
                      const tradeoff::TradeoffCurve& g, double step = 1e-3) {
  double worst = 0.0;
  for (double a : scan_alphas(f, g, step)) {
    worst = std::max(worst, std::abs(f.eval(a) - g.eval(a)));
  }
  return worst;
}

// Random discrete pair with the given support size and masses bounded away
// from zero, so every Neyman-Pearson vertex is well resolved.
inline tradeoff::DiscretePair random_pair(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  tradeoff::DiscretePair e;
  e.labels.resize(n);
  e.p.resize(n);
  e.q.resize(n);
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e.labels[i] = static_cast<double>(i);
    e.p[i] = u(rng);
    e.q[i] = u(rng);
    sp += e.p[i];
    sq += e.q[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    e.p[i] /= sp;
    e.q[i] /= sq;
  }
  return e;
}

}  // namespace testutil
