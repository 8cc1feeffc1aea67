#include "tradeoff/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tradeoff/stats.hpp"

namespace tradeoff {

namespace {

constexpr double kSnapTol = 1e-9;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

std::string fmt(double x) { return std::to_string(x); }

// Relative tolerance for comparing adjacent slopes in the convexity
// certificate. Slope magnitudes span many orders, so scale by the pair.
bool slopes_nondecreasing(double s_prev, double s_next, double tol) {
  double scale = std::max({1.0, std::abs(s_prev), std::abs(s_next)});
  return s_next >= s_prev - tol * scale;
}

}  // namespace

void BayesRisk::validate(double tol) const {
  if (lambdas.size() != risks.size() || lambdas.size() < 2) {
    throw ContractError("bayes-risk grid needs matched lambda/risk arrays");
  }
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    double l = lambdas[i], b = risks[i];
    if (!(l >= 0.0 && l <= 1.0)) throw ContractError("prior outside [0,1]");
    if (i > 0 && !(l > lambdas[i - 1])) {
      throw ContractError("prior grid must be strictly increasing");
    }
    if (b < -tol || b > std::min(l, 1.0 - l) + tol) {
      throw ContractError("bayes risk at prior " + fmt(l) +
                          " escapes [0, min(prior, 1-prior)]");
    }
  }
  // Concavity via nonincreasing difference quotients.
  for (std::size_t i = 2; i < lambdas.size(); ++i) {
    double d1 = (risks[i - 1] - risks[i - 2]) / (lambdas[i - 1] - lambdas[i - 2]);
    double d2 = (risks[i] - risks[i - 1]) / (lambdas[i] - lambdas[i - 1]);
    if (d2 > d1 + tol * std::max({1.0, std::abs(d1), std::abs(d2)})) {
      throw ContractError("bayes risk is not concave near prior " +
                          fmt(lambdas[i - 1]));
    }
  }
}

TradeoffCurve TradeoffCurve::gaussian(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw UsageError("gaussian curve parameter must be finite and >= 0");
  }
  TradeoffCurve c;
  c.form_ = CurveForm::gaussian;
  c.mu_ = mu;
  return c;
}

TradeoffCurve TradeoffCurve::eps_delta(double eps, double delta) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw UsageError("eps must be finite and >= 0");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw UsageError("delta must lie in [0,1]");
  }
  TradeoffCurve c;
  c.form_ = CurveForm::eps_delta;
  c.eps_ = eps;
  c.delta_ = delta;
  return c;
}

TradeoffCurve TradeoffCurve::identity() { return eps_delta(0.0, 0.0); }

TradeoffCurve TradeoffCurve::from_breakpoints(std::vector<CurvePoint> pts,
                                              CurveMetadata meta) {
  if (pts.size() < 2) {
    throw ContractError("a piecewise-linear curve needs at least two breakpoints");
  }
  std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.alpha < b.alpha || (a.alpha == b.alpha && a.beta > b.beta);
  });

  std::vector<CurvePoint> out;
  out.reserve(pts.size());
  for (const CurvePoint& p : pts) {
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
      throw ContractError("breakpoint coordinates must be finite");
    }
    double a = p.alpha, b = p.beta;
    if (a < 0.0 || a > 1.0) {
      if (std::abs(a) <= kSnapTol) a = 0.0;
      else if (std::abs(a - 1.0) <= kSnapTol) a = 1.0;
      else throw ContractError("breakpoint alpha " + fmt(a) + " outside [0,1]");
    }
    if (b < 0.0 || b > 1.0) {
      if (b < 0.0 && b >= -kSnapTol) b = 0.0;
      else if (b > 1.0 && b <= 1.0 + kSnapTol) b = 1.0;
      else throw ContractError("breakpoint beta " + fmt(b) + " outside [0,1]");
    }
    if (b > 1.0 - a) {
      if (b - (1.0 - a) <= kSnapTol) b = 1.0 - a;
      else {
        throw ContractError("breakpoint (" + fmt(a) + ", " + fmt(b) +
                            ") lies above the triangle beta <= 1 - alpha");
      }
    }
    // Merge duplicate abscissas; a function cannot take two values.
    if (!out.empty() && a == out.back().alpha) {
      if (std::abs(b - out.back().beta) > kSnapTol) {
        throw ContractError("two breakpoints share alpha = " + fmt(a) +
                            " with different beta values");
      }
      continue;
    }
    out.push_back({a, b});
  }

  if (out.front().alpha != 0.0) {
    if (out.front().alpha <= kSnapTol) out.front().alpha = 0.0;
    else throw ContractError("curve must start at alpha = 0");
  }
  if (out.back().alpha != 1.0) {
    if (1.0 - out.back().alpha <= kSnapTol) out.back().alpha = 1.0;
    else throw ContractError("curve must end at alpha = 1");
  }
  if (out.back().beta != 0.0) {
    if (out.back().beta <= kSnapTol) out.back().beta = 0.0;
    else throw ContractError("curve must satisfy f(1) = 0");
  }

  // Drop interior points that are exactly collinear with their neighbors.
  std::vector<CurvePoint> slim;
  slim.reserve(out.size());
  slim.push_back(out.front());
  for (std::size_t i = 1; i + 1 < out.size(); ++i) {
    const CurvePoint& a = slim.back();
    const CurvePoint& b = out[i];
    const CurvePoint& c = out[i + 1];
    double cross = (b.alpha - a.alpha) * (c.beta - a.beta) -
                   (c.alpha - a.alpha) * (b.beta - a.beta);
    if (cross == 0.0) continue;
    slim.push_back(b);
  }
  slim.push_back(out.back());

  TradeoffCurve curve;
  curve.form_ = CurveForm::piecewise_linear;
  curve.pts_ = std::move(slim);
  curve.meta_ = std::move(meta);
  curve.validate();
  return curve;
}

std::string TradeoffCurve::form_name() const {
  switch (form_) {
    case CurveForm::piecewise_linear: return "piecewise-linear";
    case CurveForm::gaussian: return "gaussian";
    case CurveForm::eps_delta: return "eps-delta";
  }
  return "unknown";
}

bool TradeoffCurve::is_identity(double tol) const {
  switch (form_) {
    case CurveForm::gaussian: return mu_ <= tol;
    case CurveForm::eps_delta: return eps_ <= tol && delta_ <= tol;
    case CurveForm::piecewise_linear: {
      for (const CurvePoint& p : pts_) {
        if (std::abs(p.beta - (1.0 - p.alpha)) > tol) return false;
      }
      return true;
    }
  }
  return false;
}

double TradeoffCurve::gaussian_mu() const {
  if (form_ != CurveForm::gaussian) {
    throw ContractError("curve is " + form_name() + ", not gaussian");
  }
  return mu_;
}

double TradeoffCurve::eps() const {
  if (form_ != CurveForm::eps_delta) {
    throw ContractError("curve is " + form_name() + ", not eps-delta");
  }
  return eps_;
}

double TradeoffCurve::delta() const {
  if (form_ != CurveForm::eps_delta) {
    throw ContractError("curve is " + form_name() + ", not eps-delta");
  }
  return delta_;
}

const std::vector<CurvePoint>& TradeoffCurve::breakpoints() const {
  if (form_ != CurveForm::piecewise_linear) {
    throw ContractError("breakpoints exist only for piecewise-linear curves; "
                        "call discretized() on a " + form_name() + " curve");
  }
  return pts_;
}

TradeoffCurve TradeoffCurve::discretized(double grid_step) const {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw UsageError("grid step must lie in (0, 0.5]");
  }
  switch (form_) {
    case CurveForm::piecewise_linear: return *this;
    case CurveForm::eps_delta: {
      // The graph is exactly piecewise linear; its kink sits on the diagonal
      // at x = (1 - delta) / (1 + e^eps).
      double x = (1.0 - delta_) / (1.0 + std::exp(eps_));
      std::vector<CurvePoint> pts;
      pts.push_back({0.0, 1.0 - delta_});
      pts.push_back({x, x});
      pts.push_back({1.0 - delta_, 0.0});
      pts.push_back({1.0, 0.0});
      CurveMetadata meta = meta_;
      return from_breakpoints(std::move(pts), std::move(meta));
    }
    case CurveForm::gaussian: {
      auto n = static_cast<std::size_t>(std::llround(1.0 / grid_step));
      std::vector<CurvePoint> pts;
      pts.reserve(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        double a = std::min(1.0, static_cast<double>(i) * grid_step);
        pts.push_back({a, eval(a)});
      }
      pts.back().alpha = 1.0;
      pts.back().beta = 0.0;
      CurveMetadata meta = meta_;
      meta.discretization_step = grid_step;
      return from_breakpoints(std::move(pts), std::move(meta));
    }
  }
  throw ContractError("unreachable curve form");
}

double TradeoffCurve::eval_pl(double alpha) const {
  if (alpha <= pts_.front().alpha) return pts_.front().beta;
  if (alpha >= pts_.back().alpha) return pts_.back().beta;
  auto it = std::lower_bound(
      pts_.begin(), pts_.end(), alpha,
      [](const CurvePoint& p, double a) { return p.alpha < a; });
  if (it->alpha == alpha) return it->beta;
  const CurvePoint& hi = *it;
  const CurvePoint& lo = *(it - 1);
  double t = (alpha - lo.alpha) / (hi.alpha - lo.alpha);
  return lo.beta + t * (hi.beta - lo.beta);
}

double TradeoffCurve::eval(double alpha) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw UsageError("eval: alpha must lie in [0,1], got " + fmt(alpha));
  }
  switch (form_) {
    case CurveForm::piecewise_linear:
      return eval_pl(alpha);
    case CurveForm::gaussian: {
      if (alpha == 0.0) return 1.0;
      if (alpha == 1.0) return 0.0;
      if (mu_ == 0.0) return 1.0 - alpha;
      return norm_cdf(norm_quantile_upper(alpha) - mu_);
    }
    case CurveForm::eps_delta: {
      double e = std::exp(eps_);
      return std::max({0.0, 1.0 - delta_ - e * alpha,
                       (1.0 - delta_ - alpha) / e});
    }
  }
  throw ContractError("unreachable curve form");
}

double TradeoffCurve::inverse_eval(double beta) const {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw UsageError("inverse_eval: beta must lie in [0,1], got " + fmt(beta));
  }
  if (form_ != CurveForm::piecewise_linear) {
    // Both closed forms are symmetric, so the inverse equals the curve.
    return eval(beta);
  }
  if (beta >= pts_.front().beta) return 0.0;
  // Largest breakpoint with beta strictly above the target; the crossing
  // lies in the following segment. Betas are nonincreasing in alpha.
  std::size_t i = 0;
  {
    std::size_t lo = 0, hi = pts_.size() - 1;
    while (lo + 1 < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (pts_[mid].beta > beta) lo = mid;
      else hi = mid;
    }
    i = lo;
  }
  const CurvePoint& a = pts_[i];
  const CurvePoint& b = pts_[i + 1];
  if (b.beta == a.beta) return a.alpha;
  double t = (a.beta - beta) / (a.beta - b.beta);
  return a.alpha + t * (b.alpha - a.alpha);
}

TradeoffCurve TradeoffCurve::inverse() const {
  if (form_ != CurveForm::piecewise_linear) return *this;  // symmetric forms

  // Keep everything up to the first zero of f; the flat tail beyond it
  // collapses to the single point (0, z_f) of the inverse.
  std::size_t z = 0;
  while (z + 1 < pts_.size() && pts_[z].beta > 0.0) ++z;
  std::vector<CurvePoint> pts;
  pts.reserve(z + 2);
  for (std::size_t i = z + 1; i-- > 0;) {
    pts.push_back({pts_[i].beta, pts_[i].alpha});
  }
  if (pts.back().alpha < 1.0) pts.push_back({1.0, 0.0});
  return from_breakpoints(std::move(pts), meta_);
}

bool TradeoffCurve::is_symmetric(double tol) const {
  if (form_ != CurveForm::piecewise_linear) return true;
  return sup_distance(inverse()) <= tol;
}

TradeoffCurve TradeoffCurve::symmetrize() const {
  if (form_ != CurveForm::piecewise_linear) return *this;
  if (is_symmetric(1e-12)) return *this;

  // xbar: the first point whose subgradient contains -1. For a piecewise
  // linear curve that is the first breakpoint whose outgoing slope is >= -1.
  const std::size_t m = pts_.size();
  std::size_t jstar = m - 1;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    double slope = (pts_[j + 1].beta - pts_[j].beta) /
                   (pts_[j + 1].alpha - pts_[j].alpha);
    if (slope >= -1.0) {
      jstar = j;
      break;
    }
  }
  const double xbar = pts_[jstar].alpha;
  const double fxbar = pts_[jstar].beta;
  const TradeoffCurve inv = inverse();

  std::vector<CurvePoint> g;
  if (xbar <= fxbar) {
    // f up to xbar, a slope -1 bridge across [xbar, f(xbar)], then the
    // inverse branch.
    for (std::size_t i = 0; i <= jstar; ++i) g.push_back(pts_[i]);
    g.push_back({fxbar, xbar});
    for (const CurvePoint& p : inv.pts_) {
      if (p.alpha > fxbar) g.push_back(p);
    }
  } else {
    // Mirror case: inverse branch first, bridge across [f(xbar), xbar],
    // then f from xbar on.
    for (const CurvePoint& p : inv.pts_) {
      if (p.alpha < fxbar) g.push_back(p);
    }
    g.push_back({fxbar, xbar});
    g.push_back({xbar, fxbar});
    for (std::size_t i = jstar; i < m; ++i) g.push_back(pts_[i]);
  }
  return from_breakpoints(std::move(g), meta_);
}

BayesRisk TradeoffCurve::to_bayes_risk(double lambda_step) const {
  if (!(lambda_step > 0.0 && lambda_step <= 0.5)) {
    throw UsageError("lambda step must lie in (0, 0.5]");
  }
  BayesRisk out;
  auto n = static_cast<std::size_t>(std::llround(1.0 / lambda_step));
  out.lambdas.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    out.lambdas.push_back(std::min(1.0, static_cast<double>(i) * lambda_step));
  }
  out.lambdas.back() = 1.0;
  out.risks.resize(out.lambdas.size());

  if (form_ == CurveForm::gaussian && mu_ > 0.0) {
    for (std::size_t i = 0; i < out.lambdas.size(); ++i) {
      double l = out.lambdas[i];
      if (l <= 0.0 || l >= 1.0) {
        out.risks[i] = 0.0;
        continue;
      }
      // Interior stationary point: the curve slope matches -(1-l)/l.
      double z = (std::log((1.0 - l) / l) + 0.5 * mu_ * mu_) / mu_;
      double alpha = norm_cdf(-z);
      out.risks[i] = (1.0 - l) * alpha + l * norm_cdf(z - mu_);
    }
    return out;
  }

  const TradeoffCurve pl =
      form_ == CurveForm::piecewise_linear ? *this : discretized();
  // The objective is linear in alpha on each segment, so the infimum sits on
  // a breakpoint; the minimizing breakpoint index only moves right as the
  // prior grows.
  std::size_t arg = 0;
  for (std::size_t i = 0; i < out.lambdas.size(); ++i) {
    double l = out.lambdas[i];
    auto value = [&](std::size_t j) {
      return (1.0 - l) * pl.pts_[j].alpha + l * pl.pts_[j].beta;
    };
    while (arg + 1 < pl.pts_.size() && value(arg + 1) <= value(arg)) ++arg;
    out.risks[i] = value(arg);
  }
  return out;
}

TradeoffCurve TradeoffCurve::from_bayes_risk(const BayesRisk& b) {
  b.validate(1e-8);
  // f(alpha) = sup over priors of (b(l) - (1-l) alpha) / l: an upper envelope
  // of lines with slope -(1-l)/l, built exactly.
  struct Line {
    double m, c;
  };
  std::vector<Line> lines;
  lines.reserve(b.lambdas.size());
  for (std::size_t i = 0; i < b.lambdas.size(); ++i) {
    double l = b.lambdas[i];
    if (l <= 0.0) continue;
    lines.push_back({-(1.0 - l) / l, b.risks[i] / l});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return a.m < b.m || (a.m == b.m && a.c > b.c);
  });
  // Deduplicate slopes, keeping the highest intercept.
  std::vector<Line> uniq;
  for (const Line& ln : lines) {
    if (!uniq.empty() && ln.m == uniq.back().m) continue;
    uniq.push_back(ln);
  }

  auto cross_x = [](const Line& a, const Line& b) {
    return (b.c - a.c) / (a.m - b.m);
  };
  std::vector<Line> hull;
  for (const Line& ln : uniq) {
    while (hull.size() >= 2 &&
           cross_x(hull[hull.size() - 2], ln) <=
               cross_x(hull[hull.size() - 2], hull.back())) {
      hull.pop_back();
    }
    while (hull.size() == 1 && ln.c >= hull.back().c) hull.pop_back();
    hull.push_back(ln);
  }

  std::vector<CurvePoint> pts;
  auto line_at = [](const Line& ln, double x) { return ln.m * x + ln.c; };
  std::size_t k = 0;
  // Skip hull pieces that end before the domain starts.
  while (k + 1 < hull.size() && cross_x(hull[k], hull[k + 1]) <= 0.0) ++k;
  pts.push_back({0.0, clamp01(line_at(hull[k], 0.0))});
  for (; k + 1 < hull.size(); ++k) {
    double x = cross_x(hull[k], hull[k + 1]);
    if (x >= 1.0) break;
    pts.push_back({x, clamp01(line_at(hull[k], x))});
  }
  pts.push_back({1.0, clamp01(line_at(hull[k], 1.0))});

  // A curve corner puts a whole pencil of support lines through one point;
  // their pairwise crossings scatter within rounding noise of that abscissa
  // and would leave micro-segments with meaningless slopes. Collapse each
  // such cluster to a single vertex at the envelope value.
  std::vector<CurvePoint> merged;
  merged.reserve(pts.size());
  for (const CurvePoint& p : pts) {
    if (!merged.empty() && std::abs(p.alpha - merged.back().alpha) <= 1e-12) {
      merged.back().beta = std::max(merged.back().beta, p.beta);
      continue;
    }
    merged.push_back(p);
  }
  return from_breakpoints(std::move(merged));
}

double TradeoffCurve::to_eps_delta(double eps) const {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw UsageError("eps must be finite and >= 0");
  }
  if (!is_symmetric()) {
    throw ContractError(
        "eps-delta conversion needs a symmetric curve; symmetrize() first");
  }
  switch (form_) {
    case CurveForm::gaussian: {
      if (mu_ == 0.0) return 0.0;
      // Stationary point of -e^eps * alpha - f(alpha) in closed form.
      return clamp01(norm_cdf(-eps / mu_ + 0.5 * mu_) -
                     std::exp(eps) * norm_cdf(-eps / mu_ - 0.5 * mu_));
    }
    case CurveForm::eps_delta:
    case CurveForm::piecewise_linear: {
      const TradeoffCurve pl =
          form_ == CurveForm::piecewise_linear ? *this : discretized();
      // The objective is concave piecewise linear in alpha; its supremum
      // sits on a breakpoint.
      double e = std::exp(eps);
      double best = -std::numeric_limits<double>::infinity();
      for (const CurvePoint& p : pl.pts_) {
        best = std::max(best, -e * p.alpha - p.beta);
      }
      return clamp01(1.0 + best);
    }
  }
  throw ContractError("unreachable curve form");
}

double TradeoffCurve::sup_distance(const TradeoffCurve& other,
                                   double grid_step) const {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw UsageError("grid step must lie in (0, 0.5]");
  }
  std::vector<double> grid;
  auto n = static_cast<std::size_t>(std::llround(1.0 / grid_step));
  grid.reserve(n + 1 + (form_ == CurveForm::piecewise_linear ? pts_.size() : 0) +
               (other.form_ == CurveForm::piecewise_linear ? other.pts_.size() : 0));
  for (std::size_t i = 0; i <= n; ++i) {
    grid.push_back(std::min(1.0, static_cast<double>(i) * grid_step));
  }
  if (form_ == CurveForm::piecewise_linear) {
    for (const CurvePoint& p : pts_) grid.push_back(p.alpha);
  }
  if (other.form_ == CurveForm::piecewise_linear) {
    for (const CurvePoint& p : other.pts_) grid.push_back(p.alpha);
  }
  double best = 0.0;
  for (double a : grid) best = std::max(best, std::abs(eval(a) - other.eval(a)));
  return best;
}

double TradeoffCurve::levy_distance(const TradeoffCurve& other,
                                    double grid_step) const {
  const TradeoffCurve f = discretized(grid_step);
  const TradeoffCurve g = other.discretized(grid_step);

  // Induced CDFs: F(x) = 1 - f(x) on [0,1], with the jump 1 - f(0) at zero.
  auto F = [](const TradeoffCurve& c, double x) {
    if (x < 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return 1.0 - c.eval_pl(x);
  };

  std::vector<double> base;
  base.reserve(f.pts_.size() + g.pts_.size() + 2);
  for (const CurvePoint& p : f.pts_) base.push_back(p.alpha);
  for (const CurvePoint& p : g.pts_) base.push_back(p.alpha);
  base.push_back(0.0);
  base.push_back(1.0);

  // Both constraints are piecewise linear in x between corner events, so
  // checking at the corners (and their +-eps shifts) is exhaustive.
  auto feasible = [&](double eps) {
    auto check = [&](double x) {
      if (F(g, x - eps) - eps > F(f, x) + 1e-15) return false;
      if (F(f, x) > F(g, x + eps) + eps + 1e-15) return false;
      if (F(f, x - eps) - eps > F(g, x) + 1e-15) return false;
      if (F(g, x) > F(f, x + eps) + eps + 1e-15) return false;
      return true;
    };
    for (double x : base) {
      if (!check(x) || !check(x - eps) || !check(x + eps)) return false;
    }
    return true;
  };

  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

void TradeoffCurve::validate(double tol) const {
  switch (form_) {
    case CurveForm::gaussian:
      if (!(mu_ >= 0.0) || !std::isfinite(mu_)) {
        throw ContractError("gaussian curve parameter must be finite and >= 0");
      }
      return;
    case CurveForm::eps_delta:
      if (!(eps_ >= 0.0) || !(delta_ >= 0.0 && delta_ <= 1.0)) {
        throw ContractError("eps-delta parameters outside their domain");
      }
      return;
    case CurveForm::piecewise_linear:
      break;
  }
  if (pts_.size() < 2) {
    throw ContractError("piecewise-linear curve needs at least two breakpoints");
  }
  if (pts_.front().alpha != 0.0 || pts_.back().alpha != 1.0 ||
      pts_.back().beta != 0.0) {
    throw ContractError("curve endpoints must be pinned at alpha=0 and (1,0)");
  }
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    const CurvePoint& p = pts_[i];
    if (!(p.beta >= 0.0 && p.beta <= 1.0)) {
      throw ContractError("beta outside [0,1] at alpha = " + fmt(p.alpha));
    }
    if (p.beta > 1.0 - p.alpha + tol) {
      throw ContractError("curve exceeds the triangle beta <= 1 - alpha at alpha = " +
                          fmt(p.alpha));
    }
    if (i == 0) continue;
    double da = p.alpha - pts_[i - 1].alpha;
    if (!(da > 0.0)) {
      throw ContractError("breakpoint abscissas must be strictly increasing");
    }
    double slope = (p.beta - pts_[i - 1].beta) / da;
    if (slope > tol) {
      throw ContractError("curve increases near alpha = " + fmt(p.alpha));
    }
    if (!slopes_nondecreasing(prev_slope, slope, tol)) {
      throw ContractError("convexity fails near alpha = " + fmt(pts_[i - 1].alpha));
    }
    prev_slope = slope;
  }
}

}  // namespace tradeoff
