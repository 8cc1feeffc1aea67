#include "tradeoff/neyman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tradeoff/detail/kahan.hpp"

namespace tradeoff {

namespace {

// 16-point Gauss-Legendre rule on [-1, 1] (positive abscissas; symmetric).
constexpr int kGlPoints = 8;
constexpr double kGlX[kGlPoints] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlW[kGlPoints] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

// integral of g(z) phi(z) dz over [-12, 12] by composite Gauss-Legendre.
template <typename G>
double gaussian_weighted_integral(G&& g) {
  constexpr double kHalfWidth = 12.0;
  constexpr int kPanels = 96;
  const double h = 2.0 * kHalfWidth / kPanels;
  detail::KahanSum total;
  for (int p = 0; p < kPanels; ++p) {
    double mid = -kHalfWidth + (p + 0.5) * h;
    for (int i = 0; i < kGlPoints; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        double z = mid + sgn * 0.5 * h * kGlX[i];
        total.add(0.5 * h * kGlW[i] * g(z) * norm_pdf(z));
      }
    }
  }
  return total.value();
}

// Mass of a standard normal on [z_lo, z_hi], evaluated on whichever tail
// keeps the CDF difference relatively accurate.
double normal_bin_mass(double z_lo, double z_hi) {
  if (z_lo + z_hi > 0.0) return norm_cdf(-z_lo) - norm_cdf(-z_hi);
  return norm_cdf(z_hi) - norm_cdf(z_lo);
}

constexpr double kRatioMergeTol = 1e-12;  // relative, on log-ratios

}  // namespace

DiscretePair DiscretePair::from_dists(const DiscreteDist& null_dist,
                                      const DiscreteDist& alt_dist,
                                      const DiscreteOptions& opt) {
  DiscretePair out;
  out.p_deficit = null_dist.deficit;
  out.q_deficit = alt_dist.deficit;
  std::size_t i = 0, j = 0;
  while (i < null_dist.size() || j < alt_dist.size()) {
    bool take_p = j >= alt_dist.size();
    bool take_q = i >= null_dist.size();
    if (!take_p && !take_q) {
      double dv = null_dist.values[i] - alt_dist.values[j];
      if (std::abs(dv) <= opt.value_merge_tol) {
        out.labels.push_back(null_dist.values[i]);
        out.p.push_back(null_dist.masses[i]);
        out.q.push_back(alt_dist.masses[j]);
        ++i;
        ++j;
        continue;
      }
      (dv < 0.0 ? take_p : take_q) = true;
    }
    if (take_p) {
      out.labels.push_back(null_dist.values[i]);
      out.p.push_back(null_dist.masses[i]);
      out.q.push_back(0.0);
      ++i;
    } else {
      out.labels.push_back(alt_dist.values[j]);
      out.p.push_back(0.0);
      out.q.push_back(alt_dist.masses[j]);
      ++j;
    }
  }
  return out;
}

void DiscretePair::validate(double tol) const {
  if (labels.size() != p.size() || labels.size() != q.size() || labels.empty()) {
    throw ContractError("experiment pair arrays must be nonempty and aligned");
  }
  detail::KahanSum sp, sq;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0 && !(labels[i] > labels[i - 1])) {
      throw ContractError("experiment labels must be strictly increasing");
    }
    if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) {
      throw ContractError("experiment masses must be nonnegative");
    }
    sp.add(p[i]);
    sq.add(q[i]);
  }
  double gp = std::abs(sp.value() + p_deficit - 1.0);
  double gq = std::abs(sq.value() + q_deficit - 1.0);
  if (gp > tol || gq > tol) {
    throw ConsistencyError("experiment masses plus deficit must sum to 1",
                           std::max(gp, gq));
  }
}

DiscretePair poisson_pair(double lambda1, double lambda2, double tail,
                          const DiscreteOptions& opt) {
  for (double l : {lambda1, lambda2}) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw UsageError("poisson pair rates must be finite and positive");
    }
  }
  if (!(tail > 0.0 && tail < 1.0)) {
    throw UsageError("poisson truncation tail must lie in (0, 1)");
  }

  // Both pmfs are evaluated over the union of the two truncation windows;
  // truncating each law separately would misread the other's genuine mass
  // beyond the shorter window as singular.
  auto window_top = [tail](double lambda) {
    detail::KahanSum cum;
    double log_lambda = std::log(lambda);
    auto cap = static_cast<std::size_t>(lambda +
                                        40.0 * std::sqrt(lambda + 1.0) + 60.0);
    std::size_t k = 0;
    for (; k <= cap; ++k) {
      cum.add(std::exp(-lambda + static_cast<double>(k) * log_lambda -
                       lgamma_fn(static_cast<double>(k) + 1.0)));
      if (static_cast<double>(k) >= lambda && 1.0 - cum.value() < tail) break;
    }
    return k;
  };
  const std::size_t top = std::max(window_top(lambda1), window_top(lambda2));

  DiscretePair out;
  detail::KahanSum sp, sq;
  const double ll1 = std::log(lambda1);
  const double ll2 = std::log(lambda2);
  for (std::size_t k = 0; k <= top; ++k) {
    double kk = static_cast<double>(k);
    double lg = lgamma_fn(kk + 1.0);
    double p = std::exp(-lambda1 + kk * ll1 - lg);
    double q = std::exp(-lambda2 + kk * ll2 - lg);
    if (p < opt.prune_threshold && q < opt.prune_threshold) continue;
    out.labels.push_back(kk);
    out.p.push_back(p);
    out.q.push_back(q);
    sp.add(p);
    sq.add(q);
  }
  out.p_deficit = std::max(0.0, 1.0 - sp.value());
  out.q_deficit = std::max(0.0, 1.0 - sq.value());
  return out;
}

DiscretePair bernoulli_pair(double p1, double p2) {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
    throw UsageError("bernoulli success probabilities must lie in [0,1]");
  }
  DiscretePair out;
  out.labels = {0.0, 1.0};
  out.p = {1.0 - p1, p1};
  out.q = {1.0 - p2, p2};
  return out;
}

double LlrAtoms::tilt_normalizer() const {
  detail::KahanSum s;
  for (double m : q) s.add(m);
  return s.value();
}

LlrAtoms llr_atoms(const DiscretePair& e) {
  struct Atom {
    double x, p, q;
  };
  std::vector<Atom> atoms;
  atoms.reserve(e.size());
  LlrAtoms out;
  out.p_deficit = e.p_deficit;
  out.q_deficit = e.q_deficit;
  detail::KahanSum neg, pos;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double pm = e.p[i], qm = e.q[i];
    if (pm > 0.0 && qm > 0.0) {
      atoms.push_back({std::log(qm) - std::log(pm), pm, qm});
    } else if (pm > 0.0) {
      neg.add(pm);
    } else if (qm > 0.0) {
      pos.add(qm);
    }
  }
  out.p_at_neg_inf = neg.value();
  out.q_at_pos_inf = pos.value();

  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.x < b.x; });
  // Merge ratio ties: atoms this close share one randomized test segment.
  std::size_t i = 0;
  while (i < atoms.size()) {
    double x0 = atoms[i].x;
    detail::KahanSum mp, mq;
    std::size_t j = i;
    double tol = kRatioMergeTol * std::max(1.0, std::abs(x0));
    for (; j < atoms.size() && atoms[j].x - x0 <= tol; ++j) {
      mp.add(atoms[j].p);
      mq.add(atoms[j].q);
    }
    out.p.push_back(mp.value());
    out.q.push_back(mq.value());
    // Conditional log-ratio of the merged group, exact for true ties.
    out.x.push_back(std::log(mq.value()) - std::log(mp.value()));
    i = j;
  }
  return out;
}

LlrAtoms gaussian_llr_atoms(double mu, const GaussianDiscretization& d) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw UsageError("gaussian llr discretization needs finite mu >= 0");
  }
  LlrAtoms out;
  if (mu == 0.0) {
    out.x = {0.0};
    out.p = {1.0};
    out.q = {1.0};
    return out;
  }
  const double k = 0.5 * mu * mu;  // null mean -k, tilted mean +k
  const double s = mu;             // common standard deviation
  const double lo = -k - d.window_sigmas * s;
  const double hi = k + d.window_sigmas * s;
  const double h = s / d.step_divisor;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h));
  out.x.reserve(n);
  out.p.reserve(n);
  out.q.reserve(n);
  detail::KahanSum sp, sq;
  for (std::size_t j = 0; j < n; ++j) {
    double e0 = lo + static_cast<double>(j) * h;
    double e1 = j + 1 == n ? hi : lo + static_cast<double>(j + 1) * h;
    double pm = normal_bin_mass((e0 + k) / s, (e1 + k) / s);
    double qm = normal_bin_mass((e0 - k) / s, (e1 - k) / s);
    if (pm <= 0.0 && qm <= 0.0) continue;
    if (pm <= 0.0) {
      out.q_at_pos_inf += qm;
      sq.add(qm);
      continue;
    }
    if (qm <= 0.0) {
      out.p_at_neg_inf += pm;
      sp.add(pm);
      continue;
    }
    out.x.push_back(std::log(qm) - std::log(pm));
    out.p.push_back(pm);
    out.q.push_back(qm);
    sp.add(pm);
    sq.add(qm);
  }
  out.p_deficit = std::max(0.0, 1.0 - sp.value());
  out.q_deficit = std::max(0.0, 1.0 - sq.value());
  return out;
}

TradeoffCurve curve_from_llr(const LlrAtoms& atoms) {
  const std::size_t m = atoms.size();
  // Suffix sums of the alternative mass from the small-ratio end keep the
  // type-II error accurate deep in the tail.
  std::vector<double> q_below(m);
  {
    detail::KahanSum s;
    for (std::size_t i = 0; i < m; ++i) {
      q_below[i] = s.value();
      s.add(atoms.q[i]);
    }
  }

  // A vertex per atom is not representable: where a group of atoms moves
  // alpha or beta by only a few ulps of their running totals, the slopes
  // recovered from the stored doubles wobble and convexity validation
  // rightly rejects them. Atoms are therefore grouped until the log-ratio
  // span of the group exceeds the rounding noise of its chord slope by a
  // safety factor, and one vertex is emitted per group. Each emitted
  // vertex still lies on the exact optimal-test curve, and the chord
  // across a group stays within ~2*kappa*eps of it, because the grouping
  // condition itself caps the mass a group may hold before its span is
  // wide enough to emit.
  constexpr double kappa = 32.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const auto clamp_x = [](double x) {
    return std::min(745.0, std::max(-745.0, x));
  };

  std::vector<CurvePoint> pts;
  pts.reserve(m + 2);
  pts.push_back({0.0, 1.0 - atoms.q_at_pos_inf - atoms.q_deficit});
  detail::KahanSum alpha;
  double run_p = 0.0, run_q = 0.0;
  double run_x0 = 0.0;
  double level_b = 1.0;
  bool in_run = false;
  const auto emit = [&](double beta) {
    // Clamp single-ulp rounding inversions; both sequences are monotone in
    // exact arithmetic.
    double a = std::max(alpha.value(), pts.back().alpha);
    double b = std::min(beta, pts.back().beta);
    pts.push_back({a, b});
    in_run = false;
  };
  for (std::size_t i = m; i-- > 0;) {
    alpha.add(atoms.p[i]);
    if (!in_run) {
      run_p = run_q = 0.0;
      run_x0 = clamp_x(atoms.x[i]);
      level_b = pts.back().beta;
      in_run = true;
    }
    run_p += atoms.p[i];
    run_q += atoms.q[i];
    if (i == 0) {
      emit(q_below[i]);
      break;
    }
    if (run_p <= 0.0 || run_q <= 0.0) continue;
    // Both coordinate steps must clear the rounding floor of their own
    // magnitude before a vertex can be distinguished from its neighbor at
    // all.
    if (run_q < 4.0 * eps * level_b) continue;
    if (run_p < 4.0 * eps * alpha.value()) continue;
    // Span from the run's first ratio across the boundary to the next atom:
    // the vertex after atom i is resolvable only when the slope changes by
    // more than the rounding noise of the group's chord.
    const double dx = run_x0 - clamp_x(atoms.x[i - 1]);
    // Slope noise is ~eps at the magnitude of each coordinate's upper end,
    // relative to how far the group moved that coordinate.
    const double need =
        kappa * eps * (level_b / run_q + alpha.value() / run_p);
    if (std::expm1(dx) >= need) emit(q_below[i]);
  }
  pts.push_back({1.0, 0.0});

  CurveMetadata meta;
  double deficit = atoms.p_deficit + atoms.q_deficit;
  if (deficit > 0.0) meta.deficit = deficit;
  if (atoms.rebin_error_bound > 0.0) {
    meta.composition_error_bound = atoms.rebin_error_bound;
  }
  return TradeoffCurve::from_breakpoints(std::move(pts), std::move(meta));
}

DiscretePair pair_from_llr(const LlrAtoms& atoms) {
  DiscretePair out;
  out.p_deficit = atoms.p_deficit;
  out.q_deficit = atoms.q_deficit;
  double lo_label =
      (atoms.size() ? atoms.x.front() : 0.0) - 1.0;
  double hi_label = (atoms.size() ? atoms.x.back() : 0.0) + 1.0;
  if (atoms.p_at_neg_inf > 0.0) {
    out.labels.push_back(lo_label);
    out.p.push_back(atoms.p_at_neg_inf);
    out.q.push_back(0.0);
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    out.labels.push_back(atoms.x[i]);
    out.p.push_back(atoms.p[i]);
    out.q.push_back(atoms.q[i]);
  }
  if (atoms.q_at_pos_inf > 0.0) {
    out.labels.push_back(hi_label);
    out.p.push_back(0.0);
    out.q.push_back(atoms.q_at_pos_inf);
  }
  return out;
}

TradeoffCurve curve(const ExperimentPair& e, int quantile_cells) {
  if (const auto* d = std::get_if<DiscretePair>(&e)) {
    d->validate(1e-9);
    return curve_from_llr(llr_atoms(*d));
  }
  if (const auto* g = std::get_if<AnalyticGaussianPair>(&e)) {
    return TradeoffCurve::gaussian(std::abs(g->mu));
  }
  const auto& sp = std::get<ShiftPair>(e);
  const double mu = std::abs(sp.mu) / sp.family.scale;
  if (sp.family.kind == ShiftFamily::Kind::gaussian) {
    return TradeoffCurve::gaussian(mu);
  }
  if (quantile_cells < 2) throw UsageError("quantile grid needs at least 2 cells");
  // Shift-family closed form F(F^-1(1-alpha) - mu), sampled on a uniform
  // alpha grid; the sample points lie on the true convex curve.
  ShiftFamily std_family(sp.family.kind);  // standardized units
  std::vector<CurvePoint> pts;
  pts.reserve(static_cast<std::size_t>(quantile_cells) + 1);
  pts.push_back({0.0, 1.0});
  for (int j = 1; j < quantile_cells; ++j) {
    double a = static_cast<double>(j) / quantile_cells;
    pts.push_back({a, std_family.cdf(std_family.quantile_upper(a) - mu)});
  }
  pts.push_back({1.0, 0.0});
  CurveMetadata meta;
  meta.discretization_step = 1.0 / quantile_cells;
  return TradeoffCurve::from_breakpoints(std::move(pts), std::move(meta));
}

LlrAtoms experiment_llr_atoms(const ExperimentPair& e,
                              const GaussianDiscretization& d,
                              int quantile_cells) {
  if (const auto* dp = std::get_if<DiscretePair>(&e)) {
    dp->validate(1e-9);
    return llr_atoms(*dp);
  }
  if (const auto* g = std::get_if<AnalyticGaussianPair>(&e)) {
    return gaussian_llr_atoms(std::abs(g->mu), d);
  }
  const auto& sp = std::get<ShiftPair>(e);
  const double mu = std::abs(sp.mu) / sp.family.scale;
  if (sp.family.kind == ShiftFamily::Kind::gaussian) {
    return gaussian_llr_atoms(mu, d);
  }
  // Quantile-cell midpoint discretization of the continuous log-ratio.
  ShiftFamily std_family(sp.family.kind);
  const int n = quantile_cells;
  if (n < 2) throw UsageError("quantile grid needs at least 2 cells");
  LlrAtoms raw;
  auto log_density = [&](double v) {
    return -std::abs(v);  // laplace standard density, up to a constant
  };
  for (int j = 0; j < n; ++j) {
    double u = (j + 0.5) / n;
    double v = std_family.quantile(u);
    double x = log_density(v - mu) - log_density(v);
    raw.x.push_back(x);
    raw.p.push_back(1.0 / n);
    raw.q.push_back(std::exp(x) / n);
  }
  std::vector<std::size_t> order(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raw.x[a] < raw.x[b];
  });
  LlrAtoms sorted;
  for (std::size_t i : order) {
    // Merge equal ratios (the bounded laplace log-ratio has flat caps).
    if (!sorted.x.empty() && raw.x[i] - sorted.x.back() <=
            kRatioMergeTol * std::max(1.0, std::abs(sorted.x.back()))) {
      sorted.p.back() += raw.p[i];
      sorted.q.back() += raw.q[i];
      continue;
    }
    sorted.x.push_back(raw.x[i]);
    sorted.p.push_back(raw.p[i]);
    sorted.q.push_back(raw.q[i]);
  }
  return sorted;
}

LLRDist llr(const ExperimentPair& e, const GaussianDiscretization& d,
            int quantile_cells) {
  LlrAtoms atoms = experiment_llr_atoms(e, d, quantile_cells);
  // Support truncation can fabricate a whiff of alternative-only mass; only
  // structural mass beyond this scale is a genuine contiguity violation.
  constexpr double kContiguityTol = 1e-9;
  if (atoms.q_at_pos_inf > kContiguityTol) {
    throw ContiguityError(
        "alternative carries mass where the null vanishes; the log-ratio law "
        "under the null cannot represent it",
        atoms.q_at_pos_inf);
  }
  atoms.q_deficit += atoms.q_at_pos_inf;
  atoms.q_at_pos_inf = 0.0;
  LLRDist out;
  out.under_null.values = atoms.x;
  out.under_null.masses = atoms.p;
  out.under_null.deficit = atoms.p_deficit;
  out.minus_inf_mass = atoms.p_at_neg_inf;
  out.plus_inf_mass = 0.0;
  out.tilt_normalizer = atoms.tilt_normalizer();
  return out;
}

MomentFunctionals moment_functionals(const TradeoffCurve& f) {
  MomentFunctionals out;
  if (f.form() == CurveForm::gaussian) {
    const double mu = f.gaussian_mu();
    const double k = 0.5 * mu * mu;
    // Substituting alpha = 1 - Phi(z) turns each integral over alpha into a
    // gaussian-weighted integral of a polynomial in (mu z - k).
    auto ell = [&](double z) { return mu * z - k; };
    out.kl = gaussian_weighted_integral([&](double z) { return -ell(z); });
    out.kappa2 = gaussian_weighted_integral([&](double z) {
      double l = ell(z);
      return l * l;
    });
    out.kappa3 = gaussian_weighted_integral([&](double z) {
      double l = std::abs(ell(z));
      return l * l * l;
    });
    const double kl = out.kl;
    out.kappa3_centered = gaussian_weighted_integral([&](double z) {
      double l = std::abs(ell(z) + kl);
      return l * l * l;
    });
    return out;
  }

  const TradeoffCurve pl =
      f.form() == CurveForm::piecewise_linear ? f : f.discretized();
  const auto& pts = pl.breakpoints();
  detail::KahanSum kl, k2, k3;
  std::vector<std::pair<double, double>> segs;  // (width, log|slope|)
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double w = pts[i].alpha - pts[i - 1].alpha;
    if (w <= 0.0) continue;
    double slope = (pts[i].beta - pts[i - 1].beta) / w;
    if (slope == 0.0) {
      // Flat piece of positive width: log|f'| is not integrable.
      const double inf = std::numeric_limits<double>::infinity();
      return {inf, inf, inf, inf, false};
    }
    double l = std::log(-slope);
    segs.emplace_back(w, l);
    kl.add(-w * l);
    k2.add(w * l * l);
    k3.add(w * std::abs(l * l * l));
  }
  out.kl = kl.value();
  out.kappa2 = k2.value();
  out.kappa3 = k3.value();
  detail::KahanSum kc;
  for (auto& [w, l] : segs) {
    double c = std::abs(l + out.kl);
    kc.add(w * c * c * c);
  }
  out.kappa3_centered = kc.value();
  return out;
}

double llr_identity_check(const ExperimentPair& e) {
  const auto* d = std::get_if<DiscretePair>(&e);
  if (d == nullptr) {
    throw UsageError("the log-ratio identity check applies to discrete pairs");
  }
  LlrAtoms atoms = llr_atoms(*d);
  // Reconstruct the alternative masses through the exponential of the atom
  // values instead of reusing the stored duals: an independent route.
  DiscretePair lp = pair_from_llr(atoms);
  for (std::size_t i = 0; i < lp.size(); ++i) {
    if (lp.p[i] > 0.0 && lp.q[i] > 0.0) {
      lp.q[i] = std::exp(lp.labels[i]) * lp.p[i];
    }
  }
  TradeoffCurve direct = curve(e);
  TradeoffCurve through_llr = curve_from_llr(llr_atoms(lp));
  return direct.sup_distance(through_llr);
}

}  // namespace tradeoff
