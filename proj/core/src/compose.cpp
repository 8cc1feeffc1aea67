#include "tradeoff/compose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "tradeoff/detail/kahan.hpp"
#include "tradeoff/stats.hpp"

namespace tradeoff {

namespace {

constexpr double kRatioMergeTol = 1e-12;  // relative, on log-ratios

double kahan_total(const std::vector<double>& v) {
  detail::KahanSum s;
  for (double m : v) s.add(m);
  return s.value();
}

// Symbolic composition parameter when the operand is gaussian or identity.
std::optional<double> symbolic_mu(const TradeoffCurve& f) {
  if (f.form() == CurveForm::gaussian) return f.gaussian_mu();
  if (f.is_identity()) return 0.0;
  return std::nullopt;
}

LlrAtoms operand_atoms(const Composable& c) {
  if (c.pair().has_value()) return llr_atoms(*c.pair());
  if (c.curve().form() == CurveForm::gaussian) {
    return gaussian_llr_atoms(c.curve().gaussian_mu());
  }
  if (c.curve().is_identity()) {
    LlrAtoms id;
    id.x = {0.0};
    id.p = {1.0};
    id.q = {1.0};
    return id;
  }
  throw ContractError(
      "composition operand carries neither a discrete realization nor a "
      "gaussian closed form");
}

}  // namespace

Composable::Composable(TradeoffCurve f) : curve_(std::move(f)) {}

Composable::Composable(DiscretePair pair)
    : curve_(tradeoff::curve(ExperimentPair(pair))), pair_(std::move(pair)) {}

Composable::Composable(TradeoffCurve f, DiscretePair pair)
    : curve_(std::move(f)), pair_(std::move(pair)) {}

LlrAtoms rebin_atoms(const LlrAtoms& a, double grid_width) {
  if (!(grid_width > 0.0)) throw UsageError("rebin grid width must be > 0");
  if (a.size() <= 1) return a;
  const double x0 = a.x.front();
  const double range = a.x.back() - x0;
  const auto nbins = static_cast<std::size_t>(std::floor(range / grid_width)) + 1;
  if (nbins >= a.size()) return a;  // grid finer than the data; nothing to gain

  std::vector<detail::KahanSum> bp(nbins), bq(nbins);
  std::vector<double> x_lo(nbins, 0.0), x_hi(nbins, 0.0);
  std::vector<bool> used(nbins, false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto k = static_cast<std::size_t>((a.x[i] - x0) / grid_width);
    if (k >= nbins) k = nbins - 1;
    bp[k].add(a.p[i]);
    bq[k].add(a.q[i]);
    if (!used[k]) {
      used[k] = true;
      x_lo[k] = a.x[i];
    }
    x_hi[k] = a.x[i];  // ascending input keeps this the bin maximum
  }

  LlrAtoms out;
  out.p_at_neg_inf = a.p_at_neg_inf;
  out.q_at_pos_inf = a.q_at_pos_inf;
  out.p_deficit = a.p_deficit;
  out.q_deficit = a.q_deficit;
  double worst = 0.0;
  for (std::size_t k = 0; k < nbins; ++k) {
    if (!used[k]) continue;
    double pm = bp[k].value(), qm = bq[k].value();
    if (pm <= 0.0 && qm <= 0.0) continue;
    if (pm <= 0.0) {
      out.q_at_pos_inf += qm;
      continue;
    }
    if (qm <= 0.0) {
      out.p_at_neg_inf += pm;
      continue;
    }
    // Merging atoms spanning log-ratio width s moves the curve by at most
    // q_bin (e^s - 1)/4: the chord-versus-corner gap of the NP polygon.
    double span = x_hi[k] - x_lo[k];
    if (span > 0.0) worst = std::max(worst, qm * std::expm1(span) / 4.0);
    out.x.push_back(span == 0.0 ? x_lo[k] : std::log(qm) - std::log(pm));
    out.p.push_back(pm);
    out.q.push_back(qm);
  }
  out.rebin_error_bound = a.rebin_error_bound + worst;
  return out;
}

LlrAtoms convolve(const LlrAtoms& a_in, const LlrAtoms& b_in,
                  const ComposeOptions& opt) {
  LlrAtoms a = a_in, b = b_in;
  const auto target =
      static_cast<std::size_t>(std::sqrt(static_cast<double>(opt.working_cap)));
  auto shrink = [&](LlrAtoms& v) {
    if (v.size() <= target || v.size() < 2) return;
    double range = v.x.back() - v.x.front();
    if (range <= 0.0) return;
    v = rebin_atoms(v, range / static_cast<double>(target));
  };
  if (a.size() * std::max<std::size_t>(b.size(), 1) > opt.working_cap) {
    shrink(a);
    shrink(b);
  }

  const double fa = kahan_total(a.p), fb = kahan_total(b.p);
  const double ga = kahan_total(a.q), gb = kahan_total(b.q);

  struct Atom {
    double x, p, q;
  };
  std::vector<Atom> prod;
  prod.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double pp = a.p[i] * b.p[j];
      double qq = a.q[i] * b.q[j];
      if (pp <= 0.0 && qq <= 0.0) continue;  // underflowed to nothing
      prod.push_back({a.x[i] + b.x[j], pp, qq});
    }
  }
  std::sort(prod.begin(), prod.end(),
            [](const Atom& u, const Atom& v) { return u.x < v.x; });

  LlrAtoms out;
  out.rebin_error_bound = a.rebin_error_bound + b.rebin_error_bound;
  // Singular masses multiply out exactly: -inf absorbs every null pairing,
  // +inf every alternative pairing.
  out.p_at_neg_inf =
      a.p_at_neg_inf * fb + fa * b.p_at_neg_inf + a.p_at_neg_inf * b.p_at_neg_inf;
  out.q_at_pos_inf =
      a.q_at_pos_inf * gb + ga * b.q_at_pos_inf + a.q_at_pos_inf * b.q_at_pos_inf;

  std::size_t i = 0;
  while (i < prod.size()) {
    const double x0 = prod[i].x;
    const double tol = kRatioMergeTol * std::max(1.0, std::abs(x0));
    double mp = 0.0, mq = 0.0;
    std::size_t j = i;
    for (; j < prod.size() && prod[j].x - x0 <= tol; ++j) {
      mp += prod[j].p;
      mq += prod[j].q;
    }
    if (mp <= 0.0 && mq <= 0.0) {
      i = j;
      continue;
    }
    if (mp <= 0.0) {
      out.q_at_pos_inf += mq;
    } else if (mq <= 0.0) {
      out.p_at_neg_inf += mp;
    } else {
      // Exact ties keep their value; near-ties take the conditional ratio.
      out.x.push_back(prod[j - 1].x == x0 ? x0 : std::log(mq) - std::log(mp));
      out.p.push_back(mp);
      out.q.push_back(mq);
    }
    i = j;
  }

  // Deficits close the mass balance exactly; truncation from both operands
  // and anything dropped above lands here.
  out.p_deficit = std::max(0.0, 1.0 - kahan_total(out.p) - out.p_at_neg_inf);
  out.q_deficit = std::max(0.0, 1.0 - kahan_total(out.q) - out.q_at_pos_inf);

  if (out.size() > opt.atom_cap) {
    double range = out.x.back() - out.x.front();
    out = rebin_atoms(out, range / static_cast<double>(opt.atom_cap));
  }
  return out;
}

LlrAtoms atoms_from_curve(const TradeoffCurve& f) {
  if (f.form() == CurveForm::gaussian) {
    return gaussian_llr_atoms(f.gaussian_mu());
  }
  const TradeoffCurve pl =
      f.form() == CurveForm::piecewise_linear ? f : f.discretized();
  const auto& pts = pl.breakpoints();
  LlrAtoms out;
  out.q_at_pos_inf = 1.0 - pts.front().beta;
  // Walk segments from the shallow end so log-ratios come out ascending.
  for (std::size_t i = pts.size(); i-- > 1;) {
    double w = pts[i].alpha - pts[i - 1].alpha;
    double drop = pts[i - 1].beta - pts[i].beta;
    if (w <= 0.0) continue;
    if (drop <= 0.0) {
      out.p_at_neg_inf += w;
      continue;
    }
    double x = std::log(drop) - std::log(w);
    if (!out.x.empty() &&
        x - out.x.back() <= kRatioMergeTol * std::max(1.0, std::abs(x))) {
      out.p.back() += w;
      out.q.back() += drop;
      continue;
    }
    out.x.push_back(x);
    out.p.push_back(w);
    out.q.push_back(drop);
  }
  return out;
}

TradeoffCurve tensor(const Composable& f, const Composable& g,
                     const ComposeOptions& opt) {
  if (f.curve().is_identity()) return g.curve();
  if (g.curve().is_identity()) return f.curve();
  auto mf = symbolic_mu(f.curve());
  auto mg = symbolic_mu(g.curve());
  if (mf && mg) return TradeoffCurve::gaussian(std::hypot(*mf, *mg));
  return curve_from_llr(convolve(operand_atoms(f), operand_atoms(g), opt));
}

TradeoffCurve self_compose(const ExperimentPair& pair, long long n,
                           const ComposeOptions& opt) {
  if (n < 1) throw UsageError("composition count must be >= 1");
  if (const auto* g = std::get_if<AnalyticGaussianPair>(&pair)) {
    return TradeoffCurve::gaussian(std::abs(g->mu) *
                                   std::sqrt(static_cast<double>(n)));
  }
  if (const auto* s = std::get_if<ShiftPair>(&pair)) {
    if (s->family.kind == ShiftFamily::Kind::gaussian) {
      return TradeoffCurve::gaussian(std::abs(s->mu) / s->family.scale *
                                     std::sqrt(static_cast<double>(n)));
    }
  }
  if (n == 1) return curve(pair);

  LlrAtoms base = experiment_llr_atoms(pair);
  LlrAtoms acc;
  bool have = false;
  for (long long m = n; m > 0; m >>= 1) {
    if (m & 1) {
      acc = have ? convolve(acc, base, opt) : base;
      have = true;
    }
    if (m > 1) base = convolve(base, base, opt);
  }
  return curve_from_llr(acc);
}

TradeoffCurve clt_limit(double kl_sum, double kappa2_sum) {
  if (!(kappa2_sum > 0.0)) {
    throw UsageError("second-moment sum must be positive");
  }
  if (!(kl_sum >= 0.0)) {
    throw UsageError("divergence sum must be nonnegative");
  }
  return TradeoffCurve::gaussian(2.0 * kl_sum / std::sqrt(kappa2_sum));
}

ConvergenceReport compose_convergence(const ExperimentPair& pair, long long n,
                                      const ComposeOptions& opt) {
  TradeoffCurve fn = self_compose(pair, n, opt);
  MomentFunctionals m = moment_functionals(curve(pair));
  if (!m.finite) {
    throw ContractError(
        "per-step log-ratio moments are infinite; no gaussian comparator");
  }
  const double nd = static_cast<double>(n);
  const double kl_sum = nd * m.kl;
  const double centered = nd * (m.kappa2 - m.kl * m.kl);
  TradeoffCurve limit = (kl_sum == 0.0 && centered <= 0.0)
                            ? TradeoffCurve::gaussian(0.0)
                            : clt_limit(kl_sum, centered);
  ConvergenceReport r;
  r.n = n;
  r.sup_distance_to_limit = fn.sup_distance(limit);
  r.levy_distance_to_limit = fn.levy_distance(limit);
  return r;
}

LdpReport ldp_rate(const TradeoffCurve& f, const std::vector<long long>& n_list,
                   double alpha, const ComposeOptions& opt) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw UsageError("type-I budget must lie strictly inside (0,1)");
  }
  if (n_list.empty()) throw UsageError("need at least one composition count");
  for (long long n : n_list) {
    if (n < 1) throw UsageError("composition counts must be >= 1");
  }

  LdpReport rep;
  rep.alpha = alpha;
  rep.n = n_list;

  if (f.form() == CurveForm::gaussian) {
    // Quadrature integral on one side, symbolic composition on the other:
    // genuinely independent routes.
    rep.analytic_rate = -moment_functionals(f).kl;
    const double mu = f.gaussian_mu();
    const double z = norm_quantile_upper(alpha);
    for (long long n : n_list) {
      double nd = static_cast<double>(n);
      double lg = mu == 0.0 ? std::log1p(-alpha)
                            : log_norm_cdf(z - mu * std::sqrt(nd));
      rep.empirical.push_back(lg / nd);
    }
  } else {
    const TradeoffCurve pl =
        f.form() == CurveForm::piecewise_linear ? f : f.discretized();
    const auto& pts = pl.breakpoints();
    detail::KahanSum rate;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      double w = pts[i].alpha - pts[i - 1].alpha;
      double drop = pts[i - 1].beta - pts[i].beta;
      if (w <= 0.0 || drop <= 0.0) continue;  // flat tail lies past f^{-1}(0)
      rate.add(w * (std::log(drop) - std::log(w)));
    }
    rep.analytic_rate = rate.value();

    LlrAtoms unit = atoms_from_curve(pl);
    for (long long n : n_list) {
      LlrAtoms base = unit, acc;
      bool have = false;
      for (long long m = n; m > 0; m >>= 1) {
        if (m & 1) {
          acc = have ? convolve(acc, base, opt) : base;
          have = true;
        }
        if (m > 1) base = convolve(base, base, opt);
      }
      double beta = curve_from_llr(acc).eval(alpha);
      rep.empirical.push_back(
          beta > 0.0 ? std::log(beta) / static_cast<double>(n)
                     : -std::numeric_limits<double>::infinity());
    }
  }
  rep.gap = std::abs(rep.empirical.back() - rep.analytic_rate);
  return rep;
}

}  // namespace tradeoff
