#include "tradeoff/divisible.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "tradeoff/detail/kahan.hpp"
#include "tradeoff/stats.hpp"

namespace tradeoff {

namespace {

double poisson_pmf(double lambda, long long k) {
  return std::exp(static_cast<double>(k) * std::log(lambda) - lambda -
                  lgamma_fn(static_cast<double>(k) + 1.0));
}

// Mass of N(mean, sd^2) on [lo, hi), via the cancellation-safe tail.
double normal_bin_mass_ms(double lo, double hi, double mean, double sd) {
  double z0 = (lo - mean) / sd, z1 = (hi - mean) / sd;
  if (z0 + z1 > 0.0) return norm_cdf(-z0) - norm_cdf(-z1);
  return norm_cdf(z1) - norm_cdf(z0);
}

// Exact affine-Poisson log-ratio atoms: x_k = l1 - l2 + k log(l2/l1) with
// null mass Poisson(l1) and tilted mass Poisson(l2), on the union support.
LlrAtoms affine_poisson_atoms(double l1, double l2, double tail) {
  auto support_top = [&](double lambda) {
    DiscreteDist d = poisson_dist(lambda, tail);
    return static_cast<long long>(d.values.back());
  };
  const long long kmax = std::max(support_top(l1), support_top(l2));
  const double step = std::log(l2 / l1);
  const double shift = l1 - l2;

  LlrAtoms out;
  detail::KahanSum sp, sq;
  if (step == 0.0) {
    for (long long k = 0; k <= kmax; ++k) {
      sp.add(poisson_pmf(l1, k));
      sq.add(poisson_pmf(l2, k));
    }
    out.x = {0.0};
    out.p = {sp.value()};
    out.q = {sq.value()};
  } else {
    out.x.reserve(kmax + 1);
    for (long long k = 0; k <= kmax; ++k) {
      double pm = poisson_pmf(l1, k);
      double qm = poisson_pmf(l2, k);
      out.x.push_back(shift + static_cast<double>(k) * step);
      out.p.push_back(pm);
      out.q.push_back(qm);
      sp.add(pm);
      sq.add(qm);
    }
    if (step < 0.0) {
      std::reverse(out.x.begin(), out.x.end());
      std::reverse(out.p.begin(), out.p.end());
      std::reverse(out.q.begin(), out.q.end());
    }
  }
  out.p_deficit = std::max(0.0, 1.0 - sp.value());
  out.q_deficit = std::max(0.0, 1.0 - sq.value());
  return out;
}

// Weighted components with zero weights dropped and equal times merged,
// sorted by time.
std::vector<MixtureComponent> normalized_components(const MixtureSpec& spec) {
  spec.validate();
  std::vector<MixtureComponent> cs = spec.components;
  std::sort(cs.begin(), cs.end(), [](const MixtureComponent& a,
                                     const MixtureComponent& b) {
    return a.time < b.time;
  });
  std::vector<MixtureComponent> out;
  for (const MixtureComponent& c : cs) {
    if (c.weight <= 0.0) continue;
    if (!out.empty() &&
        c.time - out.back().time <= 1e-12 * std::max(1.0, c.time)) {
      out.back().weight += c.weight;
      continue;
    }
    out.push_back(c);
  }
  if (out.empty()) throw ContractError("mixture needs positive-weight components");
  return out;
}

}  // namespace

void IDPCurveSpec::validate() const {
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw ContractError("gaussian part needs finite k >= 0");
  }
  if (poisson.has_value()) {
    if (!(poisson->lambda1 > 0.0) || !(poisson->lambda2 > 0.0) ||
        !std::isfinite(poisson->lambda1) || !std::isfinite(poisson->lambda2)) {
      throw ContractError("poisson part needs finite positive intensities");
    }
  }
}

void MixtureSpec::validate() const {
  if (components.empty()) throw ContractError("mixture needs components");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ContractError("mixture scale must be finite and positive");
  }
  detail::KahanSum w;
  for (const MixtureComponent& c : components) {
    if (!(c.weight >= 0.0)) throw ContractError("mixture weights must be >= 0");
    if (!(c.time > 0.0) || !std::isfinite(c.time)) {
      throw ContractError("mixture times must be finite and positive");
    }
    w.add(c.weight);
  }
  if (std::abs(w.value() - 1.0) > 1e-12) {
    throw ConsistencyError("mixture weights must sum to 1",
                           std::abs(w.value() - 1.0));
  }
}

LlrAtoms idp_llr_atoms(const IDPCurveSpec& spec, const ComposeOptions& opt) {
  spec.validate();
  std::optional<LlrAtoms> atoms;
  if (spec.k > 0.0) {
    atoms = gaussian_llr_atoms(std::sqrt(2.0 * spec.k));
  }
  if (spec.poisson.has_value()) {
    LlrAtoms pois =
        affine_poisson_atoms(spec.poisson->lambda1, spec.poisson->lambda2, 1e-12);
    atoms = atoms.has_value() ? convolve(*atoms, pois, opt) : std::move(pois);
  }
  if (!atoms.has_value()) {
    LlrAtoms id;
    id.x = {0.0};
    id.p = {1.0};
    id.q = {1.0};
    atoms = std::move(id);
  }
  double z = atoms->tilt_normalizer() + atoms->q_deficit;
  if (std::abs(z - 1.0) > 1e-6) {
    throw ConsistencyError(
        "divisible spec does not tilt to a probability measure",
        std::abs(z - 1.0));
  }
  return *atoms;
}

TradeoffCurve idp_curve(const IDPCurveSpec& spec, const ComposeOptions& opt) {
  LlrAtoms atoms = idp_llr_atoms(spec, opt);
  double z = atoms.tilt_normalizer();
  TradeoffCurve c = curve_from_llr(atoms);
  c.metadata().tilt_normalizer = z;
  return c;
}

IDPCurveSpec divide_spec(const IDPCurveSpec& spec, long long n) {
  spec.validate();
  if (n < 1) throw UsageError("factor count must be >= 1");
  IDPCurveSpec out;
  const double nd = static_cast<double>(n);
  out.k = spec.k / nd;
  if (spec.poisson.has_value()) {
    out.poisson =
        PoissonComponent{spec.poisson->lambda1 / nd, spec.poisson->lambda2 / nd};
  }
  return out;
}

IDPCurveSpec add_specs(const IDPCurveSpec& a, const IDPCurveSpec& b) {
  a.validate();
  b.validate();
  IDPCurveSpec out;
  out.k = a.k + b.k;
  if (a.poisson.has_value() && b.poisson.has_value()) {
    double ra = a.poisson->lambda2 / a.poisson->lambda1;
    double rb = b.poisson->lambda2 / b.poisson->lambda1;
    if (std::abs(ra - rb) > 1e-9 * std::max(ra, rb)) {
      throw UsageError(
          "poisson parts with different intensity ratios do not sum inside "
          "the two-parameter family");
    }
    out.poisson = PoissonComponent{a.poisson->lambda1 + b.poisson->lambda1,
                                   a.poisson->lambda2 + b.poisson->lambda2};
  } else if (a.poisson.has_value()) {
    out.poisson = a.poisson;
  } else if (b.poisson.has_value()) {
    out.poisson = b.poisson;
  }
  return out;
}

MixtureResult mixture_curve_detail(const MixtureSpec& spec) {
  const std::vector<MixtureComponent> cs = normalized_components(spec);
  if (cs.size() == 1) {
    TradeoffCurve g =
        TradeoffCurve::gaussian(spec.sigma * std::sqrt(cs.front().time));
    return {g, g, 0.0};
  }

  std::vector<double> mu(cs.size()), half(cs.size());  // half = mu^2/2
  for (std::size_t i = 0; i < cs.size(); ++i) {
    mu[i] = spec.sigma * std::sqrt(cs[i].time);
    half[i] = 0.5 * mu[i] * mu[i];
  }

  // Equal-slope allocation: at shared log-slope y the component budgets are
  // t_i = 1 - Phi(z_i) with z_i = (y + mu_i^2/2)/mu_i; total alpha is their
  // weighted sum, decreasing in y. Both orientations of each coordinate are
  // evaluated directly so the small side never cancels against 1.
  struct EnvelopePoint {
    double a, a_bar, b, b_bar;
  };
  auto envelope_at = [&](double y) {
    EnvelopePoint e{0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double z = (y + half[i]) / mu[i];
      e.a += cs[i].weight * norm_cdf(-z);
      e.a_bar += cs[i].weight * norm_cdf(z);
      e.b += cs[i].weight * norm_cdf(z - mu[i]);
      e.b_bar += cs[i].weight * norm_cdf(mu[i] - z);
    }
    return e;
  };
  double y_lo = half.front(), y_hi = half.front();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    y_lo = std::min(y_lo, -12.0 * mu[i] - half[i]);
    y_hi = std::max(y_hi, 12.0 * mu[i] - half[i]);
  }

  // Sweeping y uniformly keeps the interpolant's chord error near kStep/4
  // everywhere, including the steep corner, because adjacent chords differ
  // in slope by the factor exp(kStep). Successive envelope points are
  // differenced into a discrete pair so the curve builder can group away
  // steps the stored doubles cannot resolve. Each difference is taken on
  // the orientation whose values are small there.
  constexpr double kStep = 2e-4;
  const auto sweeps =
      static_cast<std::size_t>(std::ceil((y_hi - y_lo) / kStep));
  LlrAtoms sweep;
  sweep.x.reserve(sweeps + 1);
  sweep.p.reserve(sweeps + 1);
  sweep.q.reserve(sweeps + 1);
  detail::KahanSum ssp, ssq;
  EnvelopePoint prev{1.0, 0.0, 0.0, 1.0};
  const auto push_piece = [&](const EnvelopePoint& cur) {
    const double pm = std::max(
        0.0, prev.a <= 0.5 ? prev.a - cur.a : cur.a_bar - prev.a_bar);
    const double qm = std::max(
        0.0, cur.b <= 0.5 ? cur.b - prev.b : prev.b_bar - cur.b_bar);
    if (pm > 0.0 || qm > 0.0) {
      sweep.x.push_back(std::log(qm) - std::log(pm));
      sweep.p.push_back(pm);
      sweep.q.push_back(qm);
      ssp.add(pm);
      ssq.add(qm);
    }
    prev = cur;
  };
  for (std::size_t j = 0; j <= sweeps; ++j) {
    const double y = y_lo + static_cast<double>(j) * kStep;
    push_piece(envelope_at(y));
  }
  push_piece(EnvelopePoint{0.0, 1.0, 1.0, 0.0});
  sweep.p_deficit = std::max(0.0, 1.0 - ssp.value());
  sweep.q_deficit = std::max(0.0, 1.0 - ssq.value());
  TradeoffCurve variational = curve_from_llr(sweep);
  variational.metadata().discretization_step = kStep;

  // Direct Neyman-Pearson on the mixture laws. The alternative of each
  // component is its Esscher tilt, so the mixture log-ratio at value v is v
  // itself; binning under both laws gives the conditional ratios.
  double lo = -half[0] - 8.0 * mu[0], hi = half[0] + 8.0 * mu[0];
  double h = mu[0];
  for (std::size_t i = 0; i < cs.size(); ++i) {
    lo = std::min(lo, -half[i] - 8.0 * mu[i]);
    hi = std::max(hi, half[i] + 8.0 * mu[i]);
    h = std::min(h, mu[i]);
  }
  h /= 2000.0;
  const auto nbins = static_cast<std::size_t>(std::ceil((hi - lo) / h));
  LlrAtoms atoms;
  detail::KahanSum sp, sq;
  for (std::size_t b = 0; b < nbins; ++b) {
    double e0 = lo + static_cast<double>(b) * h;
    double e1 = b + 1 == nbins ? hi : lo + static_cast<double>(b + 1) * h;
    double pm = 0.0, qm = 0.0;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      pm += cs[i].weight * normal_bin_mass_ms(e0, e1, -half[i], mu[i]);
      qm += cs[i].weight * normal_bin_mass_ms(e0, e1, half[i], mu[i]);
    }
    if (pm <= 0.0 && qm <= 0.0) continue;
    if (pm <= 0.0) {
      atoms.q_at_pos_inf += qm;
      sq.add(qm);
      continue;
    }
    if (qm <= 0.0) {
      atoms.p_at_neg_inf += pm;
      sp.add(pm);
      continue;
    }
    atoms.x.push_back(std::log(qm) - std::log(pm));
    atoms.p.push_back(pm);
    atoms.q.push_back(qm);
    sp.add(pm);
    sq.add(qm);
  }
  atoms.p_deficit = std::max(0.0, 1.0 - sp.value());
  atoms.q_deficit = std::max(0.0, 1.0 - sq.value());
  TradeoffCurve direct = curve_from_llr(atoms);

  double gap = variational.sup_distance(direct);
  if (gap > 1e-4) {
    throw ConsistencyError("mixture solvers disagree", gap);
  }
  variational.metadata().crosscheck_gap = gap;
  return {std::move(variational), std::move(direct), gap};
}

TradeoffCurve mixture_curve(const MixtureSpec& spec) {
  return mixture_curve_detail(spec).curve;
}

StoppingReport random_stopping_sim(const MixtureSpec& spec, long long n,
                                   const std::vector<std::uint64_t>& seeds) {
  if (n < 50) throw UsageError("stopping simulation needs n >= 50");
  if (seeds.empty()) throw UsageError("stopping simulation needs seeds");
  const std::vector<MixtureComponent> cs = normalized_components(spec);

  DiscreteDist tau;
  for (const MixtureComponent& c : cs) {
    tau.values.push_back(c.time);
    tau.masses.push_back(c.weight);
  }

  StoppingReport rep;
  rep.draw_counts.reserve(seeds.size());
  std::map<long long, long long> counts;
  for (std::uint64_t seed : seeds) {
    double t = sample(tau, seed, 1).front();
    long long draws = std::llround(static_cast<double>(n) * t);
    rep.draw_counts.push_back(draws);
    ++counts[draws];
  }

  // Mix through Bayes risks: the weighted-error functional is affine under
  // mixtures, so averaging the per-draw vectors mixes the experiments.
  constexpr double kLambdaStep = 1e-3;
  BayesRisk avg;
  bool first = true;
  for (const auto& [draws, count] : counts) {
    double m = spec.sigma *
               std::sqrt(static_cast<double>(draws) / static_cast<double>(n));
    BayesRisk b = TradeoffCurve::gaussian(m).to_bayes_risk(kLambdaStep);
    double w = static_cast<double>(count) / static_cast<double>(seeds.size());
    if (first) {
      avg.lambdas = b.lambdas;
      avg.risks.assign(b.risks.size(), 0.0);
      first = false;
    }
    for (std::size_t i = 0; i < b.risks.size(); ++i) {
      avg.risks[i] += w * b.risks[i];
    }
  }
  rep.empirical = TradeoffCurve::from_bayes_risk(avg);
  rep.levy_to_mixture = rep.empirical.levy_distance(mixture_curve(spec));
  return rep;
}

GaussianFit best_gaussian_fit(const TradeoffCurve& target) {
  auto dist = [&](double m) {
    return target.sup_distance(TradeoffCurve::gaussian(m), 1e-3);
  };
  double best_mu = 0.0, best_d = dist(0.0);
  constexpr double kStep = 0.05;
  for (double m = kStep; m <= 8.0 + 1e-12; m += kStep) {
    double d = dist(m);
    if (d < best_d) {
      best_d = d;
      best_mu = m;
    }
  }
  double lo = std::max(0.0, best_mu - kStep), hi = best_mu + kStep;
  const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - kGolden * (hi - lo), b = lo + kGolden * (hi - lo);
  double fa = dist(a), fb = dist(b);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kGolden * (hi - lo);
      fa = dist(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kGolden * (hi - lo);
      fb = dist(b);
    }
  }
  double mu = 0.5 * (lo + hi);
  double d = dist(mu);
  if (best_d < d) {
    mu = best_mu;
    d = best_d;
  }
  return {0.5 * mu * mu, d};
}

}  // namespace tradeoff
