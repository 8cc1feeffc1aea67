#include "tradeoff/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "tradeoff/detail/kahan.hpp"
#include "tradeoff/stats.hpp"

namespace tradeoff {

namespace {

constexpr double kExpOverflow = 709.0;  // exp() overflows to inf above this

bool is_nonneg_integer(double v, double tol = 1e-9) {
  if (v < -tol) return false;
  return std::abs(v - std::round(v)) <= tol;
}

void require_integer_support(const DiscreteDist& p, const char* kernel_name) {
  for (double v : p.values) {
    if (!is_nonneg_integer(v)) {
      throw UsageError(std::string(kernel_name) +
                       " kernel requires a nonnegative-integer support, got value " +
                       std::to_string(v));
    }
  }
}

void check_partition(const IntervalPartition& part) {
  auto bad = std::adjacent_find(part.cuts.begin(), part.cuts.end(),
                                [](double a, double b) { return a >= b; });
  if (bad != part.cuts.end()) {
    throw PartitionError("partition cut points must be strictly increasing");
  }
}

}  // namespace

DiscreteDist DiscreteDist::from_atoms(std::vector<std::pair<double, double>> atoms,
                                      const DiscreteOptions& opt) {
  DiscreteDist out;
  for (const auto& [v, m] : atoms) {
    if (!std::isfinite(v)) throw UsageError("atom value must be finite");
    if (!(m >= 0.0)) throw UsageError("atom mass must be nonnegative");
  }
  std::sort(atoms.begin(), atoms.end());

  std::size_t i = 0;
  detail::KahanSum pruned;
  while (i < atoms.size()) {
    // Cluster values within the merge tolerance of the cluster's first value
    // so a chain of near-ties cannot drift.
    double start = atoms[i].first;
    detail::KahanSum mass;
    double weighted = 0.0;
    std::size_t j = i;
    for (; j < atoms.size() && atoms[j].first - start <= opt.value_merge_tol; ++j) {
      mass.add(atoms[j].second);
      weighted += atoms[j].first * atoms[j].second;
    }
    double m = mass.value();
    if (m < opt.prune_threshold) {
      pruned.add(m);
    } else {
      out.values.push_back(weighted / m);
      out.masses.push_back(m);
    }
    i = j;
  }
  out.deficit = pruned.value();
  return out;
}

DiscreteDist DiscreteDist::point(double value) {
  DiscreteDist d;
  d.values = {value};
  d.masses = {1.0};
  return d;
}

double DiscreteDist::total_mass() const {
  detail::KahanSum s;
  for (double m : masses) s.add(m);
  return s.value();
}

double DiscreteDist::mean() const {
  detail::KahanSum s;
  for (std::size_t i = 0; i < values.size(); ++i) s.add(values[i] * masses[i]);
  return s.value();
}

void DiscreteDist::validate_probability(double tol) const {
  for (double m : masses) {
    if (!(m >= 0.0) || m > 1.0 + tol) {
      throw ConsistencyError("atom mass outside [0, 1]", m);
    }
  }
  double gap = std::abs(total_mass() + deficit - 1.0);
  if (!(gap <= tol)) {
    throw ConsistencyError("total mass plus deficit must be 1", gap);
  }
}

DiscreteDist poisson_dist(double lambda, double tail, const DiscreteOptions& opt) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw UsageError("poisson rate must be finite and nonnegative");
  }
  if (lambda == 0.0) return DiscreteDist::point(0.0);

  DiscreteDist out;
  detail::KahanSum cum;
  double log_lambda = std::log(lambda);
  // Generous cap: the mean plus many standard deviations.
  std::size_t cap =
      static_cast<std::size_t>(lambda + 40.0 * std::sqrt(lambda + 1.0) + 60.0);
  for (std::size_t k = 0; k <= cap; ++k) {
    double lp = -lambda + static_cast<double>(k) * log_lambda -
                lgamma_fn(static_cast<double>(k) + 1.0);
    double p = std::exp(lp);
    cum.add(p);
    if (p >= opt.prune_threshold) {
      out.values.push_back(static_cast<double>(k));
      out.masses.push_back(p);
    }
    if (static_cast<double>(k) >= lambda && 1.0 - cum.value() < tail) break;
  }
  out.deficit = std::max(0.0, 1.0 - out.total_mass());
  return out;
}

TiltResult esscher_tilt(const DiscreteDist& p) {
  TiltResult r;
  r.measure.values = p.values;
  r.measure.masses.resize(p.size());
  detail::KahanSum z;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double x = p.values[i];
    double m = p.masses[i];
    double q;
    if (x > kExpOverflow) {
      // e^x alone overflows; the product may still be finite.
      double lq = x + std::log(m);
      if (lq > kExpOverflow) {
        throw RangeError("tilted mass overflows at atom x = " + std::to_string(x));
      }
      q = m > 0.0 ? std::exp(lq) : 0.0;
    } else {
      q = std::exp(x) * m;
    }
    r.measure.masses[i] = q;
    z.add(q);
  }
  r.normalizer = z.value();
  return r;
}

DiscreteDist kernel_row(const Kernel& k, double n, const DiscreteOptions& opt) {
  if (const auto* ps = std::get_if<PoissonSuperpose>(&k)) {
    if (!is_nonneg_integer(n)) {
      throw UsageError("poisson-superpose row index must be a nonnegative integer");
    }
    DiscreteDist noise = poisson_dist(ps->lambda, ps->tail, opt);
    for (double& v : noise.values) v += std::round(n);
    return noise;
  }
  if (const auto* bt = std::get_if<BinomialThin>(&k)) {
    if (!(bt->c > 0.0) || bt->c > 1.0) {
      throw UsageError("thinning probability must lie in (0, 1]");
    }
    if (!is_nonneg_integer(n)) {
      throw UsageError("binomial-thin row index must be a nonnegative integer");
    }
    auto ni = static_cast<std::uint64_t>(std::llround(n));
    DiscreteDist row;
    detail::KahanSum kept;
    for (std::uint64_t j = 0; j <= ni; ++j) {
      double m = binomial_pmf(ni, j, bt->c);
      if (m >= opt.prune_threshold) {
        row.values.push_back(static_cast<double>(j));
        row.masses.push_back(m);
        kept.add(m);
      }
    }
    row.deficit = std::max(0.0, 1.0 - kept.value());
    return row;
  }
  const auto& part = std::get<IntervalPartition>(k);
  check_partition(part);
  auto it = std::upper_bound(part.cuts.begin(), part.cuts.end(), n);
  return DiscreteDist::point(static_cast<double>(it - part.cuts.begin()));
}

DiscreteDist apply_kernel(const Kernel& k, const DiscreteDist& p,
                          const DiscreteOptions& opt) {
  if (std::holds_alternative<PoissonSuperpose>(k) ||
      std::holds_alternative<BinomialThin>(k)) {
    const char* name =
        std::holds_alternative<PoissonSuperpose>(k) ? "poisson-superpose" : "binomial-thin";
    require_integer_support(p, name);
    // Integer-indexed accumulation avoids any merge-tolerance artifacts.
    std::map<std::int64_t, double> acc;
    detail::KahanSum row_deficit;
    for (std::size_t i = 0; i < p.size(); ++i) {
      DiscreteDist row = kernel_row(k, p.values[i], opt);
      for (std::size_t j = 0; j < row.size(); ++j) {
        acc[std::llround(row.values[j])] += p.masses[i] * row.masses[j];
      }
      row_deficit.add(p.masses[i] * row.deficit);
    }
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(acc.size());
    for (const auto& [v, m] : acc) atoms.emplace_back(static_cast<double>(v), m);
    DiscreteDist out = DiscreteDist::from_atoms(std::move(atoms), opt);
    out.deficit += p.deficit + row_deficit.value();
    return out;
  }

  const auto& part = std::get<IntervalPartition>(k);
  check_partition(part);
  std::vector<double> bins(part.cuts.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto it = std::upper_bound(part.cuts.begin(), part.cuts.end(), p.values[i]);
    bins[static_cast<std::size_t>(it - part.cuts.begin())] += p.masses[i];
  }
  DiscreteDist out;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (bins[b] > 0.0) {
      out.values.push_back(static_cast<double>(b));
      out.masses.push_back(bins[b]);
    }
  }
  out.deficit = p.deficit;
  return out;
}

std::vector<double> sample(const DiscreteDist& d, std::uint64_t seed, std::size_t n) {
  if (d.size() == 0) throw UsageError("cannot sample from an empty distribution");
  std::vector<double> cum(d.size());
  detail::KahanSum s;
  for (std::size_t i = 0; i < d.size(); ++i) {
    s.add(d.masses[i]);
    cum[i] = s.value();
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = unif(rng);
    // Draw k with F(k-1) <= u < F(k): the first index whose cumulative
    // exceeds u. Deficit (u beyond the last cumulative) clamps to the top.
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t idx = it == cum.end() ? d.size() - 1
                                      : static_cast<std::size_t>(it - cum.begin());
    out.push_back(d.values[idx]);
  }
  return out;
}

}  // namespace tradeoff
