#include "tradeoff/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tradeoff/detail/kahan.hpp"
#include "tradeoff/error.hpp"
#include "tradeoff/neyman.hpp"

namespace tradeoff {

namespace {

// Mass the family puts on [a, b), differenced on whichever tail keeps the
// result relatively accurate.
double bin_mass(const ShiftFamily& f, double a, double b, double shift) {
  double lo = a - shift;
  double hi = b - shift;
  if (lo - f.location + (hi - f.location) > 0.0) {
    return std::max(0.0, f.survival(lo) - f.survival(hi));
  }
  return std::max(0.0, f.cdf(hi) - f.cdf(lo));
}

}  // namespace

DiscretePair coarsen_pair(const DiscretePair& e,
                          const std::vector<std::vector<std::size_t>>& bins) {
  e.validate(1e-9);

  std::vector<char> seen(e.size(), 0);
  for (const auto& bin : bins) {
    if (bin.empty()) throw PartitionError("partition contains an empty bin");
    for (std::size_t idx : bin) {
      if (idx >= e.size()) {
        throw PartitionError("bin index " + std::to_string(idx) +
                             " outside the support of size " +
                             std::to_string(e.size()));
      }
      if (seen[idx]) {
        throw PartitionError("label index " + std::to_string(idx) +
                             " appears in two bins");
      }
      seen[idx] = 1;
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw PartitionError("label index " + std::to_string(i) +
                           " is not covered by any bin");
    }
  }

  struct Atom {
    double label, p, q;
  };
  std::vector<Atom> atoms;
  atoms.reserve(bins.size());
  for (const auto& bin : bins) {
    std::size_t rep = *std::min_element(bin.begin(), bin.end());
    detail::KahanSum p, q;
    for (std::size_t idx : bin) {
      p.add(e.p[idx]);
      q.add(e.q[idx]);
    }
    atoms.push_back({e.labels[rep], p.value(), q.value()});
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.label < b.label; });

  DiscretePair out;
  out.labels.reserve(atoms.size());
  out.p.reserve(atoms.size());
  out.q.reserve(atoms.size());
  for (const Atom& a : atoms) {
    out.labels.push_back(a.label);
    out.p.push_back(a.p);
    out.q.push_back(a.q);
  }
  out.p_deficit = e.p_deficit;
  out.q_deficit = e.q_deficit;
  out.validate(1e-9);
  return out;
}

TradeoffCurve binned_shift_curve(const ShiftFamily& family, double mu,
                                 double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw UsageError("bin width must be finite and > 0");
  }
  if (!std::isfinite(mu)) throw UsageError("shift must be finite");

  CurveMetadata meta;
  meta.coarsened = true;
  meta.bin_width = bin_width;

  mu = std::abs(mu);  // reflection symmetry of both families
  if (mu == 0.0) {
    TradeoffCurve id = TradeoffCurve::identity();
    id.metadata() = meta;
    return id;
  }

  const double w = bin_width;
  // Candidate bins: everything carrying visible mass under either law.
  const double tiny = 1e-15;
  double lo_edge = std::min(family.quantile(tiny), family.quantile(tiny) + mu);
  double hi_edge = std::max(family.quantile_upper(tiny),
                            family.quantile_upper(tiny) + mu);
  auto k_lo = static_cast<long long>(std::floor(lo_edge / w)) - 1;
  auto k_hi = static_cast<long long>(std::ceil(hi_edge / w)) + 1;

  // Bin likelihood ratios are monotone in position for both families, so
  // the bins in position order are already in ratio order. The shared curve
  // builder then merges equal-ratio runs (constant-ratio tails collapse to
  // one segment exactly) and groups steps the stored doubles cannot
  // resolve.
  LlrAtoms atoms;
  detail::KahanSum sp, sq;
  for (long long k = k_lo; k <= k_hi; ++k) {
    double a = static_cast<double>(k) * w;
    double p = bin_mass(family, a, a + w, 0.0);
    double q = bin_mass(family, a, a + w, mu);
    if (std::max(p, q) < 1e-14) continue;
    if (p <= 0.0) {
      atoms.q_at_pos_inf += q;
      sq.add(q);
      continue;
    }
    if (q <= 0.0) {
      atoms.p_at_neg_inf += p;
      sp.add(p);
      continue;
    }
    atoms.x.push_back(std::log(q) - std::log(p));
    atoms.p.push_back(p);
    atoms.q.push_back(q);
    sp.add(p);
    sq.add(q);
  }
  atoms.p_deficit = std::max(0.0, 1.0 - sp.value());
  atoms.q_deficit = std::max(0.0, 1.0 - sq.value());
  TradeoffCurve curve = curve_from_llr(atoms);
  curve.metadata().coarsened = true;
  curve.metadata().bin_width = bin_width;
  return curve;
}

}  // namespace tradeoff
