#pragma once

#include <cstddef>
#include <vector>

#include "tradeoff/curve.hpp"
#include "tradeoff/neyman.hpp"
#include "tradeoff/stats.hpp"

namespace tradeoff {

// Groups the atoms of a discrete pair by the given index partition: each
// bin becomes one atom carrying the summed masses of its members, labeled
// by the smallest member label. Truncation deficits pass through. Throws
// PartitionError when the bins do not partition [0, e.size()): an index out
// of range, repeated, or missing, or an empty bin.
DiscretePair coarsen_pair(const DiscretePair& e,
                          const std::vector<std::vector<std::size_t>>& bins);

// Trade-off curve for a location shift by mu observed only through the bin
// index floor(x / bin_width): piecewise linear through the deterministic
// threshold points (P(X >= k w), P(X + mu < k w)), with bins dropped once
// both laws put less than 1e-14 mass on them. mu = 0 gives the identity
// curve; the sign of mu is immaterial by symmetry. Metadata records
// coarsened = true and the bin width.
TradeoffCurve binned_shift_curve(const ShiftFamily& family, double mu,
                                 double bin_width);

}  // namespace tradeoff
