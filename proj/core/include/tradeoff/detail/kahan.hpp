#pragma once

namespace tradeoff::detail {

// Compensated (Kahan) accumulator. Curve construction adds thousands of
// atom masses whose partial sums must stay accurate near 0 and 1.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace tradeoff::detail
