#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tradeoff/error.hpp"

namespace tradeoff {

// A trade-off curve maps a type-I error budget alpha to the smallest
// achievable type-II error beta for a binary experiment. Every member of the
// class is convex, continuous, nonincreasing, and satisfies f(alpha) <=
// 1 - alpha. Closed forms (gaussian, eps-delta) stay symbolic until an
// operation forces discretization, which preserves exact identities such as
// the gaussian composition rule.
enum class CurveForm { piecewise_linear, gaussian, eps_delta };

struct CurvePoint {
  double alpha;
  double beta;
};

// Numerical provenance carried by a curve. Optional fields are set by the
// operation that produced the curve and propagated where meaningful.
struct CurveMetadata {
  std::optional<double> discretization_step;
  std::optional<double> deficit;        // probability mass lost to truncation
  std::optional<double> bin_width;      // set by coarsening constructions
  std::optional<double> crosscheck_gap; // dual-route solver disagreement
  std::optional<double> composition_error_bound;  // accumulated rebin error
  std::optional<double> tilt_normalizer;
  bool coarsened = false;
};

// Minimum Bayes risk as a function of the prior: b(lambda) =
// inf_alpha [(1-lambda) alpha + lambda f(alpha)]. Concave and dominated by
// min(lambda, 1-lambda).
struct BayesRisk {
  std::vector<double> lambdas;  // increasing, in [0,1]
  std::vector<double> risks;

  void validate(double tol = 1e-9) const;
};

class TradeoffCurve {
 public:
  TradeoffCurve() = default;

  static TradeoffCurve gaussian(double mu);
  static TradeoffCurve eps_delta(double eps, double delta);
  // The perfect-privacy curve f(alpha) = 1 - alpha.
  static TradeoffCurve identity();
  // Piecewise-linear curve from breakpoints. Sorts, snaps endpoint and range
  // rounding within 1e-9, and rejects anything failing the class certificate.
  static TradeoffCurve from_breakpoints(std::vector<CurvePoint> pts,
                                        CurveMetadata meta = {});

  CurveForm form() const { return form_; }
  std::string form_name() const;
  bool is_identity(double tol = 1e-12) const;

  double gaussian_mu() const;  // gaussian form only
  double eps() const;          // eps-delta form only
  double delta() const;        // eps-delta form only

  const CurveMetadata& metadata() const { return meta_; }
  CurveMetadata& metadata() { return meta_; }

  // Breakpoints of a piecewise-linear curve; throws ContractError for
  // symbolic forms (call discretized() first).
  const std::vector<CurvePoint>& breakpoints() const;
  // Piecewise-linear version of this curve. Exact for eps-delta (its graph is
  // piecewise linear); samples gaussian forms on a uniform grid.
  TradeoffCurve discretized(double grid_step = 1e-4) const;

  double eval(double alpha) const;
  // Generalized inverse value: inf{t : f(t) <= beta}.
  double inverse_eval(double beta) const;
  // The inverse curve, i.e. the trade-off curve of the swapped experiment.
  TradeoffCurve inverse() const;

  bool is_symmetric(double tol = 1e-9) const;
  // Largest convex lower bound of min(f, f^-1): the canonical symmetric
  // curve. Uses the explicit three-piece construction around the first
  // point where the subgradient reaches -1.
  TradeoffCurve symmetrize() const;

  BayesRisk to_bayes_risk(double lambda_step = 1e-3) const;
  static TradeoffCurve from_bayes_risk(const BayesRisk& b);

  // delta(eps) such that the curve certifies (eps, delta) indistinguishability.
  // Requires a symmetric curve; asymmetric input is rejected with guidance to
  // symmetrize first.
  double to_eps_delta(double eps) const;

  // max |f - g| over the union of both breakpoint sets and a uniform grid.
  // Exact for piecewise-linear operands.
  double sup_distance(const TradeoffCurve& other, double grid_step = 1e-4) const;
  // Levy distance between the induced CDFs F_i(x) = 1 - f_i(x) on [0,1]
  // (with the atom 1 - f_i(0) at zero). Metrizes weak convergence of the
  // underlying experiments.
  double levy_distance(const TradeoffCurve& other, double grid_step = 1e-4) const;

  // Class-membership certificate: convex, nonincreasing, within the triangle
  // beta <= 1 - alpha, endpoints pinned. Throws ContractError on violation.
  void validate(double tol = 1e-9) const;

 private:
  CurveForm form_ = CurveForm::piecewise_linear;
  double mu_ = 0.0;                 // gaussian form
  double eps_ = 0.0, delta_ = 0.0;  // eps-delta form
  std::vector<CurvePoint> pts_;     // piecewise-linear form
  CurveMetadata meta_;

  double eval_pl(double alpha) const;
};

}  // namespace tradeoff
