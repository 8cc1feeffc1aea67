#pragma once

#include <optional>
#include <string>

#include "tradeoff/compose.hpp"
#include "tradeoff/curve.hpp"
#include "tradeoff/divisible.hpp"
#include "tradeoff/mechanism.hpp"
#include "tradeoff/neyman.hpp"

// Text formats for the command-line tool and for golden fixtures: CSV curve
// dumps, JSON experiment spec files, and JSON reports. The JSON backend
// stays out of this header on purpose; everything round-trips through
// std::string.

namespace tradeoff::io {

// Numeric policy knobs a spec file may override under its "numerics" key.
struct Numerics {
  double grid_step = 1e-4;        // CSV and distance evaluation grid
  int quantile_cells = 10000;     // continuous-family discretization cells
  double window_sigmas = 8.0;     // gaussian atom window half-width
  double step_divisor = 2000.0;   // gaussian atom bin count per sigma
  std::size_t atom_cap = 200000;  // composition support cap
  std::size_t working_cap = 4000000;
  double error_budget = 1e-6;

  ComposeOptions compose() const;
  GaussianDiscretization discretization() const;
};

// A parsed experiment spec: exactly one of the three payloads is set,
// according to the top-level "kind" discriminator.
struct SpecFile {
  std::string kind;
  std::optional<ExperimentPair> pair;    // poisson | bernoulli | gaussian | shift | discrete
  std::optional<IDPCurveSpec> idp;       // kind "idp"
  std::optional<MixtureSpec> mixture;    // kind "mixture"
  Numerics numerics;
};

// Parses a spec from JSON text / a file. Malformed JSON or unknown fields
// raise UsageError with a position or field diagnostic.
SpecFile parse_spec(const std::string& json_text);
SpecFile load_spec(const std::string& path);

// CSV dump "alpha,beta" with 17 significant digits, rows at every
// breakpoint plus a uniform grid; parses back to the same curve.
std::string curve_csv(const TradeoffCurve& f, double grid_step = 1e-4);
TradeoffCurve curve_from_csv(const std::string& csv_text);
TradeoffCurve load_curve_csv(const std::string& path);

// JSON report emitters. Keys follow the shapes the tool documents.
std::string metrics_json(double sup, double levy);
std::string convergence_json(const ConvergenceReport& r);
std::string ldp_json(const LdpReport& r);
std::string mixture_json(const MixtureResult& r);
std::string idp_json(const TradeoffCurve& limit_curve);  // cross-check metadata
std::string stopping_json(const StoppingReport& r);
std::string guarantee_json(const GuaranteeReport& r);
std::string kernel_json(const KernelLemmaReport& r);

// Mechanism parameter files (JSON), written by calibrate and consumed by
// release/verify.
std::string params_json(const PoissonMechanismParams& p);
PoissonMechanismParams parse_params(const std::string& json_text);
PoissonMechanismParams load_params(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace tradeoff::io
