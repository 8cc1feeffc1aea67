// Command-line surface: batch curve computation, composition studies,
// divisible limits, the Poisson release mechanism, coarsening, and curve
// metrics. Exit codes: 0 success, 1 usage error, 2 contract or verification
// failure.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "tradeoff/coarsen.hpp"
#include "tradeoff/compose.hpp"
#include "tradeoff/divisible.hpp"
#include "tradeoff/error.hpp"
#include "tradeoff/io.hpp"
#include "tradeoff/mechanism.hpp"
#include "tradeoff/neyman.hpp"

namespace {

using namespace tradeoff;

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    io::write_file(path, text);
  }
}

double parse_double(const std::string& s, const char* what) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end == c || *end != '\0') {
    throw UsageError(std::string(what) + ": '" + s + "' is not a number");
  }
  return v;
}

std::pair<double, double> parse_pair_arg(const std::string& s, const char* what) {
  auto comma = s.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == s.size()) {
    throw UsageError(std::string(what) + " expects two comma-separated numbers");
  }
  return {parse_double(s.substr(0, comma), what),
          parse_double(s.substr(comma + 1), what)};
}

// Shared inputs of the curve/compose subcommands: a spec file or one of the
// convenience pair flags.
struct PairArgs {
  std::string spec_path;
  std::string poisson;
  std::string bernoulli;
  std::optional<double> gaussian_mu;
  std::string shift;  // family,mu

  void attach(CLI::App* cmd) {
    cmd->add_option("--spec", spec_path, "JSON experiment spec file");
    cmd->add_option("--poisson", poisson, "Poisson pair 'lambda1,lambda2'");
    cmd->add_option("--bernoulli", bernoulli, "Bernoulli pair 'p1,p2'");
    cmd->add_option("--gaussian", gaussian_mu, "Gaussian shift mu");
    cmd->add_option("--shift", shift, "Shift pair 'family,mu' (gaussian|laplace)");
  }

  io::SpecFile resolve() const {
    int given = !spec_path.empty();
    given += !poisson.empty();
    given += !bernoulli.empty();
    given += gaussian_mu.has_value();
    given += !shift.empty();
    if (given != 1) {
      throw UsageError(
          "give exactly one of --spec, --poisson, --bernoulli, --gaussian, "
          "--shift");
    }
    if (!spec_path.empty()) return io::load_spec(spec_path);

    io::SpecFile sf;
    if (!poisson.empty()) {
      auto [l1, l2] = parse_pair_arg(poisson, "--poisson");
      sf.kind = "poisson";
      sf.pair = ExperimentPair(poisson_pair(l1, l2));
    } else if (!bernoulli.empty()) {
      auto [p1, p2] = parse_pair_arg(bernoulli, "--bernoulli");
      sf.kind = "bernoulli";
      sf.pair = ExperimentPair(bernoulli_pair(p1, p2));
    } else if (gaussian_mu) {
      sf.kind = "gaussian";
      sf.pair = ExperimentPair(AnalyticGaussianPair{*gaussian_mu});
    } else {
      auto comma = shift.find(',');
      if (comma == std::string::npos) {
        throw UsageError("--shift expects 'family,mu'");
      }
      ShiftFamily fam = ShiftFamily::parse(shift.substr(0, comma));
      double mu = parse_double(shift.substr(comma + 1), "--shift mu");
      sf.kind = "shift";
      sf.pair = ExperimentPair(ShiftPair{fam, mu});
    }
    return sf;
  }

  // The experiment pair, whatever the spec kind; divisible kinds go through
  // their own curve constructions.
  TradeoffCurve curve_of(const io::SpecFile& sf) const {
    if (sf.pair) return curve(*sf.pair, sf.numerics.quantile_cells);
    if (sf.idp) return idp_curve(*sf.idp, sf.numerics.compose());
    if (sf.mixture) return mixture_curve(*sf.mixture);
    throw ContractError("spec resolved to no experiment");
  }
};

int run(int argc, char** argv) {
  CLI::App app{
      "Numerical toolkit for trade-off curves of binary experiments:\n"
      "Neyman-Pearson construction, composition, divisible limits, the\n"
      "Poisson release mechanism, and coarsening."};
  app.require_subcommand(1);

  // ---- curve ----
  auto* c_curve = app.add_subcommand("curve", "Trade-off curve of a pair spec, as CSV");
  auto pa_curve = std::make_shared<PairArgs>();
  pa_curve->attach(c_curve);
  auto curve_out = std::make_shared<std::string>();
  c_curve->add_option("--out,-o", *curve_out, "Output CSV path (default stdout)");
  c_curve->callback([pa_curve, curve_out] {
    io::SpecFile sf = pa_curve->resolve();
    TradeoffCurve f = pa_curve->curve_of(sf);
    emit(io::curve_csv(f, sf.numerics.grid_step), *curve_out);
  });

  // ---- compose ----
  auto* c_comp = app.add_subcommand(
      "compose", "n-fold composition of a pair spec: CSV plus convergence JSON");
  auto pa_comp = std::make_shared<PairArgs>();
  pa_comp->attach(c_comp);
  auto comp_n = std::make_shared<long long>(1);
  auto comp_out = std::make_shared<std::string>();
  auto comp_report = std::make_shared<std::string>();
  auto comp_limit_spec = std::make_shared<std::string>();
  c_comp->add_option("-n", *comp_n, "Number of copies")->required();
  c_comp->add_option("--out,-o", *comp_out, "Composed-curve CSV path (default stdout)");
  c_comp->add_option("--report", *comp_report, "Convergence JSON path (default stdout)");
  c_comp->add_option("--limit-spec", *comp_limit_spec,
                     "Optional spec file for the comparison limit curve");
  c_comp->callback([pa_comp, comp_n, comp_out, comp_report, comp_limit_spec] {
    io::SpecFile sf = pa_comp->resolve();
    if (!sf.pair) {
      throw UsageError("compose needs a pair spec (poisson, bernoulli, "
                       "gaussian, shift, or discrete)");
    }
    ComposeOptions opts = sf.numerics.compose();
    TradeoffCurve composed = self_compose(*sf.pair, *comp_n, opts);
    emit(io::curve_csv(composed, sf.numerics.grid_step), *comp_out);

    ConvergenceReport report;
    if (comp_limit_spec->empty()) {
      report = compose_convergence(*sf.pair, *comp_n, opts);
    } else {
      io::SpecFile lf = io::load_spec(*comp_limit_spec);
      PairArgs helper;
      TradeoffCurve limit = helper.curve_of(lf);
      report.n = *comp_n;
      report.sup_distance_to_limit = composed.sup_distance(limit);
      report.levy_distance_to_limit = composed.levy_distance(limit);
    }
    emit(io::convergence_json(report), *comp_report);
  });

  // ---- limit ----
  auto* c_limit = app.add_subcommand(
      "limit", "Divisible limit curve of an idp or mixture spec: CSV plus cross-check JSON");
  auto limit_spec = std::make_shared<std::string>();
  auto limit_out = std::make_shared<std::string>();
  auto limit_report = std::make_shared<std::string>();
  c_limit->add_option("--spec", *limit_spec, "JSON spec file (kind idp or mixture)")
      ->required();
  c_limit->add_option("--out,-o", *limit_out, "Output CSV path (default stdout)");
  c_limit->add_option("--report", *limit_report, "Cross-check JSON path (default stdout)");
  c_limit->callback([limit_spec, limit_out, limit_report] {
    io::SpecFile sf = io::load_spec(*limit_spec);
    if (sf.idp) {
      TradeoffCurve f = idp_curve(*sf.idp, sf.numerics.compose());
      emit(io::curve_csv(f, sf.numerics.grid_step), *limit_out);
      emit(io::idp_json(f), *limit_report);
    } else if (sf.mixture) {
      MixtureResult r = mixture_curve_detail(*sf.mixture);
      emit(io::curve_csv(r.curve, sf.numerics.grid_step), *limit_out);
      emit(io::mixture_json(r), *limit_report);
    } else {
      throw UsageError("limit needs a spec of kind idp or mixture");
    }
  });

  // ---- mechanism ----
  auto* c_mech = app.add_subcommand("mechanism", "Poisson release mechanism");
  c_mech->require_subcommand(1);

  auto* c_cal = c_mech->add_subcommand("calibrate", "Compute mechanism parameters");
  auto cal_mu = std::make_shared<std::pair<double, double>>();
  auto cal_gmin = std::make_shared<double>(0.0);
  auto cal_gmax = std::make_shared<double>(0.0);
  auto cal_wg = std::make_shared<double>(0.0);
  auto cal_whg = std::make_shared<std::optional<double>>();
  auto cal_out = std::make_shared<std::string>();
  c_cal->add_option("--mu1", cal_mu->first, "Intensity floor")->required();
  c_cal->add_option("--mu2", cal_mu->second, "Intensity ceiling")->required();
  c_cal->add_option("--g-min", *cal_gmin, "Bottom of the statistic range")->required();
  c_cal->add_option("--g-max", *cal_gmax, "Top of the statistic range")->required();
  c_cal->add_option("--w-g", *cal_wg, "Neighbor sensitivity of the statistic")->required();
  c_cal->add_option("--w-hg", *cal_whg,
                    "Sensitivity of the transformed statistic (required when "
                    "the range is unbounded)");
  c_cal->add_option("--out,-o", *cal_out, "Params JSON path (default stdout)");
  c_cal->callback([cal_mu, cal_gmin, cal_gmax, cal_wg, cal_whg, cal_out] {
    StatRange range{*cal_gmin, *cal_gmax, *cal_wg};
    PoissonMechanismParams p =
        calibrate(cal_mu->first, cal_mu->second, range, *cal_whg);
    emit(io::params_json(p), *cal_out);
  });

  auto* c_rel = c_mech->add_subcommand("release", "One seeded mechanism draw");
  auto rel_params = std::make_shared<std::string>();
  auto rel_g = std::make_shared<double>(0.0);
  auto rel_seed = std::make_shared<std::uint64_t>(0);
  c_rel->add_option("--params", *rel_params, "Params JSON file")->required();
  c_rel->add_option("--g", *rel_g, "Statistic value")->required();
  c_rel->add_option("--seed", *rel_seed, "RNG seed")->required();
  c_rel->callback([rel_params, rel_g, rel_seed] {
    PoissonMechanismParams p = io::load_params(*rel_params);
    std::cout << release(p, *rel_g, *rel_seed) << "\n";
  });

  auto* c_ver = c_mech->add_subcommand(
      "verify", "Check neighbor pairs against the calibrated guarantee");
  auto ver_params = std::make_shared<std::string>();
  auto ver_pairs = std::make_shared<std::vector<std::string>>();
  auto ver_out = std::make_shared<std::string>();
  c_ver->add_option("--params", *ver_params, "Params JSON file")->required();
  c_ver->add_option("--pair", *ver_pairs, "Neighbor pair 'g1,g2' (repeatable)")
      ->required();
  c_ver->add_option("--out,-o", *ver_out, "Report JSON path (default stdout)");
  c_ver->callback([ver_params, ver_pairs, ver_out] {
    PoissonMechanismParams p = io::load_params(*ver_params);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(ver_pairs->size());
    for (const std::string& s : *ver_pairs) {
      pairs.push_back(parse_pair_arg(s, "--pair"));
    }
    GuaranteeReport report = verify_guarantee(p, pairs);
    emit(io::guarantee_json(report), *ver_out);
  });

  // ---- coarsen ----
  auto* c_coar = app.add_subcommand(
      "coarsen", "Binned shift-family trade-off curve, as CSV");
  auto coar_family = std::make_shared<std::string>("gaussian");
  auto coar_mu = std::make_shared<double>(0.0);
  auto coar_width = std::make_shared<double>(0.0);
  auto coar_out = std::make_shared<std::string>();
  c_coar->add_option("--family", *coar_family, "gaussian or laplace");
  c_coar->add_option("--mu", *coar_mu, "Location shift")->required();
  c_coar->add_option("--width", *coar_width, "Bin width")->required();
  c_coar->add_option("--out,-o", *coar_out, "Output CSV path (default stdout)");
  c_coar->callback([coar_family, coar_mu, coar_width, coar_out] {
    TradeoffCurve f = binned_shift_curve(ShiftFamily::parse(*coar_family),
                                         *coar_mu, *coar_width);
    emit(io::curve_csv(f), *coar_out);
  });

  // ---- metrics ----
  auto* c_met = app.add_subcommand("metrics", "Distances between two curve CSVs");
  auto met_a = std::make_shared<std::string>();
  auto met_b = std::make_shared<std::string>();
  auto met_out = std::make_shared<std::string>();
  c_met->add_option("first", *met_a, "First CSV")->required();
  c_met->add_option("second", *met_b, "Second CSV")->required();
  c_met->add_option("--out,-o", *met_out, "Metrics JSON path (default stdout)");
  c_met->callback([met_a, met_b, met_out] {
    TradeoffCurve f = io::load_curve_csv(*met_a);
    TradeoffCurve g = io::load_curve_csv(*met_b);
    emit(io::metrics_json(f.sup_distance(g), f.levy_distance(g)), *met_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tradeoff::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const tradeoff::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
