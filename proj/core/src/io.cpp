#include "tradeoff/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "tradeoff/error.hpp"

namespace tradeoff::io {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double require_number(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number()) {
    throw UsageError(std::string("spec field '") + field +
                     "' missing or not a number");
  }
  return j[field].get<double>();
}

std::vector<double> require_array(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw UsageError(std::string("spec field '") + field +
                     "' missing or not an array");
  }
  std::vector<double> out;
  out.reserve(j[field].size());
  for (const auto& v : j[field]) {
    if (!v.is_number()) {
      throw UsageError(std::string("spec field '") + field +
                       "' contains a non-numeric entry");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

Numerics parse_numerics(const json& j) {
  Numerics n;
  if (!j.contains("numerics")) return n;
  const json& o = j["numerics"];
  if (!o.is_object()) throw UsageError("'numerics' must be an object");
  for (const auto& [key, value] : o.items()) {
    if (!value.is_number()) {
      throw UsageError("numerics field '" + key + "' must be a number");
    }
    double v = value.get<double>();
    if (key == "grid_step") n.grid_step = v;
    else if (key == "quantile_cells") n.quantile_cells = static_cast<int>(v);
    else if (key == "window_sigmas") n.window_sigmas = v;
    else if (key == "step_divisor") n.step_divisor = v;
    else if (key == "atom_cap") n.atom_cap = static_cast<std::size_t>(v);
    else if (key == "working_cap") n.working_cap = static_cast<std::size_t>(v);
    else if (key == "error_budget") n.error_budget = v;
    else throw UsageError("unknown numerics field '" + key + "'");
  }
  return n;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

ComposeOptions Numerics::compose() const {
  ComposeOptions o;
  o.atom_cap = atom_cap;
  o.working_cap = working_cap;
  o.error_budget = error_budget;
  return o;
}

GaussianDiscretization Numerics::discretization() const {
  GaussianDiscretization d;
  d.window_sigmas = window_sigmas;
  d.step_divisor = step_divisor;
  return d;
}

SpecFile parse_spec(const std::string& json_text) {
  json j = parse_json(json_text);
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw UsageError("spec needs a top-level string field 'kind'");
  }

  SpecFile spec;
  spec.kind = j["kind"].get<std::string>();
  spec.numerics = parse_numerics(j);

  if (spec.kind == "poisson") {
    spec.pair = ExperimentPair(
        poisson_pair(require_number(j, "lambda1"), require_number(j, "lambda2")));
  } else if (spec.kind == "bernoulli") {
    spec.pair = ExperimentPair(
        bernoulli_pair(require_number(j, "p1"), require_number(j, "p2")));
  } else if (spec.kind == "gaussian") {
    spec.pair = ExperimentPair(AnalyticGaussianPair{require_number(j, "mu")});
  } else if (spec.kind == "shift") {
    if (!j.contains("family") || !j["family"].is_string()) {
      throw UsageError("shift spec needs a string field 'family'");
    }
    ShiftFamily fam = ShiftFamily::parse(j["family"].get<std::string>());
    if (j.contains("scale")) fam.scale = require_number(j, "scale");
    if (!(fam.scale > 0.0)) throw UsageError("shift scale must be > 0");
    spec.pair = ExperimentPair(ShiftPair{fam, require_number(j, "mu")});
  } else if (spec.kind == "discrete") {
    DiscretePair d;
    d.labels = require_array(j, "labels");
    d.p = require_array(j, "p");
    d.q = require_array(j, "q");
    if (j.contains("p_deficit")) d.p_deficit = require_number(j, "p_deficit");
    if (j.contains("q_deficit")) d.q_deficit = require_number(j, "q_deficit");
    d.validate(1e-9);
    spec.pair = ExperimentPair(std::move(d));
  } else if (spec.kind == "idp") {
    IDPCurveSpec s;
    s.k = require_number(j, "k");
    if (j.contains("poisson")) {
      const json& p = j["poisson"];
      if (!p.is_object()) throw UsageError("'poisson' must be an object");
      s.poisson = PoissonComponent{require_number(p, "lambda1"),
                                   require_number(p, "lambda2")};
    }
    s.validate();
    spec.idp = s;
  } else if (spec.kind == "mixture") {
    MixtureSpec m;
    if (j.contains("sigma")) m.sigma = require_number(j, "sigma");
    if (!j.contains("components") || !j["components"].is_array()) {
      throw UsageError("mixture spec needs an array field 'components'");
    }
    for (const auto& c : j["components"]) {
      if (!c.is_object()) throw UsageError("mixture components must be objects");
      m.components.push_back(MixtureComponent{require_number(c, "weight"),
                                              require_number(c, "time")});
    }
    m.validate();
    spec.mixture = std::move(m);
  } else {
    throw UsageError("unknown spec kind '" + spec.kind +
                     "' (expected poisson, bernoulli, gaussian, shift, "
                     "discrete, idp, or mixture)");
  }
  return spec;
}

SpecFile load_spec(const std::string& path) { return parse_spec(read_file(path)); }

std::string curve_csv(const TradeoffCurve& f, double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw UsageError("grid step must lie in (0, 0.5]");
  }
  std::vector<double> alphas;
  auto n = static_cast<std::size_t>(std::llround(1.0 / grid_step));
  alphas.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    alphas.push_back(std::min(1.0, static_cast<double>(i) * grid_step));
  }
  if (f.form() == CurveForm::piecewise_linear) {
    for (const CurvePoint& p : f.breakpoints()) alphas.push_back(p.alpha);
  }
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  std::string out = "alpha,beta\n";
  for (double a : alphas) {
    out += fmt17(a);
    out += ',';
    out += fmt17(f.eval(a));
    out += '\n';
  }
  return out;
}

TradeoffCurve curve_from_csv(const std::string& csv_text) {
  std::vector<CurvePoint> pts;
  std::istringstream in(csv_text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("alpha", 0) == 0) continue;
    const char* s = line.c_str();
    char* end = nullptr;
    double a = std::strtod(s, &end);
    if (end == s || *end != ',') {
      throw UsageError("CSV line " + std::to_string(lineno) +
                       ": expected 'alpha,beta', got '" + line + "'");
    }
    const char* s2 = end + 1;
    double b = std::strtod(s2, &end);
    if (end == s2 || *end != '\0') {
      throw UsageError("CSV line " + std::to_string(lineno) +
                       ": trailing characters in '" + line + "'");
    }
    pts.push_back({a, b});
  }
  if (pts.size() < 2) {
    throw UsageError("CSV holds fewer than two curve points");
  }
  return TradeoffCurve::from_breakpoints(std::move(pts));
}

TradeoffCurve load_curve_csv(const std::string& path) {
  return curve_from_csv(read_file(path));
}

std::string metrics_json(double sup, double levy) {
  json j;
  j["sup"] = sup;
  j["levy"] = levy;
  return j.dump(2) + "\n";
}

std::string convergence_json(const ConvergenceReport& r) {
  json j;
  j["n"] = r.n;
  j["sup_distance_to_limit"] = r.sup_distance_to_limit;
  j["levy_distance_to_limit"] = r.levy_distance_to_limit;
  return j.dump(2) + "\n";
}

std::string ldp_json(const LdpReport& r) {
  json j;
  j["alpha"] = r.alpha;
  j["analytic_rate"] = r.analytic_rate;
  j["n"] = r.n;
  j["empirical"] = r.empirical;
  j["gap"] = r.gap;
  return j.dump(2) + "\n";
}

std::string mixture_json(const MixtureResult& r) {
  json j;
  j["crosscheck_gap"] = r.crosscheck_gap;
  j["variational_breakpoints"] =
      r.curve.form() == CurveForm::piecewise_linear ? r.curve.breakpoints().size()
                                                    : 0;
  j["direct_breakpoints"] =
      r.direct.form() == CurveForm::piecewise_linear ? r.direct.breakpoints().size()
                                                     : 0;
  return j.dump(2) + "\n";
}

std::string idp_json(const TradeoffCurve& limit_curve) {
  const CurveMetadata& m = limit_curve.metadata();
  json j;
  if (m.tilt_normalizer) j["tilt_normalizer"] = *m.tilt_normalizer;
  if (m.deficit) j["deficit"] = *m.deficit;
  if (m.composition_error_bound) {
    j["composition_error_bound"] = *m.composition_error_bound;
  }
  return j.dump(2) + "\n";
}

std::string stopping_json(const StoppingReport& r) {
  json j;
  j["levy_to_mixture"] = r.levy_to_mixture;
  j["draw_counts"] = r.draw_counts;
  return j.dump(2) + "\n";
}

std::string guarantee_json(const GuaranteeReport& r) {
  json pairs = json::array();
  for (const PairVerdict& v : r.pairs) {
    json p;
    p["pair"] = {v.g1, v.g2};
    p["direction"] = v.direction;
    p["within_hypotheses"] = v.within_hypotheses;
    p["min_slack"] = v.min_slack;
    p["min_slack_alpha"] = v.min_slack_alpha;
    pairs.push_back(std::move(p));
  }
  json j;
  j["pairs"] = std::move(pairs);
  j["min_slack"] = r.min_slack;
  j["min_slack_alpha"] = r.min_slack_alpha;
  j["min_slack_pair"] = r.min_slack_pair;
  return j.dump(2) + "\n";
}

std::string kernel_json(const KernelLemmaReport& r) {
  json checks = json::array();
  for (const OrderingCheck& c : r.checks) {
    json o;
    o["name"] = c.name;
    o["applicable"] = c.applicable;
    if (c.applicable) {
      o["min_slack"] = c.min_slack;
      o["min_slack_alpha"] = c.min_slack_alpha;
    }
    checks.push_back(std::move(o));
  }
  json j;
  j["lambda1"] = r.lambda1;
  j["lambda2"] = r.lambda2;
  j["c"] = r.c;
  j["lambda"] = r.lambda;
  j["checks"] = std::move(checks);
  j["min_slack"] = r.min_slack;
  return j.dump(2) + "\n";
}

std::string params_json(const PoissonMechanismParams& p) {
  json j;
  j["mu1"] = p.mu1;
  j["mu2"] = p.mu2;
  j["w_g"] = p.w_g;
  j["w_hg"] = p.w_hg;
  j["N1"] = p.N1;
  j["N2"] = p.N2;
  return j.dump(2) + "\n";
}

PoissonMechanismParams parse_params(const std::string& json_text) {
  json j = parse_json(json_text);
  if (!j.is_object()) throw UsageError("params file must hold a JSON object");
  PoissonMechanismParams p;
  p.mu1 = require_number(j, "mu1");
  p.mu2 = require_number(j, "mu2");
  p.w_g = require_number(j, "w_g");
  p.w_hg = require_number(j, "w_hg");
  p.N1 = require_number(j, "N1");
  p.N2 = require_number(j, "N2");
  p.validate();
  return p;
}

PoissonMechanismParams load_params(const std::string& path) {
  return parse_params(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw UsageError("failed while writing '" + path + "'");
}

}  // namespace tradeoff::io
