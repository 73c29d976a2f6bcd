#include "mvu/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

namespace mvu {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) {
  throw ValidationError(ErrorCode::invalid_argument, "config: " + msg);
}

void allow_keys(const json& obj, std::string_view where,
                std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) bad(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      bad("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("bad value for '") + key + "': " + e.what());
  }
}

double number(const json& obj, const char* key, double fallback) {
  double v = fallback;
  read(obj, key, v);
  return v;
}

IncomeProfile parse_income(const json& j, double horizon) {
  allow_keys(j, "income", {"kind", "level", "start", "end", "initial", "rate", "times", "values"});
  std::string kind = "constant";
  read(j, "kind", kind);
  switch (income_kind_from_string(kind)) {
    case IncomeKind::constant:
      return IncomeProfile::constant(number(j, "level", 0.0), horizon);
    case IncomeKind::linear:
      return IncomeProfile::linear(number(j, "start", 0.0), number(j, "end", 0.0), horizon);
    case IncomeKind::exponential_decay:
      return IncomeProfile::exponential_decay(number(j, "initial", 0.0), number(j, "rate", 0.0),
                                              horizon);
    case IncomeKind::tabulated: {
      std::vector<double> times, values;
      read(j, "times", times);
      read(j, "values", values);
      return IncomeProfile::tabulated(std::move(times), std::move(values));
    }
  }
  bad("unreachable income kind");
}

json income_json(const IncomeProfile& p) {
  json j{{"kind", std::string(to_string(p.kind()))}};
  switch (p.kind()) {
    case IncomeKind::constant: j["level"] = p.p0(); break;
    case IncomeKind::linear: j["start"] = p.p0(); j["end"] = p.p1(); break;
    case IncomeKind::exponential_decay: j["initial"] = p.p0(); j["rate"] = p.p1(); break;
    case IncomeKind::tabulated: j["times"] = p.times(); j["values"] = p.values(); break;
  }
  return j;
}

ModelConfig parse_model(const json& j) {
  allow_keys(j, "model",
             {"market", "preferences", "utility", "income", "horizon", "x0", "allow_zero_premium"});
  ModelConfig m;
  read(j, "horizon", m.horizon);
  read(j, "x0", m.x0);
  read(j, "allow_zero_premium", m.allow_zero_premium);
  if (j.contains("market")) {
    const json& k = j.at("market");
    allow_keys(k, "market", {"r", "mu", "sigma"});
    read(k, "r", m.market.r);
    read(k, "mu", m.market.mu);
    read(k, "sigma", m.market.sigma);
  }
  if (j.contains("preferences")) {
    const json& k = j.at("preferences");
    allow_keys(k, "preferences", {"gamma", "beta", "delta", "rho"});
    read(k, "gamma", m.prefs.gamma);
    read(k, "beta", m.prefs.beta);
    read(k, "delta", m.prefs.delta);
    read(k, "rho", m.prefs.rho);
  }
  if (j.contains("utility")) {
    const json& k = j.at("utility");
    allow_keys(k, "utility", {"kind", "eta"});
    std::string kind = "log";
    read(k, "kind", kind);
    m.utility.kind = utility_kind_from_string(kind);
    read(k, "eta", m.utility.eta);
  }
  m.income = j.contains("income") ? parse_income(j.at("income"), m.horizon)
                                  : IncomeProfile::constant(0.0, m.horizon);
  return m;
}

std::vector<EvalPoint> parse_points(const json& j) {
  if (!j.is_array()) bad("verifier.points must be an array");
  std::vector<EvalPoint> out;
  for (const json& p : j) {
    allow_keys(p, "verifier.points[]", {"t", "x"});
    out.push_back({number(p, "t", 0.0), number(p, "x", 1.0)});
  }
  return out;
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

RunConfig parse_run_config(const json& doc) {
  allow_keys(doc, "config", {"model", "solver", "simulation", "verifier", "sweep", "output"});
  RunConfig cfg;
  if (doc.contains("model")) cfg.model = parse_model(doc.at("model"));
  else cfg.model.income = IncomeProfile::constant(0.0, cfg.model.horizon);

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    allow_keys(s, "solver",
               {"steps", "tol", "max_iter", "method", "convention", "damping", "oscillation_window"});
    read(s, "steps", cfg.solver.steps);
    read(s, "tol", cfg.solver.picard.tol);
    read(s, "max_iter", cfg.solver.picard.max_iter);
    read(s, "damping", cfg.solver.picard.damping);
    read(s, "oscillation_window", cfg.solver.picard.oscillation_window);
    std::string name;
    read(s, "method", name);
    if (!name.empty()) cfg.solver.method = method_from_string(name);
    name.clear();
    read(s, "convention", name);
    if (!name.empty()) cfg.solver.convention = convention_from_string(name);
  }

  if (doc.contains("simulation")) {
    const json& s = doc.at("simulation");
    allow_keys(s, "simulation",
               {"paths", "steps", "seed", "scheme", "substeps", "threads", "start", "dump_paths"});
    auto& sim = cfg.simulate.sim;
    read(s, "paths", sim.n_paths);
    read(s, "steps", sim.n_steps);
    read(s, "seed", sim.seed);
    read(s, "substeps", sim.substeps);
    read(s, "threads", sim.threads);
    read(s, "dump_paths", cfg.simulate.dump_paths);
    std::string scheme;
    read(s, "scheme", scheme);
    if (!scheme.empty()) sim.scheme = scheme_from_string(scheme);
    if (s.contains("start")) {
      const json& p = s.at("start");
      allow_keys(p, "simulation.start", {"t", "x"});
      cfg.simulate.start = StartState{number(p, "t", 0.0), number(p, "x", cfg.model.x0)};
    }
  }

  if (doc.contains("verifier")) {
    const json& v = doc.at("verifier");
    allow_keys(v, "verifier",
               {"paths", "steps", "points", "h_ladder", "slack", "include_null",
                "exposure_offsets", "consumption_offsets", "perturbations"});
    auto& vs = cfg.verify;
    read(v, "paths", vs.n_paths);
    read(v, "steps", vs.n_steps);
    read(v, "h_ladder", vs.options.h_ladder);
    read(v, "slack", vs.options.slack);
    read(v, "include_null", vs.perturbations.include_null);
    read(v, "exposure_offsets", vs.perturbations.exposure_offsets);
    read(v, "consumption_offsets", vs.perturbations.consumption_offsets);
    if (v.contains("points")) vs.points = parse_points(v.at("points"));
    if (v.contains("perturbations")) {
      for (const json& p : v.at("perturbations")) {
        allow_keys(p, "verifier.perturbations[]", {"c", "pi"});
        vs.perturbations.absolute.push_back({number(p, "c", 0.0), number(p, "pi", 0.0), 0.0, false});
      }
    }
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    allow_keys(s, "sweep", {"parameter", "values"});
    SweepSpec spec;
    read(s, "parameter", spec.parameter);
    read(s, "values", spec.values);
    cfg.sweep = spec;
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    allow_keys(o, "output", {"dir", "formats"});
    read(o, "dir", cfg.output_dir);
    read(o, "formats", cfg.formats);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    bad("'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

json to_json(const ModelConfig& m) {
  return json{
      {"market", {{"r", m.market.r}, {"mu", m.market.mu}, {"sigma", m.market.sigma}}},
      {"preferences",
       {{"gamma", m.prefs.gamma}, {"beta", m.prefs.beta}, {"delta", m.prefs.delta},
        {"rho", m.prefs.rho}}},
      {"utility", {{"kind", std::string(to_string(m.utility.kind))}, {"eta", m.utility.eta}}},
      {"income", income_json(m.income)},
      {"horizon", m.horizon},
      {"x0", m.x0},
      {"allow_zero_premium", m.allow_zero_premium},
  };
}

json to_json(const RunConfig& cfg) {
  const auto& sim = cfg.simulate.sim;
  json simulation{{"paths", sim.n_paths},
                  {"steps", sim.n_steps},
                  {"seed", sim.seed},
                  {"scheme", std::string(to_string(sim.scheme))},
                  {"substeps", sim.substeps},
                  {"threads", sim.threads},
                  {"dump_paths", cfg.simulate.dump_paths}};
  if (cfg.simulate.start) {
    simulation["start"] = {{"t", cfg.simulate.start->t}, {"x", cfg.simulate.start->x}};
  }
  const auto& vs = cfg.verify;
  json verifier{{"paths", vs.n_paths},
                {"steps", vs.n_steps},
                {"h_ladder", vs.options.h_ladder},
                {"slack", vs.options.slack},
                {"include_null", vs.perturbations.include_null},
                {"exposure_offsets", vs.perturbations.exposure_offsets},
                {"consumption_offsets", vs.perturbations.consumption_offsets}};
  if (vs.points) {
    json pts = json::array();
    for (const auto& p : *vs.points) pts.push_back({{"t", p.t}, {"x", p.x}});
    verifier["points"] = pts;
  }
  if (!vs.perturbations.absolute.empty()) {
    json perts = json::array();
    for (const auto& p : vs.perturbations.absolute) perts.push_back({{"c", p.c_pert}, {"pi", p.pi_pert}});
    verifier["perturbations"] = perts;
  }
  json doc{
      {"model", to_json(cfg.model)},
      {"solver",
       {{"steps", cfg.solver.steps},
        {"tol", cfg.solver.picard.tol},
        {"max_iter", cfg.solver.picard.max_iter},
        {"damping", cfg.solver.picard.damping},
        {"oscillation_window", cfg.solver.picard.oscillation_window},
        {"method", std::string(to_string(cfg.solver.method))},
        {"convention", std::string(to_string(cfg.solver.convention))}}},
      {"simulation", simulation},
      {"verifier", verifier},
      {"output", {{"dir", cfg.output_dir}, {"formats", cfg.formats}}},
  };
  if (cfg.sweep) doc["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
  return doc;
}

void set_parameter(ModelConfig& cfg, const std::string& name, double value) {
  if (name == "gamma") cfg.prefs.gamma = value;
  else if (name == "beta") cfg.prefs.beta = value;
  else if (name == "delta") cfg.prefs.delta = value;
  else if (name == "rho") cfg.prefs.rho = value;
  else if (name == "mu") cfg.market.mu = value;
  else if (name == "sigma") cfg.market.sigma = value;
  else if (name == "r") cfg.market.r = value;
  else bad("parameter '" + name + "' cannot be swept");
}

}  // namespace mvu
