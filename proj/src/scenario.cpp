#include "mfc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mfc/errors.hpp"

namespace mfc {

using nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kPlantKinds = {"transfer_function", "case1", "case2", "case3",
                                              "case4", "three_tank", "heat"};

std::size_t plant_outputs(const PlantConfig& p) { return p.kind == "three_tank" ? 2 : 1; }

void require_keys(const ordered_json& j, std::initializer_list<std::string_view> allowed,
                  std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
  }
}

template <class T>
T get_or(const ordered_json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T get_req(const ordered_json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw ConfigError(std::string("missing '") + key + "' in " + std::string(where));
  return get_or<T>(j, key, T{});
}

// JSON has no infinities; unbounded limits are written as null.
ordered_json bound_to_json(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double bound_from_json(const ordered_json& v, double unbounded) {
  if (v.is_null()) return unbounded;
  if (!v.is_number()) throw ConfigError("input limit must be a number or null");
  return v.get<double>();
}

ordered_json segment_to_json(const Segment& s) {
  if (const auto* h = std::get_if<HoldSegment>(&s)) {
    return {{"type", "hold"}, {"t0", h->t0}, {"t1", h->t1}, {"value", h->value}};
  }
  if (const auto* b = std::get_if<BezierSegment>(&s)) {
    return {{"type", "bezier"}, {"t0", b->t0}, {"t1", b->t1}, {"y_start", b->y_start}, {"y_end", b->y_end}};
  }
  const auto& f = std::get<FilteredStepSegment>(s);
  return {{"type", "filtered"}, {"t0", f.t0},       {"t1", f.t1},
          {"y0", f.y0},         {"v0", f.v0},       {"target", f.target},
          {"time_constant", f.time_constant}};
}

Segment segment_from_json(const ordered_json& j) {
  const auto type = get_req<std::string>(j, "type", "segment");
  const char* w = "segment";
  if (type == "hold") {
    require_keys(j, {"type", "t0", "t1", "value"}, w);
    return HoldSegment{get_req<double>(j, "t0", w), get_req<double>(j, "t1", w), get_req<double>(j, "value", w)};
  }
  if (type == "bezier") {
    require_keys(j, {"type", "t0", "t1", "y_start", "y_end"}, w);
    return BezierSegment{get_req<double>(j, "t0", w), get_req<double>(j, "t1", w),
                         get_req<double>(j, "y_start", w), get_req<double>(j, "y_end", w)};
  }
  if (type == "filtered") {
    require_keys(j, {"type", "t0", "t1", "y0", "v0", "target", "time_constant"}, w);
    return FilteredStepSegment{get_req<double>(j, "t0", w),     get_req<double>(j, "t1", w),
                               get_req<double>(j, "y0", w),     get_or<double>(j, "v0", 0.0),
                               get_req<double>(j, "target", w), get_req<double>(j, "time_constant", w)};
  }
  throw ConfigError("unknown segment type '" + type + "'");
}

ordered_json plant_to_json(const PlantConfig& p) {
  ordered_json j{{"kind", p.kind}};
  if (p.kind == "transfer_function") {
    j["numerator"] = p.numerator;
    j["denominator"] = p.denominator;
    j["input_disturbance"] = p.input_disturbance;
  }
  if (p.kind != "heat") j["initial_state"] = p.initial_state;
  if (p.kind == "case2") j["input_smoothing"] = p.input_smoothing;
  if (p.kind == "three_tank") {
    j["tank"] = {{"section", p.tank.section}, {"pipe_section", p.tank.pipe_section},
                 {"mu1", p.tank.mu1},         {"mu2", p.tank.mu2},
                 {"mu3", p.tank.mu3},         {"gravity", p.tank.gravity}};
  }
  if (p.kind == "heat") {
    j["heat"] = {{"nodes", p.heat.nodes},
                 {"left_boundary", p.heat.left_boundary},
                 {"sensor_x", p.heat.sensor_x}};
    j["initial_control"] = p.initial_control;
  }
  return j;
}

PlantConfig plant_from_json(const ordered_json& j) {
  const char* w = "plant";
  PlantConfig p;
  p.kind = get_req<std::string>(j, "kind", w);
  if (p.kind == "transfer_function") {
    require_keys(j, {"kind", "numerator", "denominator", "input_disturbance", "initial_state"}, w);
    p.numerator = get_req<std::vector<double>>(j, "numerator", w);
    p.denominator = get_req<std::vector<double>>(j, "denominator", w);
    p.input_disturbance = get_or<std::vector<double>>(j, "input_disturbance", {});
  } else if (p.kind == "case2") {
    require_keys(j, {"kind", "initial_state", "input_smoothing"}, w);
    p.input_smoothing = get_or<double>(j, "input_smoothing", 0.0);
  } else if (p.kind == "three_tank") {
    require_keys(j, {"kind", "initial_state", "tank"}, w);
    if (j.contains("tank")) {
      const auto& t = j.at("tank");
      require_keys(t, {"section", "pipe_section", "mu1", "mu2", "mu3", "gravity"}, "plant.tank");
      const ThreeTankParams d;
      p.tank = {get_or(t, "section", d.section), get_or(t, "pipe_section", d.pipe_section),
                get_or(t, "mu1", d.mu1),         get_or(t, "mu2", d.mu2),
                get_or(t, "mu3", d.mu3),         get_or(t, "gravity", d.gravity)};
    }
  } else if (p.kind == "heat") {
    require_keys(j, {"kind", "heat", "initial_control"}, w);
    if (j.contains("heat")) {
      const auto& h = j.at("heat");
      require_keys(h, {"nodes", "left_boundary", "sensor_x"}, "plant.heat");
      const HeatParams d;
      p.heat = {get_or(h, "nodes", d.nodes), get_or(h, "left_boundary", d.left_boundary),
                get_or(h, "sensor_x", d.sensor_x)};
    }
    p.initial_control = get_or(j, "initial_control", 0.5);
  } else {
    require_keys(j, {"kind", "initial_state"}, w);
  }
  p.initial_state = get_or<std::vector<double>>(j, "initial_state", {});
  return p;
}

ordered_json controller_to_json(const ControllerConfig& c) {
  ordered_json j{{"kind", to_string(c.kind)}};
  if (c.kind == ControllerKind::ADRC) {
    j["n"] = c.adrc_order;
    j["a"] = c.adrc_gain;
    j["omega_o"] = c.omega_o;
    j["omega_c"] = c.omega_c;
    j["warmup"] = c.warmup;
  } else {
    j["nu"] = c.model.nu;
    j["alpha"] = c.model.alpha;
    j["kp"] = c.gains.kp;
    j["ki"] = c.gains.ki;
    j["kd"] = c.gains.kd;
    j["derivative_filter"] = c.derivative_filter;
  }
  j["u_limits"] = c.limits ? ordered_json::array({bound_to_json(c.limits->lower), bound_to_json(c.limits->upper)})
                           : ordered_json(nullptr);
  return j;
}

ControllerConfig controller_from_json(const ordered_json& j) {
  const char* w = "controller";
  ControllerConfig c;
  c.kind = parse_controller_kind(get_req<std::string>(j, "kind", w));
  if (c.kind == ControllerKind::ADRC) {
    require_keys(j, {"kind", "n", "a", "omega_o", "omega_c", "warmup", "u_limits"}, w);
    c.adrc_order = get_req<int>(j, "n", w);
    c.adrc_gain = get_req<double>(j, "a", w);
    c.omega_o = get_req<double>(j, "omega_o", w);
    c.omega_c = get_req<double>(j, "omega_c", w);
    c.warmup = get_or(j, "warmup", 0.0);
  } else {
    require_keys(j, {"kind", "nu", "alpha", "kp", "ki", "kd", "derivative_filter", "u_limits"}, w);
    c.model.nu = get_or(j, "nu", 1);
    c.model.alpha = get_req<double>(j, "alpha", w);
    c.gains.kp = get_req<double>(j, "kp", w);
    c.gains.ki = get_or(j, "ki", 0.0);
    c.gains.kd = get_or(j, "kd", 0.0);
    c.derivative_filter = get_or(j, "derivative_filter", 0.0);
  }
  if (j.contains("u_limits") && !j.at("u_limits").is_null()) {
    const auto& l = j.at("u_limits");
    if (!l.is_array() || l.size() != 2) throw ConfigError("u_limits must be [lower, upper]");
    c.limits = InputLimits{bound_from_json(l[0], -kInf), bound_from_json(l[1], kInf)};
  }
  return c;
}

ordered_json reference_to_json(const ReferenceSpec& r) {
  if (r.kind == ReferenceSpec::Kind::Staircase) {
    ordered_json levels = ordered_json::array();
    for (const auto& [t, v] : r.levels) levels.push_back({t, v});
    return {{"staircase", {{"levels", levels}, {"smoothing", r.smoothing}}}};
  }
  ordered_json segs = ordered_json::array();
  for (const auto& s : r.segments) segs.push_back(segment_to_json(s));
  return {{"segments", segs}};
}

ReferenceSpec reference_from_json(const ordered_json& j) {
  require_keys(j, {"staircase", "segments"}, "reference");
  ReferenceSpec r;
  if (j.contains("staircase") == j.contains("segments")) {
    throw ConfigError("reference needs exactly one of 'staircase' or 'segments'");
  }
  if (j.contains("staircase")) {
    const auto& s = j.at("staircase");
    require_keys(s, {"levels", "smoothing"}, "reference.staircase");
    r.kind = ReferenceSpec::Kind::Staircase;
    r.smoothing = get_or(s, "smoothing", 0.0);
    for (const auto& lv : s.at("levels")) {
      if (!lv.is_array() || lv.size() != 2) throw ConfigError("staircase level must be [time, value]");
      r.levels.emplace_back(lv[0].get<double>(), lv[1].get<double>());
    }
  } else {
    r.kind = ReferenceSpec::Kind::Segments;
    for (const auto& s : j.at("segments")) r.segments.push_back(segment_from_json(s));
  }
  return r;
}

}  // namespace

ReferenceProfile ReferenceSpec::build(double horizon) const {
  if (kind == Kind::Staircase) return staircase(levels, smoothing, horizon);
  ReferenceProfile p(segments);
  if (p.horizon() < horizon - 1e-9 * (1.0 + horizon)) {
    throw ConfigError("reference segments end before the scenario horizon");
  }
  return p;
}

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / period));
}

void Scenario::validate() const {
  if (schema_version != kScenarioSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  }
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("period must be positive");
  if (!std::isfinite(horizon) || horizon < 100.0 * period * (1.0 - 1e-12)) {
    throw ConfigError("horizon must be at least 100 periods");
  }
  if (std::abs(static_cast<double>(steps()) * period - horizon) > 1e-9 * horizon) {
    throw ConfigError("horizon must be a whole number of periods");
  }

  bool known = false;
  for (const auto& k : kPlantKinds) known = known || plant.kind == k;
  if (!known) throw ConfigError("unknown plant kind '" + plant.kind + "'");
  const std::size_t outputs = plant_outputs(plant);
  if (references.size() != outputs) {
    throw ConfigError("scenario needs one reference per plant output (" + std::to_string(outputs) + ")");
  }
  for (const auto& r : references) {
    const ReferenceProfile p = r.build(horizon);
    if (p.start() > 1e-12) throw ConfigError("references must start at t = 0");
  }
  if (!(noise.std >= 0.0) || !std::isfinite(noise.std)) throw ConfigError("noise std must be >= 0");

  const auto& c = controller;
  if (c.limits) c.limits->validate();
  if (plant.kind == "three_tank" && (!c.limits || c.limits->lower < 0.0)) {
    throw ConfigError("three_tank pumps need input limits with lower >= 0");
  }
  if (c.kind == ControllerKind::ADRC) {
    if (c.adrc_order < 1 || c.adrc_order > 2) throw ConfigError("ADRC order must be 1 or 2");
    if (!std::isfinite(c.adrc_gain) || c.adrc_gain == 0.0) throw ConfigError("ADRC gain a must be nonzero");
    if (!(c.omega_o > 0.0) || !(c.omega_c > 0.0)) throw ConfigError("ADRC bandwidths must be positive");
    if (!(c.warmup >= 0.0)) throw ConfigError("ADRC warm-up must be >= 0");
    return;
  }
  c.model.validate();
  c.gains.validate();
  const bool has_i = c.gains.ki != 0.0;
  const bool has_d = c.gains.kd != 0.0;
  const bool want_i = c.kind == ControllerKind::iPI || c.kind == ControllerKind::iPID;
  const bool want_d = c.kind == ControllerKind::iPD || c.kind == ControllerKind::iPID;
  if (has_i && !want_i) throw ConfigError(to_string(c.kind) + " controller cannot have ki != 0");
  if (has_d && !want_d) throw ConfigError(to_string(c.kind) + " controller cannot have kd != 0");
  if (!(c.derivative_filter >= 0.0)) throw ConfigError("derivative filter must be >= 0");

  const auto& e = estimator;
  if (e.kind == EstimatorKind::Oracle) {
    if (c.model.nu != 1 || has_i) throw ConfigError("oracle estimator supports nu = 1 without ki");
    if (plant.kind == "heat") throw ConfigError("oracle estimator is not available for the heat plant");
    return;
  }
  window_periods(e.tau, period);
  if (e.kind == EstimatorKind::ClosedLoop && c.model.nu != 1) {
    throw ConfigError("closed-loop estimator requires nu = 1");
  }
}

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::iP: return "iP";
    case ControllerKind::iPI: return "iPI";
    case ControllerKind::iPD: return "iPD";
    case ControllerKind::iPID: return "iPID";
    case ControllerKind::ADRC: return "ADRC";
  }
  return "?";
}

std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Algebraic: return "algebraic";
    case EstimatorKind::ClosedLoop: return "closedloop";
    case EstimatorKind::Oracle: return "oracle";
  }
  return "?";
}

std::string to_string(QuadratureRule r) {
  return r == QuadratureRule::Trapezoid ? "trapezoid" : "sampled_hold";
}

ControllerKind parse_controller_kind(std::string_view s) {
  for (auto k : {ControllerKind::iP, ControllerKind::iPI, ControllerKind::iPD, ControllerKind::iPID,
                 ControllerKind::ADRC}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown controller kind '" + std::string(s) + "'");
}

EstimatorKind parse_estimator_kind(std::string_view s) {
  for (auto k : {EstimatorKind::Algebraic, EstimatorKind::ClosedLoop, EstimatorKind::Oracle}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown estimator kind '" + std::string(s) + "'");
}

QuadratureRule parse_quadrature_rule(std::string_view s) {
  if (s == "trapezoid") return QuadratureRule::Trapezoid;
  if (s == "sampled_hold") return QuadratureRule::SampledHold;
  throw ConfigError("unknown quadrature rule '" + std::string(s) + "'");
}

std::string scenario_to_json(const Scenario& s) {
  ordered_json refs = ordered_json::array();
  for (const auto& r : s.references) refs.push_back(reference_to_json(r));
  ordered_json j{
      {"schema_version", s.schema_version},
      {"name", s.name},
      {"description", s.description},
      {"period", s.period},
      {"horizon", s.horizon},
      {"plant", plant_to_json(s.plant)},
      {"controller", controller_to_json(s.controller)},
      {"estimator",
       {{"kind", to_string(s.estimator.kind)}, {"tau", s.estimator.tau}, {"quadrature", to_string(s.estimator.rule)}}},
      {"references", refs},
      {"noise", {{"std", s.noise.std}, {"seed", s.noise.seed}}},
  };
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  const char* w = "scenario";
  require_keys(j, {"schema_version", "name", "description", "period", "horizon", "plant", "controller",
                   "estimator", "references", "noise"},
               w);
  Scenario s;
  s.schema_version = get_req<int>(j, "schema_version", w);
  if (s.schema_version != kScenarioSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(s.schema_version));
  }
  s.name = get_or<std::string>(j, "name", "scenario");
  s.description = get_or<std::string>(j, "description", "");
  s.period = get_req<double>(j, "period", w);
  s.horizon = get_req<double>(j, "horizon", w);
  s.plant = plant_from_json(j.at("plant"));
  s.controller = controller_from_json(get_req<ordered_json>(j, "controller", w));
  if (j.contains("estimator")) {
    const auto& e = j.at("estimator");
    require_keys(e, {"kind", "tau", "quadrature"}, "estimator");
    s.estimator.kind = parse_estimator_kind(get_or<std::string>(e, "kind", "algebraic"));
    s.estimator.tau = get_or(e, "tau", s.estimator.tau);
    s.estimator.rule = parse_quadrature_rule(get_or<std::string>(e, "quadrature", "sampled_hold"));
  }
  const auto refs = get_req<ordered_json>(j, "references", w);
  if (!refs.is_array()) throw ConfigError("references must be an array");
  for (const auto& r : refs) s.references.push_back(reference_from_json(r));
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    require_keys(n, {"std", "seed"}, "noise");
    s.noise.std = get_or(n, "std", 0.0);
    s.noise.seed = get_or<std::uint64_t>(n, "seed", 0);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

}  // namespace mfc
