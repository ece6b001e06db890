#include "mfc/presets.hpp"

#include <functional>
#include <utility>

#include "mfc/errors.hpp"

namespace mfc {

namespace {

// Gains, noise levels and sampling periods are fixed per experiment.
// Reference shapes, horizons and window lengths are chosen to exercise them.

ReferenceSpec steps(std::vector<std::pair<double, double>> levels, double smoothing) {
  ReferenceSpec r;
  r.kind = ReferenceSpec::Kind::Staircase;
  r.levels = std::move(levels);
  r.smoothing = smoothing;
  return r;
}

ControllerConfig ip(double alpha, double kp) {
  ControllerConfig c;
  c.kind = ControllerKind::iP;
  c.model = {1, alpha};
  c.gains = {kp, 0.0, 0.0};
  return c;
}

Scenario base(std::string name, std::string description, PlantConfig plant) {
  Scenario s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.plant = std::move(plant);
  s.period = 0.01;
  s.horizon = 20.0;
  s.noise = {0.0, 1};
  return s;
}

PlantConfig nonlinear(const char* kind, std::vector<double> x0) {
  PlantConfig p;
  p.kind = kind;
  p.initial_state = std::move(x0);
  return p;
}

Scenario linear() {
  PlantConfig p;
  p.kind = "transfer_function";
  p.numerator = {1.0, 4.0, 4.0};
  p.denominator = {1.0, -2.0, -1.0, 2.0};
  Scenario s = base("linear", "(s+2)^2 / ((s-2)(s-1)(s+1)), non-flat output, unstable open loop", p);
  s.controller = ip(1.0, 1.0);
  s.estimator.tau = 0.2;
  s.noise.std = 0.01;
  ReferenceSpec r;
  r.kind = ReferenceSpec::Kind::Segments;
  r.segments = {HoldSegment{0.0, 2.0, 0.0}, BezierSegment{2.0, 5.0, 0.0, 1.0},
                HoldSegment{5.0, 10.0, 1.0}, BezierSegment{10.0, 13.0, 1.0, 0.5},
                HoldSegment{13.0, 20.0, 0.5}};
  s.references = {r};
  return s;
}

Scenario case1() {
  Scenario s = base("case1", "y' - y = sign(u) sqrt|u|", nonlinear("case1", {1.0}));
  s.controller = ip(0.1, 1.0);
  s.estimator.tau = 0.2;
  s.noise.std = 0.05;
  s.references = {steps({{0.0, 1.0}, {2.0, 3.0}, {10.0, 2.0}}, 0.5)};
  return s;
}

Scenario case2() {
  Scenario s = base("case2", "y'' - 1.5 y' - y = (u + u')^3", nonlinear("case2", {}));
  s.controller = ip(10.0, 10.0);
  s.estimator.tau = 0.1;
  s.noise.std = 0.01;
  s.references = {steps({{0.0, 0.0}, {2.0, 1.0}, {10.0, 0.5}}, 0.5)};
  return s;
}

Scenario case3() {
  Scenario s = base("case3", "y'' + 3 y' + 2 y = sign(u) 10^|u|", nonlinear("case3", {1.0, 0.0}));
  s.controller = ip(10.0, 1.0);
  s.estimator.tau = 0.1;
  s.noise.std = 0.01;
  s.references = {steps({{0.0, 1.0}, {2.0, 2.0}, {10.0, 1.5}}, 0.5)};
  return s;
}

Scenario case4() {
  Scenario s = base("case4", "y' - y = (0.5 y' + y) u, started off the reference at y(0) = 0.2",
                    nonlinear("case4", {0.2}));
  s.controller = ip(5.0, 3.0);
  s.estimator.tau = 0.1;
  s.noise.std = 0.05;
  s.references = {steps({{0.0, 1.0}, {4.0, 2.0}, {12.0, 1.5}}, 0.5)};
  return s;
}

Scenario case4_adrc() {
  Scenario s = case4();
  s.name = "case4_adrc";
  s.description = "case4 under the linear-ESO ADRC baseline";
  ControllerConfig c;
  c.kind = ControllerKind::ADRC;
  c.adrc_order = 1;
  c.adrc_gain = 5.0;
  c.omega_o = 20.0;
  c.omega_c = 3.0;
  s.controller = c;
  return s;
}

Scenario three_tank() {
  PlantConfig p;
  p.kind = "three_tank";
  p.initial_state = {0.0, 0.0, 0.0};
  Scenario s = base("three_tank", "three coupled tanks, two independent iP loops", p);
  s.period = 1.0;
  s.horizon = 3000.0;
  s.controller = ip(100.0, 0.5);
  s.controller.limits = InputLimits{0.0, 1e-4};
  s.estimator.tau = 20.0;
  s.noise.std = 0.5e-3;
  s.references = {steps({{0.0, 0.0}, {10.0, 0.3}, {1000.0, 0.45}, {2000.0, 0.35}}, 50.0),
                  steps({{0.0, 0.0}, {10.0, 0.2}}, 50.0)};
  return s;
}

Scenario heat() {
  PlantConfig p;
  p.kind = "heat";
  p.initial_control = 0.5;
  Scenario s = base("heat", "heat equation with boundary control, sensor at x = 1/3", p);
  s.horizon = 15.0;
  s.controller = ip(10.0, 10.0);
  s.estimator.tau = 0.05;
  s.noise.std = 0.01;
  s.references = {steps({{0.0, 0.5}, {1.0, 0.8}, {8.0, 0.65}}, 0.5)};
  return s;
}

Scenario oscillator(bool adrc) {
  PlantConfig p;
  p.kind = "transfer_function";
  p.numerator = {1.0};
  p.denominator = {1.0, 0.0, 1.0};
  p.input_disturbance = {0.5};
  Scenario s = base(adrc ? "oscillator_adrc" : "oscillator_ipd",
                    adrc ? "y'' = -y + u + w under the linear-ESO ADRC baseline"
                         : "y'' = -y + u + w under an iPD controller",
                    p);
  s.noise.std = 0.01;
  s.references = {steps({{0.0, 0.0}, {2.0, 1.0}, {10.0, 0.5}}, 0.5)};
  ControllerConfig c;
  if (adrc) {
    c.kind = ControllerKind::ADRC;
    c.adrc_order = 2;
    c.adrc_gain = 1.0;
    c.omega_o = 20.0;
    c.omega_c = 2.0;
  } else {
    c.kind = ControllerKind::iPD;
    c.model = {2, 1.0};
    c.gains = {4.0, 0.0, 4.0};
    c.derivative_filter = 0.05;
    s.estimator.tau = 0.2;
  }
  s.controller = c;
  return s;
}

const std::vector<std::pair<std::string, std::function<Scenario()>>>& table() {
  static const std::vector<std::pair<std::string, std::function<Scenario()>>> t = {
      {"linear", linear},
      {"case1", case1},
      {"case2", case2},
      {"case3", case3},
      {"case4", case4},
      {"three_tank", three_tank},
      {"heat", heat},
      {"case4_adrc", case4_adrc},
      {"oscillator_ipd", [] { return oscillator(false); }},
      {"oscillator_adrc", [] { return oscillator(true); }},
  };
  return t;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, make] : table()) out.push_back(name);
  return out;
}

Scenario preset(std::string_view name) {
  for (const auto& [n, make] : table()) {
    if (n == name) return make();
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace mfc
