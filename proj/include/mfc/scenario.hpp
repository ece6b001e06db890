#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfc/estimators.hpp"
#include "mfc/noise.hpp"
#include "mfc/plants.hpp"
#include "mfc/trajectories.hpp"
#include "mfc/ultralocal.hpp"

namespace mfc {

inline constexpr int kScenarioSchemaVersion = 1;

/// Plant identity and parameters. `kind` is one of transfer_function,
/// case1..case4, three_tank, heat; fields irrelevant to the kind are ignored.
struct PlantConfig {
  std::string kind = "transfer_function";
  std::vector<double> numerator{1.0};
  std::vector<double> denominator{1.0, 1.0};
  /// Initial state in the plant's own layout (levels for three_tank). Missing
  /// entries are zero.
  std::vector<double> initial_state;
  /// Constant input disturbance per input channel (transfer_function only).
  std::vector<double> input_disturbance;
  /// Case 2 input smoother time constant; 0 selects 2 * period.
  double input_smoothing = 0.0;
  ThreeTankParams tank;
  HeatParams heat;
  /// Heat plant: boundary value the initial affine profile is built from.
  double initial_control = 0.5;
};

enum class ControllerKind { iP, iPI, iPD, iPID, ADRC };

struct ControllerConfig {
  ControllerKind kind = ControllerKind::iP;
  UltraLocalModel model;
  Gains gains{1.0, 0.0, 0.0};
  std::optional<InputLimits> limits;
  /// Low-pass time constant on the error derivative (iPD/iPID); 0 disables.
  double derivative_filter = 0.0;

  // ADRC
  int adrc_order = 1;
  double adrc_gain = 1.0;
  double omega_o = 10.0;
  double omega_c = 2.0;
  double warmup = 0.0;
};

enum class EstimatorKind { Algebraic, ClosedLoop, Oracle };

/// F estimator. The algebraic estimator's order follows the model's nu.
/// Oracle reads the simulated plant directly and exists for testing only.
struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Algebraic;
  double tau = 0.1;
  QuadratureRule rule = QuadratureRule::SampledHold;
};

/// Declarative reference: a staircase of (time, value) levels with a
/// smoothing time constant, or an explicit segment list.
struct ReferenceSpec {
  enum class Kind { Staircase, Segments };
  Kind kind = Kind::Staircase;
  std::vector<std::pair<double, double>> levels;
  double smoothing = 0.0;
  std::vector<Segment> segments;

  /// Staircases run to `horizon`; explicit segments must cover it.
  ReferenceProfile build(double horizon) const;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "scenario";
  std::string description;
  PlantConfig plant;
  ControllerConfig controller;
  EstimatorConfig estimator;
  /// One reference per plant output.
  std::vector<ReferenceSpec> references;
  NoiseSpec noise;
  double period = 0.01;
  double horizon = 10.0;

  /// Number of samples after t = 0, round(horizon / period).
  std::size_t steps() const;
  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

std::string to_string(ControllerKind k);
std::string to_string(EstimatorKind k);
std::string to_string(QuadratureRule r);
ControllerKind parse_controller_kind(std::string_view s);
EstimatorKind parse_estimator_kind(std::string_view s);
QuadratureRule parse_quadrature_rule(std::string_view s);

/// Pretty-printed JSON, stable key order.
std::string scenario_to_json(const Scenario& s);
/// Parses and validates. Unknown keys are rejected.
Scenario scenario_from_json(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace mfc
