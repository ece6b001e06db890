#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mfc/plants.hpp"
#include "mfc/scenario.hpp"

namespace mfc {

/// Per-loop columns of a TimeSeries, one entry per row.
struct LoopTrace {
  std::vector<double> y_ref;
  std::vector<double> y_true;
  std::vector<double> y_meas;
  std::vector<double> u;
  /// True tracking error y_true - y_ref.
  std::vector<double> e;
  std::vector<double> f_est;
  /// 1 while the reference is in a move (non-Hold segment), else 0.
  std::vector<double> ref_moving;
};

/// Sampled log of a run. Rows are t_k = k * period, k = 0..steps; a diverged
/// run stops at the last row that could be logged.
struct TimeSeries {
  std::vector<double> t;
  std::vector<LoopTrace> loops;
  std::vector<std::string> extra_names;
  /// extras[column][row]
  std::vector<std::vector<double>> extras;
  bool diverged = false;
  std::string divergence_reason;

  std::size_t rows() const { return t.size(); }
};

/// Builds the plant a scenario describes, in its initial state.
std::unique_ptr<Plant> make_plant(const PlantConfig& config, double period);

/// Hold-interval average of y' - alpha u for one loop: clones `plant`, holds
/// `u` (channel `loop` replaced by `u_loop`) for `period` and returns
/// (y(t + period) - y(t)) / period - alpha u_loop.
double oracle_f(const Plant& plant, std::span<const double> u, std::size_t loop, double u_loop,
                double alpha, double period);

/// Input that makes the next-sample output slope (y(t + period) - y(t)) / period
/// equal `target` on channel `loop`, found by bracketing inside the plant's
/// input domain. Throws NumericError if no bracket is found.
double oracle_input(const Plant& plant, std::span<const double> u, std::size_t loop, double target,
                    double period, double u_guess);

/// Runs the sampled loop: measure, estimate F, compute u, hold u over the
/// next period. Deterministic given the scenario (seed included).
TimeSeries run_scenario(const Scenario& scenario);

}  // namespace mfc
