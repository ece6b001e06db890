#pragma once

#include <string>
#include <vector>

#include "mfc/simulation.hpp"

namespace mfc {

struct LoopMetrics {
  /// RMS of e over rows with t >= t_first + 0.2 (t_last - t_first).
  double rmse_tail = 0.0;
  double max_abs_e = 0.0;
  /// sum(u^2) * period
  double control_energy = 0.0;
  /// max(y_ref) - min(y_ref)
  double ref_amplitude = 0.0;
  /// MIMO only: max |e| of this loop while another loop's reference moves
  /// and this one holds; 0 when that never happens.
  double cross_coupling = 0.0;
};

struct Metrics {
  std::vector<LoopMetrics> loops;
  bool diverged = false;
  std::size_t rows = 0;
};

/// Throws ConfigError on an empty series.
Metrics compute_metrics(const TimeSeries& ts);

/// JSON object with one entry per loop.
std::string metrics_to_json(const Metrics& m);

}  // namespace mfc
