#include "mfc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mfc/errors.hpp"

namespace mfc {

Metrics compute_metrics(const TimeSeries& ts) {
  if (ts.rows() == 0 || ts.loops.empty()) throw ConfigError("cannot compute metrics of an empty series");
  const std::size_t n = ts.rows();
  const double t0 = ts.t.front();
  const double t_tail = t0 + 0.2 * (ts.t.back() - t0);
  const double period = n > 1 ? ts.t[1] - ts.t[0] : 0.0;

  Metrics m;
  m.rows = n;
  m.diverged = ts.diverged;
  for (std::size_t i = 0; i < ts.loops.size(); ++i) {
    const LoopTrace& L = ts.loops[i];
    LoopMetrics lm;
    double sum_sq = 0.0;
    std::size_t tail_rows = 0;
    double energy = 0.0;
    double lo = L.y_ref[0];
    double hi = L.y_ref[0];
    for (std::size_t k = 0; k < n; ++k) {
      const double e = L.e[k];
      lm.max_abs_e = std::max(lm.max_abs_e, std::abs(e));
      energy += L.u[k] * L.u[k];
      lo = std::min(lo, L.y_ref[k]);
      hi = std::max(hi, L.y_ref[k]);
      if (ts.t[k] >= t_tail) {
        sum_sq += e * e;
        ++tail_rows;
      }
      if (ts.loops.size() > 1 && L.ref_moving[k] == 0.0) {
        bool other_moves = false;
        for (std::size_t j = 0; j < ts.loops.size(); ++j) {
          other_moves = other_moves || (j != i && ts.loops[j].ref_moving[k] != 0.0);
        }
        if (other_moves) lm.cross_coupling = std::max(lm.cross_coupling, std::abs(e));
      }
    }
    lm.rmse_tail = tail_rows ? std::sqrt(sum_sq / static_cast<double>(tail_rows)) : 0.0;
    lm.control_energy = energy * period;
    lm.ref_amplitude = hi - lo;
    m.loops.push_back(lm);
  }
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json loops = nlohmann::ordered_json::array();
  for (const auto& l : m.loops) {
    loops.push_back({{"rmse_tail", l.rmse_tail},
                     {"max_abs_e", l.max_abs_e},
                     {"control_energy", l.control_energy},
                     {"ref_amplitude", l.ref_amplitude},
                     {"cross_coupling", l.cross_coupling}});
  }
  nlohmann::ordered_json j{{"diverged", m.diverged}, {"rows", m.rows}, {"loops", loops}};
  return j.dump(2) + "\n";
}

}  // namespace mfc
