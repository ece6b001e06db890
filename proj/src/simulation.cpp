#include "mfc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include <boost/math/tools/roots.hpp>

#include "mfc/adrc.hpp"
#include "mfc/errors.hpp"
#include "mfc/estimators.hpp"
#include "mfc/noise.hpp"
#include "mfc/trajectories.hpp"
#include "mfc/ultralocal.hpp"

namespace mfc {

namespace {

NonlinearCase parse_case(const std::string& kind) {
  if (kind == "case1") return NonlinearCase::Case1;
  if (kind == "case2") return NonlinearCase::Case2;
  if (kind == "case3") return NonlinearCase::Case3;
  if (kind == "case4") return NonlinearCase::Case4;
  throw ConfigError("unknown plant kind '" + kind + "'");
}

std::optional<double> try_slope(const Plant& plant, std::span<const double> u, std::size_t loop,
                                double u_loop, double period) {
  std::vector<double> held(u.begin(), u.end());
  held[loop] = u_loop;
  const double y0 = plant.outputs()[loop];
  auto probe = plant.clone();
  try {
    probe->step(held, period);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  } catch (const std::logic_error&) {
    return std::nullopt;
  }
  const double s = (probe->outputs()[loop] - y0) / period;
  if (!std::isfinite(s)) return std::nullopt;
  return s;
}

/// Per-loop controller, estimator and bookkeeping.
struct Loop {
  ReferenceProfile ref;
  std::optional<IntelligentController> ip;
  std::optional<AdrcController> adrc;
  std::optional<AlgebraicEstimator> algebraic;
  std::optional<TrackingWindow> tracking;
  std::optional<ErrorDerivativeEstimator> derivative;
  std::vector<std::pair<double, double>> moves;
  double u_prev = 0.0;
};

bool in_move(const std::vector<std::pair<double, double>>& moves, double t) {
  for (const auto& [a, b] : moves) {
    if (t >= a && t < b) return true;
  }
  return false;
}

}  // namespace

std::unique_ptr<Plant> make_plant(const PlantConfig& c, double period) {
  if (c.kind == "transfer_function") {
    auto p = std::make_unique<StateSpacePlant>(realize_transfer_function(c.numerator, c.denominator));
    const auto n = p->state().size();
    if (static_cast<Eigen::Index>(c.initial_state.size()) > n) {
      throw ConfigError("too many initial state values for transfer_function");
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < c.initial_state.size(); ++i) x[static_cast<Eigen::Index>(i)] = c.initial_state[i];
    p->set_state(x);
    if (!c.input_disturbance.empty()) {
      p->set_input_disturbance(Eigen::Map<const Eigen::VectorXd>(
          c.input_disturbance.data(), static_cast<Eigen::Index>(c.input_disturbance.size())));
    }
    return p;
  }
  if (c.kind == "three_tank") {
    if (c.initial_state.size() > 3) throw ConfigError("three_tank takes at most 3 initial levels");
    std::array<double, 3> levels{0.0, 0.0, 0.0};
    std::copy(c.initial_state.begin(), c.initial_state.end(), levels.begin());
    return std::make_unique<ThreeTankPlant>(levels, c.tank);
  }
  if (c.kind == "heat") return std::make_unique<HeatPlant>(c.initial_control, c.heat);
  const double smoothing = c.input_smoothing > 0.0 ? c.input_smoothing : 2.0 * period;
  return std::make_unique<NonlinearPlant>(parse_case(c.kind), c.initial_state, smoothing);
}

double oracle_f(const Plant& plant, std::span<const double> u, std::size_t loop, double u_loop,
                double alpha, double period) {
  const auto s = try_slope(plant, u, loop, u_loop, period);
  if (!s) throw NumericError("oracle probe failed");
  return *s - alpha * u_loop;
}

double oracle_input(const Plant& plant, std::span<const double> u, std::size_t loop, double target,
                    double period, double u_guess) {
  const InputDomain dom = plant.input_domain(loop);
  auto h = [&](double v) -> std::optional<double> {
    const auto s = try_slope(plant, u, loop, v, period);
    if (!s) return std::nullopt;
    return *s - target;
  };

  double u0 = std::clamp(u_guess, dom.lower, dom.upper);
  auto h0 = h(u0);
  if (!h0) {
    u0 = std::clamp(0.0, dom.lower, dom.upper);
    h0 = h(u0);
  }
  if (!h0) throw NumericError("oracle cannot evaluate the plant near the current input");
  if (*h0 == 0.0) return u0;

  struct Side {
    double dir, bound, p, hp, step;
  };
  const double step0 = std::max(1e-3, 0.1 * std::abs(u0));
  Side sides[2] = {{+1.0, dom.upper, u0, *h0, step0}, {-1.0, dom.lower, u0, *h0, step0}};
  for (int iter = 0; iter < 400; ++iter) {
    for (Side& s : sides) {
      double next = s.p + s.dir * s.step;
      if (std::isfinite(s.bound) && s.dir * (next - s.bound) >= 0.0) next = 0.5 * (s.p + s.bound);
      if (next == s.p) continue;
      const auto hn = h(next);
      if (!hn) {
        s.step *= 0.25;
        continue;
      }
      if ((*hn > 0.0) != (*h0 > 0.0) || *hn == 0.0) {
        double a = s.p, b = next, fa = s.hp, fb = *hn;
        if (a > b) {
          std::swap(a, b);
          std::swap(fa, fb);
        }
        if (fb == 0.0) return b;
        std::uintmax_t max_iter = 200;
        auto f = [&](double v) {
          const auto r = h(v);
          if (!r) throw NumericError("oracle probe failed inside the bracket");
          return *r;
        };
        const auto root = boost::math::tools::toms748_solve(
            f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), max_iter);
        return 0.5 * (root.first + root.second);
      }
      s.p = next;
      s.hp = *hn;
      s.step *= 2.0;
    }
  }
  throw NumericError("oracle could not bracket the required input");
}

TimeSeries run_scenario(const Scenario& sc) {
  sc.validate();
  auto plant = make_plant(sc.plant, sc.period);
  const std::size_t n_loops = plant->output_count();
  MeasurementNoise noise(sc.noise, n_loops);
  const auto& cc = sc.controller;

  std::vector<Loop> loops(n_loops);
  for (std::size_t i = 0; i < n_loops; ++i) {
    Loop& L = loops[i];
    L.ref = sc.references[i].build(sc.horizon);
    L.moves = L.ref.move_intervals();
    if (sc.plant.kind == "heat") L.u_prev = sc.plant.initial_control;
    if (cc.kind == ControllerKind::ADRC) {
      L.adrc.emplace(AdrcPlantForm{cc.adrc_order, cc.adrc_gain}, cc.omega_o, cc.omega_c, cc.warmup);
      continue;
    }
    L.ip.emplace(cc.model, cc.gains, cc.limits);
    if (cc.gains.kd != 0.0) L.derivative.emplace(sc.period, cc.derivative_filter);
    switch (sc.estimator.kind) {
      case EstimatorKind::Algebraic:
        L.algebraic.emplace(sc.estimator.tau, sc.period, cc.model.nu, sc.estimator.rule);
        break;
      case EstimatorKind::ClosedLoop:
        L.tracking.emplace(sc.estimator.tau, sc.period);
        break;
      case EstimatorKind::Oracle:
        break;
    }
  }

  TimeSeries ts;
  const std::size_t steps = sc.steps();
  ts.t.reserve(steps + 1);
  ts.loops.resize(n_loops);
  ts.extra_names = plant->extra_names();
  ts.extras.resize(ts.extra_names.size());

  std::vector<double> u(n_loops);
  for (std::size_t i = 0; i < n_loops; ++i) u[i] = loops[i].u_prev;

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * sc.period;
    const std::vector<double> y_true = plant->outputs();
    std::vector<double> y_meas = y_true;
    noise.apply(y_meas);

    std::vector<double> f_used(n_loops, 0.0);
    std::vector<ReferenceSample> refs(n_loops);
    try {
      for (std::size_t i = 0; i < n_loops; ++i) {
        Loop& L = loops[i];
        const ReferenceSample r = L.ref.eval(t);
        refs[i] = r;
        const double e = y_meas[i] - r.y;

        if (L.adrc) {
          const double ref_vec[3] = {r.y, r.dy, r.ddy};
          const std::span<const double> rs(ref_vec, static_cast<std::size_t>(cc.adrc_order) + 1);
          double cmd = L.adrc->update(t, y_meas[i], L.u_prev, rs, sc.period);
          if (cc.limits) cmd = std::clamp(cmd, cc.limits->lower, cc.limits->upper);
          u[i] = cmd;
          f_used[i] = L.adrc->disturbance_estimate();
          continue;
        }

        double e_dot = 0.0;
        if (L.derivative) e_dot = L.derivative->push(e).value_or(0.0);
        const double ref_deriv = cc.model.nu == 1 ? r.dy : r.ddy;

        double f_est = 0.0;
        if (L.algebraic) {
          L.algebraic->push(t, y_meas[i], L.u_prev);
          f_est = L.algebraic->estimate(cc.model.alpha).value_or(0.0);
        } else if (L.tracking) {
          f_est = estimate_f_closedloop(*L.tracking, cc.model.alpha, cc.gains.kp).value_or(0.0);
        } else {
          const double target = r.dy - cc.gains.kp * e - cc.gains.kd * e_dot;
          const double u_star = oracle_input(*plant, u, i, target, sc.period, L.u_prev);
          f_est = oracle_f(*plant, u, i, u_star, cc.model.alpha, sc.period);
        }

        const ControlCommand cmd = L.ip->update(t, e, e_dot, ref_deriv, f_est);
        u[i] = cmd.u;
        f_used[i] = cmd.f_used;
        if (L.tracking) L.tracking->push({t, e, cmd.u, r.dy});
      }
    } catch (const NumericError& err) {
      ts.diverged = true;
      ts.divergence_reason = err.what();
      break;
    } catch (const DivergenceError& err) {
      ts.diverged = true;
      ts.divergence_reason = err.what();
      break;
    }

    ts.t.push_back(t);
    for (std::size_t i = 0; i < n_loops; ++i) {
      LoopTrace& tr = ts.loops[i];
      tr.y_ref.push_back(refs[i].y);
      tr.y_true.push_back(y_true[i]);
      tr.y_meas.push_back(y_meas[i]);
      tr.u.push_back(u[i]);
      tr.e.push_back(y_true[i] - refs[i].y);
      tr.f_est.push_back(f_used[i]);
      tr.ref_moving.push_back(in_move(loops[i].moves, t) ? 1.0 : 0.0);
    }
    const std::vector<double> extra = plant->extra_values();
    for (std::size_t c = 0; c < extra.size(); ++c) ts.extras[c].push_back(extra[c]);

    if (k == steps) break;
    try {
      plant->step(u, sc.period);
    } catch (const DivergenceError& err) {
      ts.diverged = true;
      ts.divergence_reason = err.what();
      break;
    }
    for (std::size_t i = 0; i < n_loops; ++i) loops[i].u_prev = u[i];
  }
  return ts;
}

}  // namespace mfc
