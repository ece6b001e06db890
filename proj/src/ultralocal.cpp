#include "mfc/ultralocal.hpp"

#include <cmath>
#include <string>

#include "mfc/errors.hpp"

namespace mfc {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string("non-finite ") + what);
  }
}

}  // namespace

void UltraLocalModel::validate() const {
  if (nu != 1 && nu != 2) {
    throw ConfigError("ultra-local order nu must be 1 or 2, got " + std::to_string(nu));
  }
  if (!std::isfinite(alpha) || alpha == 0.0) {
    throw ConfigError("ultra-local gain alpha must be finite and nonzero");
  }
}

void Gains::validate() const {
  if (!(kp >= 0.0) || !(ki >= 0.0) || !(kd >= 0.0) || !std::isfinite(kp) ||
      !std::isfinite(ki) || !std::isfinite(kd)) {
    throw ConfigError("controller gains must be finite and non-negative");
  }
}

void InputLimits::validate() const {
  if (!(lower <= upper)) {
    throw ConfigError("input limits require lower <= upper");
  }
}

ControlCommand intelligent_control(const UltraLocalModel& model, const Gains& gains,
                                   const ControlInputs& in,
                                   const std::optional<InputLimits>& limits) {
  model.validate();
  require_finite(in.e, "tracking error");
  require_finite(in.ref_deriv, "reference derivative");
  require_finite(in.f_est, "F estimate");

  double numerator = in.ref_deriv - in.f_est - gains.kp * in.e;
  if (gains.ki != 0.0) {
    require_finite(in.e_int, "error integral");
    numerator -= gains.ki * in.e_int;
  }
  if (gains.kd != 0.0) {
    require_finite(in.e_dot, "error derivative");
    numerator -= gains.kd * in.e_dot;
  }

  ControlCommand cmd{numerator / model.alpha, in.f_est, false};
  if (limits) {
    if (cmd.u < limits->lower) {
      cmd.u = limits->lower;
      cmd.saturated = true;
    } else if (cmd.u > limits->upper) {
      cmd.u = limits->upper;
      cmd.saturated = true;
    }
  }
  return cmd;
}

double closed_loop_error_rhs(const Gains& gains, double e, double e_int, double e_dot,
                             double f_mismatch) {
  require_finite(e, "tracking error");
  require_finite(f_mismatch, "F mismatch");
  double rhs = -gains.kp * e + f_mismatch;
  if (gains.ki != 0.0) {
    require_finite(e_int, "error integral");
    rhs -= gains.ki * e_int;
  }
  if (gains.kd != 0.0) {
    require_finite(e_dot, "error derivative");
    rhs -= gains.kd * e_dot;
  }
  return rhs;
}

IntelligentController::IntelligentController(UltraLocalModel model, Gains gains,
                                             std::optional<InputLimits> limits)
    : model_(model), gains_(gains), limits_(limits) {
  model_.validate();
  gains_.validate();
  if (limits_) limits_->validate();
}

ControlCommand IntelligentController::update(double t, double e, double e_dot,
                                             double ref_deriv, double f_est) {
  require_finite(t, "time");
  require_finite(e, "tracking error");
  if (state_.t_prev) {
    const double dt = t - *state_.t_prev;
    if (!(dt > 0.0)) {
      throw OrderingError("controller update times must increase");
    }
    state_.e_int += 0.5 * (e + *state_.e_prev) * dt;
  }
  state_.e_prev = e;
  state_.t_prev = t;
  return intelligent_control(model_, gains_, {e, state_.e_int, e_dot, ref_deriv, f_est},
                             limits_);
}

}  // namespace mfc
