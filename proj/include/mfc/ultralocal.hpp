#pragma once

#include <optional>

namespace mfc {

/// The ultra-local model y^(nu) = F + alpha * u. Order and input gain are
/// all the controller knows about the plant.
struct UltraLocalModel {
  int nu = 1;
  double alpha = 1.0;

  /// Throws ConfigError unless nu is 1 or 2 and alpha is finite and nonzero.
  void validate() const;
};

/// Proportional, integral and derivative gains. ki = kd = 0 gives the iP,
/// kd = 0 the iPI, ki = 0 the iPD.
struct Gains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;

  void validate() const;
};

/// Actuator limits applied after the control law. Both bounds inclusive.
struct InputLimits {
  double lower = 0.0;
  double upper = 0.0;

  static InputLimits symmetric(double bound) { return {-bound, bound}; }
  void validate() const;
};

/// Signals consumed by one evaluation of the intelligent control law.
struct ControlInputs {
  double e = 0.0;          ///< tracking error y - y*
  double e_int = 0.0;      ///< running integral of e, read only when ki != 0
  double e_dot = 0.0;      ///< error derivative, read only when kd != 0
  double ref_deriv = 0.0;  ///< nu-th derivative of the reference
  double f_est = 0.0;      ///< current estimate of F
};

struct ControlCommand {
  double u = 0.0;
  double f_used = 0.0;
  bool saturated = false;
};

/// u = (y*^(nu) - F_est - kp e - ki int(e) - kd e_dot) / alpha, so that the
/// loop obeys e^(nu) = -kp e - ki int(e) - kd e_dot + (F - F_est).
ControlCommand intelligent_control(const UltraLocalModel& model, const Gains& gains,
                                   const ControlInputs& in,
                                   const std::optional<InputLimits>& limits = std::nullopt);

/// Highest error derivative e^(nu) of the ideal closed loop given the
/// estimation mismatch F - F_est.
double closed_loop_error_rhs(const Gains& gains, double e, double e_int, double e_dot,
                             double f_mismatch);

/// Mutable part of one control loop.
struct ControllerState {
  double e_int = 0.0;
  std::optional<double> e_prev;
  std::optional<double> t_prev;
};

/// iP/iPI/iPD/iPID controller holding its own error integral. One instance
/// per loop; not thread-safe.
class IntelligentController {
 public:
  IntelligentController(UltraLocalModel model, Gains gains,
                        std::optional<InputLimits> limits = std::nullopt);

  /// Advances the error integral to time t (trapezoidal, once per call) and
  /// evaluates the control law. The integral is never reset.
  ControlCommand update(double t, double e, double e_dot, double ref_deriv, double f_est);

  const UltraLocalModel& model() const { return model_; }
  const Gains& gains() const { return gains_; }
  const ControllerState& state() const { return state_; }

 private:
  UltraLocalModel model_;
  Gains gains_;
  std::optional<InputLimits> limits_;
  ControllerState state_;
};

}  // namespace mfc
