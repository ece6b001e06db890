#pragma once

#include <span>

#include <Eigen/Dense>

namespace mfc {

/// y^(n) = F + a u with known order n and known constant input gain a.
struct AdrcPlantForm {
  int n = 1;
  double a = 1.0;

  void validate() const;
};

/// Extended state z = (y, y', ..., y^(n-1), F) and the observer bandwidth.
struct EsoState {
  Eigen::VectorXd z;
  double omega_o = 10.0;
};

/// Observer gains placing all n+1 poles at -omega_o: the coefficients of
/// (s + omega_o)^(n+1) after the leading one.
Eigen::VectorXd eso_gains(int n, double omega_o);

/// State-feedback gains k_1..k_n placing the tracking-error poles at
/// -omega_c, i.e. s^n + k_n s^(n-1) + ... + k_1 = (s + omega_c)^n.
Eigen::VectorXd adrc_feedback_gains(int n, double omega_c);

/// Linear extended state observer, integrated with RK4 over `dt` with `y`
/// and `u` held:
///   z_i'     = z_{i+1} + l_i (y - z_1),          i < n
///   z_n'     = z_{n+1} + a u + l_n (y - z_1)
///   z_{n+1}' = l_{n+1} (y - z_1)
EsoState eso_update(const EsoState& state, double y_meas, double u, const AdrcPlantForm& form,
                    double dt);

/// u = (y*^(n) - z_{n+1} - sum_i k_i (z_i - y*^(i-1))) / a.
/// `ref` holds y*, y*', ..., y*^(n).
double adrc_control(const EsoState& state, std::span<const double> ref,
                    std::span<const double> gains, const AdrcPlantForm& form);

/// ESO plus disturbance-cancelling state feedback for one loop.
class AdrcController {
 public:
  AdrcController(AdrcPlantForm form, double omega_o, double omega_c, double warmup = 0.0);

  /// First call seeds z_1 with the measurement; later calls advance the
  /// observer by `dt` under the previously applied input. Returns 0 until
  /// `warmup` has elapsed.
  double update(double t, double y_meas, double u_prev, std::span<const double> ref, double dt);

  double disturbance_estimate() const { return state_.z[form_.n]; }
  const EsoState& state() const { return state_; }
  const AdrcPlantForm& form() const { return form_; }

 private:
  AdrcPlantForm form_;
  EsoState state_;
  Eigen::VectorXd gains_;
  double warmup_;
  bool started_ = false;
  double t_start_ = 0.0;
};

}  // namespace mfc
