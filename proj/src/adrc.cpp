#include "mfc/adrc.hpp"

#include <cmath>
#include <string>

#include "mfc/errors.hpp"
#include "mfc/plants.hpp"
#include "mfc/rk4.hpp"

namespace mfc {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void AdrcPlantForm::validate() const {
  if (n < 1) throw ConfigError("ADRC order n must be >= 1");
  if (!std::isfinite(a) || a == 0.0) throw ConfigError("ADRC input gain a must be finite and nonzero");
}

Eigen::VectorXd eso_gains(int n, double omega_o) {
  if (n < 1) throw ConfigError("ADRC order n must be >= 1");
  if (!(omega_o > 0.0)) throw ConfigError("observer bandwidth must be positive");
  Eigen::VectorXd l(n + 1);
  for (int i = 1; i <= n + 1; ++i) l[i - 1] = binomial(n + 1, i) * std::pow(omega_o, i);
  return l;
}

Eigen::VectorXd adrc_feedback_gains(int n, double omega_c) {
  if (n < 1) throw ConfigError("ADRC order n must be >= 1");
  if (!(omega_c > 0.0)) throw ConfigError("controller bandwidth must be positive");
  Eigen::VectorXd k(n);
  // k_i multiplies e^(i-1); its coefficient in (s + w)^n is C(n, i-1) w^(n-i+1).
  for (int i = 1; i <= n; ++i) k[i - 1] = binomial(n, i - 1) * std::pow(omega_c, n - i + 1);
  return k;
}

EsoState eso_update(const EsoState& state, double y_meas, double u, const AdrcPlantForm& form,
                    double dt) {
  form.validate();
  if (!(dt > 0.0)) throw ConfigError("observer step must be positive");
  const int n = form.n;
  if (state.z.size() != n + 1) throw ConfigError("observer state has the wrong dimension");
  if (!std::isfinite(y_meas) || !std::isfinite(u)) throw NumericError("non-finite observer input");

  const Eigen::VectorXd l = eso_gains(n, state.omega_o);
  EsoState next = state;
  rk4_integrate(next.z, dt, kOdeSubsteps, [&](const Eigen::VectorXd& z) {
    const double innovation = y_meas - z[0];
    Eigen::VectorXd dz(n + 1);
    for (int i = 0; i < n; ++i) dz[i] = z[i + 1] + l[i] * innovation;
    dz[n - 1] += form.a * u;
    dz[n] = l[n] * innovation;
    return dz;
  });
  try {
    check_bounded(next.z, "extended state observer");
  } catch (const DivergenceError&) {
    throw DivergenceError("observer diverged");
  }
  return next;
}

double adrc_control(const EsoState& state, std::span<const double> ref,
                    std::span<const double> gains, const AdrcPlantForm& form) {
  form.validate();
  const auto n = static_cast<std::size_t>(form.n);
  if (ref.size() != n + 1 || gains.size() != n || static_cast<std::size_t>(state.z.size()) != n + 1) {
    throw ConfigError("ADRC reference, gains and observer sizes disagree with the order");
  }
  double num = ref[n] - state.z[static_cast<Eigen::Index>(n)];
  for (std::size_t i = 0; i < n; ++i) {
    num -= gains[i] * (state.z[static_cast<Eigen::Index>(i)] - ref[i]);
  }
  const double u = num / form.a;
  if (!std::isfinite(u)) throw NumericError("non-finite ADRC command");
  return u;
}

AdrcController::AdrcController(AdrcPlantForm form, double omega_o, double omega_c, double warmup)
    : form_(form),
      state_{Eigen::VectorXd::Zero(form.n + 1), omega_o},
      gains_(adrc_feedback_gains(form.n, omega_c)),
      warmup_(warmup) {
  form_.validate();
  eso_gains(form_.n, omega_o);
  if (!(warmup >= 0.0)) throw ConfigError("ADRC warm-up must be >= 0");
}

double AdrcController::update(double t, double y_meas, double u_prev, std::span<const double> ref,
                              double dt) {
  if (!started_) {
    state_.z[0] = y_meas;
    started_ = true;
    t_start_ = t;
  } else {
    state_ = eso_update(state_, y_meas, u_prev, form_, dt);
  }
  if (t - t_start_ < warmup_) return 0.0;
  return adrc_control(state_, ref, {gains_.data(), static_cast<std::size_t>(gains_.size())}, form_);
}

}  // namespace mfc
