#include "mfc/estimators.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace mfc {

namespace {

// 3-point Gauss-Legendre on [-1, 1]; exact up to degree 5, which covers every
// kernel * hat-function product used here.
constexpr std::array<double, 3> kGaussNodes{-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussWeights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

struct Kernels {
  std::function<double(double)> y;
  std::function<double(double)> u;
  double y_scale;
  double u_scale;
};

Kernels kernels_for(int order, double tau) {
  if (order == 1) {
    return {[tau](double s) { return tau - 2.0 * s; },
            [tau](double s) { return s * (tau - s); },
            -6.0 / (tau * tau * tau), 6.0 / (tau * tau * tau)};
  }
  if (order == 2) {
    const double tau5 = std::pow(tau, 5);
    return {[tau](double s) { return tau * tau - 6.0 * tau * s + 6.0 * s * s; },
            [tau](double s) { return s * s * (tau - s) * (tau - s); },
            60.0 / tau5, 30.0 / tau5};
  }
  throw ConfigError("estimator order must be 1 or 2, got " + std::to_string(order));
}

}  // namespace

std::size_t window_periods(double tau, double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ConfigError("sampling period must be positive");
  }
  if (!(tau >= 2.0 * period * (1.0 - 1e-12)) || !std::isfinite(tau)) {
    throw ConfigError("estimation window must span at least two sampling periods");
  }
  return static_cast<std::size_t>(std::llround(tau / period));
}

FirWeights build_fir_weights(double tau, double period, QuadratureRule rule, int order) {
  const std::size_t n = window_periods(tau, period);
  const double span = static_cast<double>(n) * period;
  const Kernels k = kernels_for(order, span);

  FirWeights w;
  w.order = order;
  w.rule = rule;
  w.w_y.assign(n + 1, 0.0);
  w.w_u.assign(n + 1, 0.0);

  if (rule == QuadratureRule::Trapezoid) {
    for (std::size_t j = 0; j <= n; ++j) {
      const double s = static_cast<double>(j) * period;
      const double h = (j == 0 || j == n) ? 0.5 * period : period;
      w.w_y[j] = k.y_scale * h * k.y(s);
      w.w_u[j] = k.u_scale * h * k.u(s);
    }
    return w;
  }

  for (std::size_t j = 0; j < n; ++j) {
    const double a = static_cast<double>(j) * period;
    const double half = 0.5 * period;
    const double mid = a + half;
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
      const double s = mid + half * kGaussNodes[q];
      const double gw = half * kGaussWeights[q];
      const double ky = k.y(s);
      const double frac = (s - a) / period;
      w.w_y[j] += k.y_scale * gw * ky * (1.0 - frac);
      w.w_y[j + 1] += k.y_scale * gw * ky * frac;
      // u held over (t_j, t_{j+1}] is stored with sample j + 1.
      w.w_u[j + 1] += k.u_scale * gw * k.u(s);
    }
  }
  return w;
}

std::optional<double> estimate_f_algebraic(const SampleWindow& window, const FirWeights& weights,
                                           double alpha) {
  if (!window.full()) return std::nullopt;
  if (weights.w_y.size() != window.size()) {
    throw ConfigError("FIR weights do not match the window length");
  }
  double acc_y = 0.0;
  double acc_u = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const IoSample& s = window[i];
    acc_y += weights.w_y[i] * s.y;
    acc_u += weights.w_u[i] * s.u;
  }
  const double f = acc_y - alpha * acc_u;
  if (!std::isfinite(f)) throw NumericError("non-finite F estimate");
  return f;
}

std::optional<double> estimate_f_closedloop(const TrackingWindow& window, double alpha,
                                            double kp) {
  if (!window.full()) return std::nullopt;
  const std::size_t n = window.periods();
  double acc = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const TrackingSample& s = window[j];
    const double h = (j == 0 || j == n) ? 0.5 : 1.0;
    acc += h * (s.ref_deriv - alpha * s.u - kp * s.e);
  }
  const double f = acc / static_cast<double>(n);
  if (!std::isfinite(f)) throw NumericError("non-finite F estimate");
  return f;
}

AlgebraicEstimator::AlgebraicEstimator(double tau, double period, int order, QuadratureRule rule)
    : weights_(build_fir_weights(tau, period, rule, order)), window_(tau, period) {}

std::optional<double> estimate_error_derivative(std::span<const double> history, double period) {
  if (history.size() < 2) return std::nullopt;
  return (history[history.size() - 1] - history[history.size() - 2]) / period;
}

ErrorDerivativeEstimator::ErrorDerivativeEstimator(double period, double filter_tau)
    : period_(period), blend_(period / (filter_tau + period)) {
  if (!(period > 0.0)) throw ConfigError("sampling period must be positive");
  if (!(filter_tau >= 0.0)) throw ConfigError("derivative filter time constant must be >= 0");
}

std::optional<double> ErrorDerivativeEstimator::push(double e) {
  if (!std::isfinite(e)) throw NumericError("non-finite error sample");
  if (last_) {
    const double raw = (e - *last_) / period_;
    filtered_ = filtered_ ? *filtered_ + blend_ * (raw - *filtered_) : raw;
  }
  last_ = e;
  return filtered_;
}

}  // namespace mfc
