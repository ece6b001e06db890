#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mfc/errors.hpp"

namespace mfc {

/// One sample of the plant's input/output pair. `u` is the input that was
/// held over the interval ending at `t`, i.e. the command issued one period
/// earlier.
struct IoSample {
  double t = 0.0;
  double y = 0.0;
  double u = 0.0;
};

/// One sample of a tracking loop: error, the command issued at `t` and the
/// reference derivative at `t`.
struct TrackingSample {
  double t = 0.0;
  double e = 0.0;
  double u = 0.0;
  double ref_deriv = 0.0;
};

/// Fixed-capacity ring buffer of regularly spaced samples covering a window
/// of N = round(tau / period) periods (N + 1 samples).
template <class Sample>
class TimedWindow {
 public:
  TimedWindow(double tau, double period);

  /// Appends a sample, evicting the oldest once full. Throws OrderingError if
  /// `s.t` does not follow the previous sample by one period (1e-9 relative).
  void push(const Sample& s);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return buf_.size(); }
  bool full() const { return size_ == buf_.size(); }
  void clear() { size_ = 0; head_ = 0; }

  /// i = 0 is the oldest sample.
  const Sample& operator[](std::size_t i) const { return buf_[(head_ + i) % buf_.size()]; }
  const Sample& newest() const { return (*this)[size_ - 1]; }

  std::size_t periods() const { return buf_.size() - 1; }
  double period() const { return period_; }
  /// Window length actually covered, periods() * period().
  double span() const { return static_cast<double>(periods()) * period_; }

 private:
  std::vector<Sample> buf_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
  double period_;
};

using SampleWindow = TimedWindow<IoSample>;
using TrackingWindow = TimedWindow<TrackingSample>;

/// Number of periods in a window of length tau. Throws ConfigError when
/// tau < 2 * period.
std::size_t window_periods(double tau, double period);

enum class QuadratureRule {
  /// Nodal trapezoid rule on both kernels; endpoints carry half weight.
  Trapezoid,
  /// Kernel integrated exactly against the piecewise-linear interpolant of
  /// y and against the zero-order-held u. Exact whenever F is constant over
  /// the window and u is held between samples.
  SampledHold,
};

/// FIR taps of the algebraic F estimator, oldest sample first:
///   F_est = sum(w_y * y) - alpha * sum(w_u * u).
/// The input gain is applied at evaluation time so one set of taps serves
/// any alpha. w_u >= 0 and sums to ~1; w_y sums to 0 for order 1.
struct FirWeights {
  std::vector<double> w_y;
  std::vector<double> w_u;
  int order = 1;
  QuadratureRule rule = QuadratureRule::SampledHold;
};

/// Taps for the order-1 estimator
///   F_est = -(6/tau^3) int_0^tau [(tau - 2s) y + alpha s (tau - s) u] ds
/// or, with order = 2,
///   F_est = (60/tau^5) int_0^tau [(tau^2 - 6 tau s + 6 s^2) y - (alpha/2) s^2 (tau - s)^2 u] ds
/// where s is time measured from the start of the window.
FirWeights build_fir_weights(double tau, double period,
                             QuadratureRule rule = QuadratureRule::SampledHold, int order = 1);

/// Evaluates the taps on a full window; nullopt until the window fills.
std::optional<double> estimate_f_algebraic(const SampleWindow& window, const FirWeights& weights,
                                           double alpha);

/// Trapezoidal mean of (y*' - alpha u - kp e) over the window; nullopt until
/// the window fills. Under the control law in ultralocal.hpp the integrand is
/// exactly the F estimate used at each sample, so this is a running average
/// of past estimates.
std::optional<double> estimate_f_closedloop(const TrackingWindow& window, double alpha,
                                            double kp);

/// Sliding-window algebraic estimator: owns its taps and window.
class AlgebraicEstimator {
 public:
  AlgebraicEstimator(double tau, double period, int order = 1,
                     QuadratureRule rule = QuadratureRule::SampledHold);

  /// `u_held` is the command applied over (t - period, t].
  void push(double t, double y, double u_held) { window_.push({t, y, u_held}); }
  std::optional<double> estimate(double alpha) const {
    return estimate_f_algebraic(window_, weights_, alpha);
  }
  bool ready() const { return window_.full(); }

  const FirWeights& weights() const { return weights_; }
  const SampleWindow& window() const { return window_; }

 private:
  FirWeights weights_;
  SampleWindow window_;
};

/// Two-point backward difference on the last two entries of `history`.
std::optional<double> estimate_error_derivative(std::span<const double> history, double period);

/// Backward difference followed by an optional first-order low-pass with
/// time constant `filter_tau` (0 disables it). The filter is seeded with the
/// first available difference.
class ErrorDerivativeEstimator {
 public:
  explicit ErrorDerivativeEstimator(double period, double filter_tau = 0.0);

  std::optional<double> push(double e);
  std::optional<double> value() const { return filtered_; }

 private:
  double period_;
  double blend_;
  std::optional<double> last_;
  std::optional<double> filtered_;
};

// ---------------------------------------------------------------------------

template <class Sample>
TimedWindow<Sample>::TimedWindow(double tau, double period)
    : buf_(window_periods(tau, period) + 1), period_(period) {}

template <class Sample>
void TimedWindow<Sample>::push(const Sample& s) {
  if (size_ > 0) {
    const double dt = s.t - newest().t;
    if (!(dt > 0.0)) {
      throw OrderingError("sample time does not increase");
    }
    if (std::abs(dt - period_) > 1e-9 * period_) {
      throw OrderingError("sample spacing differs from the window period");
    }
  }
  if (size_ < buf_.size()) {
    buf_[(head_ + size_) % buf_.size()] = s;
    ++size_;
  } else {
    buf_[head_] = s;
    head_ = (head_ + 1) % buf_.size();
  }
}

}  // namespace mfc
