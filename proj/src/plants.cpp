#include "mfc/plants.hpp"

#include <algorithm>
#include <cmath>

#include "mfc/errors.hpp"
#include "mfc/rk4.hpp"

namespace mfc {

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

double signed_sqrt(double v) { return sign(v) * std::sqrt(std::abs(v)); }

void require_period(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integration period must be positive");
}

void require_inputs(std::span<const double> u, std::size_t n) {
  if (u.size() != n) throw ConfigError("wrong number of plant inputs");
  for (double v : u) {
    if (!std::isfinite(v)) throw NumericError("non-finite plant input");
  }
}

}  // namespace

std::vector<double> plant_output(const Plant& plant, MeasurementNoise& noise) {
  std::vector<double> y = plant.outputs();
  noise.apply(y);
  return y;
}

// --- state space -----------------------------------------------------------

StateSpacePlant::StateSpacePlant(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
                                 Eigen::MatrixXd d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const auto n = a_.rows();
  if (a_.cols() != n || b_.rows() != n || c_.cols() != n || d_.rows() != c_.rows() ||
      d_.cols() != b_.cols()) {
    throw ConfigError("inconsistent state-space dimensions");
  }
  x_ = Eigen::VectorXd::Zero(n);
  u_held_ = Eigen::VectorXd::Zero(b_.cols());
  w_ = Eigen::VectorXd::Zero(b_.cols());
}

std::vector<double> StateSpacePlant::outputs() const {
  const Eigen::VectorXd y = c_ * x_ + d_ * u_held_;
  return {y.data(), y.data() + y.size()};
}

void StateSpacePlant::set_state(const Eigen::VectorXd& x) {
  if (x.size() != x_.size()) throw ConfigError("state vector has the wrong dimension");
  x_ = x;
}

void StateSpacePlant::set_input_disturbance(const Eigen::VectorXd& w) {
  if (w.size() != w_.size()) throw ConfigError("disturbance vector has the wrong dimension");
  w_ = w;
}

void StateSpacePlant::step(std::span<const double> u, double dt) {
  require_period(dt);
  require_inputs(u, input_count());
  u_held_ = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  const Eigen::VectorXd forcing = b_ * (u_held_ + w_);
  rk4_integrate(x_, dt, kOdeSubsteps,
                [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a_ * x + forcing; });
  check_bounded(x_, "state-space plant");
}

StateSpacePlant realize_transfer_function(std::vector<double> numerator,
                                          std::vector<double> denominator) {
  auto strip = [](std::vector<double>& p) {
    const auto first = std::find_if(p.begin(), p.end(), [](double v) { return v != 0.0; });
    p.erase(p.begin(), first);
  };
  strip(numerator);
  strip(denominator);
  if (denominator.empty()) throw ConfigError("transfer function denominator is zero");
  for (double v : numerator) {
    if (!std::isfinite(v)) throw ConfigError("non-finite numerator coefficient");
  }
  for (double v : denominator) {
    if (!std::isfinite(v)) throw ConfigError("non-finite denominator coefficient");
  }
  const std::size_t n = denominator.size() - 1;
  if (n == 0 || numerator.size() > n) {
    throw ConfigError("transfer function must be strictly proper");
  }

  const double lead = denominator.front();
  for (double& v : denominator) v /= lead;
  for (double& v : numerator) v /= lead;

  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i + 1 < dim; ++i) a(i, i + 1) = 1.0;
  // Last row is -[a0, a1, ..., a_{n-1}] with den = s^n + a_{n-1} s^{n-1} + ... + a0.
  for (Eigen::Index j = 0; j < dim; ++j) a(dim - 1, j) = -denominator[n - static_cast<std::size_t>(j)];

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, 1);
  b(dim - 1, 0) = 1.0;

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, dim);
  const std::size_t m = numerator.size();
  for (std::size_t k = 0; k < m; ++k) {
    // numerator[m - 1 - k] multiplies s^k
    c(0, static_cast<Eigen::Index>(k)) = numerator[m - 1 - k];
  }
  return {a, b, c, Eigen::MatrixXd::Zero(1, 1)};
}

// --- nonlinear cases -------------------------------------------------------

NonlinearPlant::NonlinearPlant(NonlinearCase c, std::vector<double> initial_state,
                               double input_smoothing)
    : case_(c), smoothing_(input_smoothing) {
  const std::size_t n = state_size(c);
  if (initial_state.size() > n) throw ConfigError("too many initial state values for " + kind());
  initial_state.resize(n, 0.0);
  x_ = Eigen::Map<const Eigen::VectorXd>(initial_state.data(), static_cast<Eigen::Index>(n));
  if (c == NonlinearCase::Case2 && !(input_smoothing > 0.0)) {
    throw ConfigError("case2 needs a positive input smoothing time constant");
  }
}

std::size_t NonlinearPlant::state_size(NonlinearCase c) {
  switch (c) {
    case NonlinearCase::Case1: return 1;
    case NonlinearCase::Case2: return 3;
    case NonlinearCase::Case3: return 2;
    case NonlinearCase::Case4: return 1;
  }
  return 0;
}

std::string NonlinearPlant::kind() const {
  switch (case_) {
    case NonlinearCase::Case1: return "case1";
    case NonlinearCase::Case2: return "case2";
    case NonlinearCase::Case3: return "case3";
    case NonlinearCase::Case4: return "case4";
  }
  return "unknown";
}

InputDomain NonlinearPlant::input_domain(std::size_t) const {
  // y' = y (1 + u) / (1 - 0.5 u) has a pole at u = 2.
  if (case_ == NonlinearCase::Case4) return {InputDomain{}.lower, 2.0};
  return {};
}

Eigen::VectorXd NonlinearPlant::rhs(const Eigen::VectorXd& x, double u) const {
  Eigen::VectorXd dx(x.size());
  switch (case_) {
    case NonlinearCase::Case1:
      dx[0] = x[0] + signed_sqrt(u);
      break;
    case NonlinearCase::Case2: {
      const double us_dot = (u - x[2]) / smoothing_;
      const double v = x[2] + us_dot;
      dx[0] = x[1];
      dx[1] = 1.5 * x[1] + x[0] + v * v * v;
      dx[2] = us_dot;
      break;
    }
    case NonlinearCase::Case3:
      dx[0] = x[1];
      dx[1] = -3.0 * x[1] - 2.0 * x[0] + sign(u) * std::pow(10.0, std::abs(u));
      break;
    case NonlinearCase::Case4:
      dx[0] = x[0] * (1.0 + u) / (1.0 - 0.5 * u);
      break;
  }
  return dx;
}

void NonlinearPlant::step(std::span<const double> u, double dt) {
  require_period(dt);
  require_inputs(u, 1);
  const double held = u[0];
  rk4_integrate(x_, dt, kOdeSubsteps, [&](const Eigen::VectorXd& x) { return rhs(x, held); });
  check_bounded(x_, kind() + " plant");
}

// --- three tanks -----------------------------------------------------------

double ThreeTankParams::outflow_coefficient() const {
  return pipe_section * std::sqrt(2.0 * gravity) / section;
}

std::array<double, 3> three_tank_rhs(const ThreeTankParams& p, const std::array<double, 3>& x,
                                     const std::array<double, 2>& u) {
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericError("non-finite tank level");
  }
  for (double v : u) {
    if (!std::isfinite(v)) throw NumericError("non-finite pump flow");
  }
  const double d = p.outflow_coefficient();
  const double x1 = std::max(x[0], 0.0);
  const double x2 = std::max(x[1], 0.0);
  const double x3 = std::max(x[2], 0.0);
  const double q13 = d * p.mu1 * signed_sqrt(x1 - x3);
  const double q32 = d * p.mu3 * signed_sqrt(x3 - x2);
  const double q20 = d * p.mu2 * signed_sqrt(x2);
  return {-q13 + u[0] / p.section, q32 - q20 + u[1] / p.section, q13 - q32};
}

ThreeTankPlant::ThreeTankPlant(std::array<double, 3> levels, ThreeTankParams params)
    : x_(levels), params_(params) {
  for (double& v : x_) v = std::max(v, 0.0);
}

void ThreeTankPlant::step(std::span<const double> u, double dt) {
  require_period(dt);
  require_inputs(u, 2);
  if (u[0] < 0.0 || u[1] < 0.0) throw ConfigError("pump flows must be non-negative");
  const std::array<double, 2> flow{u[0], u[1]};

  auto f = [&](const std::array<double, 3>& x) { return three_tank_rhs(params_, x, flow); };
  auto axpy = [](const std::array<double, 3>& x, double h, const std::array<double, 3>& k) {
    return std::array<double, 3>{x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]};
  };
  const double h = dt / kOdeSubsteps;
  for (int i = 0; i < kOdeSubsteps; ++i) {
    const auto k1 = f(x_);
    const auto k2 = f(axpy(x_, 0.5 * h, k1));
    const auto k3 = f(axpy(x_, 0.5 * h, k2));
    const auto k4 = f(axpy(x_, h, k3));
    for (int j = 0; j < 3; ++j) {
      x_[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      x_[j] = std::max(x_[j], 0.0);
    }
  }
  for (double v : x_) {
    if (!std::isfinite(v) || v > kDivergenceBound) throw DivergenceError("three-tank plant diverged");
  }
}

// --- heat equation ---------------------------------------------------------

void heat_semidiscrete_rhs(std::span<const double> w, double right, double left,
                           std::span<double> out) {
  const std::size_t m = w.size();
  if (out.size() != m || m == 0) throw ConfigError("heat grid buffers must match and be non-empty");
  const double dx = 1.0 / static_cast<double>(m + 1);
  const double inv = 1.0 / (dx * dx);
  for (std::size_t i = 0; i < m; ++i) {
    const double lo = i == 0 ? left : w[i - 1];
    const double hi = i + 1 == m ? right : w[i + 1];
    out[i] = (lo - 2.0 * w[i] + hi) * inv;
  }
}

HeatPlant::HeatPlant(double initial_control, HeatParams params)
    : params_(params), u_(initial_control) {
  if (params_.nodes < 30) throw ConfigError("heat plant needs at least 30 interior nodes");
  if (!(params_.sensor_x > 0.0 && params_.sensor_x < 1.0)) {
    throw ConfigError("heat sensor must lie inside (0, 1)");
  }
  const auto m = static_cast<std::size_t>(params_.nodes);
  w_.resize(m);
  const double dx = spacing();
  for (std::size_t i = 0; i < m; ++i) {
    const double x = static_cast<double>(i + 1) * dx;
    w_[i] = params_.left_boundary + (initial_control - params_.left_boundary) * x;
  }
  for (auto& buf : work_) buf.assign(m, 0.0);
}

double HeatPlant::sensor() const {
  const double dx = spacing();
  const double pos = params_.sensor_x / dx;  // node index, 0 = left boundary
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  auto node = [&](std::size_t k) {
    if (k == 0) return params_.left_boundary;
    if (k > w_.size()) return u_;
    return w_[k - 1];
  };
  return (1.0 - frac) * node(lo) + frac * node(lo + 1);
}

void HeatPlant::step(std::span<const double> u, double dt) {
  require_period(dt);
  require_inputs(u, 1);
  u_ = u[0];
  const double left = params_.left_boundary;
  const auto n = static_cast<int>(std::ceil(dt / max_inner_step()));
  const double h = dt / n;
  const std::size_t m = w_.size();
  auto& [k1, k2, k3, k4, tmp] = work_;
  for (int s = 0; s < n; ++s) {
    heat_semidiscrete_rhs(w_, u_, left, k1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = w_[i] + 0.5 * h * k1[i];
    heat_semidiscrete_rhs(tmp, u_, left, k2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = w_[i] + 0.5 * h * k2[i];
    heat_semidiscrete_rhs(tmp, u_, left, k3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = w_[i] + h * k3[i];
    heat_semidiscrete_rhs(tmp, u_, left, k4);
    for (std::size_t i = 0; i < m; ++i) {
      w_[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  for (double v : w_) {
    if (!std::isfinite(v) || std::abs(v) > kDivergenceBound) throw DivergenceError("heat plant diverged");
  }
}

std::vector<std::string> HeatPlant::extra_names() const {
  std::vector<std::string> names;
  names.reserve(w_.size());
  for (std::size_t i = 1; i <= w_.size(); ++i) names.push_back("w_" + std::to_string(i));
  return names;
}

}  // namespace mfc
