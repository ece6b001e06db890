#pragma once

#include <array>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfc/noise.hpp"

namespace mfc {

/// Open interval of admissible inputs for one channel.
struct InputDomain {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// Simulated ground truth driven by zero-order-hold inputs.
class Plant {
 public:
  virtual ~Plant() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t input_count() const = 0;
  virtual std::size_t output_count() const = 0;

  /// Noise-free outputs at the current state.
  virtual std::vector<double> outputs() const = 0;

  /// Holds `u` constant for `dt` and integrates. Throws DivergenceError when
  /// the state leaves |x| <= 1e9 or turns non-finite.
  virtual void step(std::span<const double> u, double dt) = 0;

  virtual std::unique_ptr<Plant> clone() const = 0;

  virtual InputDomain input_domain(std::size_t /*channel*/) const { return {}; }

  /// Additional logged quantities (unmeasured levels, grid temperatures).
  virtual std::vector<std::string> extra_names() const { return {}; }
  virtual std::vector<double> extra_values() const { return {}; }
};

/// Integrates `plant` over one control period under a held input.
inline void plant_step(Plant& plant, std::span<const double> u, double dt) { plant.step(u, dt); }

/// Noisy measurement of every plant output; draws one sample per channel.
std::vector<double> plant_output(const Plant& plant, MeasurementNoise& noise);

/// Number of RK4 substeps per control period for ODE plants.
inline constexpr int kOdeSubsteps = 10;

// ---------------------------------------------------------------------------

/// x' = A x + B (u + w), y = C x + D u, with a constant input disturbance w.
class StateSpacePlant final : public Plant {
 public:
  StateSpacePlant(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d);

  std::string kind() const override { return "state_space"; }
  std::size_t input_count() const override { return static_cast<std::size_t>(b_.cols()); }
  std::size_t output_count() const override { return static_cast<std::size_t>(c_.rows()); }
  std::vector<double> outputs() const override;
  void step(std::span<const double> u, double dt) override;
  std::unique_ptr<Plant> clone() const override { return std::make_unique<StateSpacePlant>(*this); }

  const Eigen::MatrixXd& A() const { return a_; }
  const Eigen::MatrixXd& B() const { return b_; }
  const Eigen::MatrixXd& C() const { return c_; }
  const Eigen::MatrixXd& D() const { return d_; }
  const Eigen::VectorXd& state() const { return x_; }

  void set_state(const Eigen::VectorXd& x);
  void set_input_disturbance(const Eigen::VectorXd& w);

 private:
  Eigen::MatrixXd a_, b_, c_, d_;
  Eigen::VectorXd x_;
  Eigen::VectorXd u_held_;
  Eigen::VectorXd w_;
};

/// Controllable companion realization of num(s)/den(s). Coefficients are in
/// descending powers of s. Rejects anything that is not strictly proper.
StateSpacePlant realize_transfer_function(std::vector<double> numerator,
                                          std::vector<double> denominator);

// ---------------------------------------------------------------------------

enum class NonlinearCase {
  Case1,  ///< y' - y = sign(u) sqrt|u|
  Case2,  ///< y'' - 1.5 y' - y = (u + u')^3
  Case3,  ///< y'' + 3 y' + 2 y = sign(u) 10^|u|
  Case4,  ///< y' - y = (0.5 y' + y) u
};

/// State layouts: Case1 [y]; Case2 [y, y', u_s]; Case3 [y, y']; Case4 [y].
/// Case 2 routes u through the smoother u_s' = (u - u_s) / input_smoothing and
/// uses u_s + u_s' in place of u + u'.
class NonlinearPlant final : public Plant {
 public:
  NonlinearPlant(NonlinearCase c, std::vector<double> initial_state, double input_smoothing = 0.02);

  std::string kind() const override;
  std::size_t input_count() const override { return 1; }
  std::size_t output_count() const override { return 1; }
  std::vector<double> outputs() const override { return {x_[0]}; }
  void step(std::span<const double> u, double dt) override;
  std::unique_ptr<Plant> clone() const override { return std::make_unique<NonlinearPlant>(*this); }
  InputDomain input_domain(std::size_t channel) const override;

  static std::size_t state_size(NonlinearCase c);
  Eigen::VectorXd rhs(const Eigen::VectorXd& x, double u) const;
  const Eigen::VectorXd& state() const { return x_; }
  NonlinearCase which() const { return case_; }

 private:
  NonlinearCase case_;
  Eigen::VectorXd x_;
  double smoothing_;
};

// ---------------------------------------------------------------------------

struct ThreeTankParams {
  double section = 0.0154;       ///< S
  double pipe_section = 5e-5;    ///< Sp
  double mu1 = 0.5;
  double mu2 = 0.675;
  double mu3 = 0.5;
  double gravity = 9.81;

  /// D = Sp sqrt(2 g) / S
  double outflow_coefficient() const;
};

/// Level derivatives. Negative levels are read as 0.
std::array<double, 3> three_tank_rhs(const ThreeTankParams& p, const std::array<double, 3>& x,
                                     const std::array<double, 2>& u);

/// Three coupled tanks; pumps feed tanks 1 and 2, tank 3 sits between them.
/// Outputs are the levels x1, x2; x3 is logged as an extra.
class ThreeTankPlant final : public Plant {
 public:
  explicit ThreeTankPlant(std::array<double, 3> levels = {0.0, 0.0, 0.0},
                          ThreeTankParams params = {});

  std::string kind() const override { return "three_tank"; }
  std::size_t input_count() const override { return 2; }
  std::size_t output_count() const override { return 2; }
  std::vector<double> outputs() const override { return {x_[0], x_[1]}; }
  void step(std::span<const double> u, double dt) override;
  std::unique_ptr<Plant> clone() const override { return std::make_unique<ThreeTankPlant>(*this); }
  InputDomain input_domain(std::size_t) const override { return {0.0, InputDomain{}.upper}; }
  std::vector<std::string> extra_names() const override { return {"x3"}; }
  std::vector<double> extra_values() const override { return {x_[2]}; }

  const std::array<double, 3>& levels() const { return x_; }
  const ThreeTankParams& params() const { return params_; }

 private:
  std::array<double, 3> x_;
  ThreeTankParams params_;
};

// ---------------------------------------------------------------------------

/// Central second difference of the heat equation on M interior nodes with
/// Dirichlet values `left` at x = 0 and `right` at x = 1. `out` must have the
/// size of `w`.
void heat_semidiscrete_rhs(std::span<const double> w, double right, double left,
                           std::span<double> out);

struct HeatParams {
  int nodes = 99;
  double left_boundary = 0.5;
  double sensor_x = 1.0 / 3.0;
};

/// 1-D heat equation w_t = w_xx on [0, 1], boundary control w(t, 1) = u.
/// Starts from the affine profile 0.5 + (u0 - 0.5) x. The sensor reads the
/// linear interpolant of the grid at sensor_x.
class HeatPlant final : public Plant {
 public:
  HeatPlant(double initial_control, HeatParams params = {});

  std::string kind() const override { return "heat"; }
  std::size_t input_count() const override { return 1; }
  std::size_t output_count() const override { return 1; }
  std::vector<double> outputs() const override { return {sensor()}; }
  void step(std::span<const double> u, double dt) override;
  std::unique_ptr<Plant> clone() const override { return std::make_unique<HeatPlant>(*this); }
  std::vector<std::string> extra_names() const override;
  std::vector<double> extra_values() const override { return w_; }

  double sensor() const;
  double spacing() const { return 1.0 / (params_.nodes + 1); }
  /// Inner RK4 step, at most 0.4 dx^2.
  double max_inner_step() const { return 0.4 * spacing() * spacing(); }
  const std::vector<double>& grid() const { return w_; }
  double right_boundary() const { return u_; }

 private:
  HeatParams params_;
  std::vector<double> w_;
  double u_;
  std::array<std::vector<double>, 5> work_;
};

}  // namespace mfc
