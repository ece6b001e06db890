#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mfc/errors.hpp"
#include "mfc/plants.hpp"
#include "mfc/rk4.hpp"

using namespace mfc;

namespace {

void step_n(Plant& p, double u, double dt, int n) {
  const std::vector<double> in{u};
  for (int i = 0; i < n; ++i) p.step(in, dt);
}

// Plain RK4 on a scalar ODE, independent of the library integrator.
template <class F>
double rk4_scalar(double x, double t_end, int steps, F f) {
  const double h = t_end / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2), k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST(RealizeTransferFunction, FirstOrderLag) {
  const auto p = realize_transfer_function({1.0}, {1.0, 1.0});
  EXPECT_EQ(p.A()(0, 0), -1.0);
  EXPECT_EQ(p.B()(0, 0), 1.0);
  EXPECT_EQ(p.C()(0, 0), 1.0);
  EXPECT_EQ(p.D()(0, 0), 0.0);
}

TEST(RealizeTransferFunction, LinearPlantCompanionForm) {
  const auto p = realize_transfer_function({1.0, 4.0, 4.0}, {1.0, -2.0, -1.0, 2.0});
  ASSERT_EQ(p.A().rows(), 3);
  EXPECT_EQ(p.A()(2, 0), -2.0);
  EXPECT_EQ(p.A()(2, 1), 1.0);
  EXPECT_EQ(p.A()(2, 2), 2.0);
  EXPECT_EQ(p.A()(0, 1), 1.0);
  EXPECT_EQ(p.A()(1, 2), 1.0);
  EXPECT_EQ(p.B()(2, 0), 1.0);
  EXPECT_EQ(p.B()(0, 0), 0.0);
  EXPECT_EQ(p.C()(0, 0), 4.0);
  EXPECT_EQ(p.C()(0, 1), 4.0);
  EXPECT_EQ(p.C()(0, 2), 1.0);
  EXPECT_EQ(p.D()(0, 0), 0.0);
}

TEST(RealizeTransferFunction, StepResponseMatchesPartialFractions) {
  // (s+2)^2 / ((s-2)(s-1)(s+1)) / s residues: 2, 8/3 e^{2t}, -9/2 e^t, -1/6 e^-t.
  auto p = realize_transfer_function({1.0, 4.0, 4.0}, {1.0, -2.0, -1.0, 2.0});
  const double dt = 0.01;
  for (int k = 1; k <= 200; ++k) {
    step_n(p, 1.0, dt, 1);
    if (k % 50 == 0) {
      const double t = k * dt;
      const double exact = 2.0 + 8.0 / 3.0 * std::exp(2 * t) - 4.5 * std::exp(t) - std::exp(-t) / 6.0;
      EXPECT_NEAR(p.outputs()[0], exact, 1e-8 * (1 + std::abs(exact)));
    }
  }
}

TEST(RealizeTransferFunction, PoleZeroCancellationImpulse) {
  auto p = realize_transfer_function({1.0, 1.0}, {1.0, 2.0, 1.0});
  p.set_state(p.B().col(0));
  for (int k = 1; k <= 100; ++k) {
    step_n(p, 0.0, 0.01, 1);
    EXPECT_NEAR(p.outputs()[0], std::exp(-0.01 * k), 1e-10);
  }
}

TEST(RealizeTransferFunction, NormalizesAndStrips) {
  const auto p = realize_transfer_function({0.0, 2.0}, {0.0, 2.0, 4.0});
  EXPECT_EQ(p.A()(0, 0), -2.0);
  EXPECT_EQ(p.C()(0, 0), 1.0);
}

TEST(RealizeTransferFunction, RejectsImproper) {
  EXPECT_THROW(realize_transfer_function({1.0, 0.0}, {1.0, 1.0}), ConfigError);
  EXPECT_THROW(realize_transfer_function({1.0, 0.0, 0.0}, {1.0, 1.0}), ConfigError);
  EXPECT_THROW(realize_transfer_function({1.0}, {2.0}), ConfigError);
  EXPECT_THROW(realize_transfer_function({1.0}, {0.0, 0.0}), ConfigError);
}

TEST(PlantStep, ZeroDynamicsUnchanged) {
  auto p = realize_transfer_function({1.0}, {1.0, 0.0});
  Eigen::VectorXd x(1);
  x << 0.75;
  p.set_state(x);
  step_n(p, 0.0, 0.1, 5);
  EXPECT_EQ(p.state()[0], 0.75);
}

TEST(PlantStep, ExponentialDecay) {
  auto p = realize_transfer_function({1.0}, {1.0, 1.0});
  Eigen::VectorXd x(1);
  x << 1.0;
  p.set_state(x);
  step_n(p, 0.0, 0.1, 1);
  EXPECT_NEAR(p.state()[0], std::exp(-0.1), 1e-9);
}

TEST(PlantStep, RejectsBadPeriodAndArity) {
  auto p = realize_transfer_function({1.0}, {1.0, 1.0});
  const std::vector<double> two{0.0, 0.0};
  EXPECT_THROW(step_n(p, 0.0, 0.0, 1), ConfigError);
  EXPECT_THROW(p.step(two, 0.1), ConfigError);
}

TEST(PlantStep, OpenLoopLinearPlantDiverges) {
  auto p = realize_transfer_function({1.0, 4.0, 4.0}, {1.0, -2.0, -1.0, 2.0});
  Eigen::VectorXd x(3);
  x << 0.01, 0.0, 0.0;
  p.set_state(x);
  EXPECT_THROW(step_n(p, 0.0, 0.01, 3000), DivergenceError);
}

TEST(PlantStep, InputDisturbanceEntersThroughB) {
  // y'' = -y + u + w: from rest with u = -w nothing moves.
  auto p = realize_transfer_function({1.0}, {1.0, 0.0, 1.0});
  Eigen::VectorXd w(1);
  w << 0.5;
  p.set_input_disturbance(w);
  step_n(p, -0.5, 0.01, 100);
  EXPECT_EQ(p.outputs()[0], 0.0);
  step_n(p, 0.0, 0.01, 1);
  EXPECT_GT(p.outputs()[0], 0.0);
}

TEST(NonlinearPlant, Case1MatchesRefinedIntegration) {
  NonlinearPlant p(NonlinearCase::Case1, {0.0});
  step_n(p, 1.0, 0.01, 1);
  const double ref = rk4_scalar(0.0, 0.01, 1000, [](double y) { return y + 1.0; });
  EXPECT_NEAR(p.outputs()[0], ref, 1e-8);
  EXPECT_NEAR(p.outputs()[0], std::exp(0.01) - 1.0, 1e-12);
}

TEST(NonlinearPlant, RightHandSides) {
  Eigen::VectorXd x1(1), x2(3), x3(2), x4(1);
  x1 << 2.0;
  EXPECT_DOUBLE_EQ(NonlinearPlant(NonlinearCase::Case1, {}).rhs(x1, -4.0)[0], 0.0);
  x2 << 1.0, 2.0, 0.5;
  const auto d2 = NonlinearPlant(NonlinearCase::Case2, {}, 0.02).rhs(x2, 0.7);
  const double usd = (0.7 - 0.5) / 0.02;
  EXPECT_DOUBLE_EQ(d2[0], 2.0);
  EXPECT_DOUBLE_EQ(d2[1], 3.0 + 1.0 + std::pow(0.5 + usd, 3));
  EXPECT_DOUBLE_EQ(d2[2], usd);
  x3 << 1.0, -1.0;
  const auto d3 = NonlinearPlant(NonlinearCase::Case3, {}).rhs(x3, -0.5);
  EXPECT_DOUBLE_EQ(d3[1], 3.0 - 2.0 - std::pow(10.0, 0.5));
  x4 << 0.2;
  EXPECT_DOUBLE_EQ(NonlinearPlant(NonlinearCase::Case4, {}).rhs(x4, 1.0)[0], 0.2 * 2.0 / 0.5);
}

TEST(NonlinearPlant, Case4SatisfiesImplicitForm) {
  // y' - y = (0.5 y' + y) u
  NonlinearPlant p(NonlinearCase::Case4, {0.3});
  Eigen::VectorXd x(1);
  x << 0.3;
  for (double u : {-3.0, -0.5, 0.0, 0.9, 1.7}) {
    const double yd = p.rhs(x, u)[0];
    EXPECT_NEAR(yd - 0.3, (0.5 * yd + 0.3) * u, 1e-12);
  }
  EXPECT_EQ(p.input_domain(0).upper, 2.0);
}

TEST(NonlinearPlant, Case2SmootherTracksHeldInput) {
  NonlinearPlant p(NonlinearCase::Case2, {}, 0.02);
  step_n(p, 0.4, 0.01, 50);
  EXPECT_NEAR(p.state()[2], 0.4, 1e-9);
}

TEST(NonlinearPlant, RejectsOversizedState) {
  EXPECT_THROW(NonlinearPlant(NonlinearCase::Case1, {1.0, 2.0}), ConfigError);
  EXPECT_THROW(NonlinearPlant(NonlinearCase::Case2, {}, 0.0), ConfigError);
}

TEST(NonlinearPlant, Rk4IsFourthOrder) {
  // Case 3 with a positive input stays smooth; compare 10 vs 20 substeps
  // against a 100x refined run.
  const NonlinearPlant p(NonlinearCase::Case3, {0.5, 0.1});
  auto run = [&](int substeps) {
    Eigen::VectorXd x = p.state();
    rk4_integrate(x, 0.5, substeps, [&](const Eigen::VectorXd& s) { return p.rhs(s, 0.6); });
    return x;
  };
  const Eigen::VectorXd ref = run(2000);
  const double e1 = (run(10) - ref).norm();
  const double e2 = (run(20) - ref).norm();
  EXPECT_NEAR(e1 / e2, 16.0, 2.0);
}

TEST(NonlinearPlant, DivergenceDetected) {
  NonlinearPlant p(NonlinearCase::Case1, {1.0});
  EXPECT_THROW(step_n(p, 0.0, 0.1, 300), DivergenceError);
}

TEST(ThreeTank, OutflowCoefficient) {
  EXPECT_NEAR(ThreeTankParams{}.outflow_coefficient(), 0.0143813, 1e-7);
}

TEST(ThreeTank, EqualLevelsNoFlow) {
  // x2 carries an outflow to the drain, so only x2 = 0 makes everything still.
  const auto d = three_tank_rhs({}, {0.0, 0.0, 0.0}, {0.0, 0.0});
  for (double v : d) EXPECT_EQ(v, 0.0);
  const auto e = three_tank_rhs({}, {0.3, 0.3, 0.3}, {0.0, 0.0});
  EXPECT_EQ(e[0], 0.0);
  EXPECT_EQ(e[2], 0.0);
}

TEST(ThreeTank, HandEvaluation) {
  const ThreeTankParams p;
  const double D = 5e-5 * std::sqrt(2 * 9.81) / 0.0154;
  const auto d = three_tank_rhs(p, {0.2, 0.0, 0.1}, {0.0, 0.0});
  EXPECT_NEAR(d[0], -D * 0.5 * std::sqrt(0.1), 1e-15);
  EXPECT_NEAR(d[1], D * 0.5 * std::sqrt(0.1), 1e-15);
  EXPECT_NEAR(d[2], D * 0.5 * std::sqrt(0.1) - D * 0.5 * std::sqrt(0.1), 1e-15);
  const auto u = three_tank_rhs(p, {0.0, 0.0, 0.0}, {1e-4, 2e-4});
  EXPECT_NEAR(u[0], 1e-4 / 0.0154, 1e-15);
  EXPECT_NEAR(u[1], 2e-4 / 0.0154, 1e-15);
}

TEST(ThreeTank, MassBalance) {
  const ThreeTankParams p;
  const double D = p.outflow_coefficient();
  for (const auto& x : {std::array<double, 3>{0.4, 0.1, 0.25}, std::array<double, 3>{0.05, 0.3, 0.2},
                        std::array<double, 3>{0.2, 0.2, 0.6}}) {
    const auto d = three_tank_rhs(p, x, {0.0, 0.0});
    EXPECT_NEAR(d[0] + d[1] + d[2], -D * p.mu2 * std::sqrt(x[1]), 1e-15);
  }
}

TEST(ThreeTank, VolumeNonIncreasingWithoutPumps) {
  ThreeTankPlant t({0.5, 0.0, 0.2});
  double prev = 1e9;
  const std::vector<double> off{0.0, 0.0};
  for (int k = 0; k < 500; ++k) {
    t.step(off, 1.0);
    const auto& x = t.levels();
    const double vol = x[0] + x[1] + x[2];
    EXPECT_LE(vol, prev + 1e-12);
    for (double v : x) EXPECT_GE(v, 0.0);
    prev = vol;
  }
}

TEST(ThreeTank, RejectsNegativePumpFlow) {
  ThreeTankPlant t;
  const std::vector<double> bad{-1e-6, 0.0};
  EXPECT_THROW(t.step(bad, 1.0), ConfigError);
  EXPECT_EQ(t.input_domain(0).lower, 0.0);
  EXPECT_EQ(t.extra_names(), std::vector<std::string>{"x3"});
}

TEST(ThreeTank, PumpsFillTanks) {
  ThreeTankPlant t;
  const std::vector<double> on{1e-4, 0.0};
  for (int k = 0; k < 100; ++k) t.step(on, 1.0);
  EXPECT_GT(t.levels()[0], 0.3);
  EXPECT_GT(t.levels()[2], 0.0);
}

TEST(Heat, AffineProfileIsSteady) {
  std::vector<double> w(49), out(49);
  const double dx = 1.0 / 50;
  for (int i = 0; i < 49; ++i) w[i] = 0.5 + 0.7 * (i + 1) * dx;
  heat_semidiscrete_rhs(w, 1.2, 0.5, out);
  for (double v : out) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(Heat, SineIsEigenfunction) {
  const int m = 99;
  const double dx = 1.0 / (m + 1);
  std::vector<double> w(m), out(m);
  for (int i = 0; i < m; ++i) w[i] = std::sin(std::numbers::pi * (i + 1) * dx);
  heat_semidiscrete_rhs(w, 0.0, 0.0, out);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int i = 0; i < m; ++i) EXPECT_NEAR(out[i], -pi2 * w[i], pi2 * pi2 * dx * dx / 12.0 + 1e-9);
}

TEST(Heat, InitialProfileSteadyUnderMatchingControl) {
  HeatPlant h(1.0);
  std::vector<double> out(h.grid().size());
  heat_semidiscrete_rhs(h.grid(), 1.0, 0.5, out);
  for (double v : out) EXPECT_NEAR(v, 0.0, 1e-9);
  EXPECT_NEAR(h.sensor(), 0.5 + 0.5 / 3.0, 1e-14);
}

TEST(Heat, ConvergesToAnalyticSteadyValue) {
  for (double u : {1.0, 0.0, 0.8}) {
    HeatPlant h(0.5);
    step_n(h, u, 0.01, 300);
    EXPECT_NEAR(h.sensor(), 0.5 + (u - 0.5) / 3.0, 1e-3);
    EXPECT_EQ(h.right_boundary(), u);
  }
}

TEST(Heat, InnerStepRespectsStabilityMargin) {
  HeatPlant h(0.5);
  EXPECT_NEAR(h.max_inner_step(), 0.4 * 1e-4, 1e-18);
  EXPECT_EQ(h.extra_names().size(), 99u);
  EXPECT_EQ(h.extra_names().front(), "w_1");
  EXPECT_THROW(HeatPlant(0.5, HeatParams{10, 0.5, 1.0 / 3.0}), ConfigError);
}

TEST(PlantOutput, ZeroNoiseIsExactAndCloneIsIndependent) {
  NonlinearPlant p(NonlinearCase::Case4, {0.2});
  MeasurementNoise none({0.0, 1}, 1);
  EXPECT_EQ(plant_output(p, none)[0], 0.2);
  auto c = p.clone();
  step_n(*c, 0.5, 0.01, 10);
  EXPECT_EQ(p.outputs()[0], 0.2);
  EXPECT_NE(c->outputs()[0], 0.2);
}

TEST(PlantOutput, SeededNoiseRepeats) {
  NonlinearPlant p(NonlinearCase::Case1, {1.0});
  MeasurementNoise a({0.05, 11}, 1), b({0.05, 11}, 1);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(plant_output(p, a)[0], plant_output(p, b)[0]);
}
