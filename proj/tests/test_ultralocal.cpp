#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "mfc/errors.hpp"
#include "mfc/ultralocal.hpp"

using namespace mfc;

TEST(UltraLocalModel, RejectsBadOrderAndGain) {
  EXPECT_THROW((UltraLocalModel{0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((UltraLocalModel{3, 1.0}.validate()), ConfigError);
  EXPECT_THROW((UltraLocalModel{1, 0.0}.validate()), ConfigError);
  EXPECT_THROW((UltraLocalModel{1, std::nan("")}.validate()), ConfigError);
  EXPECT_NO_THROW((UltraLocalModel{2, -3.0}.validate()));
}

TEST(Gains, RejectsNegative) {
  EXPECT_THROW((Gains{-1.0, 0.0, 0.0}.validate()), ConfigError);
  EXPECT_THROW((Gains{1.0, -0.1, 0.0}.validate()), ConfigError);
  EXPECT_NO_THROW((Gains{1.0, 0.0, 0.0}.validate()));
}

TEST(IntelligentControl, AllTermsVanish) {
  const auto c = intelligent_control({1, 1.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.0});
  EXPECT_EQ(c.u, 0.0);
  EXPECT_FALSE(c.saturated);
}

TEST(IntelligentControl, IpHandEvaluation) {
  ControlInputs in;
  in.e = 0.2;
  in.f_est = 0.5;
  in.ref_deriv = 1.0;
  const auto c = intelligent_control({1, 0.1}, {1.0, 0.0, 0.0}, in);
  EXPECT_NEAR(c.u, 3.0, 1e-12);
  EXPECT_EQ(c.f_used, 0.5);
}

TEST(IntelligentControl, IpdHandEvaluation) {
  ControlInputs in;
  in.e = 0.1;
  in.e_dot = -0.05;
  in.f_est = 1.0;
  const auto c = intelligent_control({2, 1.0}, {2.0, 0.0, 3.0}, in);
  EXPECT_NEAR(c.u, -1.05, 1e-12);
}

TEST(IntelligentControl, IgnoresUnusedTermsWhenGainIsZero) {
  ControlInputs in;
  in.e = 0.3;
  in.e_int = std::numeric_limits<double>::quiet_NaN();
  in.e_dot = std::numeric_limits<double>::quiet_NaN();
  in.ref_deriv = 0.7;
  in.f_est = -0.2;
  const auto c = intelligent_control({1, 2.0}, {1.5, 0.0, 0.0}, in);
  EXPECT_EQ(c.u, (0.7 - (-0.2) - 1.5 * 0.3) / 2.0);
}

TEST(IntelligentControl, LinearInFEstimate) {
  for (double alpha : {0.1, 1.0, -4.0, 100.0}) {
    for (double delta : {-2.0, 0.5, 3.25}) {
      ControlInputs in{0.4, 0.1, -0.3, 1.2, 0.9};
      const Gains g{2.0, 0.5, 0.25};
      const double u0 = intelligent_control({1, alpha}, g, in).u;
      in.f_est += delta;
      const double u1 = intelligent_control({1, alpha}, g, in).u;
      EXPECT_NEAR(u1 - u0, -delta / alpha, 1e-12 * (1.0 + std::abs(u0)));
    }
  }
}

TEST(IntelligentControl, SaturatesAndFlags) {
  ControlInputs in;
  in.ref_deriv = 10.0;
  const auto c = intelligent_control({1, 1.0}, {1.0, 0.0, 0.0}, in, InputLimits::symmetric(2.0));
  EXPECT_EQ(c.u, 2.0);
  EXPECT_TRUE(c.saturated);
  const auto d = intelligent_control({1, 1.0}, {1.0, 0.0, 0.0}, in, InputLimits{0.0, 20.0});
  EXPECT_EQ(d.u, 10.0);
  EXPECT_FALSE(d.saturated);
}

TEST(IntelligentControl, ErrorsOnBadInput) {
  EXPECT_THROW(intelligent_control({1, 0.0}, {1.0, 0.0, 0.0}, {}), ConfigError);
  ControlInputs in;
  in.e = std::numeric_limits<double>::infinity();
  EXPECT_THROW(intelligent_control({1, 1.0}, {1.0, 0.0, 0.0}, in), NumericError);
}

TEST(ClosedLoopErrorRhs, Examples) {
  EXPECT_EQ(closed_loop_error_rhs({1.0, 0.0, 0.0}, 0.0, 0.0, 0.0, 0.0), 0.0);
  EXPECT_EQ(closed_loop_error_rhs({1.0, 0.0, 0.0}, 1.0, 0.0, 0.0, 0.0), -1.0);
  EXPECT_NEAR(closed_loop_error_rhs({2.0, 0.0, 3.0}, 0.5, 0.0, 0.1, 0.2), -1.1, 1e-12);
}

TEST(ClosedLoopErrorRhs, MatchesControlLawOnUltraLocalPlant) {
  // Plant y^(nu) = F + alpha u with the law applied gives e^(nu) = rhs.
  const UltraLocalModel m{2, 0.7};
  const Gains g{3.0, 0.4, 1.5};
  const double F = 1.3, f_est = 0.9, yref_dd = -0.2;
  const ControlInputs in{0.25, -0.1, 0.05, yref_dd, f_est};
  const double u = intelligent_control(m, g, in).u;
  const double e_dd = F + m.alpha * u - yref_dd;
  EXPECT_NEAR(e_dd, closed_loop_error_rhs(g, in.e, in.e_int, in.e_dot, F - f_est), 1e-12);
}

TEST(IntelligentController, IntegratesOncePerPeriodTrapezoidal) {
  IntelligentController c({1, 1.0}, {1.0, 2.0, 0.0});
  c.update(0.0, 1.0, 0.0, 0.0, 0.0);
  EXPECT_EQ(c.state().e_int, 0.0);
  c.update(0.1, 3.0, 0.0, 0.0, 0.0);
  EXPECT_NEAR(c.state().e_int, 0.2, 1e-15);
  const auto cmd = c.update(0.2, 3.0, 0.0, 0.0, 0.0);
  EXPECT_NEAR(c.state().e_int, 0.5, 1e-15);
  EXPECT_NEAR(cmd.u, -3.0 - 2.0 * 0.5, 1e-12);
}

TEST(IntelligentController, RejectsNonIncreasingTime) {
  IntelligentController c({1, 1.0}, {1.0, 0.0, 0.0});
  c.update(1.0, 0.0, 0.0, 0.0, 0.0);
  EXPECT_THROW(c.update(1.0, 0.0, 0.0, 0.0, 0.0), OrderingError);
  EXPECT_THROW(c.update(0.5, 0.0, 0.0, 0.0, 0.0), OrderingError);
}
