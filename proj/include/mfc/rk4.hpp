#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mfc/errors.hpp"

namespace mfc {

/// Classical fourth-order Runge-Kutta over [0, dt] in `substeps` equal steps
/// for an autonomous right-hand side f(x).
template <class Rhs>
void rk4_integrate(Eigen::VectorXd& x, double dt, int substeps, Rhs&& f) {
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    const Eigen::VectorXd k1 = f(x);
    const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

inline void check_bounded(const Eigen::VectorXd& x, const std::string& what) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || std::abs(x[i]) > kDivergenceBound) {
      throw DivergenceError(what + " diverged");
    }
  }
}

}  // namespace mfc
