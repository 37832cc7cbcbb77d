#pragma once

// Independent reference computations shared by the test suites. Nothing here calls the
// library's solvers; only plain data types are shared.

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "horizon/monomial.hpp"

namespace oracle {

using horizon::Mat;
using horizon::Vec;

/// Root of a continuous increasing function on [lo, hi] by plain bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Central-difference Jacobian of a vector function. Column `forward_only` (if any) uses the
/// second-order forward stencil, for coordinates that may not decrease.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-6,
                       Eigen::Index forward_only = -1) {
  const Vec f0 = f(x);
  Mat J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double hj = h * std::max(1.0, std::fabs(x[j]));
    Vec xp = x, xm = x;
    xp[j] += hj;
    if (j == forward_only) {
      Vec x2 = x;
      x2[j] += 2.0 * hj;
      J.col(j) = (4.0 * f(xp) - 3.0 * f0 - f(x2)) / (2.0 * hj);
      continue;
    }
    xm[j] -= hj;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * hj);
  }
  return J;
}

/// Classical RK4 with a fixed step; used as a slow but simple reference integrator.
inline Vec rk4(const std::function<Vec(double, const Vec&)>& f, double t0, Vec y, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    const Vec k1 = f(t, y);
    const Vec k2 = f(t + h / 2, y + h / 2 * k1);
    const Vec k3 = f(t + h / 2, y + h / 2 * k2);
    const Vec k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return y;
}

/// Blow-up time of u' = v, v' = 6u^2 + t by RK4 with steps scaled to the local time scale
/// u^{-1/2}, stopped at u > u_stop; the remainder uses u ~ (t_max - t)^{-2}.
inline double painleve_blowup_time(double t0, double u0, double v0, double eta = 1e-3, double u_stop = 1e8) {
  auto f = [](double t, const std::array<double, 2>& y) { return std::array<double, 2>{y[1], 6.0 * y[0] * y[0] + t}; };
  auto axpy = [](const std::array<double, 2>& y, double a, const std::array<double, 2>& k) {
    return std::array<double, 2>{y[0] + a * k[0], y[1] + a * k[1]};
  };
  double t = t0;
  std::array<double, 2> y{u0, v0};
  while (y[0] <= u_stop) {
    const double h = eta / std::sqrt(std::max(y[0], 1.0));
    const auto k1 = f(t, y);
    const auto k2 = f(t + h / 2, axpy(y, h / 2, k1));
    const auto k3 = f(t + h / 2, axpy(y, h / 2, k2));
    const auto k4 = f(t + h, axpy(y, h, k3));
    for (int i = 0; i < 2; ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    t += h;
  }
  return t + 1.0 / std::sqrt(y[0]);
}

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace oracle
