#pragma once

#include <algorithm>
#include <cmath>

#include "horizon/errors.hpp"
#include "horizon/monomial.hpp"

namespace horizon {

struct DopriOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 0.0;  // 0 selects an automatic initial step
  double h_max = 0.0;   // 0 means unbounded
  double h_min = 1e-15;
  long max_steps = 10'000'000;
};

enum class DopriStatus { reached_end, stopped_by_observer, max_steps };

struct DopriResult {
  DopriStatus status = DopriStatus::reached_end;
  double t = 0.0;
  Vec y;
  long accepted = 0;
  long rejected = 0;
};

namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
// Difference between the 5th-order solution and the embedded 4th-order one.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

/// Dormand-Prince 5(4) with FSAL and PI step-size control.
///
/// `rhs(t, y)` returns y'. A DomainError thrown from `rhs` inside a trial step rejects the
/// step and halves h. `observer(t, y)` runs after every accepted step and returns false to stop.
template <class Rhs, class Observer>
DopriResult dopri54(Rhs&& rhs, double t0, Vec y0, double t_end, const DopriOptions& opt, Observer&& observer) {
  const Eigen::Index n = y0.size();
  const double dir = t_end >= t0 ? 1.0 : -1.0;
  DopriResult res;
  res.t = t0;
  res.y = std::move(y0);

  auto scale = [&](const Vec& a, const Vec& b) {
    return (opt.abs_tol + opt.rel_tol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix();
  };

  Vec k1 = rhs(res.t, res.y);
  double h = opt.h_init;
  if (h <= 0.0) {
    // Initial step after Hairer, Norsett & Wanner.
    const Vec sc = scale(res.y, res.y);
    const double d0 = std::sqrt((res.y.array() / sc.array()).square().mean());
    const double d1 = std::sqrt((k1.array() / sc.array()).square().mean());
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::fabs(t_end - t0));
    double h1 = h0;
    try {
      const Vec k2 = rhs(res.t + dir * h0, res.y + dir * h0 * k1);
      const double d2 = std::sqrt(((k2 - k1).array() / sc.array()).square().mean()) / h0;
      const double dm = std::max(d1, d2);
      h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    } catch (const DomainError&) {
      h1 = h0 * 1e-3;
    }
    h = std::min(100 * h0, h1);
  }
  if (opt.h_max > 0.0) h = std::min(h, opt.h_max);

  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
  const double expo1 = 0.2 - beta * 0.75;
  double err_old = 1e-4;
  bool last_rejected = false;

  Vec k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y1(n), tmp(n);
  while (res.accepted + res.rejected < opt.max_steps) {
    if (dir * (res.t - t_end) >= 0.0) {
      res.status = DopriStatus::reached_end;
      return res;
    }
    if (dir * (res.t + dir * h - t_end) > 0.0) h = std::fabs(t_end - res.t);
    if (h < opt.h_min * std::max(1.0, std::fabs(res.t))) throw StepFailure("step size underflow");

    const double t = res.t;
    const double hs = dir * h;
    double err = 0.0;
    bool domain_fail = false;
    try {
      using namespace dp;
      tmp = res.y + hs * a21 * k1;
      k2 = rhs(t + c2 * hs, tmp);
      tmp = res.y + hs * (a31 * k1 + a32 * k2);
      k3 = rhs(t + c3 * hs, tmp);
      tmp = res.y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      k4 = rhs(t + c4 * hs, tmp);
      tmp = res.y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      k5 = rhs(t + c5 * hs, tmp);
      tmp = res.y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      k6 = rhs(t + hs, tmp);
      y1 = res.y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      k7 = rhs(t + hs, y1);
      const Vec e = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      err = std::sqrt((e.array() / scale(res.y, y1).array()).square().mean());
      if (!std::isfinite(err)) domain_fail = true;
    } catch (const DomainError&) {
      domain_fail = true;
    }

    if (domain_fail) {
      ++res.rejected;
      h *= 0.5;
      last_rejected = true;
      continue;
    }

    if (err <= 1.0) {
      ++res.accepted;
      res.t = t + hs;
      res.y = y1;
      k1 = k7;
      double fac = std::pow(std::max(err, 1e-10), -expo1) * std::pow(err_old, beta);
      fac = std::clamp(safety * fac, fac_min, fac_max);
      if (last_rejected) fac = std::min(fac, 1.0);
      err_old = std::max(err, 1e-4);
      h *= fac;
      if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
      last_rejected = false;
      if (!observer(res.t, res.y)) {
        res.status = DopriStatus::stopped_by_observer;
        return res;
      }
    } else {
      ++res.rejected;
      h *= std::max(fac_min, safety * std::pow(err, -expo1));
      last_rejected = true;
    }
  }
  res.status = DopriStatus::max_steps;
  return res;
}

}  // namespace horizon
