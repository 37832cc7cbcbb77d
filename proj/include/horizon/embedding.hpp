#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <variant>

#include "horizon/errors.hpp"
#include "horizon/homogeneity.hpp"
#include "horizon/monomial.hpp"

namespace horizon {

/// Global chart y_j = kappa^{alpha_j} x_j with kappa = 1 / (1 - P(x)),
/// P(x) = sum_{i in I_alpha} x_i^{2 beta_i}. Interior {P < 1}, horizon {P = 1}.
struct ParabolicChart {
  HomogeneityType htype;
};

/// Local chart y_{i0} = sign * s^{-alpha_{i0}}, y_i = xhat_i * s^{-alpha_i}.
/// Coordinates keep the original ordering with s stored in slot i0.
struct DirectionalChart {
  HomogeneityType htype;
  std::size_t i0 = 0;
  int sign = 1;
};

using Chart = std::variant<ParabolicChart, DirectionalChart>;

inline const HomogeneityType& chart_type(const Chart& chart) {
  return std::visit([](const auto& c) -> const HomogeneityType& { return c.htype; }, chart);
}

inline bool is_parabolic(const Chart& chart) { return std::holds_alternative<ParabolicChart>(chart); }

inline DirectionalChart make_directional(HomogeneityType htype, std::size_t i0, int sign) {
  if (i0 >= htype.dim() || htype.alpha[i0] <= 0)
    throw ChartDomainError("directional chart index must be a scaled variable");
  if (sign != 1 && sign != -1) throw ChartDomainError("directional chart sign must be +1 or -1");
  return DirectionalChart{std::move(htype), i0, sign};
}

struct EmbeddedPoint {
  Chart chart;
  Vec coords;
  double horizon_gap = 1.0;  // W = 1 - P(x) (parabolic) or s (directional)
};

struct HorizonValue {
  double P = 0.0;
  Vec gradP;
};

inline HorizonValue horizon_value(const ParabolicChart& chart, const Vec& x) {
  const auto& t = chart.htype;
  HorizonValue out{0.0, Vec::Zero(x.size())};
  for (std::size_t a = 0; a < t.i_alpha.size(); ++a) {
    const auto j = static_cast<Eigen::Index>(t.i_alpha[a]);
    const int two_beta = 2 * t.beta[a];
    const double xm1 = std::pow(x[j], two_beta - 1);
    out.P += xm1 * x[j];
    out.gradP[j] = two_beta * xm1;
  }
  return out;
}

/// Horizon gap of chart coordinates: 1 - P(x) or s.
inline double horizon_gap(const Chart& chart, const Vec& x) {
  if (const auto* p = std::get_if<ParabolicChart>(&chart)) return 1.0 - horizon_value(*p, x).P;
  const auto& d = std::get<DirectionalChart>(chart);
  return x[static_cast<Eigen::Index>(d.i0)];
}

namespace detail {

/// Root of h(mu) = mu^{2c} - a mu^{2c-1} - b on [lo, hi], h increasing there.
inline double bracketed_newton(int two_c, double a, double b, double lo, double hi) {
  auto eval = [&](double mu) {
    const double p = std::pow(mu, two_c - 1);
    const double h = p * (mu - a) - b;
    const double dh = two_c * p - a * (two_c - 1) * std::pow(mu, two_c - 2);
    return std::pair{h, dh};
  };
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double mu = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    auto [h, dh] = eval(mu);
    if (h == 0.0) return mu;
    if (h > 0.0) hi = mu; else lo = mu;
    double next = mu - h / dh;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::fabs(next - mu) <= 4.0 * eps * mu || hi - lo <= 4.0 * eps * mu)
      return std::fabs(eval(next).first) < std::fabs(h) ? next : mu;
    mu = next;
  }
  throw ConvergenceError("kappa solve did not converge in 200 iterations");
}

}  // namespace detail

/// kappa >= 1 solving kappa^{2c} - kappa^{2c-1} = sum_{i in I_alpha} y_i^{2 beta_i}.
inline double solve_kappa(const ParabolicChart& chart, const Vec& y) {
  const auto& t = chart.htype;
  const int two_c = 2 * t.c;
  // Natural scale: |x_i| <= 1 forces kappa >= |y_i|^{1/alpha_i}.
  double scale = 0.0;
  for (std::size_t j : t.i_alpha) {
    const double yj = std::fabs(y[static_cast<Eigen::Index>(j)]);
    if (!std::isfinite(yj)) throw ConvergenceError("non-finite coordinate in kappa solve");
    scale = std::max(scale, std::pow(yj, 1.0 / t.alpha[j]));
  }
  if (scale == 0.0) return 1.0;
  if (scale <= 1.0) {
    double ptilde = 0.0;
    for (std::size_t a = 0; a < t.i_alpha.size(); ++a)
      ptilde += std::pow(y[static_cast<Eigen::Index>(t.i_alpha[a])], 2 * t.beta[a]);
    const double hi = 1.0 + std::pow(ptilde, 1.0 / two_c) + ptilde;
    return detail::bracketed_newton(two_c, 1.0, ptilde, 1.0, hi);
  }
  // kappa = scale * mu with mu^{2c} - mu^{2c-1}/scale = S, S in [1, |I_alpha|].
  double S = 0.0;
  for (std::size_t a = 0; a < t.i_alpha.size(); ++a) {
    const std::size_t j = t.i_alpha[a];
    const double xj = y[static_cast<Eigen::Index>(j)] / std::pow(scale, t.alpha[j]);
    S += std::pow(xj, 2 * t.beta[a]);
  }
  const double inv = 1.0 / scale;
  const double lo = std::max(1.0, inv);
  const double hi = inv + std::pow(S, 1.0 / two_c) + 1e-300;
  return scale * detail::bracketed_newton(two_c, inv, S, lo, std::max(hi, lo));
}

inline EmbeddedPoint make_point(const Chart& chart, Vec coords) {
  const double gap = horizon_gap(chart, coords);
  return EmbeddedPoint{chart, std::move(coords), gap};
}

inline EmbeddedPoint embed(const Chart& chart, const Vec& y) {
  const auto& t = chart_type(chart);
  if (static_cast<std::size_t>(y.size()) != t.dim()) throw DomainError("point dimension mismatch");
  Vec x(y.size());
  if (const auto* p = std::get_if<ParabolicChart>(&chart)) {
    const double kappa = solve_kappa(*p, y);
    for (Eigen::Index j = 0; j < y.size(); ++j) x[j] = y[j] / std::pow(kappa, t.alpha[j]);
    return EmbeddedPoint{chart, std::move(x), 1.0 / kappa};
  }
  const auto& d = std::get<DirectionalChart>(chart);
  const auto i0 = static_cast<Eigen::Index>(d.i0);
  const double signed_lead = d.sign * y[i0];
  if (!(signed_lead > 0.0)) throw ChartDomainError("point lies outside the directional half-space");
  const double s = std::pow(signed_lead, -1.0 / t.alpha[d.i0]);
  for (Eigen::Index j = 0; j < y.size(); ++j) x[j] = (j == i0) ? s : y[j] * std::pow(s, t.alpha[j]);
  return EmbeddedPoint{chart, std::move(x), s};
}

inline Vec project(const EmbeddedPoint& pt) {
  const auto& t = chart_type(pt.chart);
  const Vec& x = pt.coords;
  if (!(pt.horizon_gap > 0.0)) throw HorizonError("point on the horizon has no finite preimage");
  Vec y(x.size());
  if (is_parabolic(pt.chart)) {
    const double kappa = 1.0 / pt.horizon_gap;
    for (Eigen::Index j = 0; j < x.size(); ++j) y[j] = x[j] * std::pow(kappa, t.alpha[j]);
    return y;
  }
  const auto& d = std::get<DirectionalChart>(pt.chart);
  const auto i0 = static_cast<Eigen::Index>(d.i0);
  const double s = x[i0];
  for (Eigen::Index j = 0; j < x.size(); ++j)
    y[j] = (j == i0) ? d.sign * std::pow(s, -t.alpha[d.i0]) : x[j] * std::pow(s, -t.alpha[j]);
  return y;
}

inline Vec project(const Chart& chart, const Vec& coords) { return project(make_point(chart, coords)); }

inline EmbeddedPoint transition(const EmbeddedPoint& pt, const Chart& to_chart) {
  return embed(to_chart, project(pt));
}

}  // namespace horizon
