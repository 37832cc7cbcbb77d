#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "horizon/dynamics.hpp"
#include "horizon/embedding.hpp"
#include "horizon/errors.hpp"

namespace horizon {

struct TmaxEstimate {
  double t_max = 0.0;
  double tail = 0.0;
  double tail_fraction = 0.0;
};

/// t_max = t(tau_end) + tail, where the tail integrates A e^{-k lambda tau} beyond tau_end and
/// A is fitted to the time factor over the final decade of horizon gap.
inline TmaxEstimate estimate_tmax(const Trajectory& traj, double lambda_decay, double k) {
  if (traj.stop_reason != StopReason::horizon_reached || traj.samples.empty())
    throw NotConverged(std::string("trajectory stopped with ") + to_string(traj.stop_reason));
  if (!(lambda_decay > 0.0)) throw DomainError("decay rate must be positive");
  const double rate = k * lambda_decay;
  const auto& last = traj.samples.back();
  const double gap_cut = 10.0 * last.horizon_gap;
  double acc = 0.0;
  int count = 0;
  for (auto it = traj.samples.rbegin(); it != traj.samples.rend() && it->horizon_gap <= gap_cut; ++it) {
    if (it->time_factor <= 0.0) continue;
    acc += std::log(it->time_factor) + rate * (it->tau - last.tau);
    ++count;
  }
  // A e^{-rate tau_end}, i.e. the fitted time factor at the final sample.
  const double tf_end = count > 0 ? std::exp(acc / count) : last.time_factor;
  TmaxEstimate out;
  out.tail = tf_end / rate;
  out.t_max = last.t + out.tail;
  const double elapsed = out.t_max - traj.initial.t;
  out.tail_fraction = elapsed > 0.0 ? out.tail / elapsed : 0.0;
  return out;
}

struct RateFit {
  double exponent = 0.0;
  double r2 = 0.0;
  double leading_coefficient = 0.0;
  std::size_t samples = 0;
};

struct RateWindow {
  double gap_hi = 1e-3;
  double gap_lo = 1e-8;
  std::size_t min_samples = 20;
  double vanishing_tol = 1e-6;
};

namespace detail {

/// t_max - t at every sample, summed backwards from the tail so that small remainders are not
/// differences of nearly equal times. Each segment integrates the time factor as an exponential.
inline std::vector<double> remaining_times(const Trajectory& traj, double tail) {
  std::vector<double> rem(traj.samples.size());
  double acc = tail;
  for (std::size_t i = traj.samples.size(); i-- > 0;) {
    rem[i] = acc;
    if (i == 0) break;
    const auto& a = traj.samples[i - 1];
    const auto& b = traj.samples[i];
    const double h = b.tau - a.tau;
    double seg = b.t - a.t;
    if (a.time_factor > 0.0 && b.time_factor > 0.0) {
      const double lr = std::log(a.time_factor / b.time_factor);
      seg = std::fabs(lr) < 1e-8 ? 0.5 * h * (a.time_factor + b.time_factor) : h * (a.time_factor - b.time_factor) / lr;
    }
    acc += seg;
  }
  return rem;
}

}  // namespace detail

/// Slope of log|y_i| against log(t_max - t) over the rate window, y recovered by projection.
/// `tail` is t_max - t at the final sample.
inline RateFit fit_rate_tail(const Trajectory& traj, double tail, std::size_t component, const HomogeneityType& htype,
                             const RateWindow& window = {}) {
  if (component >= htype.dim() || htype.alpha[component] <= 0)
    throw DomainError("rates are only defined for scaled components");
  const auto ci = static_cast<Eigen::Index>(component);
  const auto* d = std::get_if<DirectionalChart>(&traj.chart);
  const bool leading = d && d->i0 == component;
  if (!leading && std::fabs(traj.last().coords[ci]) < window.vanishing_tol)
    throw VanishingComponent("component " + std::to_string(component) + " tends to zero on the horizon");

  const auto rem = detail::remaining_times(traj, tail);
  std::vector<double> xs, ys;
  double sign = 0.0;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    if (s.horizon_gap > window.gap_hi || s.horizon_gap < window.gap_lo) continue;
    if (!(rem[k] > 0.0)) continue;
    const Vec y = project(EmbeddedPoint{traj.chart, s.coords, s.horizon_gap});
    if (y[ci] == 0.0) continue;
    if (sign == 0.0) sign = y[ci] > 0 ? 1.0 : -1.0;
    xs.push_back(std::log(rem[k]));
    ys.push_back(std::log(std::fabs(y[ci])));
  }
  if (xs.size() < window.min_samples)
    throw InsufficientWindow("only " + std::to_string(xs.size()) + " samples in the rate window");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit out;
  out.exponent = sxy / sxx;
  out.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  out.leading_coefficient = sign * std::exp(my - out.exponent * mx);
  out.samples = xs.size();
  return out;
}

inline RateFit fit_rate(const Trajectory& traj, double t_max, std::size_t component, const HomogeneityType& htype,
                        const RateWindow& window = {}) {
  if (traj.samples.empty()) throw InsufficientWindow("empty trajectory");
  return fit_rate_tail(traj, t_max - traj.last().t, component, htype, window);
}

enum class FitStatus { ok, vanishing, insufficient_window };

inline const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::ok: return "ok";
    case FitStatus::vanishing: return "vanishing_component";
    case FitStatus::insufficient_window: return "insufficient_window";
  }
  return "unknown";
}

struct ComponentRate {
  std::size_t index = 0;
  std::string variable;
  FitStatus status = FitStatus::ok;
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  double predicted_exponent = 0.0;
  double fit_r2 = std::numeric_limits<double>::quiet_NaN();
  double leading_coefficient = std::numeric_limits<double>::quiet_NaN();
};

struct BlowupReport {
  double t_max = 0.0;
  double t_max_tail_fraction = 0.0;
  double lambda_decay = 0.0;
  double residual_slope = 0.0;
  std::vector<ComponentRate> components;
  bool type1_confirmed = false;
  Equilibrium target;
  double target_distance = 0.0;
};

inline constexpr double kTargetDistance = 0.1;
inline constexpr double kType1R2 = 0.999;
inline constexpr double kType1RelTol = 0.05;

/// Estimates decay, blow-up time, and per-component rates, and checks them against -alpha_i / k.
inline BlowupReport build_report(const Trajectory& traj, const std::vector<Equilibrium>& targets,
                                 const HomogeneityType& htype, const std::vector<std::string>& names = {}) {
  const Vec& end = traj.last().coords;
  const Equilibrium* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& eq : targets) {
    const double dist = (eq.coords - end).norm();
    if (dist < best_d) {
      best_d = dist;
      best = &eq;
    }
  }
  if (!best || !(best_d < kTargetDistance)) throw NoTargetFound("no horizon equilibrium near the trajectory end");

  BlowupReport rep;
  rep.target = *best;
  rep.target_distance = best_d;
  const auto decay = estimate_decay(traj);
  rep.lambda_decay = decay.lambda;
  rep.residual_slope = decay.residual_slope;
  const auto tm = estimate_tmax(traj, decay.lambda, htype.k);
  rep.t_max = tm.t_max;
  rep.t_max_tail_fraction = tm.tail_fraction;

  bool all_ok = true;
  int fitted = 0;
  for (std::size_t i : htype.i_alpha) {
    ComponentRate cr;
    cr.index = i;
    cr.variable = i < names.size() ? names[i] : "y" + std::to_string(i);
    cr.predicted_exponent = -static_cast<double>(htype.alpha[i]) / htype.k;
    try {
      const auto fit = fit_rate_tail(traj, tm.tail, i, htype);
      cr.fitted_exponent = fit.exponent;
      cr.fit_r2 = fit.r2;
      cr.leading_coefficient = fit.leading_coefficient;
      ++fitted;
      const bool ok = fit.r2 > kType1R2 &&
                      std::fabs(fit.exponent - cr.predicted_exponent) < kType1RelTol * std::fabs(cr.predicted_exponent);
      all_ok = all_ok && ok;
    } catch (const VanishingComponent&) {
      cr.status = FitStatus::vanishing;
    } catch (const InsufficientWindow&) {
      cr.status = FitStatus::insufficient_window;
      all_ok = false;
    }
    rep.components.push_back(std::move(cr));
  }
  rep.type1_confirmed = all_ok && fitted > 0;
  return rep;
}

/// Horizon equilibria on the slice through the trajectory end, seeded by the end point and the grid.
inline std::vector<Equilibrium> terminal_equilibria(const DesingField& field, const Trajectory& traj,
                                                    int grid_points = 7) {
  EquilibriumSearch search;
  search.grid_points = grid_points;
  for (std::size_t j : unscaled_indices(field.htype))
    search.slice.push_back(traj.last().coords[static_cast<Eigen::Index>(j)]);
  search.seeds = detail::default_seeds(field, search.slice, grid_points);
  Vec end = traj.last().coords;
  if (const auto* d = std::get_if<DirectionalChart>(&field.chart)) end[static_cast<Eigen::Index>(d->i0)] = 0.0;
  search.seeds.insert(search.seeds.begin(), end);
  return find_horizon_equilibria(field, search);
}

inline BlowupReport build_report(const DesingField& field, const Trajectory& traj) {
  return build_report(traj, terminal_equilibria(field, traj), field.htype, field.source.variable_names);
}

}  // namespace horizon
