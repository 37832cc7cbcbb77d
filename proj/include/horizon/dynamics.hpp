#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "horizon/desingularize.hpp"
#include "horizon/dopri.hpp"
#include "horizon/errors.hpp"

namespace horizon {

// ---------------------------------------------------------------------------
// Trajectories

enum class StopReason { horizon_reached, tau_exhausted, left_domain, diverged };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::horizon_reached: return "horizon_reached";
    case StopReason::tau_exhausted: return "tau_exhausted";
    case StopReason::left_domain: return "left_domain";
    case StopReason::diverged: return "diverged";
  }
  return "unknown";
}

struct TrajectorySample {
  double tau = 0.0;
  Vec coords;
  double t = 0.0;
  double horizon_gap = 1.0;
  double time_factor = 0.0;  // dt/dtau at this sample
};

/// Orbit of the desingularized flow. `samples` holds one entry per accepted step;
/// the starting state is kept separately in `initial`.
struct Trajectory {
  Chart chart;
  TrajectorySample initial;
  std::vector<TrajectorySample> samples;
  StopReason stop_reason = StopReason::tau_exhausted;

  const TrajectorySample& last() const { return samples.empty() ? initial : samples.back(); }
};

struct IntegrateControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double tau_max = 200.0;
  double horizon_eps = 1e-12;
  bool stop_at_horizon = true;
  double max_step = 0.1;  // keeps the tail densely sampled for the rate fits
  double divergence_bound = 1e8;
};

/// Integrates (x, t) with dx/dtau = g(x), dt/dtau = time factor, from tau = 0.
inline Trajectory integrate(const DesingField& field, const Vec& x0, double t0, const IntegrateControls& ctl = {}) {
  const auto n = static_cast<Eigen::Index>(field.dim());
  if (x0.size() != n) throw DomainError("initial point dimension mismatch");
  const double gap0 = horizon_gap(field.chart, x0);
  if (gap0 < -1e-12) throw ChartDomainError("initial point lies beyond the horizon");

  Trajectory traj;
  traj.chart = field.chart;
  traj.initial = TrajectorySample{0.0, x0, t0, gap0, eval_time_factor(field, x0)};

  Vec state(n + 1);
  state.head(n) = x0;
  state[n] = t0;

  auto rhs = [&](double, const Vec& s) {
    const Vec x = s.head(n);
    Vec d(n + 1);
    d.head(n) = eval_desing_value(field, x);
    d[n] = eval_time_factor(field, x);
    return d;
  };

  std::optional<StopReason> stop;
  auto observer = [&](double tau, const Vec& s) {
    const Vec x = s.head(n);
    if (!x.allFinite() || !std::isfinite(s[n]) || x.cwiseAbs().maxCoeff() > ctl.divergence_bound) {
      stop = StopReason::diverged;
      return false;
    }
    const double gap = horizon_gap(field.chart, x);
    if (gap < -1e-12) {
      stop = StopReason::left_domain;
      return false;
    }
    traj.samples.push_back(TrajectorySample{tau, x, s[n], gap, eval_time_factor(field, x)});
    if (ctl.stop_at_horizon && gap < ctl.horizon_eps) {
      stop = StopReason::horizon_reached;
      return false;
    }
    return true;
  };

  DopriOptions opt;
  opt.rel_tol = ctl.rel_tol;
  opt.abs_tol = ctl.abs_tol;
  opt.h_max = ctl.max_step;
  if (ctl.stop_at_horizon && gap0 < ctl.horizon_eps) {
    traj.stop_reason = StopReason::horizon_reached;
    return traj;
  }
  dopri54(rhs, 0.0, state, ctl.tau_max, opt, observer);
  traj.stop_reason = stop.value_or(StopReason::tau_exhausted);
  return traj;
}

// ---------------------------------------------------------------------------
// Equilibria and spectra

enum class Stability { sink, source, saddle, nonhyperbolic };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::sink: return "sink";
    case Stability::source: return "source";
    case Stability::saddle: return "saddle";
    case Stability::nonhyperbolic: return "nonhyperbolic";
  }
  return "unknown";
}

using Complex = std::complex<double>;

struct Equilibrium {
  Chart chart;
  Vec coords;
  std::optional<double> t_slice;
  double residual = 0.0;
  double horizon_residual = 0.0;
  Mat jacobian;
  std::vector<Complex> eigenvalues;
  Stability classification = Stability::nonhyperbolic;
};

inline constexpr double kNeutralTol = 1e-8;

/// Eigenvalues split by real part into a neutral (tangential) band and stable/unstable sets.
struct SpectralSplit {
  std::vector<std::size_t> tangential;
  std::vector<std::size_t> stable;
  std::vector<std::size_t> unstable;
  double gap = 0.0;
  Stability stability = Stability::nonhyperbolic;
};

inline std::vector<Complex> eigenvalues_of(const Mat& J) {
  if (J.size() == 0) return {};
  Eigen::EigenSolver<Mat> es(J, false);
  if (es.info() != Eigen::Success) throw EigenFailure("nonsymmetric eigensolver failed");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  return ev;
}

inline SpectralSplit split_spectrum(const std::vector<Complex>& eigs, std::size_t tangential_dims) {
  SpectralSplit out;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    const double re = eigs[i].real();
    if (std::fabs(re) < kNeutralTol) {
      out.tangential.push_back(i);
      continue;
    }
    (re < 0.0 ? out.stable : out.unstable).push_back(i);
    gap = std::min(gap, std::fabs(re));
  }
  out.gap = std::isfinite(gap) ? gap : 0.0;
  const bool hyperbolic = out.tangential.size() <= tangential_dims &&
                          (out.stable.size() + out.unstable.size() == 0 || out.gap > 10.0 * kNeutralTol);
  if (!hyperbolic) out.stability = Stability::nonhyperbolic;
  else if (out.unstable.empty()) out.stability = Stability::sink;
  else if (out.stable.empty()) out.stability = Stability::source;
  else out.stability = Stability::saddle;
  return out;
}

inline SpectralSplit spectrum_classify(const Equilibrium& eq, std::size_t tangential_dims) {
  if (eq.jacobian.size() == 0) throw EigenFailure("equilibrium has no Jacobian");
  const auto eigs = eq.eigenvalues.empty() ? eigenvalues_of(eq.jacobian) : eq.eigenvalues;
  return split_spectrum(eigs, tangential_dims);
}

/// Coordinates without scaling weight; they act as frozen slice parameters on the horizon.
inline std::vector<std::size_t> unscaled_indices(const HomogeneityType& t) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < t.dim(); ++j)
    if (t.alpha[j] == 0) out.push_back(j);
  return out;
}

struct EquilibriumSearch {
  /// Values of the unscaled coordinates (in index order); missing entries default to 0.
  std::vector<double> slice;
  /// Explicit seeds in chart coordinates; when empty a grid is used.
  std::vector<Vec> seeds;
  int grid_points = 7;
  double merge_tol = 1e-8;
};

namespace detail {

/// Free unknowns of the horizon root problem.
inline std::vector<std::size_t> free_indices(const DesingField& f) {
  std::vector<std::size_t> out;
  const auto& t = f.htype;
  const auto* d = std::get_if<DirectionalChart>(&f.chart);
  for (std::size_t j : t.i_alpha)
    if (!d || j != d->i0) out.push_back(j);
  return out;
}

/// Residual [g(x); P(x) - 1] (parabolic) or g(x) with s = 0 (directional) and its
/// Jacobian with respect to the free unknowns.
inline void horizon_system(const DesingField& f, const Vec& x, const std::vector<std::size_t>& free, Vec& r, Mat& Jr) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  const bool para = is_parabolic(f.chart);
  const Eigen::Index m = n + (para ? 1 : 0);
  r.resize(m);
  Jr.resize(m, static_cast<Eigen::Index>(free.size()));
  const Vec g = eval_desing_value(f, x);
  const Mat J = jacobian_desing(f, x);
  r.head(n) = g;
  for (std::size_t a = 0; a < free.size(); ++a) Jr.col(static_cast<Eigen::Index>(a)).head(n) = J.col(static_cast<Eigen::Index>(free[a]));
  if (para) {
    const auto hv = horizon_value(std::get<ParabolicChart>(f.chart), x);
    r[n] = hv.P - 1.0;
    for (std::size_t a = 0; a < free.size(); ++a) Jr(n, static_cast<Eigen::Index>(a)) = hv.gradP[static_cast<Eigen::Index>(free[a])];
  }
}

/// Gauss-Newton with backtracking on the horizon system. Returns the final point.
inline std::optional<Vec> gauss_newton_horizon(const DesingField& f, Vec x, const std::vector<std::size_t>& free) {
  Vec r;
  Mat Jr;
  auto norm_at = [&](const Vec& p) -> double {
    try {
      Vec rr;
      Mat jj;
      horizon_system(f, p, free, rr, jj);
      return rr.allFinite() ? rr.norm() : std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  try {
    horizon_system(f, x, free, r, Jr);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  double rn = r.norm();
  for (int it = 0; it < 100 && rn > 1e-15; ++it) {
    const Vec step = Jr.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) return std::nullopt;
    double lambda = 1.0;
    bool improved = false;
    Vec trial = x;
    for (int ls = 0; ls < 30; ++ls) {
      trial = x;
      for (std::size_t a = 0; a < free.size(); ++a) trial[static_cast<Eigen::Index>(free[a])] += lambda * step[static_cast<Eigen::Index>(a)];
      if (norm_at(trial) < rn) {
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
    const double step_norm = lambda * step.norm();
    x = trial;
    try {
      horizon_system(f, x, free, r, Jr);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    rn = r.norm();
    if (step_norm < 1e-16) break;
  }
  if (!x.allFinite()) return std::nullopt;
  return x;
}

inline std::vector<Vec> default_seeds(const DesingField& f, const std::vector<double>& slice, int points) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  const auto& t = f.htype;
  const auto free = free_indices(f);
  const bool para = is_parabolic(f.chart);
  const double lo = para ? -1.05 : -5.0;
  const double hi = -lo;
  Vec base = Vec::Zero(n);
  const auto fixed = unscaled_indices(t);
  for (std::size_t a = 0; a < fixed.size(); ++a)
    base[static_cast<Eigen::Index>(fixed[a])] = a < slice.size() ? slice[a] : 0.0;

  std::vector<Vec> seeds;
  std::vector<int> idx(free.size(), 0);
  const int pts = std::max(points, 2);
  while (true) {
    Vec s = base;
    for (std::size_t a = 0; a < free.size(); ++a)
      s[static_cast<Eigen::Index>(free[a])] = lo + (hi - lo) * idx[a] / (pts - 1);
    if (para) {
      // Quasi-homogeneous rescaling of the grid point onto {P = 1}.
      const double P = horizon_value(std::get<ParabolicChart>(f.chart), s).P;
      if (P > 0.0) {
        const double lam = std::pow(P, -1.0 / (2.0 * t.c));
        for (std::size_t j : t.i_alpha) s[static_cast<Eigen::Index>(j)] *= std::pow(lam, t.alpha[j]);
        seeds.push_back(s);
      }
    } else {
      seeds.push_back(s);
    }
    std::size_t a = 0;
    for (; a < free.size(); ++a) {
      if (++idx[a] < pts) break;
      idx[a] = 0;
    }
    if (a == free.size()) break;
  }
  return seeds;
}

}  // namespace detail

/// Builds an Equilibrium record (residuals, Jacobian, spectrum) at a horizon point.
inline Equilibrium make_equilibrium(const DesingField& f, const Vec& x) {
  Equilibrium eq;
  eq.chart = f.chart;
  eq.coords = x;
  const auto ev = evaluate_desing(f, x);
  eq.residual = ev.g.norm();
  eq.horizon_residual = std::fabs(horizon_gap(f.chart, x));
  eq.jacobian = ev.J;
  if (f.nonautonomous()) eq.t_slice = x[0];
  eq.eigenvalues = eigenvalues_of(eq.jacobian);
  eq.classification = split_spectrum(eq.eigenvalues, unscaled_indices(f.htype).size()).stability;
  return eq;
}

inline constexpr double kEquilibriumResidualTol = 1e-10;
inline constexpr double kHorizonResidualTol = 1e-12;

inline std::vector<Equilibrium> find_horizon_equilibria(const DesingField& f, const EquilibriumSearch& search = {}) {
  const auto free = detail::free_indices(f);
  std::vector<Vec> seeds = search.seeds.empty() ? detail::default_seeds(f, search.slice, search.grid_points) : search.seeds;
  std::vector<Equilibrium> out;
  const auto* d = std::get_if<DirectionalChart>(&f.chart);
  for (Vec seed : seeds) {
    if (d) seed[static_cast<Eigen::Index>(d->i0)] = 0.0;
    auto sol = detail::gauss_newton_horizon(f, seed, free);
    if (!sol) continue;
    Vec x = *sol;
    Equilibrium eq;
    try {
      eq = make_equilibrium(f, x);
    } catch (const DomainError&) {
      continue;
    }
    if (!(eq.residual < kEquilibriumResidualTol) || !(eq.horizon_residual < kHorizonResidualTol)) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Equilibrium& o) {
      return (o.coords - x).cwiseAbs().maxCoeff() < search.merge_tol;
    });
    if (!dup) out.push_back(std::move(eq));
  }
  std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
    for (Eigen::Index j = 0; j < a.coords.size(); ++j)
      if (a.coords[j] != b.coords[j]) return a.coords[j] < b.coords[j];
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Equilibrium curves

struct EquilibriumCurve {
  std::vector<Equilibrium> samples;
  double max_normal_real = 0.0;  // max Re over normal eigenvalues along the curve
  double min_normal_abs_real = 0.0;
};

struct CurveOptions {
  std::size_t param_index = 0;  // unscaled coordinate used as the curve parameter
  double max_jump = 0.25;
};

inline EquilibriumCurve trace_equilibrium_curve(const DesingField& f, double t_begin, double t_end, double t_step,
                                                const Equilibrium& seed, const CurveOptions& opt = {}) {
  const auto& t = f.htype;
  if (opt.param_index >= t.dim() || t.alpha[opt.param_index] != 0)
    throw DomainError("curve parameter must be an unscaled coordinate");
  if (!(t_step > 0.0)) throw DomainError("curve step must be positive");
  const auto free = detail::free_indices(f);
  const auto p = static_cast<Eigen::Index>(opt.param_index);
  const std::size_t tangential = unscaled_indices(t).size();

  EquilibriumCurve curve;
  curve.max_normal_real = -std::numeric_limits<double>::infinity();
  curve.min_normal_abs_real = std::numeric_limits<double>::infinity();
  Vec prev = seed.coords;
  const double dir = t_end >= t_begin ? 1.0 : -1.0;
  const auto steps = static_cast<long>(std::floor(std::fabs(t_end - t_begin) / t_step + 1e-9));
  for (long i = 0; i <= steps; ++i) {
    const double tv = t_begin + dir * t_step * static_cast<double>(i);
    Vec guess = prev;
    guess[p] = tv;
    auto sol = detail::gauss_newton_horizon(f, guess, free);
    if (!sol) throw CurveBreak("continuation failed at parameter " + std::to_string(tv));
    Equilibrium eq = make_equilibrium(f, *sol);
    eq.t_slice = tv;
    if (!(eq.residual < kEquilibriumResidualTol) || !(eq.horizon_residual < kHorizonResidualTol))
      throw CurveBreak("residual check failed at parameter " + std::to_string(tv));
    Vec jump = *sol - prev;
    jump[p] = 0.0;
    if (i > 0 && jump.norm() > opt.max_jump) throw CurveBreak("branch jump at parameter " + std::to_string(tv));
    const auto split = split_spectrum(eq.eigenvalues, tangential);
    for (std::size_t k : split.stable) {
      curve.max_normal_real = std::max(curve.max_normal_real, eq.eigenvalues[k].real());
      curve.min_normal_abs_real = std::min(curve.min_normal_abs_real, std::fabs(eq.eigenvalues[k].real()));
    }
    for (std::size_t k : split.unstable) {
      curve.max_normal_real = std::max(curve.max_normal_real, eq.eigenvalues[k].real());
      curve.min_normal_abs_real = std::min(curve.min_normal_abs_real, std::fabs(eq.eigenvalues[k].real()));
    }
    prev = *sol;
    curve.samples.push_back(std::move(eq));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Non-resonance and decay

struct NonresonanceResult {
  bool nonresonant = true;
  std::vector<int> witness;  // violating multi-index when nonresonant is false
};

/// Discrete-spectrum Sternberg-Sell check: for all nonnegative integer tuples m with
/// 2 <= |m| <= 2N, sum m_j lambda_j must avoid every lambda and must not vanish.
inline NonresonanceResult check_nonresonance(const std::vector<double>& eigs, int order_N) {
  NonresonanceResult res;
  const std::size_t d = eigs.size();
  if (d == 0 || order_N < 1) return res;
  const int max_total = 2 * order_N;
  double scale = 0.0;
  for (double l : eigs) scale = std::max(scale, std::fabs(l));
  std::vector<int> m(d, 0);
  // Odometer over [0, max_total]^d, pruned by total order.
  while (true) {
    std::size_t a = 0;
    for (; a < d; ++a) {
      if (++m[a] <= max_total) break;
      m[a] = 0;
    }
    if (a == d) break;
    int total = 0;
    for (int v : m) total += v;
    if (total < 2 || total > max_total) continue;
    double combo = 0.0;
    for (std::size_t j = 0; j < d; ++j) combo += m[j] * eigs[j];
    if (std::fabs(combo) <= 1e-10 * scale * total) {
      res.nonresonant = false;
      res.witness = m;
      return res;
    }
    for (double l : eigs) {
      if (std::fabs(l - combo) <= 1e-10 * std::max(std::fabs(l), std::fabs(combo))) {
        res.nonresonant = false;
        res.witness = m;
        return res;
      }
    }
  }
  return res;
}

struct DecayWindow {
  double gap_hi = 1e-3;
  double gap_lo = 1e-11;
  std::size_t min_samples = 20;
};

struct DecayEstimate {
  double lambda = 0.0;
  double intercept = 0.0;
  double residual_slope = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit log(gap) = intercept - lambda * tau over the window; residual_slope is
/// max |log(gap) - fit| / tau, a measure of the sub-exponential prefactor's growth.
inline DecayEstimate estimate_decay(const Trajectory& traj, const DecayWindow& window = {}) {
  std::vector<double> taus, logs;
  for (const auto& s : traj.samples) {
    if (s.horizon_gap <= window.gap_hi && s.horizon_gap >= window.gap_lo && s.horizon_gap > 0.0) {
      taus.push_back(s.tau);
      logs.push_back(std::log(s.horizon_gap));
    }
  }
  if (taus.size() < window.min_samples)
    throw InsufficientWindow("only " + std::to_string(taus.size()) + " samples in the decay window");
  const double n = static_cast<double>(taus.size());
  double mt = 0, ml = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    mt += taus[i];
    ml += logs[i];
  }
  mt /= n;
  ml /= n;
  double stt = 0, stl = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    stt += (taus[i] - mt) * (taus[i] - mt);
    stl += (taus[i] - mt) * (logs[i] - ml);
  }
  const double slope = stl / stt;
  DecayEstimate out;
  out.lambda = -slope;
  out.intercept = ml - slope * mt;
  out.samples = taus.size();
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double r = logs[i] - (out.intercept + slope * taus[i]);
    if (taus[i] > 0.0) out.residual_slope = std::max(out.residual_slope, std::fabs(r) / taus[i]);
  }
  return out;
}

}  // namespace horizon
