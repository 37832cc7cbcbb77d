#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "horizon/embedding.hpp"
#include "horizon/errors.hpp"
#include "horizon/homogeneity.hpp"
#include "horizon/monomial.hpp"

namespace horizon {

/// coeff * W^w_exponent * prod_j x_j^exponents[j]. In directional charts the gap is the
/// coordinate s itself, so w_exponent stays 0 and s powers live in exponents[i0].
struct ExtMonomial {
  double coeff = 0.0;
  std::vector<double> exponents;
  double w_exponent = 0.0;
};

using ExtPoly = std::vector<ExtMonomial>;

namespace detail {

inline bool same_powers(const ExtMonomial& a, const ExtMonomial& b) {
  constexpr double tol = 1e-12;
  if (std::fabs(a.w_exponent - b.w_exponent) > tol) return false;
  for (std::size_t j = 0; j < a.exponents.size(); ++j)
    if (std::fabs(a.exponents[j] - b.exponents[j]) > tol) return false;
  return true;
}

/// Merges like terms and drops cancelled ones.
inline ExtPoly combine(const ExtPoly& terms) {
  ExtPoly out;
  for (const auto& t : terms) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ExtMonomial& o) { return same_powers(o, t); });
    if (it == out.end()) out.push_back(t);
    else it->coeff += t.coeff;
  }
  std::erase_if(out, [](const ExtMonomial& t) {
    return t.coeff == 0.0;
  });
  return out;
}

inline ExtMonomial times(const ExtMonomial& t, double coeff, std::size_t var, double var_power,
                         double w_power) {
  ExtMonomial r = t;
  r.coeff *= coeff;
  r.exponents[var] += var_power;
  r.w_exponent += w_power;
  return r;
}

}  // namespace detail

/// A time-dependent right-hand side y' = f(t, y): each monomial carries n + 1 exponents,
/// index 0 being the power of t.
struct TimeDependentField {
  std::string time_name = "t";
  std::vector<std::string> variable_names;
  std::vector<std::vector<Monomial>> components;
};

/// Prepends the unscaled time variable with t' = 1. Returns the extended field and type.
inline std::pair<FieldSpec, HomogeneityType> extend_nonautonomous(const TimeDependentField& field,
                                                                   const HomogeneityType& htype) {
  const std::size_t n = field.components.size();
  if (htype.dim() != n) throw DomainError("type dimension differs from field dimension");
  FieldSpec out;
  out.nonautonomous = true;
  out.variable_names.push_back(field.time_name);
  for (std::size_t i = 0; i < n; ++i)
    out.variable_names.push_back(i < field.variable_names.size() ? field.variable_names[i]
                                                                 : "y" + std::to_string(i + 1));
  out.components.push_back({Monomial{1.0, std::vector<double>(n + 1, 0.0)}});
  for (const auto& comp : field.components) {
    for (const auto& m : comp)
      if (m.exponents.size() != n + 1) throw DomainError("time-dependent monomial needs n + 1 exponents");
    out.components.push_back(comp);
  }
  std::vector<int> alpha{0};
  alpha.insert(alpha.end(), htype.alpha.begin(), htype.alpha.end());
  validate(out);
  return {std::move(out), make_type(std::move(alpha), htype.k)};
}

/// Extension of an autonomous field; the new time variable is decoupled.
inline std::pair<FieldSpec, HomogeneityType> extend_nonautonomous(const FieldSpec& field,
                                                                   const HomogeneityType& htype) {
  if (field.nonautonomous) throw AlreadyExtendedError("field already carries a time variable");
  TimeDependentField tdf;
  tdf.variable_names = field.variable_names;
  for (const auto& comp : field.components) {
    std::vector<Monomial> c;
    for (const auto& m : comp) {
      Monomial e{m.coeff, {0.0}};
      e.exponents.insert(e.exponents.end(), m.exponents.begin(), m.exponents.end());
      c.push_back(std::move(e));
    }
    tdf.components.push_back(std::move(c));
  }
  return extend_nonautonomous(tdf, htype);
}

/// Desingularized vector field g together with the time factor dt/dtau, stored as
/// extended monomials so that it can be evaluated exactly up to and on the horizon.
struct DesingField {
  Chart chart;
  std::vector<ExtPoly> components;
  ExtPoly time_factor;
  HomogeneityType htype;
  FieldSpec source;

  std::size_t dim() const { return components.size(); }
  bool nonautonomous() const { return source.nonautonomous; }
};

namespace detail {

inline void require_aqh(const FieldSpec& field, const HomogeneityType& htype) {
  validate(field);
  const auto rep = partition_monomials(field, htype);
  if (!rep.valid())
    throw NegativeWExponentError("field is not asymptotically quasi-homogeneous for the given type");
}

}  // namespace detail

inline DesingField build_parabolic_desing(const FieldSpec& field, const HomogeneityType& htype) {
  detail::require_aqh(field, htype);
  const std::size_t n = field.dim();
  const double two_c = 2.0 * htype.c;

  // ftilde_i = sum coeff W^{k + alpha_i - <m,alpha>} x^m
  std::vector<ExtPoly> ftilde(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& m : field.components[i]) {
      for (std::size_t j : htype.i_alpha) {
        const double e = m.exponents[j];
        if (e < 0.0 || !is_integer(e))
          throw DomainError("negative or fractional power of a scaled variable; use a directional chart");
      }
      const DegreeGap gap = monomial_gap(m, htype, i);
      if (gap.sign() < 0) throw NegativeWExponentError("negative power of the horizon gap");
      ftilde[i].push_back(ExtMonomial{m.coeff, m.exponents, gap.sign() == 0 ? 0.0 : gap.value});
    }
  }

  // G = sum_{j in I_alpha} x_j^{2 beta_j - 1} / alpha_j * ftilde_j
  ExtPoly G;
  for (std::size_t a = 0; a < htype.i_alpha.size(); ++a) {
    const std::size_t j = htype.i_alpha[a];
    for (const auto& t : ftilde[j])
      G.push_back(detail::times(t, 1.0 / htype.alpha[j], j, 2.0 * htype.beta[a] - 1.0, 0.0));
  }

  // g_i = q ftilde_i - alpha_i x_i G with q = 1 - (2c - 1)/(2c) W.
  const double q_slope = (two_c - 1.0) / two_c;
  DesingField out{ParabolicChart{htype}, std::vector<ExtPoly>(n), {}, htype, field};
  for (std::size_t i = 0; i < n; ++i) {
    ExtPoly terms;
    for (const auto& t : ftilde[i]) {
      terms.push_back(t);
      terms.push_back(detail::times(t, -q_slope, i, 0.0, 1.0));
    }
    if (htype.alpha[i] > 0)
      for (const auto& t : G) terms.push_back(detail::times(t, -htype.alpha[i], i, 1.0, 0.0));
    out.components[i] = detail::combine(terms);
  }
  const std::vector<double> zeros(n, 0.0);
  out.time_factor = detail::combine({ExtMonomial{1.0, zeros, htype.k}, ExtMonomial{-q_slope, zeros, htype.k + 1.0}});
  return out;
}

inline DesingField build_directional_desing(const FieldSpec& field, const HomogeneityType& htype,
                                            const DirectionalChart& chart) {
  detail::require_aqh(field, htype);
  if (chart.htype != htype) throw ChartDomainError("chart type differs from field type");
  const std::size_t n = field.dim();
  const std::size_t i0 = chart.i0;
  if (i0 >= n || htype.alpha[i0] <= 0) throw ChartDomainError("directional index must be scaled");
  const double sigma = chart.sign;
  const double a0 = htype.alpha[i0];

  // fhat_i = sum coeff sign^{m_i0} s^{k + alpha_i - <m,alpha>} prod_{j != i0} xhat_j^{m_j}
  std::vector<ExtPoly> fhat(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& m : field.components[i]) {
      for (std::size_t j : htype.i_alpha) {
        if (j == i0) continue;
        const double e = m.exponents[j];
        if (e < 0.0 || !is_integer(e))
          throw DomainError("negative or fractional power of a sign-indefinite chart variable");
      }
      const double e0 = m.exponents[i0];
      double coeff = m.coeff;
      if (sigma < 0.0 && e0 != 0.0) {
        if (!is_integer(e0)) throw DomainError("fractional power of a negative leading variable");
        if (std::fmod(std::fabs(e0), 2.0) == 1.0) coeff = -coeff;
      }
      const DegreeGap gap = monomial_gap(m, htype, i);
      if (gap.sign() < 0) throw NegativeWExponentError("negative power of s");
      ExtMonomial t{coeff, m.exponents, 0.0};
      t.exponents[i0] = gap.sign() == 0 ? 0.0 : gap.value;
      fhat[i].push_back(std::move(t));
    }
  }

  DesingField out{chart, std::vector<ExtPoly>(n), {}, htype, field};
  for (std::size_t i = 0; i < n; ++i) {
    ExtPoly terms;
    if (i == i0) {
      // ds/dtau = -(sign / alpha_i0) s fhat_i0
      for (const auto& t : fhat[i0]) terms.push_back(detail::times(t, -sigma / a0, i0, 1.0, 0.0));
    } else {
      terms = fhat[i];
      if (htype.alpha[i] > 0)
        for (const auto& t : fhat[i0])
          terms.push_back(detail::times(t, -sigma * htype.alpha[i] / a0, i, 1.0, 0.0));
    }
    out.components[i] = detail::combine(terms);
  }
  std::vector<double> s_power(n, 0.0);
  s_power[i0] = htype.k;
  out.time_factor = {ExtMonomial{1.0, s_power, 0.0}};
  return out;
}

inline DesingField build_desing(const FieldSpec& field, const Chart& chart) {
  if (const auto* d = std::get_if<DirectionalChart>(&chart)) return build_directional_desing(field, d->htype, *d);
  return build_parabolic_desing(field, chart_type(chart));
}

struct DesingEval {
  Vec g;
  Mat J;
  double dt_dtau = 0.0;
};

namespace detail {

/// Horizon gap and its gradient; tiny negative overshoot past the horizon is clamped.
struct GapInfo {
  double W = 0.0;
  Vec gradW;
};

inline GapInfo gap_info(const DesingField& f, const Vec& x) {
  GapInfo out;
  if (const auto* p = std::get_if<ParabolicChart>(&f.chart)) {
    auto hv = horizon_value(*p, x);
    out.W = 1.0 - hv.P;
    out.gradW = -hv.gradP;
  } else {
    const auto& d = std::get<DirectionalChart>(f.chart);
    out.W = x[static_cast<Eigen::Index>(d.i0)];
    out.gradW = Vec::Zero(x.size());
  }
  if (out.W < 0.0) {
    if (out.W < -1e-12) throw DomainError("point lies beyond the horizon");
    out.W = 0.0;
  }
  return out;
}

inline double eval_term(const ExtMonomial& t, const Vec& x, double W) {
  double v = t.coeff * checked_pow(W, t.w_exponent);
  for (Eigen::Index j = 0; j < x.size(); ++j) v *= checked_pow(x[j], t.exponents[j]);
  return v;
}

inline double eval_poly(const ExtPoly& p, const Vec& x, double W) {
  double v = 0.0;
  for (const auto& t : p) v += eval_term(t, x, W);
  return v;
}

/// Gradient of one term, including the chain rule through W(x).
inline void accumulate_gradient(const ExtMonomial& t, const Vec& x, const GapInfo& gi, Eigen::RowVectorXd& row) {
  const Eigen::Index n = x.size();
  const double wpow = checked_pow(gi.W, t.w_exponent);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double e = t.exponents[j];
    if (e == 0.0) continue;
    double d = t.coeff * e * checked_pow(x[j], e - 1.0) * wpow;
    for (Eigen::Index l = 0; l < n; ++l)
      if (l != j) d *= checked_pow(x[l], t.exponents[l]);
    row[j] += d;
  }
  if (t.w_exponent != 0.0 && gi.gradW.squaredNorm() > 0.0) {
    double base = t.coeff * t.w_exponent * checked_pow(gi.W, t.w_exponent - 1.0);
    for (Eigen::Index l = 0; l < n; ++l) base *= checked_pow(x[l], t.exponents[l]);
    row += base * gi.gradW.transpose();
  }
}

}  // namespace detail

/// Value of g only; the integrator's hot path.
inline Vec eval_desing_value(const DesingField& f, const Vec& x) {
  const auto gi = detail::gap_info(f, x);
  Vec g(x.size());
  for (std::size_t i = 0; i < f.dim(); ++i) g[static_cast<Eigen::Index>(i)] = detail::eval_poly(f.components[i], x, gi.W);
  return g;
}

inline double eval_time_factor(const DesingField& f, const Vec& x) {
  return detail::eval_poly(f.time_factor, x, detail::gap_info(f, x).W);
}

inline Mat jacobian_desing(const DesingField& f, const Vec& x) {
  const auto gi = detail::gap_info(f, x);
  const auto n = static_cast<Eigen::Index>(f.dim());
  Mat J = Mat::Zero(n, n);
  Eigen::RowVectorXd row(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    row.setZero();
    for (const auto& t : f.components[static_cast<std::size_t>(i)]) detail::accumulate_gradient(t, x, gi, row);
    J.row(i) = row;
  }
  return J;
}

inline DesingEval evaluate_desing(const DesingField& f, const Vec& x) {
  if (static_cast<std::size_t>(x.size()) != f.dim()) throw DomainError("coordinate dimension mismatch");
  const auto gi = detail::gap_info(f, x);
  DesingEval out;
  out.g = Vec(x.size());
  for (std::size_t i = 0; i < f.dim(); ++i)
    out.g[static_cast<Eigen::Index>(i)] = detail::eval_poly(f.components[i], x, gi.W);
  out.J = jacobian_desing(f, x);
  out.dt_dtau = detail::eval_poly(f.time_factor, x, gi.W);
  return out;
}

}  // namespace horizon
