#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "horizon/errors.hpp"

namespace horizon {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// coeff * prod_j x_j^exponents[j]; exponents may be negative or fractional.
struct Monomial {
  double coeff = 1.0;
  std::vector<double> exponents;

  bool operator==(const Monomial&) const = default;
};

/// Right-hand side y' = f(y) given as sums of generalized monomials per component.
/// When `nonautonomous` is set, variable 0 is time and its component is the constant 1.
struct FieldSpec {
  std::vector<std::string> variable_names;
  std::vector<std::vector<Monomial>> components;
  bool nonautonomous = false;

  std::size_t dim() const { return components.size(); }

  bool operator==(const FieldSpec&) const = default;
};

inline bool is_integer(double e) { return std::floor(e) == e; }

/// x^e with the domain rules used throughout: 0^negative and negative^fractional throw.
inline double checked_pow(double x, double e) {
  if (e == 0.0) return 1.0;
  if (e == 1.0) return x;
  if (x == 0.0) {
    if (e < 0.0) throw DomainError("zero raised to a negative power");
    return 0.0;
  }
  if (is_integer(e)) {
    if (e == 2.0) return x * x;
    if (e == 3.0) return x * x * x;
    return std::pow(x, e);
  }
  if (x < 0.0) throw DomainError("negative base raised to a fractional power");
  return std::pow(x, e);
}

inline void validate(const FieldSpec& field) {
  const std::size_t n = field.dim();
  if (n == 0) throw DomainError("field has no components");
  if (!field.variable_names.empty() && field.variable_names.size() != n)
    throw DomainError("variable name count does not match dimension");
  for (const auto& comp : field.components) {
    for (const auto& m : comp) {
      if (m.exponents.size() != n) throw DomainError("monomial exponent length differs from dimension");
      if (m.coeff == 0.0 || !std::isfinite(m.coeff)) throw DomainError("monomial coefficient must be nonzero");
    }
  }
  if (field.nonautonomous) {
    const auto& c0 = field.components[0];
    bool ok = c0.size() == 1 && c0[0].coeff == 1.0;
    if (ok)
      for (double e : c0[0].exponents) ok = ok && e == 0.0;
    if (!ok) throw DomainError("nonautonomous field must have t' = 1 as component 0");
  }
}

inline double eval_monomial(const Monomial& m, const Vec& x) {
  double v = m.coeff;
  for (Eigen::Index j = 0; j < x.size(); ++j) v *= checked_pow(x[j], m.exponents[j]);
  return v;
}

inline Vec eval_field(const FieldSpec& field, const Vec& point) {
  const auto n = static_cast<Eigen::Index>(field.dim());
  if (point.size() != n) throw DomainError("point dimension mismatch");
  Vec out = Vec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (const auto& m : field.components[i]) out[i] += eval_monomial(m, point);
  return out;
}

/// Exact Jacobian by the exponent rule, one monomial at a time.
inline Mat jacobian_field(const FieldSpec& field, const Vec& point) {
  const auto n = static_cast<Eigen::Index>(field.dim());
  if (point.size() != n) throw DomainError("point dimension mismatch");
  Mat jac = Mat::Zero(n, n);
  std::vector<double> powers(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& m : field.components[i]) {
      for (Eigen::Index l = 0; l < n; ++l) powers[l] = checked_pow(point[l], m.exponents[l]);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double e = m.exponents[j];
        if (e == 0.0) continue;
        double d = m.coeff * e * checked_pow(point[j], e - 1.0);
        for (Eigen::Index l = 0; l < n; ++l)
          if (l != j) d *= powers[l];
        jac(i, j) += d;
      }
    }
  }
  return jac;
}

}  // namespace horizon
