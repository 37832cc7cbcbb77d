#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <span>

namespace horizon {

/// Exact rational with 128-bit storage; only used for weighted-degree bookkeeping.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  static Rational integer(std::int64_t v) { return {v, 1}; }

  Rational normalized() const {
    __int128 a = num < 0 ? -num : num;
    __int128 b = den < 0 ? -den : den;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    Rational r{num, den};
    if (a > 1) {
      r.num /= a;
      r.den /= a;
    }
    if (r.den < 0) {
      r.num = -r.num;
      r.den = -r.den;
    }
    return r;
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational{a.num * b.den + b.num * a.den, a.den * b.den}.normalized();
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational{a.num * b.den - b.num * a.den, a.den * b.den}.normalized();
  }
  friend Rational operator*(const Rational& a, std::int64_t s) {
    return Rational{a.num * s, a.den}.normalized();
  }
  friend int compare(const Rational& a, const Rational& b) {
    const __int128 l = a.num * b.den;
    const __int128 r = b.num * a.den;
    return (l > r) - (l < r);
  }
};

inline constexpr std::int64_t kMaxDenominator = 1000000;
inline constexpr double kDegreeTolerance = 1e-12;

/// Best rational approximation with denominator <= kMaxDenominator, accepted only when it
/// reproduces x to within 1e-12 relative.
inline std::optional<Rational> rationalize(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  const double ax = std::fabs(x);
  if (ax > 1e12) return std::nullopt;
  // Continued-fraction convergents.
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = ax;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (a > 1e13) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t p2 = ai * p1 + p0;
    const std::int64_t q2 = ai * q1 + q0;
    if (q2 > kMaxDenominator) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::fabs(approx - ax) <= kDegreeTolerance * std::max(1.0, ax)) {
      Rational out{x < 0 ? -p1 : p1, q1};
      return out.normalized();
    }
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

/// Weighted degree <m, alpha> - (k + alpha_i), computed exactly when every input is
/// rational with a small denominator and with a float fallback otherwise.
struct DegreeGap {
  double value = 0.0;  // (k + alpha_i) - <m, alpha>
  bool exact = false;

  int sign() const {
    if (exact) return (value > 0) - (value < 0);
    if (std::fabs(value) <= kDegreeTolerance) return 0;
    return value > 0 ? 1 : -1;
  }
};

inline DegreeGap degree_gap(std::span<const double> exponents, std::span<const int> alpha, double k,
                            int alpha_i) {
  bool exact = true;
  Rational acc = Rational::integer(alpha_i);
  if (auto kr = rationalize(k)) {
    acc = acc + *kr;
  } else {
    exact = false;
  }
  for (std::size_t j = 0; j < exponents.size() && exact; ++j) {
    if (alpha[j] == 0 || exponents[j] == 0.0) continue;
    auto mr = rationalize(exponents[j]);
    if (!mr) {
      exact = false;
      break;
    }
    acc = acc - (*mr) * alpha[j];
  }
  if (exact) return {acc.to_double(), true};
  double v = k + alpha_i;
  for (std::size_t j = 0; j < exponents.size(); ++j) v -= exponents[j] * alpha[j];
  if (std::fabs(v) <= kDegreeTolerance) v = 0.0;
  return {v, false};
}

}  // namespace horizon
