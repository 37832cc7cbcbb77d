#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "horizon/embedding.hpp"
#include "horizon/errors.hpp"
#include "horizon/homogeneity.hpp"
#include "horizon/monomial.hpp"

namespace horizon::examples {

/// A built-in system with its homogeneity type and recommended chart.
struct ExampleSystem {
  std::string name;
  FieldSpec field;
  HomogeneityType htype;
  Chart chart;
};

inline Monomial mono(double coeff, std::vector<double> exps) { return Monomial{coeff, std::move(exps)}; }

/// u'' = 6u^2 + t as (chi, u, v); type (0,2,3), order 2, parabolic chart.
inline ExampleSystem painleve1() {
  FieldSpec f;
  f.variable_names = {"chi", "u", "v"};
  f.nonautonomous = true;
  f.components = {
      {mono(1, {0, 0, 0})},
      {mono(1, {0, 0, 1})},
      {mono(6, {0, 2, 0}), mono(1, {1, 0, 0})},
  };
  auto t = make_type({0, 2, 3}, 1.0);
  return {"painleve1", f, t, ParabolicChart{t}};
}

/// Dafermos-regularized Keyfitz-Kranzer profile system in (chi, u1, u2, w1, w2);
/// chi' = epsilon is a slow parameter, so the field is treated as autonomous.
inline ExampleSystem kk_dafermos(double epsilon) {
  if (!(epsilon >= 0.0) || epsilon > 0.1) throw DomainError("kk_dafermos needs 0 <= epsilon <= 0.1");
  FieldSpec f;
  f.variable_names = {"chi", "u1", "u2", "w1", "w2"};
  f.components.resize(5);
  if (epsilon != 0.0) {
    f.components[0] = {mono(epsilon, {0, 0, 0, 0, 0})};
    f.components[3] = {mono(-epsilon, {0, 1, 0, 0, 0})};
    f.components[4] = {mono(-epsilon, {0, 0, 1, 0, 0})};
  }
  f.components[1] = {mono(1, {0, 2, 0, 0, 0}), mono(-1, {0, 0, 1, 0, 0}), mono(-1, {1, 1, 0, 0, 0}),
                     mono(-1, {0, 0, 0, 1, 0})};
  f.components[2] = {mono(1.0 / 3.0, {0, 3, 0, 0, 0}), mono(-1, {0, 1, 0, 0, 0}), mono(-1, {1, 0, 1, 0, 0}),
                     mono(-1, {0, 0, 0, 0, 1})};
  auto t = make_type({0, 1, 2, 1, 2}, 1.0);
  return {"kk_dafermos", f, t, make_directional(t, 2, +1)};
}

/// alpha_ss fixed by the backward self-similarity constraint 2 beta = (1 - m) alpha_ss - 1.
inline double selfsimilar_alpha(double m, double beta) { return (2.0 * beta + 1.0) / (1.0 - m); }

/// (u^{m-1} u')' + beta chi u' + alpha_ss u = 0 as (chi, u, v); type (0,1,1), order 2 - m.
inline ExampleSystem selfsimilar(double m, double beta, double alpha_ss) {
  if (!(m < 0.0)) throw DomainError("selfsimilar needs m < 0");
  if (!(beta < 0.0)) throw DomainError("selfsimilar needs beta < 0");
  FieldSpec f;
  f.variable_names = {"chi", "u", "v"};
  f.nonautonomous = true;
  f.components = {
      {mono(1, {0, 0, 0})},
      {mono(1, {0, 1 - m, 1})},
      {mono(-beta, {1, 1 - m, 1})},
  };
  if (alpha_ss != 0.0) f.components[2].push_back(mono(-alpha_ss, {0, 1, 0}));
  auto t = make_type({0, 1, 1}, 1.0 - m);
  return {"selfsimilar", f, t, make_directional(t, 1, +1)};
}

/// Radial MEMS-type profile in w = 1/u: (r, w, v) with
/// v' = -(n-1)/r v - r^q w^{p+2} + 2 w^{-1} v^2; type (0,2,p+3), order p+2 for even p.
inline ExampleSystem mems(int n_dim, int p, double q) {
  if (n_dim < 1) throw DomainError("mems needs n_dim >= 1");
  if (p < 2 || p % 2 != 0) throw DomainError("mems chart requires an even p >= 2");
  FieldSpec f;
  f.variable_names = {"r", "w", "v"};
  f.nonautonomous = true;
  f.components = {
      {mono(1, {0, 0, 0})},
      {mono(1, {0, 0, 1})},
      {mono(-1, {q, static_cast<double>(p + 2), 0}), mono(2, {0, -1, 2})},
  };
  if (n_dim != 1) f.components[2].insert(f.components[2].begin(), mono(-(n_dim - 1), {-1, 0, 1}));
  auto t = make_type({0, 2, p + 3}, static_cast<double>(p + 1));
  return {"mems", f, t, make_directional(t, 1, -1)};
}

}  // namespace horizon::examples
