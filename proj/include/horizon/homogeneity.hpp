#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "horizon/errors.hpp"
#include "horizon/monomial.hpp"
#include "horizon/rational.hpp"

namespace horizon {

/// Scaling data of an asymptotically quasi-homogeneous field: type alpha, order k+1, and
/// the minimal exponents beta with alpha_i * beta_i = c over the scaled indices.
struct HomogeneityType {
  std::vector<int> alpha;
  double k = 1.0;
  std::vector<std::size_t> i_alpha;
  std::vector<int> beta;  // parallel to i_alpha
  int c = 1;

  std::size_t dim() const { return alpha.size(); }
  bool scaled(std::size_t j) const { return alpha[j] > 0; }

  /// beta_j for a scaled index j (0 for unscaled ones).
  int beta_of(std::size_t j) const {
    for (std::size_t a = 0; a < i_alpha.size(); ++a)
      if (i_alpha[a] == j) return beta[a];
    return 0;
  }

  bool operator==(const HomogeneityType&) const = default;
};

/// c = lcm{alpha_i : alpha_i > 0}, beta_i = c / alpha_i.
inline std::pair<std::vector<int>, int> derive_beta(const std::vector<int>& alpha) {
  long long c = 1;
  bool any = false;
  for (int a : alpha) {
    if (a < 0) throw DomainError("type exponents must be nonnegative");
    if (a > 0) {
      c = std::lcm(c, static_cast<long long>(a));
      any = true;
    }
  }
  if (!any) throw DomainError("type alpha must not vanish identically");
  std::vector<int> beta;
  for (int a : alpha)
    if (a > 0) beta.push_back(static_cast<int>(c / a));
  return {beta, static_cast<int>(c)};
}

inline HomogeneityType make_type(std::vector<int> alpha, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("order parameter k must be positive");
  auto [beta, c] = derive_beta(alpha);
  HomogeneityType t;
  t.alpha = std::move(alpha);
  t.k = k;
  for (std::size_t j = 0; j < t.alpha.size(); ++j)
    if (t.alpha[j] > 0) t.i_alpha.push_back(j);
  t.beta = std::move(beta);
  t.c = c;
  return t;
}

/// Partition of every component's monomials by weighted degree against k + alpha_i.
struct HomogeneityReport {
  std::vector<std::vector<std::size_t>> principal;
  std::vector<std::vector<std::size_t>> residual;
  std::vector<std::vector<std::size_t>> violations;

  bool valid() const {
    return std::all_of(violations.begin(), violations.end(), [](const auto& v) { return v.empty(); });
  }
  bool empty_principal() const {
    return std::all_of(principal.begin(), principal.end(), [](const auto& v) { return v.empty(); });
  }
};

inline DegreeGap monomial_gap(const Monomial& m, const HomogeneityType& htype, std::size_t component) {
  return degree_gap(m.exponents, htype.alpha, htype.k, htype.alpha[component]);
}

inline HomogeneityReport partition_monomials(const FieldSpec& field, const HomogeneityType& htype) {
  if (field.dim() != htype.dim()) throw DomainError("type dimension differs from field dimension");
  HomogeneityReport rep;
  const std::size_t n = field.dim();
  rep.principal.resize(n);
  rep.residual.resize(n);
  rep.violations.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t idx = 0; idx < field.components[i].size(); ++idx) {
      switch (monomial_gap(field.components[i][idx], htype, i).sign()) {
        case 0: rep.principal[i].push_back(idx); break;
        case 1: rep.residual[i].push_back(idx); break;
        default: rep.violations[i].push_back(idx); break;
      }
    }
  }
  return rep;
}

/// Throws NotAQHError when some monomial outgrows its component's order.
inline HomogeneityReport classify_monomials(const FieldSpec& field, const HomogeneityType& htype) {
  auto rep = partition_monomials(field, htype);
  if (!rep.valid()) {
    for (std::size_t i = 0; i < rep.violations.size(); ++i)
      if (!rep.violations[i].empty())
        throw NotAQHError("component " + std::to_string(i) + " has " +
                          std::to_string(rep.violations[i].size()) +
                          " monomial(s) above weighted degree k + alpha_i");
  }
  return rep;
}

/// Enumerates integer types with entries in [0, alpha_max] and keeps those admitting a
/// positive order. Sorted by k descending, then by |alpha|_1 ascending.
inline std::vector<HomogeneityType> infer_type(const FieldSpec& field, int alpha_max) {
  if (alpha_max < 1) throw DomainError("alpha_max must be at least 1");
  const std::size_t n = field.dim();
  std::vector<int> alpha(n, 0);
  std::vector<HomogeneityType> out;
  const std::size_t first = field.nonautonomous ? 1 : 0;
  if (first >= n) throw NoTypeFound("no scalable variables");

  auto advance = [&]() {
    for (std::size_t j = first; j < n; ++j) {
      if (++alpha[j] <= alpha_max) return true;
      alpha[j] = 0;
    }
    return false;
  };

  while (advance()) {
    // k = max over components and monomials of <m,alpha> - alpha_i.
    bool have = false;
    DegreeGap best{};
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& m : field.components[i]) {
        const DegreeGap g = degree_gap(m.exponents, alpha, 0.0, alpha[i]);
        const double cand = -g.value;
        if (!have || cand > -best.value) {
          best = g;
          have = true;
        }
      }
    }
    if (!have) continue;
    const double k = -best.value;
    if (!(k > kDegreeTolerance)) continue;
    HomogeneityType t = make_type(alpha, k);
    if (partition_monomials(field, t).valid()) out.push_back(std::move(t));
  }
  if (out.empty()) throw NoTypeFound("no type with positive order up to alpha_max");
  auto l1 = [](const HomogeneityType& t) { return std::accumulate(t.alpha.begin(), t.alpha.end(), 0); };
  std::stable_sort(out.begin(), out.end(), [&](const HomogeneityType& a, const HomogeneityType& b) {
    if (a.k != b.k) return a.k > b.k;
    return l1(a) < l1(b);
  });
  return out;
}

/// The candidate whose principal part keeps the most monomials; ties go to smaller k, then to
/// smaller |alpha|_1.
inline HomogeneityType preferred_type(const FieldSpec& field, int alpha_max) {
  const auto types = infer_type(field, alpha_max);
  auto principal_count = [&](const HomogeneityType& t) {
    std::size_t n = 0;
    for (const auto& p : partition_monomials(field, t).principal) n += p.size();
    return n;
  };
  auto l1 = [](const HomogeneityType& t) { return std::accumulate(t.alpha.begin(), t.alpha.end(), 0); };
  const HomogeneityType* best = &types.front();
  std::size_t best_count = principal_count(*best);
  for (const auto& t : types) {
    const std::size_t c = principal_count(t);
    if (c > best_count || (c == best_count && (t.k < best->k || (t.k == best->k && l1(t) < l1(*best))))) {
      best = &t;
      best_count = c;
    }
  }
  return *best;
}

}  // namespace horizon
