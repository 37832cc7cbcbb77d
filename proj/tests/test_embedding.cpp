#include <gtest/gtest.h>

#include <random>

#include "horizon/embedding.hpp"
#include "horizon/examples.hpp"
#include "oracles.hpp"

using namespace horizon;
namespace ex = horizon::examples;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

/// kappa from the defining scalar equation, by bisection on [1, 2 + Ptilde].
double kappa_oracle(const HomogeneityType& t, const Vec& y) {
  double pt = 0.0;
  for (std::size_t a = 0; a < t.i_alpha.size(); ++a) pt += std::pow(y[static_cast<Eigen::Index>(t.i_alpha[a])], 2 * t.beta[a]);
  const int tc = 2 * t.c;
  // Divide through by kappa^{2c-1} to keep the bisection well scaled.
  return oracle::bisect([&](double k) { return k - 1.0 - pt / std::pow(k, tc - 1); }, 1.0, 2.0 + std::pow(pt, 1.0 / tc) + 1.0);
}

}  // namespace

TEST(HorizonValue, PainleveEquilibriumLiesOnHorizon) {
  ParabolicChart ch{make_type({2, 3}, 1.0)};
  const auto hv = horizon_value(ch, vec({std::pow(17.0, -1.0 / 6.0), 2.0 * std::pow(17.0, -0.25)}));
  EXPECT_NEAR(hv.P, 1.0, 1e-15);
}

TEST(HorizonValue, OriginAndUnitCircle) {
  ParabolicChart ch{make_type({1, 1}, 1.0)};
  const auto h0 = horizon_value(ch, Vec::Zero(2));
  EXPECT_EQ(h0.P, 0.0);
  EXPECT_EQ(h0.gradP, Vec::Zero(2));
  const auto h1 = horizon_value(ch, vec({0.6, 0.8}));
  EXPECT_NEAR(h1.P, 1.0, 1e-15);
  EXPECT_NEAR(h1.gradP[0], 1.2, 1e-15);
  EXPECT_NEAR(h1.gradP[1], 1.6, 1e-15);
}

TEST(SolveKappa, OriginIsOne) {
  ParabolicChart ch{make_type({0, 2, 3}, 1.0)};
  EXPECT_EQ(solve_kappa(ch, vec({5.0, 0.0, 0.0})), 1.0);
}

TEST(SolveKappa, QuadraticCase) {
  ParabolicChart ch{make_type({1}, 1.0)};
  EXPECT_NEAR(solve_kappa(ch, vec({2.0})), (1.0 + std::sqrt(17.0)) / 2.0, 1e-14);
}

TEST(SolveKappa, PainleveResidual) {
  ParabolicChart ch{make_type({2, 3}, 1.0)};
  const double k = solve_kappa(ch, vec({1.0, 0.0}));
  EXPECT_LT(std::fabs(std::pow(k, 12) - std::pow(k, 11) - 1.0), 1e-13);
  EXPECT_NEAR(k, kappa_oracle(ch.htype, vec({1.0, 0.0})), 1e-13);
}

TEST(SolveKappa, ResidualBoundOnRandomPoints) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mag(-6.0, 6.0);
  std::uniform_int_distribution<int> sign(0, 1);
  for (const auto& alpha : {std::vector<int>{2, 3}, std::vector<int>{1, 2, 1, 2}, std::vector<int>{2, 5}, std::vector<int>{1}}) {
    ParabolicChart ch{make_type(alpha, 1.0)};
    const int tc = 2 * ch.htype.c;
    for (int trial = 0; trial < 500; ++trial) {
      Vec y(static_cast<Eigen::Index>(alpha.size()));
      for (Eigen::Index j = 0; j < y.size(); ++j) y[j] = (sign(rng) ? 1 : -1) * std::pow(10.0, mag(rng));
      double pt = 0.0;
      for (std::size_t a = 0; a < ch.htype.i_alpha.size(); ++a) pt += std::pow(y[static_cast<Eigen::Index>(a)], 2 * ch.htype.beta[a]);
      if (!std::isfinite(pt) || pt > 1e250) continue;
      const double k = solve_kappa(ch, y);
      EXPECT_GE(k, 1.0);
      // Residual divided by kappa^{2c-1}, which is the scale of the equation's terms.
      const double res = std::fabs(k - 1.0 - pt / std::pow(k, tc - 1));
      EXPECT_LT(res, 1e-12 * std::max(1.0, k));
    }
  }
}

TEST(Embed, OriginMapsToOrigin) {
  ParabolicChart ch{make_type({0, 2, 3}, 1.0)};
  const auto p = embed(ch, vec({0.7, 0.0, 0.0}));
  EXPECT_EQ(p.coords, vec({0.7, 0.0, 0.0}));
  EXPECT_EQ(p.horizon_gap, 1.0);
}

TEST(Embed, KKDirectionalChart) {
  const auto sys = ex::kk_dafermos(0.0);
  const auto p = embed(sys.chart, vec({0.0, 1.0, 4.0, 0.5, -0.5}));
  EXPECT_NEAR(p.coords[2], 0.5, 1e-15);
  EXPECT_NEAR(p.horizon_gap, 0.5, 1e-15);
  EXPECT_NEAR(p.coords[1], 0.5, 1e-15);
  EXPECT_NEAR(p.coords[4], -0.125, 1e-15);
  EXPECT_THROW(embed(sys.chart, vec({0.0, 1.0, -4.0, 0.0, 0.0})), ChartDomainError);
}

TEST(Embed, MinusChart) {
  const auto sys = ex::mems(3, 2, 1.0);
  const auto p = embed(sys.chart, vec({0.5, -0.25, 3.0}));
  EXPECT_NEAR(p.coords[1], 2.0, 1e-15);  // w = -1/s^2
  EXPECT_NEAR(p.coords[2], 3.0 * std::pow(2.0, 5), 1e-12);
}

TEST(Project, ParabolicFormula) {
  ParabolicChart ch{make_type({2, 3}, 1.0)};
  const Vec y = project(ch, vec({0.5, 0.0}));
  const double kappa = 1.0 / (1.0 - std::pow(0.5, 6));
  EXPECT_NEAR(y[0], kappa * kappa * 0.5, 1e-15);
  EXPECT_EQ(y[1], 0.0);
  EXPECT_EQ(project(ch, Vec::Zero(2)), Vec::Zero(2));
}

TEST(Project, HorizonPointThrows) {
  ParabolicChart ch{make_type({1, 1}, 1.0)};
  EXPECT_THROW(project(ch, vec({0.6, 0.8})), HorizonError);
  const auto sys = ex::kk_dafermos(0.0);
  EXPECT_THROW(project(sys.chart, vec({0, 1, 0, 0, 0})), HorizonError);
}

TEST(Embed, RoundTripsOnRandomPoints) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mag(-3.0, 3.0), unit(-1.0, 1.0);
  std::uniform_int_distribution<int> sign(0, 1);
  const std::vector<Chart> charts{ex::painleve1().chart, ex::kk_dafermos(0.0).chart, ex::mems(3, 2, 1.0).chart,
                                  ParabolicChart{make_type({0, 1, 2, 1, 2}, 1.0)}};
  for (const auto& ch : charts) {
    const auto n = static_cast<Eigen::Index>(chart_type(ch).dim());
    for (int trial = 0; trial < 2000; ++trial) {
      Vec y(n);
      for (Eigen::Index j = 0; j < n; ++j) y[j] = (sign(rng) ? 1 : -1) * std::pow(10.0, mag(rng));
      if (const auto* d = std::get_if<DirectionalChart>(&ch)) y[static_cast<Eigen::Index>(d->i0)] = d->sign * std::fabs(y[static_cast<Eigen::Index>(d->i0)]);
      const auto p = embed(ch, y);
      const Vec back = project(p);
      for (Eigen::Index j = 0; j < n; ++j) EXPECT_LE(oracle::rel_err(back[j], y[j]), 1e-12);
    }
    // Interior points of the chart back through the forward map.
    for (int trial = 0; trial < 2000; ++trial) {
      Vec x(n);
      for (Eigen::Index j = 0; j < n; ++j) x[j] = 0.9 * unit(rng);
      if (const auto* d = std::get_if<DirectionalChart>(&ch)) x[static_cast<Eigen::Index>(d->i0)] = 0.05 + std::fabs(unit(rng));
      else if (horizon_gap(ch, x) <= 1e-3) continue;
      const Vec again = embed(ch, project(ch, x)).coords;
      EXPECT_LE((again - x).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Embed, UnscaledCoordinatesPreserved) {
  const auto sys = ex::painleve1();
  const auto p = embed(sys.chart, vec({3.25, 100.0, -7.0}));
  EXPECT_EQ(p.coords[0], 3.25);
  EXPECT_EQ(project(p)[0], 3.25);
}

TEST(Embed, HorizonGapMonotoneAlongRays) {
  const auto sys = ex::painleve1();
  double prev_P = -1.0;
  for (double s = 0.1; s < 1e6; s *= 1.7) {
    const Vec y = vec({0.0, s * s * 0.3, -s * s * s * 0.8});
    const auto p = embed(sys.chart, y);
    const double P = horizon_value(std::get<ParabolicChart>(sys.chart), p.coords).P;
    EXPECT_GT(P, prev_P);
    EXPECT_LT(P, 1.0);
    prev_P = P;
  }
}

TEST(Transition, IdentityOnSameChart) {
  const auto sys = ex::painleve1();
  const auto p = make_point(sys.chart, vec({0.2, 0.4, -0.3}));
  const auto q = transition(p, sys.chart);
  EXPECT_LE((q.coords - p.coords).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Transition, ParabolicToDirectional) {
  const auto sys = ex::painleve1();
  const auto dir = make_directional(sys.htype, 1, +1);
  const auto p = make_point(sys.chart, vec({0.0, 0.5, 0.2}));
  const auto q = transition(p, dir);
  const double kappa = 1.0 / p.horizon_gap;
  EXPECT_NEAR(q.coords[1], std::pow(0.5, -0.5) / kappa, 1e-14);
  const auto back = transition(transition(q, sys.chart), dir);
  EXPECT_LE((back.coords - q.coords).cwiseAbs().maxCoeff(), 1e-11);
}
