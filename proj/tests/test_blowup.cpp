#include <gtest/gtest.h>

#include "horizon/blowup.hpp"
#include "horizon/config.hpp"
#include "oracles.hpp"

using namespace horizon;
namespace ex = horizon::examples;

namespace {

Vec vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

struct Run {
  DesingField df;
  Trajectory traj;
  BlowupReport report;
};

Run run_system(const ex::ExampleSystem& sys, const Chart& chart, const std::vector<double>& y0, double t0,
               const IntegrateControls& ctl = {}) {
  Run r{build_desing(sys.field, chart), {}, {}};
  r.traj = integrate(r.df, embed(chart, vec(y0)).coords, t0, ctl);
  r.report = build_report(r.df, r.traj);
  return r;
}

Run run_example(const std::string& name) {
  const auto [sys, spec] = make_example(name);
  return run_system(sys, sys.chart, spec.initial, spec.t0);
}

ex::ExampleSystem scalar_power(int p) {
  ex::ExampleSystem sys;
  sys.name = "scalar";
  sys.field.variable_names = {"y"};
  sys.field.components = {{Monomial{1.0, {static_cast<double>(p)}}}};
  sys.htype = make_type({1}, p - 1.0);
  sys.chart = ParabolicChart{sys.htype};
  return sys;
}

const ComponentRate& component(const BlowupReport& r, std::size_t i) {
  for (const auto& c : r.components)
    if (c.index == i) return c;
  throw std::out_of_range("component");
}

Trajectory synthetic_tail(double rate, double tau_end) {
  Trajectory tr;
  tr.stop_reason = StopReason::horizon_reached;
  tr.initial = TrajectorySample{0.0, Vec::Zero(1), 0.0, 1.0, 1.0};
  double t = 0.0;
  for (double tau = 0.01; tau <= tau_end; tau += 0.01) {
    t = (1.0 - std::exp(-rate * tau)) / rate;
    tr.samples.push_back(TrajectorySample{tau, Vec::Zero(1), t, std::exp(-tau), std::exp(-rate * tau)});
  }
  return tr;
}

}  // namespace

TEST(Tmax, SyntheticExponentialTail) {
  // dt/dtau = e^{-2 tau}: total time 1/2, tail e^{-2 tau_end}/2.
  const auto est = estimate_tmax(synthetic_tail(2.0, 10.0), 1.0, 2.0);
  EXPECT_NEAR(est.t_max, 0.5, 1e-12);
  EXPECT_NEAR(est.tail, 0.5 * std::exp(-20.0), 1e-12);
  EXPECT_LT(est.tail_fraction, 1e-8);
}

TEST(Tmax, RequiresHorizon) {
  auto tr = synthetic_tail(1.0, 1.0);
  tr.stop_reason = StopReason::tau_exhausted;
  EXPECT_THROW(estimate_tmax(tr, 1.0, 1.0), NotConverged);
}

TEST(Report, ScalarQuadratic) {
  const auto sys = scalar_power(2);
  const auto r = run_system(sys, sys.chart, {1.0}, 0.0);
  EXPECT_NEAR(r.report.t_max, 1.0, 1e-6);
  const auto& c = component(r.report, 0);
  EXPECT_NEAR(c.fitted_exponent, -1.0, 0.01);
  EXPECT_NEAR(c.leading_coefficient, 1.0, 0.01);
  EXPECT_TRUE(r.report.type1_confirmed);
}

TEST(Report, ScalarCubic) {
  // y' = y^3, y(0) = 1: y = (1 - 2t)^{-1/2} = 2^{-1/2} (1/2 - t)^{-1/2}.
  const auto sys = scalar_power(3);
  const auto r = run_system(sys, sys.chart, {1.0}, 0.0);
  EXPECT_NEAR(r.report.t_max, 0.5, 1e-6);
  const auto& c = component(r.report, 0);
  EXPECT_NEAR(c.predicted_exponent, -0.5, 1e-15);
  EXPECT_NEAR(c.fitted_exponent, -0.5, 0.01);
  EXPECT_NEAR(c.leading_coefficient, std::sqrt(0.5), 0.01);
}

TEST(Report, PainleveAgainstDirectIntegration) {
  const auto r = run_example("painleve1");
  const double direct = oracle::painleve_blowup_time(0.0, 10.0, 2.0 * std::pow(10.0, 1.5));
  EXPECT_LT(oracle::rel_err(r.report.t_max, direct), 1e-4);
  EXPECT_NEAR(component(r.report, 1).fitted_exponent, -2.0, 0.04);
  EXPECT_NEAR(component(r.report, 2).fitted_exponent, -3.0, 0.06);
  // u ~ (t_max - t)^{-2} to leading order, so u' ~ 2 (t_max - t)^{-3}.
  EXPECT_NEAR(component(r.report, 1).leading_coefficient, 1.0, 0.05);
  EXPECT_NEAR(component(r.report, 2).leading_coefficient, 2.0, 0.1);
  EXPECT_TRUE(r.report.type1_confirmed);
  EXPECT_NEAR(r.report.lambda_decay, std::pow(17.0, -1.0 / 12.0), 0.02 * std::pow(17.0, -1.0 / 12.0));
  EXPECT_LT(r.report.residual_slope, 0.01);
}

TEST(Report, PainleveChartIndependence) {
  const auto sys = ex::painleve1();
  const std::vector<double> y0{0.0, 10.0, 2.0 * std::pow(10.0, 1.5)};
  const auto par = run_system(sys, sys.chart, y0, 0.0);
  const auto dir = run_system(sys, make_directional(sys.htype, 1, +1), y0, 0.0);
  EXPECT_LT(oracle::rel_err(dir.report.t_max, par.report.t_max), 1e-6);
  EXPECT_NEAR(component(dir.report, 1).fitted_exponent, -2.0, 0.04);
}

TEST(Report, KKVanishingComponents) {
  const auto r = run_example("kk_dafermos");
  EXPECT_NEAR(r.report.target.coords[1], std::sqrt(3 + std::sqrt(3.0)), 1e-8);
  EXPECT_NEAR(component(r.report, 1).fitted_exponent, -1.0, 0.05);
  EXPECT_NEAR(component(r.report, 2).fitted_exponent, -2.0, 0.1);
  EXPECT_EQ(component(r.report, 3).status, FitStatus::vanishing);
  EXPECT_EQ(component(r.report, 4).status, FitStatus::vanishing);
}

TEST(Report, SelfSimilarRate) {
  const auto r = run_example("selfsimilar");
  EXPECT_NEAR(component(r.report, 1).fitted_exponent, -0.5, 0.02);
  // Slow stable eigenvalue at (chi, 0, chi) is beta chi.
  const double chi = r.report.target.coords[0];
  EXPECT_NEAR(r.report.lambda_decay, chi, 0.02 * chi);
  EXPECT_LT(r.report.residual_slope, 0.01);
}

TEST(Report, MemsPredictedExponents) {
  const auto r = run_example("mems");
  const auto& w = component(r.report, 1);
  const auto& v = component(r.report, 2);
  EXPECT_NEAR(w.predicted_exponent, -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(v.predicted_exponent, -5.0 / 3.0, 1e-15);
  EXPECT_NEAR(w.fitted_exponent, -2.0 / 3.0, 0.03);
  EXPECT_NEAR(v.fitted_exponent, -5.0 / 3.0, 0.05);
  EXPECT_LT(r.report.target.coords[2], 0.0);
}

TEST(Report, TailFractionShrinksWithHorizonEps) {
  const auto sys = ex::painleve1();
  const std::vector<double> y0{0.0, 10.0, 2.0 * std::pow(10.0, 1.5)};
  double prev = 1.0;
  for (double eps : {1e-9, 1e-11, 1e-13}) {
    IntegrateControls ctl;
    ctl.horizon_eps = eps;
    const auto r = run_system(sys, sys.chart, y0, 0.0, ctl);
    EXPECT_LT(r.report.t_max_tail_fraction, prev);
    prev = r.report.t_max_tail_fraction;
  }
}

TEST(Report, NoTargetWithoutEquilibria) {
  const auto sys = scalar_power(2);
  const auto df = build_desing(sys.field, sys.chart);
  const auto tr = integrate(df, embed(sys.chart, Vec::Constant(1, 1.0)).coords, 0.0);
  EXPECT_THROW(build_report(tr, {}, sys.htype), NoTargetFound);
}

TEST(Report, UnreachedHorizonIsNotConverged) {
  const auto sys = scalar_power(2);
  IntegrateControls ctl;
  ctl.tau_max = 0.5;
  const auto df = build_desing(sys.field, sys.chart);
  const auto tr = integrate(df, embed(sys.chart, Vec::Constant(1, 1.0)).coords, 0.0, ctl);
  EXPECT_THROW(estimate_tmax(tr, 1.0, 1.0), NotConverged);
}

TEST(FitRate, RejectsUnscaledComponent) {
  const auto r = run_example("painleve1");
  EXPECT_THROW(fit_rate(r.traj, r.report.t_max, 0, r.df.htype), DomainError);
}
