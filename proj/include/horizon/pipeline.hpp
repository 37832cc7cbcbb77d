#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "horizon/blowup.hpp"
#include "horizon/config.hpp"
#include "horizon/desingularize.hpp"
#include "horizon/dynamics.hpp"

namespace horizon {

// ---------------------------------------------------------------------------
// Serialization

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Columns: tau, t, coord_0..coord_{n-1}, horizon_gap; one row per accepted step.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto n = traj.initial.coords.size();
  os << "tau,t";
  for (Eigen::Index j = 0; j < n; ++j) os << ",coord_" << j;
  os << ",horizon_gap\n";
  for (const auto& s : traj.samples) {
    os << format_double(s.tau) << ',' << format_double(s.t);
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(s.coords[j]);
    os << ',' << format_double(s.horizon_gap) << '\n';
  }
}

inline void write_equilibria_csv(std::ostream& os, const std::vector<Equilibrium>& eqs, std::size_t n) {
  os << "index";
  for (std::size_t j = 0; j < n; ++j) os << ",coord_" << j;
  os << ",residual,horizon_residual,classification";
  for (std::size_t j = 0; j < n; ++j) os << ",eig_re_" << j << ",eig_im_" << j;
  os << '\n';
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const auto& e = eqs[i];
    os << i;
    for (Eigen::Index j = 0; j < e.coords.size(); ++j) os << ',' << format_double(e.coords[j]);
    os << ',' << format_double(e.residual) << ',' << format_double(e.horizon_residual) << ','
       << to_string(e.classification);
    for (const auto& z : e.eigenvalues) os << ',' << format_double(z.real()) << ',' << format_double(z.imag());
    os << '\n';
  }
}

inline json vec_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline json to_json(const HomogeneityType& t) {
  return {{"alpha", t.alpha}, {"k", t.k}, {"beta", t.beta}, {"c", t.c}, {"i_alpha", t.i_alpha}};
}

inline json chart_json(const Chart& chart) {
  if (const auto* d = std::get_if<DirectionalChart>(&chart))
    return {{"kind", "directional"}, {"index", d->i0}, {"sign", d->sign}};
  return {{"kind", "parabolic"}};
}

inline json to_json(const Equilibrium& e) {
  json eig = json::array();
  for (const auto& z : e.eigenvalues) eig.push_back({z.real(), z.imag()});
  json j = {{"coords", vec_json(e.coords)},
            {"residual", e.residual},
            {"horizon_residual", e.horizon_residual},
            {"classification", to_string(e.classification)},
            {"eigenvalues", std::move(eig)}};
  if (e.t_slice) j["t_slice"] = *e.t_slice;
  return j;
}

inline json to_json(const BlowupReport& r) {
  json comps = json::array();
  for (const auto& c : r.components)
    comps.push_back({{"index", c.index},
                     {"variable", c.variable},
                     {"status", to_string(c.status)},
                     {"fitted_exponent", c.fitted_exponent},
                     {"predicted_exponent", c.predicted_exponent},
                     {"fit_r2", c.fit_r2},
                     {"leading_coefficient", c.leading_coefficient}});
  return {{"t_max", r.t_max},
          {"t_max_tail_fraction", r.t_max_tail_fraction},
          {"lambda_decay", r.lambda_decay},
          {"residual_slope", r.residual_slope},
          {"components", std::move(comps)},
          {"type1_confirmed", r.type1_confirmed},
          {"shadowed_target", to_json(r.target)},
          {"target_distance", r.target_distance}};
}

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineOptions {
  unsigned jobs = 0;  // 0: hardware concurrency
  std::optional<std::string> out_dir;
  bool write_files = true;
  bool equilibria_only = false;
};

enum class RunStatus { ok, not_converged, failed };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::not_converged: return "not_converged";
    case RunStatus::failed: return "failed";
  }
  return "unknown";
}

struct RunOutcome {
  std::size_t index = 0;
  RunStatus status = RunStatus::failed;
  Trajectory trajectory;
  std::optional<BlowupReport> report;
  std::string error;
};

struct CurveOutcome {
  std::size_t seed_index = 0;
  std::optional<EquilibriumCurve> curve;
  std::string error;
};

struct PipelineResult {
  int exit_code = 0;
  HomogeneityType htype;
  std::vector<Equilibrium> equilibria;
  std::vector<CurveOutcome> curves;
  std::vector<RunOutcome> runs;
  json report;
};

/// Explicit type, or the inferred candidate with the richest principal part.
inline HomogeneityType resolve_type(const AnalysisConfig& cfg) {
  if (!cfg.homogeneity.infer) return make_type(cfg.homogeneity.alpha, cfg.homogeneity.k);
  return preferred_type(cfg.field, cfg.homogeneity.alpha_max);
}

inline Chart resolve_chart(const AnalysisConfig& cfg, const HomogeneityType& t) {
  if (cfg.chart.kind == "directional") return make_directional(t, cfg.chart.index, cfg.chart.sign);
  return ParabolicChart{t};
}

inline RunOutcome execute_run(const DesingField& df, const RunSpec& spec, const Vec& x0, std::size_t index) {
  RunOutcome out;
  out.index = index;
  IntegrateControls ctl;
  ctl.rel_tol = spec.rel_tol;
  ctl.abs_tol = spec.abs_tol;
  ctl.tau_max = spec.tau_max;
  ctl.horizon_eps = spec.horizon_eps;
  try {
    out.trajectory = integrate(df, x0, spec.t0, ctl);
    if (out.trajectory.stop_reason != StopReason::horizon_reached) {
      out.status = RunStatus::not_converged;
      out.error = std::string("trajectory stopped with ") + to_string(out.trajectory.stop_reason);
      return out;
    }
    out.report = build_report(df, out.trajectory);
    out.status = RunStatus::ok;
  } catch (const NotConverged& e) {
    out.status = RunStatus::not_converged;
    out.error = e.what();
  } catch (const Error& e) {
    out.status = RunStatus::failed;
    out.error = e.what();
  }
  return out;
}

/// Configuration problems surface as exceptions (exit code 1 at the CLI); run failures are
/// recorded per run and give exit code 2.
inline PipelineResult run_pipeline(const AnalysisConfig& cfg, const PipelineOptions& opt = {}) {
  PipelineResult res;
  res.htype = resolve_type(cfg);
  const Chart chart = resolve_chart(cfg, res.htype);
  const DesingField df = build_desing(cfg.field, chart);

  std::vector<Vec> starts;
  for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
    const auto& r = cfg.runs[i];
    const Vec y = Eigen::Map<const Vec>(r.initial.data(), static_cast<Eigen::Index>(r.initial.size()));
    try {
      starts.push_back(embed(chart, y).coords);
    } catch (const Error& e) {
      throw SchemaError("/runs/" + std::to_string(i) + "/initial", e.what());
    }
  }

  EquilibriumSearch search;
  search.slice = cfg.equilibria.slice;
  search.grid_points = cfg.equilibria.grid_points;
  res.equilibria = find_horizon_equilibria(df, search);

  if (cfg.equilibria.curve) {
    const auto& cs = *cfg.equilibria.curve;
    const auto unscaled = unscaled_indices(res.htype);
    for (std::size_t i = 0; i < res.equilibria.size(); ++i) {
      CurveOutcome co;
      co.seed_index = i;
      try {
        if (unscaled.empty()) throw CurveBreak("no unscaled coordinate to parametrize a curve");
        CurveOptions copt;
        copt.param_index = unscaled.front();
        co.curve = trace_equilibrium_curve(df, cs.begin, cs.end, cs.step, res.equilibria[i], copt);
      } catch (const Error& e) {
        co.error = e.what();
      }
      res.curves.push_back(std::move(co));
    }
  }

  if (!opt.equilibria_only) {
    res.runs.resize(cfg.runs.size());
    unsigned jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(cfg.runs.size(), 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < cfg.runs.size(); i = next++)
        res.runs[i] = execute_run(df, cfg.runs[i], starts[i], i);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }

  json eqs = json::array();
  for (const auto& e : res.equilibria) eqs.push_back(to_json(e));
  json runs = json::array();
  bool partial = false;
  for (const auto& r : res.runs) {
    json rj = {{"index", r.index},
               {"status", to_string(r.status)},
               {"stop_reason", to_string(r.trajectory.stop_reason)},
               {"accepted_steps", r.trajectory.samples.size()}};
    if (r.report) rj["report"] = to_json(*r.report);
    if (!r.error.empty()) rj["error"] = r.error;
    partial = partial || r.status != RunStatus::ok;
    runs.push_back(std::move(rj));
  }
  res.report = {{"schema", kSchemaVersion},
                {"name", cfg.name},
                {"variables", cfg.field.variable_names},
                {"homogeneity", to_json(res.htype)},
                {"chart", chart_json(chart)},
                {"equilibria", std::move(eqs)},
                {"runs", std::move(runs)}};
  if (!res.curves.empty()) {
    json curves = json::array();
    for (const auto& c : res.curves) {
      json cj = {{"seed_index", c.seed_index}};
      if (c.curve)
        cj.update({{"samples", c.curve->samples.size()},
                   {"max_normal_real", c.curve->max_normal_real},
                   {"min_normal_abs_real", c.curve->min_normal_abs_real}});
      else
        cj["error"] = c.error;
      curves.push_back(std::move(cj));
    }
    res.report["curves"] = std::move(curves);
  }
  res.exit_code = partial ? 2 : 0;

  if (opt.write_files) {
    namespace fs = std::filesystem;
    const fs::path dir = opt.out_dir ? fs::path(*opt.out_dir) : fs::path(cfg.outputs.directory);
    fs::create_directories(dir);
    const auto& fmts = cfg.outputs.formats;
    const bool csv = std::find(fmts.begin(), fmts.end(), "csv") != fmts.end();
    const bool js = std::find(fmts.begin(), fmts.end(), "json") != fmts.end();
    if (csv) {
      std::ofstream eq_out(dir / "equilibria.csv");
      write_equilibria_csv(eq_out, res.equilibria, df.dim());
      for (const auto& r : res.runs) {
        std::ofstream tr_out(dir / ("run_" + std::to_string(r.index) + ".csv"));
        write_trajectory_csv(tr_out, r.trajectory);
      }
    }
    if (js) {
      std::ofstream rep(dir / "report.json");
      rep << res.report.dump(2) << '\n';
    }
  }
  return res;
}

}  // namespace horizon
