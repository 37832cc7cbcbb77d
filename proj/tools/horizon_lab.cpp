// horizon-lab: command-line front end for the blow-up analysis pipeline.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "horizon/horizon.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("horizon-lab");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("HORIZON_LAB_LOG")) {
    const std::string lvl = env;
    if (lvl == "error" || lvl == "warn" || lvl == "info" || lvl == "debug")
      spdlog::set_level(spdlog::level::from_str(lvl));
    else
      spdlog::warn("ignoring HORIZON_LAB_LOG={}", lvl);
  }
}

horizon::AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw horizon::SchemaError("", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return horizon::parse_config(ss.str());
}

void print_summary(const horizon::PipelineResult& res) {
  std::cout << "equilibria: " << res.equilibria.size() << '\n';
  for (const auto& r : res.runs) {
    std::cout << "run " << r.index << ": " << horizon::to_string(r.status);
    if (r.report)
      std::cout << " t_max=" << horizon::format_double(r.report->t_max)
                << " type1_confirmed=" << (r.report->type1_confirmed ? "true" : "false");
    if (!r.error.empty()) std::cout << " (" << r.error << ')';
    std::cout << '\n';
  }
}

int analyze(const horizon::AnalysisConfig& cfg, unsigned jobs, const std::string& out_dir) {
  horizon::PipelineOptions opt;
  opt.jobs = jobs;
  if (!out_dir.empty()) opt.out_dir = out_dir;
  spdlog::info("analyzing '{}' with {} run(s)", cfg.name, cfg.runs.size());
  const auto res = horizon::run_pipeline(cfg, opt);
  for (const auto& r : res.runs)
    if (r.status != horizon::RunStatus::ok) spdlog::warn("run {}: {}", r.index, r.error);
  print_summary(res);
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Blow-up analysis of asymptotically quasi-homogeneous ODEs"};
  app.require_subcommand(1);
  unsigned jobs = 0;
  app.add_option("--jobs", jobs, "Parallel runs (default: logical cores)");

  std::string config_path, out_dir;
  auto* analyze_cmd = app.add_subcommand("analyze", "Run the full pipeline on a config");
  analyze_cmd->add_option("config", config_path)->required();
  analyze_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");

  auto* eq_cmd = app.add_subcommand("equilibria", "List horizon equilibria for a config");
  eq_cmd->add_option("config", config_path)->required();

  auto* validate_cmd = app.add_subcommand("validate", "Check a config without integrating");
  validate_cmd->add_option("config", config_path)->required();

  std::string name;
  bool emit = false, list = false;
  horizon::ExampleParams params;
  double epsilon = 0, m = 0, beta = 0, alpha_ss = 0, q = 0;
  int n_dim = 0, p = 0;
  auto* ex_cmd = app.add_subcommand("example", "Run or emit a built-in example");
  ex_cmd->add_option("name", name);
  ex_cmd->add_flag("--list", list, "List the built-in examples");
  ex_cmd->add_flag("--emit-config", emit, "Print the example config instead of running it");
  ex_cmd->add_option("--out", out_dir, "Output directory");
  auto* o_eps = ex_cmd->add_option("--epsilon", epsilon);
  auto* o_m = ex_cmd->add_option("--m", m);
  auto* o_beta = ex_cmd->add_option("--beta", beta);
  auto* o_alpha = ex_cmd->add_option("--alpha-ss", alpha_ss);
  auto* o_n = ex_cmd->add_option("--n", n_dim);
  auto* o_p = ex_cmd->add_option("--p", p);
  auto* o_q = ex_cmd->add_option("--q", q);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*analyze_cmd) return analyze(load_config(config_path), jobs, out_dir);

    if (*eq_cmd) {
      auto cfg = load_config(config_path);
      horizon::PipelineOptions opt;
      opt.equilibria_only = true;
      opt.write_files = false;
      const auto res = horizon::run_pipeline(cfg, opt);
      horizon::write_equilibria_csv(std::cout, res.equilibria, cfg.field.dim());
      return 0;
    }

    if (*validate_cmd) {
      auto cfg = load_config(config_path);
      const auto t = horizon::resolve_type(cfg);
      const auto chart = horizon::resolve_chart(cfg, t);
      const auto df = horizon::build_desing(cfg.field, chart);
      for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
        const auto& r = cfg.runs[i];
        try {
          horizon::embed(chart, Eigen::Map<const horizon::Vec>(r.initial.data(), static_cast<Eigen::Index>(r.initial.size())));
        } catch (const horizon::Error& e) {
          throw horizon::SchemaError("/runs/" + std::to_string(i) + "/initial", e.what());
        }
      }
      std::cout << "valid: " << cfg.name << " alpha=" << horizon::json(t.alpha).dump() << " k=" << horizon::format_double(t.k)
                << " c=" << t.c << '\n';
      return 0;
    }

    if (*ex_cmd) {
      if (list) {
        for (const auto& e : horizon::list_examples()) std::cout << e << '\n';
        return 0;
      }
      if (name.empty()) throw horizon::UnknownExample("example name required");
      if (*o_eps) params["epsilon"] = epsilon;
      if (*o_m) params["m"] = m;
      if (*o_beta) params["beta"] = beta;
      if (*o_alpha) params["alpha_ss"] = alpha_ss;
      if (*o_n) params["n_dim"] = n_dim;
      if (*o_p) params["p"] = p;
      if (*o_q) params["q"] = q;
      if (emit) {
        std::cout << horizon::emit_example(name, params);
        return 0;
      }
      return analyze(horizon::example_config(name, params), jobs, out_dir);
    }
  } catch (const horizon::SchemaError& e) {
    spdlog::error("configuration error at {}", e.what());
    return 1;
  } catch (const horizon::Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}
