#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "horizon/pipeline.hpp"

using namespace horizon;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("horizon_pipeline_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Pipeline, PainleveSucceeds) {
  const auto dir = fresh_dir("p1");
  PipelineOptions opt;
  opt.out_dir = dir.string();
  const auto res = run_pipeline(example_config("painleve1"), opt);
  EXPECT_EQ(res.exit_code, 0);
  ASSERT_EQ(res.runs.size(), 1u);
  ASSERT_TRUE(res.runs[0].report);
  EXPECT_TRUE(res.runs[0].report->type1_confirmed);
  EXPECT_EQ(res.equilibria.size(), 2u);
  EXPECT_TRUE(res.report["runs"][0]["report"]["type1_confirmed"].get<bool>());

  EXPECT_TRUE(fs::exists(dir / "equilibria.csv"));
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  // Header plus one row per accepted step.
  EXPECT_EQ(count_lines(dir / "run_0.csv"), res.runs[0].trajectory.samples.size() + 1);
  EXPECT_EQ(count_lines(dir / "equilibria.csv"), res.equilibria.size() + 1);
  const auto report = json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report, res.report);
}

TEST(Pipeline, ShortRunIsPartial) {
  auto cfg = example_config("painleve1");
  cfg.runs[0].tau_max = 0.5;
  PipelineOptions opt;
  opt.write_files = false;
  const auto res = run_pipeline(cfg, opt);
  EXPECT_EQ(res.exit_code, 2);
  EXPECT_EQ(res.runs[0].status, RunStatus::not_converged);
  EXPECT_EQ(res.report["runs"][0]["stop_reason"], "tau_exhausted");
}

TEST(Pipeline, InitialOutsideChartIsSchemaError) {
  auto cfg = example_config("kk_dafermos");
  cfg.runs[0].initial[2] = -1.0;
  PipelineOptions opt;
  opt.write_files = false;
  try {
    run_pipeline(cfg, opt);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer(), "/runs/0/initial");
  }
}

TEST(Pipeline, ReportIndependentOfJobs) {
  auto cfg = example_config("mems");
  auto second = cfg.runs[0];
  second.initial = {0.5, -0.2, -1.5};
  cfg.runs.push_back(second);
  cfg.runs.push_back(cfg.runs[0]);
  PipelineOptions one, two;
  one.write_files = two.write_files = false;
  one.jobs = 1;
  two.jobs = 2;
  const auto a = run_pipeline(cfg, one);
  const auto b = run_pipeline(cfg, two);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.report.dump(), b.report.dump());
  auto r0 = a.report["runs"][0], r2 = a.report["runs"][2];
  r0.erase("index");
  r2.erase("index");
  EXPECT_EQ(r0, r2);
}

TEST(Pipeline, EquilibriaOnlyAndCurves) {
  auto cfg = example_config("selfsimilar");
  cfg.equilibria.curve = CurveSpec{1.0, 2.0, 0.25};
  PipelineOptions opt;
  opt.write_files = false;
  opt.equilibria_only = true;
  const auto res = run_pipeline(cfg, opt);
  EXPECT_TRUE(res.runs.empty());
  ASSERT_EQ(res.curves.size(), res.equilibria.size());
  bool traced = false;
  for (const auto& c : res.curves)
    if (c.curve) traced = traced || c.curve->samples.size() == 5;
  EXPECT_TRUE(traced);
}

TEST(Pipeline, InferredTypeMatchesExplicit) {
  auto cfg = example_config("painleve1");
  cfg.homogeneity = HomogeneitySpec{};
  cfg.homogeneity.infer = true;
  const auto t = resolve_type(cfg);
  EXPECT_EQ(t.alpha, (std::vector<int>{0, 2, 3}));
}

TEST(Pipeline, CsvFormatOnly) {
  const auto dir = fresh_dir("csv");
  auto cfg = example_config("painleve1");
  cfg.outputs.formats = {"csv"};
  PipelineOptions opt;
  opt.out_dir = dir.string();
  run_pipeline(cfg, opt);
  EXPECT_TRUE(fs::exists(dir / "run_0.csv"));
  EXPECT_FALSE(fs::exists(dir / "report.json"));
}
