#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "horizon/embedding.hpp"
#include "horizon/errors.hpp"
#include "horizon/examples.hpp"
#include "horizon/homogeneity.hpp"
#include "horizon/monomial.hpp"

namespace horizon {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct HomogeneitySpec {
  bool infer = false;
  int alpha_max = 6;
  std::vector<int> alpha;
  double k = 1.0;

  bool operator==(const HomogeneitySpec&) const = default;
};

struct ChartSpec {
  std::string kind = "parabolic";  // "parabolic" | "directional"
  std::size_t index = 0;
  int sign = 1;

  bool operator==(const ChartSpec&) const = default;
};

struct CurveSpec {
  double begin = 0.0;
  double end = 1.0;
  double step = 0.1;

  bool operator==(const CurveSpec&) const = default;
};

struct EquilibriaSpec {
  std::vector<double> slice;
  int grid_points = 7;
  std::optional<CurveSpec> curve;

  bool operator==(const EquilibriaSpec&) const = default;
};

struct RunSpec {
  std::vector<double> initial;  // original coordinates
  double t0 = 0.0;
  double tau_max = 200.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double horizon_eps = 1e-12;

  bool operator==(const RunSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "horizon_out";
  std::vector<std::string> formats{"csv", "json"};

  bool operator==(const OutputSpec&) const = default;
};

struct AnalysisConfig {
  std::string name = "analysis";
  FieldSpec field;
  HomogeneitySpec homogeneity;
  ChartSpec chart;
  EquilibriaSpec equilibria;
  std::vector<RunSpec> runs;
  OutputSpec outputs;

  bool operator==(const AnalysisConfig&) const = default;
};

namespace detail {

inline std::string ptr_join(const std::string& base, const std::string& key) { return base + "/" + key; }
inline std::string ptr_join(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

/// Object reader that rejects unknown keys and reports JSON pointers.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) throw SchemaError(ptr_.empty() ? "/" : ptr_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw SchemaError(ptr_join(ptr_, key), "required key missing");
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return ptr_join(ptr_, key); }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw SchemaError(path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(path(key), "expected a finite number");
    return d;
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) throw SchemaError(path(key), "expected an integer");
    return v.get<long long>();
  }

  bool boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw SchemaError(path(key), "expected a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw SchemaError(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) throw SchemaError(path(key), "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
        throw SchemaError(ptr_join(path(key), i), "expected a finite number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw SchemaError(ptr_join(ptr_, it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string> seen_;
};

inline FieldSpec parse_field(const json& j, const std::string& ptr) {
  ObjectReader r(j, ptr);
  FieldSpec f;
  f.nonautonomous = r.boolean_or("nonautonomous", false);
  const json& comps = r.at("components");
  if (!comps.is_array() || comps.empty()) throw SchemaError(r.path("components"), "expected a nonempty array");
  const std::size_t n = comps.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string cp = ptr_join(r.path("components"), i);
    if (!comps[i].is_array()) throw SchemaError(cp, "expected an array of monomials");
    std::vector<Monomial> comp;
    for (std::size_t a = 0; a < comps[i].size(); ++a) {
      const std::string mp = ptr_join(cp, a);
      ObjectReader m(comps[i][a], mp);
      Monomial mono;
      mono.coeff = m.number("coeff");
      if (mono.coeff == 0.0) throw SchemaError(m.path("coeff"), "coefficient must be nonzero");
      mono.exponents = m.numbers("exponents");
      if (mono.exponents.size() != n)
        throw SchemaError(m.path("exponents"), "expected " + std::to_string(n) + " exponents");
      m.finish();
      comp.push_back(std::move(mono));
    }
    f.components.push_back(std::move(comp));
  }
  if (r.has("variables")) {
    const json& v = r.at("variables");
    if (!v.is_array() || v.size() != n) throw SchemaError(r.path("variables"), "expected one name per component");
    for (std::size_t i = 0; i < n; ++i) {
      if (!v[i].is_string()) throw SchemaError(ptr_join(r.path("variables"), i), "expected a string");
      f.variable_names.push_back(v[i].get<std::string>());
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) f.variable_names.push_back("x" + std::to_string(i));
  }
  r.finish();
  try {
    validate(f);
  } catch (const DomainError& e) {
    throw SchemaError(ptr, e.what());
  }
  return f;
}

inline HomogeneitySpec parse_homogeneity(const json& j, const std::string& ptr, std::size_t n) {
  ObjectReader r(j, ptr);
  HomogeneitySpec h;
  h.infer = r.boolean_or("infer", false);
  if (h.infer) {
    if (r.has("alpha_max")) h.alpha_max = static_cast<int>(r.integer("alpha_max"));
    if (h.alpha_max < 1) throw SchemaError(r.path("alpha_max"), "alpha_max must be at least 1");
    r.finish();
    return h;
  }
  const json& a = r.at("alpha");
  if (!a.is_array() || a.size() != n) throw SchemaError(r.path("alpha"), "expected one weight per component");
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!a[i].is_number_integer() || a[i].get<long long>() < 0)
      throw SchemaError(ptr_join(r.path("alpha"), i), "expected a nonnegative integer");
    h.alpha.push_back(a[i].get<int>());
    any = any || h.alpha.back() > 0;
  }
  if (!any) throw SchemaError(r.path("alpha"), "type must have at least one positive weight");
  h.k = r.number("k");
  if (!(h.k > 0.0)) throw SchemaError(r.path("k"), "order parameter k must be positive");
  r.finish();
  return h;
}

inline ChartSpec parse_chart(const json& j, const std::string& ptr, std::size_t n) {
  ObjectReader r(j, ptr);
  ChartSpec c;
  c.kind = r.string("kind");
  if (c.kind == "directional") {
    const long long idx = r.integer("index");
    if (idx < 0 || static_cast<std::size_t>(idx) >= n) throw SchemaError(r.path("index"), "index out of range");
    c.index = static_cast<std::size_t>(idx);
    const long long s = r.integer("sign");
    if (s != 1 && s != -1) throw SchemaError(r.path("sign"), "sign must be +1 or -1");
    c.sign = static_cast<int>(s);
  } else if (c.kind != "parabolic") {
    throw SchemaError(r.path("kind"), "expected \"parabolic\" or \"directional\"");
  }
  r.finish();
  return c;
}

inline EquilibriaSpec parse_equilibria(const json& j, const std::string& ptr) {
  ObjectReader r(j, ptr);
  EquilibriaSpec e;
  if (r.has("slice")) e.slice = r.numbers("slice");
  if (r.has("grid_points")) e.grid_points = static_cast<int>(r.integer("grid_points"));
  if (e.grid_points < 2 || e.grid_points > 101) throw SchemaError(r.path("grid_points"), "expected 2..101");
  if (r.has("curve")) {
    ObjectReader c(r.at("curve"), r.path("curve"));
    CurveSpec cs;
    cs.begin = c.number("begin");
    cs.end = c.number("end");
    cs.step = c.number("step");
    if (!(cs.step > 0.0)) throw SchemaError(c.path("step"), "step must be positive");
    c.finish();
    e.curve = cs;
  }
  r.finish();
  return e;
}

inline RunSpec parse_run(const json& j, const std::string& ptr, const FieldSpec& field) {
  ObjectReader r(j, ptr);
  RunSpec run;
  run.initial = r.numbers("initial");
  if (run.initial.size() != field.dim()) throw SchemaError(r.path("initial"), "dimension mismatch");
  if (field.nonautonomous) {
    run.t0 = run.initial[0];
    if (r.has("t0") && r.number("t0") != run.t0)
      throw SchemaError(r.path("t0"), "t0 must equal the time coordinate of the initial point");
  } else {
    run.t0 = r.number_or("t0", 0.0);
  }
  run.tau_max = r.number_or("tau_max", run.tau_max);
  run.rel_tol = r.number_or("rel_tol", run.rel_tol);
  run.abs_tol = r.number_or("abs_tol", run.abs_tol);
  run.horizon_eps = r.number_or("horizon_eps", run.horizon_eps);
  if (!(run.tau_max > 0.0)) throw SchemaError(r.path("tau_max"), "must be positive");
  if (!(run.rel_tol > 0.0)) throw SchemaError(r.path("rel_tol"), "must be positive");
  if (!(run.abs_tol > 0.0)) throw SchemaError(r.path("abs_tol"), "must be positive");
  if (!(run.horizon_eps > 0.0)) throw SchemaError(r.path("horizon_eps"), "must be positive");
  r.finish();
  return run;
}

inline OutputSpec parse_outputs(const json& j, const std::string& ptr) {
  ObjectReader r(j, ptr);
  OutputSpec o;
  if (r.has("directory")) o.directory = r.string("directory");
  if (r.has("formats")) {
    const json& f = r.at("formats");
    if (!f.is_array()) throw SchemaError(r.path("formats"), "expected an array");
    o.formats.clear();
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!f[i].is_string() || (f[i] != "csv" && f[i] != "json"))
        throw SchemaError(ptr_join(r.path("formats"), i), "expected \"csv\" or \"json\"");
      o.formats.push_back(f[i].get<std::string>());
    }
  }
  r.finish();
  return o;
}

}  // namespace detail

inline AnalysisConfig parse_config(const json& j) {
  detail::ObjectReader r(j, "");
  const json& schema = r.at("schema");
  if (!schema.is_number_integer() || schema.get<long long>() != kSchemaVersion)
    throw SchemaError("/schema", "unsupported schema version");
  AnalysisConfig cfg;
  if (r.has("name")) cfg.name = r.string("name");
  cfg.field = detail::parse_field(r.at("field"), "/field");
  const std::size_t n = cfg.field.dim();
  cfg.homogeneity = detail::parse_homogeneity(r.at("homogeneity"), "/homogeneity", n);
  if (!cfg.homogeneity.infer && cfg.field.nonautonomous && cfg.homogeneity.alpha[0] != 0)
    throw SchemaError("/homogeneity/alpha/0", "time variable must carry weight 0");
  cfg.chart = r.has("chart") ? detail::parse_chart(r.at("chart"), "/chart", n) : ChartSpec{};
  if (cfg.chart.kind == "directional" && !cfg.homogeneity.infer && cfg.homogeneity.alpha[cfg.chart.index] == 0)
    throw SchemaError("/chart/index", "directional index must be a scaled variable");
  if (r.has("equilibria")) cfg.equilibria = detail::parse_equilibria(r.at("equilibria"), "/equilibria");
  if (r.has("runs")) {
    const json& runs = r.at("runs");
    if (!runs.is_array()) throw SchemaError("/runs", "expected an array");
    for (std::size_t i = 0; i < runs.size(); ++i)
      cfg.runs.push_back(detail::parse_run(runs[i], detail::ptr_join("/runs", i), cfg.field));
  }
  if (r.has("outputs")) cfg.outputs = detail::parse_outputs(r.at("outputs"), "/outputs");
  r.finish();
  return cfg;
}

inline AnalysisConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline json to_json(const AnalysisConfig& cfg) {
  json j;
  j["schema"] = kSchemaVersion;
  j["name"] = cfg.name;
  json comps = json::array();
  for (const auto& comp : cfg.field.components) {
    json c = json::array();
    for (const auto& m : comp) c.push_back({{"coeff", m.coeff}, {"exponents", m.exponents}});
    comps.push_back(std::move(c));
  }
  j["field"] = {{"variables", cfg.field.variable_names},
                {"nonautonomous", cfg.field.nonautonomous},
                {"components", std::move(comps)}};
  if (cfg.homogeneity.infer)
    j["homogeneity"] = {{"infer", true}, {"alpha_max", cfg.homogeneity.alpha_max}};
  else
    j["homogeneity"] = {{"alpha", cfg.homogeneity.alpha}, {"k", cfg.homogeneity.k}};
  if (cfg.chart.kind == "directional")
    j["chart"] = {{"kind", "directional"}, {"index", cfg.chart.index}, {"sign", cfg.chart.sign}};
  else
    j["chart"] = {{"kind", "parabolic"}};
  json eq = {{"slice", cfg.equilibria.slice}, {"grid_points", cfg.equilibria.grid_points}};
  if (cfg.equilibria.curve)
    eq["curve"] = {{"begin", cfg.equilibria.curve->begin}, {"end", cfg.equilibria.curve->end},
                   {"step", cfg.equilibria.curve->step}};
  j["equilibria"] = std::move(eq);
  json runs = json::array();
  for (const auto& r : cfg.runs) {
    json rj = {{"initial", r.initial},         {"tau_max", r.tau_max},        {"rel_tol", r.rel_tol},
               {"abs_tol", r.abs_tol},         {"horizon_eps", r.horizon_eps}};
    if (!cfg.field.nonautonomous) rj["t0"] = r.t0;
    runs.push_back(std::move(rj));
  }
  j["runs"] = std::move(runs);
  j["outputs"] = {{"directory", cfg.outputs.directory}, {"formats", cfg.outputs.formats}};
  return j;
}

/// Deterministic text form: sorted keys, two-space indent, shortest round-trip floats.
inline std::string dump_config(const AnalysisConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Built-in examples

/// Numeric parameters of a built-in example; absent keys take the example's defaults.
using ExampleParams = std::map<std::string, double>;

inline std::vector<std::string> list_examples() { return {"kk_dafermos", "mems", "painleve1", "selfsimilar"}; }

namespace detail {

inline double param(const ExampleParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

inline int int_param(const ExampleParams& p, const std::string& key, int fallback) {
  const double v = param(p, key, fallback);
  if (v != std::floor(v)) throw DomainError(key + " must be an integer");
  return static_cast<int>(v);
}

inline void check_keys(const ExampleParams& p, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw DomainError("unknown parameter " + k);
  }
}

}  // namespace detail

/// Builds the example system together with its default run.
inline std::pair<examples::ExampleSystem, RunSpec> make_example(const std::string& name, const ExampleParams& p = {}) {
  RunSpec run;
  if (name == "painleve1") {
    detail::check_keys(p, {});
    run.initial = {0.0, 10.0, 2.0 * std::pow(10.0, 1.5)};
    return {examples::painleve1(), run};
  }
  if (name == "kk_dafermos") {
    detail::check_keys(p, {"epsilon"});
    run.initial = {0.0, 10.0, 40.0, 0.0, 0.0};
    return {examples::kk_dafermos(detail::param(p, "epsilon", 0.0)), run};
  }
  if (name == "selfsimilar") {
    detail::check_keys(p, {"m", "beta", "alpha_ss"});
    const double m = detail::param(p, "m", -1.0);
    const double beta = detail::param(p, "beta", -1.0);
    if (!(m < 0.0)) throw DomainError("selfsimilar needs m < 0");
    const double a = detail::param(p, "alpha_ss", examples::selfsimilar_alpha(m, beta));
    run.initial = {1.0, 10.0, 10.0};
    run.t0 = 1.0;
    return {examples::selfsimilar(m, beta, a), run};
  }
  if (name == "mems") {
    detail::check_keys(p, {"n_dim", "p", "q"});
    auto ex = examples::mems(detail::int_param(p, "n_dim", 3), detail::int_param(p, "p", 2), detail::param(p, "q", 1.0));
    run.initial = {0.5, -0.1, -1.0};
    run.t0 = 0.5;
    return {ex, run};
  }
  throw UnknownExample("unknown example '" + name + "'");
}

inline AnalysisConfig example_config(const std::string& name, const ExampleParams& p = {}) {
  auto [ex, run] = make_example(name, p);
  AnalysisConfig cfg;
  cfg.name = name;
  cfg.field = ex.field;
  cfg.homogeneity.alpha = ex.htype.alpha;
  cfg.homogeneity.k = ex.htype.k;
  if (const auto* d = std::get_if<DirectionalChart>(&ex.chart)) {
    cfg.chart.kind = "directional";
    cfg.chart.index = d->i0;
    cfg.chart.sign = d->sign;
  }
  if (ex.field.nonautonomous) run.t0 = run.initial[0];
  for (std::size_t j = 0; j < ex.htype.dim(); ++j)
    if (ex.htype.alpha[j] == 0) cfg.equilibria.slice.push_back(run.initial[j]);
  cfg.runs.push_back(run);
  cfg.outputs.directory = name + "_out";
  return cfg;
}

inline std::string emit_example(const std::string& name, const ExampleParams& p = {}) {
  return dump_config(example_config(name, p));
}

}  // namespace horizon
