#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "covsim/analysis.hpp"
#include "covsim/engine.hpp"
#include "covsim/scenario.hpp"

namespace covsim {

inline constexpr const char* covsim_version = "0.1.0";
inline constexpr int covsim_schema_version = 1;

/// Shortest decimal form that parses back to the same double.
inline std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw ValidationError("unknown key '" + item.key() + "' in " + where);
  }
}

inline double get_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError(where + " is missing '" + key + "'");
  if (!obj[key].is_number()) throw ValidationError(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

inline double get_number_or(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ValidationError(std::string(key) + " must be a number");
  return obj[key].get<double>();
}

inline Point2 point_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(where + " must be a [x, y] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json point_to_json(Point2 p) { return json::array({p.x, p.y}); }

inline json polygon_to_json(const ConvexPolygon& poly) {
  json arr = json::array();
  for (const Point2& v : poly.vertices) arr.push_back(point_to_json(v));
  return arr;
}

inline ConvexPolygon polygon_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + " must be an array of [x, y] pairs");
  ConvexPolygon poly;
  for (std::size_t i = 0; i != j.size(); ++i) {
    poly.vertices.push_back(point_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return poly;
}

inline json density_to_json(const DensityField& d) {
  if (d.kind == DensityField::Kind::uniform) return json{{"kind", "uniform"}};
  return json{{"kind", "gaussian"}, {"center", point_to_json(d.center)},
              {"coefficient", d.coefficient}};
}

inline DensityField density_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ValidationError("density must be an object with a 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "uniform") {
    check_keys(j, {"kind"}, "density");
    return DensityField::uniform();
  }
  if (kind == "gaussian") {
    check_keys(j, {"kind", "center", "coefficient"}, "density");
    const Point2 c = point_from_json(j.value("center", json::array({0.0, 0.0})), "density.center");
    const double a = get_number(j, "coefficient", "density");
    if (!(a > 0.0)) throw ValidationError("density.coefficient must be > 0");
    return DensityField::gaussian(c, a);
  }
  throw ValidationError("density.kind must be 'uniform' or 'gaussian'");
}

inline json reset_to_json(const ResetPolicy& r) {
  if (r.kind == ResetPolicyKind::always_T2) return json{{"policy", "always_T2"}};
  return json{{"policy", "uniform_random"}, {"seed", r.seed}};
}

inline ResetPolicy reset_from_json(const json& j) {
  if (!j.is_object() || !j.contains("policy")) {
    throw ValidationError("timer reset must be an object with a 'policy'");
  }
  check_keys(j, {"policy", "seed"}, "timers.reset");
  ResetPolicy r;
  const std::string policy = j["policy"].get<std::string>();
  if (policy == "always_T2") {
    r.kind = ResetPolicyKind::always_T2;
  } else if (policy == "uniform_random") {
    r.kind = ResetPolicyKind::uniform_random;
    r.seed = j.value("seed", std::uint64_t{0});
  } else {
    throw ValidationError("reset.policy must be 'always_T2' or 'uniform_random'");
  }
  return r;
}

inline json timer_params_to_json(const TimerParams& w) {
  return json{{"T1", w.T1}, {"T2", w.T2}, {"reset", reset_to_json(w.reset)}};
}

inline TimerParams timer_params_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  check_keys(j, {"T1", "T2", "reset"}, where);
  TimerParams w;
  w.T1 = get_number(j, "T1", where);
  w.T2 = get_number(j, "T2", where);
  if (j.contains("reset")) w.reset = reset_from_json(j["reset"]);
  return w;
}

inline json controller_to_json(const ControllerParams& c) {
  if (const auto* t = std::get_if<TimerControllerParams>(&c)) {
    json timers;
    if (t->timers.size() == 1) {
      timers = timer_params_to_json(t->timers.front());
    } else {
      timers = json::array();
      for (const TimerParams& w : t->timers) timers.push_back(timer_params_to_json(w));
    }
    return json{{"type", "timer"},      {"k1", t->k1},
                {"nu", t->nu},          {"epsilon", t->epsilon},
                {"eta_tilde_max", t->eta_tilde_max}, {"L_p", t->L_p},
                {"timers", timers}};
  }
  if (const auto* l = std::get_if<LloydParams>(&c)) {
    return json{{"type", "lloyd"}, {"k2", l->k2}, {"dt", l->dt}};
  }
  const auto& s = std::get<SelfTrigParams>(c);
  json policy;
  if (s.event_policy.kind == SelfTrigEventPolicyKind::periodic) {
    policy = json{{"kind", "periodic"}};
  } else {
    policy = json{{"kind", "uniform_random"}, {"seed", s.event_policy.seed}};
  }
  return json{{"type", "selftrig"}, {"kappa", s.kappa},     {"v", s.v},
              {"tau_min", s.tau_min}, {"tau_max", s.tau_max}, {"event_policy", policy}};
}

inline ControllerParams controller_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) {
    throw ValidationError("controller must be an object with a 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "timer") {
    check_keys(j, {"type", "k1", "nu", "epsilon", "eta_tilde_max", "L_p", "timers"},
               "controller");
    TimerControllerParams t;
    t.k1 = get_number(j, "k1", "controller");
    t.nu = get_number(j, "nu", "controller");
    t.epsilon = get_number(j, "epsilon", "controller");
    t.eta_tilde_max = get_number(j, "eta_tilde_max", "controller");
    t.L_p = get_number_or(j, "L_p", 5.0);
    if (!j.contains("timers")) throw ValidationError("controller is missing 'timers'");
    const json& timers = j["timers"];
    if (timers.is_array()) {
      for (std::size_t i = 0; i != timers.size(); ++i) {
        t.timers.push_back(
            timer_params_from_json(timers[i], "timers[" + std::to_string(i) + "]"));
      }
    } else {
      t.timers.push_back(timer_params_from_json(timers, "timers"));
    }
    return t;
  }
  if (type == "lloyd") {
    check_keys(j, {"type", "k2", "dt"}, "controller");
    LloydParams l;
    l.k2 = get_number_or(j, "k2", 1.0);
    l.dt = get_number_or(j, "dt", 0.01);
    return l;
  }
  if (type == "selftrig") {
    check_keys(j, {"type", "kappa", "v", "tau_min", "tau_max", "event_policy"}, "controller");
    SelfTrigParams s;
    s.kappa = get_number_or(j, "kappa", 1.0);
    s.v = get_number(j, "v", "controller");
    s.tau_min = get_number(j, "tau_min", "controller");
    s.tau_max = get_number(j, "tau_max", "controller");
    if (j.contains("event_policy")) {
      const json& p = j["event_policy"];
      check_keys(p, {"kind", "seed"}, "controller.event_policy");
      const std::string kind = p.value("kind", "periodic");
      if (kind == "periodic") {
        s.event_policy.kind = SelfTrigEventPolicyKind::periodic;
      } else if (kind == "uniform_random") {
        s.event_policy.kind = SelfTrigEventPolicyKind::uniform_random;
        s.event_policy.seed = p.value("seed", std::uint64_t{0});
      } else {
        throw ValidationError("event_policy.kind must be 'periodic' or 'uniform_random'");
      }
    }
    return s;
  }
  throw ValidationError("controller.type must be 'timer', 'lloyd' or 'selftrig'");
}

}  // namespace detail

/// Full echo of a config, defaults filled in; load(save(cfg)) is bit-identical.
inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  using nlohmann::json;
  json j;
  j["schema_version"] = cfg.schema_version;
  j["workspace"] = detail::polygon_to_json(cfg.workspace);
  j["density"] = detail::density_to_json(cfg.density);
  j["agent_count"] = cfg.agent_count;
  if (const auto* pts = std::get_if<std::vector<Point2>>(&cfg.initial_positions)) {
    json arr = json::array();
    for (const Point2& p : *pts) arr.push_back(detail::point_to_json(p));
    j["initial_positions"] = arr;
  } else {
    const auto& s = std::get<PositionSampler>(cfg.initial_positions);
    j["initial_positions"] = json{
        {"seed", s.seed}, {"margin", s.margin}, {"min_separation", s.min_separation}};
  }
  j["controller"] = detail::controller_to_json(cfg.controller);
  j["t_final"] = cfg.t_final;
  j["metrics_dt"] = cfg.metrics_dt;
  j["quad"] = json{{"rel_tol", cfg.quad.rel_tol},
                   {"max_subdivision_depth", cfg.quad.max_subdivision_depth}};
  j["output_dir"] = cfg.output_dir;
  j["report_nu"] = cfg.report_nu;
  j["allow_inadmissible"] = cfg.allow_inadmissible;
  return j;
}

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  using nlohmann::json;
  if (!j.is_object()) throw ValidationError("config root must be a JSON object");
  detail::check_keys(j,
                     {"schema_version", "workspace", "density", "agent_count",
                      "initial_positions", "controller", "t_final", "metrics_dt", "quad",
                      "output_dir", "report_nu", "allow_inadmissible"},
                     "config");
  ScenarioConfig cfg;
  cfg.schema_version = j.value("schema_version", covsim_schema_version);
  if (cfg.schema_version != covsim_schema_version) {
    throw ValidationError("unsupported schema_version " + std::to_string(cfg.schema_version));
  }
  if (!j.contains("workspace")) throw ValidationError("config is missing 'workspace'");
  cfg.workspace = detail::polygon_from_json(j["workspace"], "workspace");
  if (!j.contains("density")) throw ValidationError("config is missing 'density'");
  cfg.density = detail::density_from_json(j["density"]);
  if (!j.contains("agent_count") || !j["agent_count"].is_number_integer()) {
    throw ValidationError("config needs an integer 'agent_count'");
  }
  cfg.agent_count = j["agent_count"].get<int>();
  if (j.contains("initial_positions")) {
    const json& ip = j["initial_positions"];
    if (ip.is_array()) {
      std::vector<Point2> pts;
      for (std::size_t i = 0; i != ip.size(); ++i) {
        pts.push_back(
            detail::point_from_json(ip[i], "initial_positions[" + std::to_string(i) + "]"));
      }
      cfg.initial_positions = std::move(pts);
    } else if (ip.is_object()) {
      detail::check_keys(ip, {"seed", "margin", "min_separation"}, "initial_positions");
      PositionSampler s;
      s.seed = ip.value("seed", std::uint64_t{42});
      s.margin = detail::get_number_or(ip, "margin", 0.1);
      s.min_separation = detail::get_number_or(ip, "min_separation", 0.1);
      cfg.initial_positions = s;
    } else {
      throw ValidationError("initial_positions must be a list of points or a sampler object");
    }
  }
  if (!j.contains("controller")) throw ValidationError("config is missing 'controller'");
  cfg.controller = detail::controller_from_json(j["controller"]);
  cfg.t_final = detail::get_number_or(j, "t_final", 150.0);
  cfg.metrics_dt = detail::get_number_or(j, "metrics_dt", 0.01);
  if (j.contains("quad")) {
    detail::check_keys(j["quad"], {"rel_tol", "max_subdivision_depth"}, "quad");
    cfg.quad.rel_tol = detail::get_number_or(j["quad"], "rel_tol", 1e-9);
    cfg.quad.max_subdivision_depth = static_cast<int>(
        detail::get_number_or(j["quad"], "max_subdivision_depth", 10.0));
  }
  cfg.output_dir = j.value("output_dir", std::string("runs/out"));
  if (j.contains("report_nu")) {
    cfg.report_nu = detail::get_number(j, "report_nu", "config");
  } else if (const auto* t = std::get_if<TimerControllerParams>(&cfg.controller)) {
    cfg.report_nu = t->nu;
  } else {
    cfg.report_nu = 0.5;
  }
  cfg.allow_inadmissible = j.value("allow_inadmissible", false);

  const std::vector<std::string> problems = config_violations(cfg);
  if (!problems.empty()) {
    std::string all = "config invalid:";
    for (const std::string& p : problems) all += "\n  - " + p;
    throw ValidationError(all);
  }
  return cfg;
}

inline std::string save_config(const ScenarioConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

/// Parses and validates a config file; ParseError on bad JSON with position
/// context, ValidationError listing every violated invariant otherwise.
inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

inline std::string events_csv(const SimulationTrace& trace) {
  std::string out = "t,j,agent,e_x,e_y,eta_x,eta_y,tau_new\n";
  for (const HybridEvent& ev : trace.events) {
    out += fmt_double(ev.t);
    out += ',';
    out += std::to_string(ev.j_before);
    out += ',';
    out += std::to_string(ev.agent);
    out += ',';
    out += fmt_double(ev.e_sample.x);
    out += ',';
    out += fmt_double(ev.e_sample.y);
    out += ',';
    out += fmt_double(ev.eta_new.x);
    out += ',';
    out += fmt_double(ev.eta_new.y);
    out += ',';
    out += fmt_double(ev.tau_new);
    out += '\n';
  }
  return out;
}

inline std::string metrics_csv(const SimulationTrace& trace) {
  const std::size_t n = trace.metrics.empty() ? 0 : trace.metrics.front().e_norm.size();
  std::string out = "t";
  for (std::size_t p = 1; p <= n; ++p) out += ",e_norm_" + std::to_string(p);
  for (std::size_t p = 1; p <= n; ++p) out += ",eta_tilde_norm_" + std::to_string(p);
  out += ",V,coverage,in_U\n";
  for (const MetricsRow& row : trace.metrics) {
    out += fmt_double(row.t);
    for (double e : row.e_norm) {
      out += ',';
      out += fmt_double(e);
    }
    for (double h : row.eta_tilde_norm) {
      out += ',';
      out += fmt_double(h);
    }
    out += ',';
    out += fmt_double(row.cost);
    out += row.covered ? ",1" : ",0";
    out += row.in_U ? ",1\n" : ",0\n";
  }
  return out;
}

/// Config echo, derived timer bounds, seeds, versions and run summary.
inline nlohmann::json meta_json(const ScenarioConfig& cfg, const SimulationTrace& trace) {
  using nlohmann::json;
  json meta;
  meta["version"] = covsim_version;
  meta["schema_version"] = covsim_schema_version;
  meta["config"] = config_to_json(cfg);

  json seeds = json::object();
  if (const auto* s = std::get_if<PositionSampler>(&cfg.initial_positions)) {
    seeds["positions"] = s->seed;
  }
  if (const auto* t = std::get_if<TimerControllerParams>(&cfg.controller)) {
    if (t->timers.front().reset.kind == ResetPolicyKind::uniform_random) {
      seeds["timer_reset"] = t->timers.front().reset.seed;
    }
  }
  if (const auto* s = std::get_if<SelfTrigParams>(&cfg.controller)) {
    if (s->event_policy.kind == SelfTrigEventPolicyKind::uniform_random) {
      seeds["event_policy"] = s->event_policy.seed;
    }
  }
  meta["seeds"] = seeds;

  json derived = json::object();
  if (const auto* t = std::get_if<TimerControllerParams>(&cfg.controller)) {
    derived["nu_tilde"] = t->nu_tilde();
    const double bound = max_dwell_time(*t, static_cast<std::size_t>(cfg.agent_count));
    derived["max_dwell_time"] = bound;
    bool ok = true;
    json gains = json::array();
    for (int p = 0; p != cfg.agent_count; ++p) {
      const TimerParams& w = t->timer_for(static_cast<std::size_t>(p));
      ok = ok && w.T2 <= bound;
      gains.push_back(max_gain(*t, w.T2, static_cast<std::size_t>(cfg.agent_count)));
    }
    derived["dwell_condition_satisfied"] = ok;
    derived["max_gain_at_T2"] = t->timers.size() == 1 ? gains[0] : gains;
    derived["in_U_error_threshold"] = t->eta_tilde_max * t->nu_tilde() / t->k1;
  } else {
    derived["note"] = "hold-error bounds apply to the timer controller only";
  }
  meta["derived"] = derived;

  json run = json::object();
  run["controller"] = controller_name(cfg.controller);
  run["events_per_agent"] = trace.events_per_agent;
  long long total = 0;
  for (long long c : trace.events_per_agent) total += c;
  run["total_events"] = total;
  run["metrics_rows"] = trace.metrics.size();
  if (!trace.metrics.empty()) {
    const CoverageReport cover = coverage_report(trace, cfg.report_nu);
    run["final_cost"] = trace.metrics.back().cost;
    run["final_max_error"] = cover.final_max_error;
    run["report_nu"] = cfg.report_nu;
    if (cover.first_time_covered) {
      run["first_time_covered"] = *cover.first_time_covered;
    } else {
      run["first_time_covered"] = nullptr;
    }
    const GapStats gaps =
        event_gap_stats(trace, static_cast<std::size_t>(cfg.agent_count));
    run["min_event_gap"] = gaps.min_gap;
    run["max_event_gap"] = gaps.max_gap;
  }
  meta["run"] = run;
  meta["notes"] = json{
      {"eta_tilde_columns", "zero for non-timer controllers"},
      {"in_U_column", "always 1 for non-timer controllers"},
      {"selftrig_accounting", "event log counts sampling instants only"}};
  return meta;
}

inline nlohmann::json resource_report_to_json(const ResourceReport& report) {
  using nlohmann::json;
  json arr = json::array();
  for (const ResourceEntry& e : report.entries) {
    json row;
    row["name"] = e.name;
    row["controller"] = e.controller;
    row["events_per_agent"] = e.events_per_agent;
    row["total_events"] = e.total_events;
    row["voronoi_computations"] = e.voronoi_computations;
    row["total_cost_units"] = e.total_cost_units;
    row["events_only_undercount"] = e.events_only_undercount;
    if (std::isnan(e.ratio_vs_benchmark)) {
      row["ratio_vs_benchmark"] = nullptr;
    } else {
      row["ratio_vs_benchmark"] = e.ratio_vs_benchmark;
    }
    arr.push_back(std::move(row));
  }
  return arr;
}

inline std::string resource_report_to_text(const ResourceReport& report) {
  std::string out;
  out += "run                     controller  events     voronoi    ratio_vs_lloyd\n";
  for (const ResourceEntry& e : report.entries) {
    std::string name = e.name;
    name.resize(24, ' ');
    std::string ctrl = e.controller;
    ctrl.resize(12, ' ');
    std::string events = std::to_string(e.total_events);
    events.resize(11, ' ');
    std::string voronoi = std::to_string(e.voronoi_computations);
    voronoi.resize(11, ' ');
    out += name + ctrl + events + voronoi;
    if (std::isnan(e.ratio_vs_benchmark)) {
      out += "-";
    } else {
      out += fmt_double(e.ratio_vs_benchmark);
    }
    if (e.events_only_undercount) out += "  (events only; monitoring overhead not counted)";
    out += '\n';
  }
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content,
                       std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw Error("failed while writing " + path.string());
  written.push_back(path);
}

}  // namespace detail

/// Writes events.csv, metrics.csv and meta.json (plus any extras) into dir.
/// On failure every file written by this call is removed before rethrowing.
inline void persist_run(const SimulationTrace& trace, const ScenarioConfig& cfg,
                        const std::filesystem::path& dir,
                        const std::vector<std::pair<std::string, std::string>>& extra_files = {}) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  try {
    detail::write_file(dir / "events.csv", events_csv(trace), written);
    detail::write_file(dir / "metrics.csv", metrics_csv(trace), written);
    detail::write_file(dir / "meta.json", meta_json(cfg, trace).dump(2) + "\n", written);
    for (const auto& [name, content] : extra_files) {
      detail::write_file(dir / name, content, written);
    }
  } catch (...) {
    for (const std::filesystem::path& p : written) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
    throw;
  }
}

}  // namespace covsim
