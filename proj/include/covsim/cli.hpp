#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covsim/analysis.hpp"
#include "covsim/engine.hpp"
#include "covsim/io.hpp"
#include "covsim/scenario.hpp"
#include "covsim/svg.hpp"

namespace covsim {
namespace cli {

namespace detail {

inline ScenarioConfig load_source(const std::string& preset_name,
                                  const std::string& config_path) {
  if (preset_name.empty() == config_path.empty()) {
    throw InvalidConfig("pass exactly one of --preset or --config");
  }
  if (!preset_name.empty()) return preset(preset_name);
  return load_config(config_path);
}

inline void override_seeds(ScenarioConfig& cfg, std::uint64_t seed) {
  if (auto* s = std::get_if<PositionSampler>(&cfg.initial_positions)) s->seed = seed;
  if (auto* t = std::get_if<TimerControllerParams>(&cfg.controller)) {
    for (TimerParams& w : t->timers) {
      if (w.reset.kind == ResetPolicyKind::uniform_random) w.reset.seed = seed;
    }
  }
  if (auto* s = std::get_if<SelfTrigParams>(&cfg.controller)) {
    if (s->event_policy.kind == SelfTrigEventPolicyKind::uniform_random) {
      s->event_policy.seed = seed;
    }
  }
}

inline void print_run_summary(std::ostream& out, const ScenarioConfig& cfg,
                              const SimulationTrace& trace) {
  long long total = 0;
  for (long long c : trace.events_per_agent) total += c;
  out << "controller:      " << controller_name(cfg.controller) << "\n";
  out << "agents:          " << cfg.agent_count << "\n";
  out << "horizon:         " << fmt_double(cfg.t_final) << "\n";
  out << "events total:    " << total << "\n";
  if (!trace.metrics.empty()) {
    const CoverageReport cover = coverage_report(trace, cfg.report_nu);
    out << "final cost:      " << fmt_double(trace.metrics.back().cost) << "\n";
    out << "final max |e|:   " << fmt_double(cover.final_max_error) << "\n";
    out << "covered (nu=" << fmt_double(cover.nu) << ") from t=";
    if (cover.first_time_covered) {
      out << fmt_double(*cover.first_time_covered) << "\n";
    } else {
      out << "never\n";
    }
  }
  out << "output:          " << cfg.output_dir << "\n";
}

inline int cmd_run(const std::string& preset_name, const std::string& config_path,
                   const std::string& out_dir, bool has_seed, std::uint64_t seed,
                   double t_final, double metrics_dt, bool with_svg, bool force) {
  ScenarioConfig cfg = load_source(preset_name, config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (has_seed) override_seeds(cfg, seed);
  if (t_final > 0.0) cfg.t_final = t_final;
  if (metrics_dt > 0.0) cfg.metrics_dt = metrics_dt;
  if (force) cfg.allow_inadmissible = true;

  Engine engine(cfg);
  const SimulationTrace trace = engine.run();
  std::vector<std::pair<std::string, std::string>> extras;
  if (with_svg) extras = svg::standard_plots(trace, cfg);
  persist_run(trace, cfg, cfg.output_dir, extras);
  print_run_summary(std::cout, cfg, trace);
  return 0;
}

inline int cmd_validate(const std::string& preset_name, const std::string& config_path) {
  const ScenarioConfig cfg = load_source(preset_name, config_path);
  Engine engine(cfg);
  const std::vector<Point2> positions = engine.initial_positions();

  const std::vector<std::string> pos_problems = position_violations(positions, cfg.workspace);
  if (!pos_problems.empty()) {
    std::cout << "initial positions rejected:\n";
    for (const std::string& p : pos_problems) std::cout << "  - " << p << "\n";
    return 1;
  }

  const EnsembleState state = engine.initial_state();
  const ValidationReport report = validate_initial(state, cfg);
  if (!report.ok()) {
    std::cout << "initial state rejected:\n";
    for (const std::string& p : report.violations) std::cout << "  - " << p << "\n";
    return 1;
  }

  std::cout << "initial condition admissible: " << cfg.agent_count << " agents, "
            << controller_name(cfg.controller) << " controller\n";
  if (const auto* t = std::get_if<TimerControllerParams>(&cfg.controller)) {
    const double bound = max_dwell_time(*t, static_cast<std::size_t>(cfg.agent_count));
    bool ok = true;
    for (const TimerParams& w : t->timers) ok = ok && w.T2 <= bound;
    if (ok) {
      std::cout << "dwell condition satisfied: T2 <= " << fmt_double(bound) << "\n";
    } else {
      std::cout << "warning: T2 exceeds the hold-error dwell bound " << fmt_double(bound)
                << "; the hold-error budget is not guaranteed\n";
    }
  }
  return 0;
}

inline int cmd_bounds(const std::string& preset_name, const std::string& config_path) {
  const ScenarioConfig cfg = load_source(preset_name, config_path);
  const auto* t = std::get_if<TimerControllerParams>(&cfg.controller);
  if (t == nullptr) {
    std::cerr << "bounds applies to timer configurations only (got "
              << controller_name(cfg.controller) << ")\n";
    return 1;
  }
  const auto n = static_cast<std::size_t>(cfg.agent_count);
  const double bound = max_dwell_time(*t, n);
  std::cout << "agents:          " << cfg.agent_count << "\n";
  std::cout << "k1:              " << fmt_double(t->k1) << "\n";
  std::cout << "nu_tilde:        " << fmt_double(t->nu_tilde()) << "\n";
  std::cout << "max_dwell_time:  " << fmt_double(bound) << "\n";
  bool ok = true;
  for (std::size_t i = 0; i != t->timers.size(); ++i) {
    const TimerParams& w = t->timers[i];
    ok = ok && w.T2 <= bound;
    std::cout << "timer " << (i + 1) << ":         T1=" << fmt_double(w.T1)
              << " T2=" << fmt_double(w.T2)
              << " max_gain_at_T2=" << fmt_double(max_gain(*t, w.T2, n))
              << (w.T2 <= bound ? "  (within bound)" : "  (exceeds bound)") << "\n";
  }
  std::cout << "dwell condition: " << (ok ? "satisfied" : "violated") << "\n";
  return 0;
}

inline int cmd_compare(const std::vector<std::string>& preset_names,
                       const std::string& out_dir, double nu) {
  std::vector<ScenarioConfig> configs;
  std::vector<SimulationTrace> traces;
  for (const std::string& name : preset_names) {
    ScenarioConfig cfg = preset(name);
    cfg.output_dir = (std::filesystem::path(out_dir) / name).string();
    cfg.report_nu = nu;
    Engine engine(cfg);
    traces.push_back(engine.run());
    configs.push_back(std::move(cfg));
    std::cout << "ran " << name << "\n";
  }
  for (std::size_t i = 0; i != configs.size(); ++i) {
    persist_run(traces[i], configs[i], configs[i].output_dir);
  }

  std::vector<NamedTrace> named;
  for (std::size_t i = 0; i != configs.size(); ++i) {
    named.push_back(
        {preset_names[i], controller_name(configs[i].controller), &traces[i]});
  }
  const ResourceReport resources = resource_report(named);

  nlohmann::json doc;
  doc["nu"] = nu;
  doc["runs"] = nlohmann::json::array();
  std::string text = resource_report_to_text(resources);
  text += "\nname                    final_cost      covered_from    final_max_e\n";
  for (std::size_t i = 0; i != configs.size(); ++i) {
    const CoverageReport cover = coverage_report(traces[i], nu);
    nlohmann::json row = resource_report_to_json(resources)[i];
    row["final_cost"] = traces[i].metrics.back().cost;
    row["final_max_error"] = cover.final_max_error;
    if (cover.first_time_covered) {
      row["first_time_covered"] = *cover.first_time_covered;
    } else {
      row["first_time_covered"] = nullptr;
    }
    doc["runs"].push_back(std::move(row));

    std::string name = preset_names[i];
    name.resize(24, ' ');
    std::string cost = fmt_double(traces[i].metrics.back().cost);
    cost.resize(16, ' ');
    std::string covered =
        cover.first_time_covered ? fmt_double(*cover.first_time_covered) : "never";
    covered.resize(16, ' ');
    text += name + cost + covered + fmt_double(cover.final_max_error) + "\n";
  }

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(std::filesystem::path(out_dir) / "comparison.json", std::ios::binary);
    out << doc.dump(2) << "\n";
  }
  {
    std::ofstream out(std::filesystem::path(out_dir) / "comparison.txt", std::ios::binary);
    out << text;
  }
  std::cout << "\n" << text;
  return 0;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"deterministic coverage control simulator"};
  app.require_subcommand(1);

  std::string preset_name, config_path, out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false, with_svg = false, force = false;
  double t_final = -1.0, metrics_dt = -1.0;

  CLI::App* run = app.add_subcommand("run", "simulate one scenario and write its trace");
  run->add_option("--preset", preset_name, "built-in scenario name");
  run->add_option("--config", config_path, "scenario JSON file");
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--seed", seed, "override sampling and reset seeds")
      ->each([&](const std::string&) { has_seed = true; });
  run->add_option("--t-final", t_final, "override the horizon");
  run->add_option("--metrics-dt", metrics_dt, "override the metrics sampling step");
  run->add_flag("--svg", with_svg, "also write SVG plots");
  run->add_flag("--force", force, "run even if the initial condition is inadmissible");

  CLI::App* validate =
      app.add_subcommand("validate", "check a scenario's initial condition");
  validate->add_option("--preset", preset_name, "built-in scenario name");
  validate->add_option("--config", config_path, "scenario JSON file");

  CLI::App* bounds =
      app.add_subcommand("bounds", "print hold-error dwell bounds for a timer scenario");
  bounds->add_option("--preset", preset_name, "built-in scenario name");
  bounds->add_option("--config", config_path, "scenario JSON file");

  std::vector<std::string> compare_presets = {"comparison12_lloyd", "comparison12_selftrig",
                                              "comparison12_timer"};
  std::string compare_out = "runs/comparison";
  double compare_nu = 0.5;
  CLI::App* compare =
      app.add_subcommand("compare", "run several presets and tabulate their footprint");
  compare->add_option("--presets", compare_presets, "presets to run");
  compare->add_option("--out", compare_out, "output directory");
  compare->add_option("--nu", compare_nu, "coverage threshold for the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) {
      return detail::cmd_run(preset_name, config_path, out_dir, has_seed, seed, t_final,
                             metrics_dt, with_svg, force);
    }
    if (validate->parsed()) return detail::cmd_validate(preset_name, config_path);
    if (bounds->parsed()) return detail::cmd_bounds(preset_name, config_path);
    if (compare->parsed()) return detail::cmd_compare(compare_presets, compare_out, compare_nu);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cli
}  // namespace covsim
