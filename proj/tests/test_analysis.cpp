#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <variant>

#include "covsim/analysis.hpp"
#include "covsim/engine.hpp"
#include "covsim/scenario.hpp"

using namespace covsim;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.workspace = ConvexPolygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  cfg.density = DensityField::uniform();
  cfg.agent_count = 2;
  cfg.initial_positions = std::vector<Point2>{{0.25, 0.5}, {0.75, 0.5}};
  TimerControllerParams timer;
  timer.k1 = 0.5;
  timer.nu = 0.5;
  timer.epsilon = 1e-8;
  timer.eta_tilde_max = 0.3;
  timer.timers = {{0.05, 0.25, {}}};
  cfg.controller = timer;
  cfg.t_final = 1.0;
  cfg.metrics_dt = 0.1;
  cfg.report_nu = 0.5;
  return cfg;
}

SimulationTrace lloyd_trace(double t_final) {
  ScenarioConfig cfg = small_config();
  cfg.initial_positions = std::vector<Point2>{{0.1, 0.1}, {0.8, 0.9}};
  LloydParams lp;
  lp.dt = 0.25;
  cfg.controller = lp;
  cfg.t_final = t_final;
  return run_scenario(cfg);
}

}  // namespace

TEST_CASE("coverage of a stationary run starts at zero", "[analysis]") {
  const SimulationTrace trace = run_scenario(small_config());
  const CoverageReport report = coverage_report(trace, 0.5);
  REQUIRE(report.first_time_covered.has_value());
  REQUIRE(*report.first_time_covered == 0.0);
  REQUIRE(report.final_max_error < 1e-9);
  REQUIRE(report.per_agent_final_error.size() == 2);
}

TEST_CASE("coverage thresholds act monotonically", "[analysis]") {
  const SimulationTrace trace = lloyd_trace(2.0);

  const CoverageReport never = coverage_report(trace, 0.0);
  REQUIRE_FALSE(never.first_time_covered.has_value());

  const CoverageReport always = coverage_report(trace, 1e6);
  REQUIRE(always.first_time_covered.has_value());
  REQUIRE(*always.first_time_covered == 0.0);

  double prev = 1e18;
  for (double nu : {0.05, 0.1, 0.3, 1.0}) {
    const CoverageReport r = coverage_report(trace, nu);
    if (r.first_time_covered) {
      REQUIRE(*r.first_time_covered <= prev);
      prev = *r.first_time_covered;
    }
  }

  REQUIRE_THROWS_AS(coverage_report(SimulationTrace{}, 0.5), InvalidConfig);
  REQUIRE_THROWS_AS(coverage_report(trace, -1.0), InvalidConfig);
}

TEST_CASE("coverage onset ignores earlier covered stretches", "[analysis]") {
  SimulationTrace trace;
  MetricsRow covered_row;
  covered_row.e_norm = {0.1};
  MetricsRow uncovered_row;
  uncovered_row.e_norm = {0.9};
  covered_row.t = 0.0;
  trace.metrics.push_back(covered_row);   // covered, but not persistent
  uncovered_row.t = 1.0;
  trace.metrics.push_back(uncovered_row);
  covered_row.t = 2.0;
  trace.metrics.push_back(covered_row);
  covered_row.t = 3.0;
  trace.metrics.push_back(covered_row);

  const CoverageReport report = coverage_report(trace, 0.5);
  REQUIRE(report.first_time_covered.has_value());
  REQUIRE(*report.first_time_covered == 2.0);
}

TEST_CASE("hold-error audit flags only rows above the budget", "[analysis]") {
  const SimulationTrace trace = run_scenario(small_config());
  const EtaTildeAudit clean = eta_tilde_audit(trace, 0.3);
  REQUIRE(clean.violations.empty());
  REQUIRE(clean.max_value < 1e-9);  // stationary run never drifts

  SimulationTrace crafted;
  MetricsRow row;
  row.t = 1.5;
  row.eta_tilde_norm = {0.1, 0.45};
  crafted.metrics.push_back(row);
  const EtaTildeAudit audit = eta_tilde_audit(crafted, 0.3);
  REQUIRE(audit.max_value == 0.45);
  REQUIRE(audit.violations.size() == 1);
  REQUIRE(audit.violations[0].agent == 1);
  REQUIRE(audit.violations[0].t == 1.5);
  REQUIRE(audit.violations[0].value == 0.45);
}

TEST_CASE("resource accounting compares runs against the benchmark", "[analysis]") {
  const SimulationTrace timer_run = run_scenario(small_config());
  const SimulationTrace lloyd_run = lloyd_trace(1.0);

  ScenarioConfig st_cfg = small_config();
  SelfTrigParams sp;
  sp.kappa = 1.0;
  sp.v = 0.35;
  sp.tau_min = 0.5;
  sp.tau_max = 0.5;
  st_cfg.controller = sp;
  const SimulationTrace st_run = run_scenario(st_cfg);

  const ResourceReport report = resource_report({{"timer", "timer", &timer_run},
                                                 {"lloyd", "lloyd", &lloyd_run},
                                                 {"selftrig", "selftrig", &st_run}});
  REQUIRE(report.entries.size() == 3);

  // timer: one initialization plus deadlines 0.25/0.5/0.75 per agent.
  REQUIRE(report.entries[0].total_events == 8);
  REQUIRE(report.entries[0].voronoi_computations == 8);
  REQUIRE(report.entries[1].total_events == 8);  // lloyd at dt = 0.25
  REQUIRE(report.entries[2].total_events == 4);  // selftrig sampling at 0.5

  REQUIRE(report.entries[1].ratio_vs_benchmark == 1.0);
  REQUIRE_THAT(report.entries[0].ratio_vs_benchmark, Catch::Matchers::WithinRel(1.0, 1e-12));
  REQUIRE_THAT(report.entries[2].ratio_vs_benchmark, Catch::Matchers::WithinRel(0.5, 1e-12));

  REQUIRE_FALSE(report.entries[0].events_only_undercount);
  REQUIRE(report.entries[2].events_only_undercount);
}

TEST_CASE("resource accounting without a benchmark leaves ratios unset", "[analysis]") {
  const SimulationTrace timer_run = run_scenario(small_config());
  const ResourceReport report = resource_report({{"timer", "timer", &timer_run}});
  REQUIRE(std::isnan(report.entries[0].ratio_vs_benchmark));
}

TEST_CASE("resource accounting demands one shared horizon", "[analysis]") {
  const SimulationTrace a = run_scenario(small_config());
  const SimulationTrace b = lloyd_trace(2.0);
  REQUIRE_THROWS_AS(resource_report({{"a", "timer", &a}, {"b", "lloyd", &b}}),
                    InvalidConfig);
  REQUIRE_THROWS_AS(resource_report({}), InvalidConfig);
  REQUIRE_THROWS_AS(resource_report({{"x", "timer", nullptr}}), InvalidConfig);
}

TEST_CASE("event gaps of a fixed-period run collapse to the period", "[analysis]") {
  const SimulationTrace trace = run_scenario(small_config());
  const GapStats stats = event_gap_stats(trace, 2);
  for (std::size_t p = 0; p != 2; ++p) {
    REQUIRE(stats.min_gap[p] == 0.25);
    REQUIRE(stats.max_gap[p] == 0.25);
  }
}

TEST_CASE("event gaps of random resets respect the timer window", "[analysis]") {
  ScenarioConfig cfg = small_config();
  auto* timer = std::get_if<TimerControllerParams>(&cfg.controller);
  timer->timers.front().reset = {ResetPolicyKind::uniform_random, 21};
  cfg.t_final = 10.0;
  const SimulationTrace trace = run_scenario(cfg);
  const GapStats stats = event_gap_stats(trace, 2);
  for (std::size_t p = 0; p != 2; ++p) {
    REQUIRE(stats.min_gap[p] >= 0.05 - 1e-12);
    REQUIRE(stats.max_gap[p] <= 0.25 + 1e-12);
    REQUIRE(stats.min_gap[p] < stats.max_gap[p]);  // draws actually vary
  }
}
