#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "covsim/engine.hpp"
#include "covsim/scenario.hpp"

using namespace covsim;

TEST_CASE("benchmark workspace is a valid heptagon of area 124", "[scenario]") {
  const ConvexPolygon w = benchmark_workspace();
  REQUIRE_NOTHROW(w.validate());
  REQUIRE(w.vertices.size() == 7);
  REQUIRE(w.area() == 124.0);
  REQUIRE(w.contains({7.5, 4.5}));
  REQUIRE_FALSE(w.contains({-1.0, -1.0}));
}

TEST_CASE("preset catalog lists exactly the four built-in scenarios", "[scenario]") {
  const std::vector<std::string> names = preset_names();
  REQUIRE(names == std::vector<std::string>{"validation30", "comparison12_lloyd",
                                            "comparison12_selftrig", "comparison12_timer"});
  REQUIRE_THROWS_AS(preset("validation31"), UnknownPreset);
  REQUIRE_THROWS_AS(preset(""), UnknownPreset);
}

namespace {

void check_shared_preset_fields(const ScenarioConfig& cfg, const std::string& name) {
  REQUIRE(cfg.workspace.vertices == benchmark_workspace().vertices);
  REQUIRE(cfg.density.kind == DensityField::Kind::gaussian);
  REQUIRE(cfg.density.center == Point2{7.5, 4.5});
  REQUIRE(cfg.density.coefficient == 0.03);
  REQUIRE(cfg.t_final == 150.0);
  REQUIRE(cfg.metrics_dt == 0.01);
  REQUIRE(cfg.output_dir == "runs/" + name);
  const auto* sampler = std::get_if<PositionSampler>(&cfg.initial_positions);
  REQUIRE(sampler != nullptr);
  REQUIRE(sampler->seed == 42);
  REQUIRE(sampler->margin == 0.1);
  REQUIRE(sampler->min_separation == 0.1);
  REQUIRE(config_violations(cfg).empty());
}

}  // namespace

TEST_CASE("thirty-agent validation preset is pinned", "[scenario]") {
  const ScenarioConfig cfg = preset("validation30");
  check_shared_preset_fields(cfg, "validation30");
  REQUIRE(cfg.agent_count == 30);
  REQUIRE(cfg.report_nu == 0.7);
  const auto* t = std::get_if<TimerControllerParams>(&cfg.controller);
  REQUIRE(t != nullptr);
  REQUIRE(t->k1 == 0.525);
  REQUIRE(t->nu == 0.7);
  REQUIRE(t->epsilon == 1e-8);
  REQUIRE(t->eta_tilde_max == 0.4);
  REQUIRE(t->L_p == 5.0);
  REQUIRE(t->timers.size() == 1);
  REQUIRE(t->timers[0].T1 == 0.01);
  REQUIRE(t->timers[0].T2 == 0.03);
  REQUIRE(t->timers[0].reset.kind == ResetPolicyKind::always_T2);
}

TEST_CASE("twelve-agent comparison presets are pinned", "[scenario]") {
  SECTION("lloyd") {
    const ScenarioConfig cfg = preset("comparison12_lloyd");
    check_shared_preset_fields(cfg, "comparison12_lloyd");
    REQUIRE(cfg.agent_count == 12);
    REQUIRE(cfg.report_nu == 0.5);
    const auto* l = std::get_if<LloydParams>(&cfg.controller);
    REQUIRE(l != nullptr);
    REQUIRE(l->k2 == 1.0);
    REQUIRE(l->dt == 0.01);
  }
  SECTION("selftrig") {
    const ScenarioConfig cfg = preset("comparison12_selftrig");
    check_shared_preset_fields(cfg, "comparison12_selftrig");
    REQUIRE(cfg.agent_count == 12);
    REQUIRE(cfg.report_nu == 0.5);
    const auto* s = std::get_if<SelfTrigParams>(&cfg.controller);
    REQUIRE(s != nullptr);
    REQUIRE(s->kappa == 1.0);
    REQUIRE(s->v == 0.35);
    REQUIRE(s->tau_min == 0.01);
    REQUIRE(s->tau_max == 0.75);
    REQUIRE(s->event_policy.kind == SelfTrigEventPolicyKind::periodic);
  }
  SECTION("timer") {
    const ScenarioConfig cfg = preset("comparison12_timer");
    check_shared_preset_fields(cfg, "comparison12_timer");
    REQUIRE(cfg.agent_count == 12);
    REQUIRE(cfg.report_nu == 0.5);
    const auto* t = std::get_if<TimerControllerParams>(&cfg.controller);
    REQUIRE(t != nullptr);
    REQUIRE(t->k1 == 0.5);
    REQUIRE(t->nu == 0.5);
    REQUIRE(t->epsilon == 1e-8);
    REQUIRE(t->eta_tilde_max == 0.3);
    REQUIRE(t->timers.size() == 1);
    REQUIRE(t->timers[0].T1 == 0.2);
    REQUIRE(t->timers[0].T2 == 0.65);
  }
}

namespace {

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  return std::any_of(problems.begin(), problems.end(), [&](const std::string& msg) {
    return msg.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("config checks collect every violation", "[scenario]") {
  SECTION("valid presets report nothing") {
    for (const std::string& name : preset_names()) {
      REQUIRE(config_violations(preset(name)).empty());
    }
  }
  SECTION("inverted timer window") {
    ScenarioConfig cfg = preset("validation30");
    std::get<TimerControllerParams>(cfg.controller).timers = {{0.5, 0.2, {}}};
    REQUIRE(mentions(config_violations(cfg), "T1 <= T2"));
  }
  SECTION("non-positive gain") {
    ScenarioConfig cfg = preset("validation30");
    std::get<TimerControllerParams>(cfg.controller).k1 = 0.0;
    REQUIRE(mentions(config_violations(cfg), "k1"));
  }
  SECTION("hold-error budget outside (0, k1)") {
    ScenarioConfig cfg = preset("validation30");
    std::get<TimerControllerParams>(cfg.controller).eta_tilde_max = 0.525;
    REQUIRE(mentions(config_violations(cfg), "eta_tilde_max"));
    std::get<TimerControllerParams>(cfg.controller).eta_tilde_max = 0.0;
    REQUIRE(mentions(config_violations(cfg), "eta_tilde_max"));
  }
  SECTION("single agent") {
    ScenarioConfig cfg = preset("comparison12_lloyd");
    cfg.agent_count = 1;
    REQUIRE(mentions(config_violations(cfg), "agent_count"));
  }
  SECTION("non-positive horizon and sampling step") {
    ScenarioConfig cfg = preset("comparison12_lloyd");
    cfg.t_final = 0.0;
    cfg.metrics_dt = -0.5;
    const auto problems = config_violations(cfg);
    REQUIRE(mentions(problems, "t_final"));
    REQUIRE(mentions(problems, "metrics_dt"));
  }
  SECTION("wrong explicit position count") {
    ScenarioConfig cfg = preset("comparison12_lloyd");
    cfg.initial_positions = std::vector<Point2>{{5.0, 5.0}, {6.0, 5.0}};
    REQUIRE(mentions(config_violations(cfg), "exactly agent_count"));
  }
  SECTION("bad timer tolerances") {
    ScenarioConfig cfg = preset("validation30");
    auto& t = std::get<TimerControllerParams>(cfg.controller);
    t.nu = 0.0;
    t.epsilon = 1.0;
    const auto problems = config_violations(cfg);
    REQUIRE(mentions(problems, "nu"));
    REQUIRE(mentions(problems, "epsilon"));
  }
  SECTION("non-positive reporting threshold") {
    ScenarioConfig cfg = preset("comparison12_lloyd");
    cfg.report_nu = 0.0;
    REQUIRE(mentions(config_violations(cfg), "report_nu"));
  }
  SECTION("timer list of the wrong size") {
    ScenarioConfig cfg = preset("validation30");
    auto& t = std::get<TimerControllerParams>(cfg.controller);
    t.timers = {TimerParams{0.01, 0.03, {}}, TimerParams{0.01, 0.03, {}}};
    REQUIRE(mentions(config_violations(cfg), "one shared entry or one per agent"));
    t.timers.clear();
    REQUIRE(mentions(config_violations(cfg), "one shared entry or one per agent"));
  }
  SECTION("violations accumulate") {
    ScenarioConfig cfg = preset("validation30");
    cfg.agent_count = 1;
    cfg.t_final = -1.0;
    std::get<TimerControllerParams>(cfg.controller).k1 = -2.0;
    REQUIRE(config_violations(cfg).size() >= 3);
  }
}

TEST_CASE("position sampling respects clearance and separation", "[scenario]") {
  const ConvexPolygon w = benchmark_workspace();
  const PositionSampler sampler{42, 0.3, 0.8};
  const std::vector<Point2> pts = sample_positions(w, 12, sampler);
  REQUIRE(pts.size() == 12);
  for (const Point2& z : pts) {
    REQUIRE(contains_with_clearance(w, z, 0.3 - 1e-12));
  }
  for (std::size_t a = 0; a != pts.size(); ++a) {
    for (std::size_t b = a + 1; b != pts.size(); ++b) {
      REQUIRE(distance(pts[a], pts[b]) >= 0.8);
    }
  }

  const std::vector<Point2> again = sample_positions(w, 12, sampler);
  REQUIRE(pts == again);

  const std::vector<Point2> other = sample_positions(w, 12, PositionSampler{43, 0.3, 0.8});
  REQUIRE(pts != other);
}

TEST_CASE("impossible sampling constraints are rejected", "[scenario]") {
  const ConvexPolygon unit{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  REQUIRE_THROWS_AS(sample_positions(unit, 4, PositionSampler{1, 0.0, 10.0}), InvalidConfig);
  REQUIRE_THROWS_AS(sample_positions(unit, 2, PositionSampler{1, 5.0, 0.0}), InvalidConfig);
}

TEST_CASE("explicit positions pass through the resolver untouched", "[scenario]") {
  ScenarioConfig cfg = preset("comparison12_lloyd");
  cfg.agent_count = 2;
  const std::vector<Point2> pts{{1.0 / 3.0, 0.1}, {7.123456789012345, 4.5}};
  cfg.initial_positions = pts;
  const std::vector<Point2> resolved = resolve_positions(cfg);
  REQUIRE(resolved.size() == 2);
  REQUIRE(resolved[0].x == pts[0].x);
  REQUIRE(resolved[0].y == pts[0].y);
  REQUIRE(resolved[1].x == pts[1].x);
  REQUIRE(resolved[1].y == pts[1].y);

  ScenarioConfig sampled = preset("comparison12_lloyd");
  REQUIRE(resolve_positions(sampled) ==
          sample_positions(sampled.workspace, 12, PositionSampler{42, 0.1, 0.1}));
}

TEST_CASE("clearance-aware membership shrinks the polygon", "[scenario]") {
  const ConvexPolygon unit{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  REQUIRE(contains_with_clearance(unit, {0.5, 0.5}, 0.4));
  REQUIRE_FALSE(contains_with_clearance(unit, {0.5, 0.5}, 0.6));
  REQUIRE(contains_with_clearance(unit, {0.05, 0.5}, 0.04));
  REQUIRE_FALSE(contains_with_clearance(unit, {0.05, 0.5}, 0.06));
  REQUIRE_FALSE(contains_with_clearance(unit, {1.5, 0.5}, 0.0));
}

TEST_CASE("engine construction rejects invalid configs with every problem listed",
          "[scenario]") {
  ScenarioConfig cfg = preset("validation30");
  std::get<TimerControllerParams>(cfg.controller).timers = {{0.5, 0.2, {}}};
  REQUIRE_THROWS_AS(Engine(cfg), ValidationError);

  ScenarioConfig single = preset("comparison12_lloyd");
  single.agent_count = 1;
  single.t_final = -2.0;
  try {
    Engine engine(single);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    REQUIRE(what.find("agent_count") != std::string::npos);
    REQUIRE(what.find("t_final") != std::string::npos);
  }
}
