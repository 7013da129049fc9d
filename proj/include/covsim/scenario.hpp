#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "covsim/controllers.hpp"
#include "covsim/density.hpp"
#include "covsim/geometry.hpp"
#include "covsim/quadrature.hpp"
#include "covsim/rng.hpp"

namespace covsim {

/// Rejection sampler settings for drawing initial positions.
struct PositionSampler {
  std::uint64_t seed = 42;
  double margin = 0.1;          // clearance kept from every workspace edge
  double min_separation = 0.1;  // pairwise distance floor
};

using InitialPositions = std::variant<std::vector<Point2>, PositionSampler>;
using ControllerParams = std::variant<TimerControllerParams, LloydParams, SelfTrigParams>;

/// Complete, self-contained description of one simulation run.
struct ScenarioConfig {
  int schema_version = 1;
  ConvexPolygon workspace;
  DensityField density;
  int agent_count = 0;
  InitialPositions initial_positions = PositionSampler{};
  ControllerParams controller = LloydParams{};
  double t_final = 150.0;
  double metrics_dt = 0.01;
  QuadratureSpec quad{};
  std::string output_dir = "runs/out";
  double report_nu = 0.5;          // coverage threshold used in metrics and reports
  bool allow_inadmissible = false; // run even when the initial state fails validation
};

inline const char* controller_name(const ControllerParams& c) {
  if (std::holds_alternative<TimerControllerParams>(c)) return "timer";
  if (std::holds_alternative<LloydParams>(c)) return "lloyd";
  return "selftrig";
}

/// Every config invariant violation, empty when the config is usable.
inline std::vector<std::string> config_violations(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  const auto bad = [&](const std::string& msg) { out.push_back(msg); };

  try {
    cfg.workspace.validate();
    if (cfg.workspace.empty()) bad("workspace must be a non-empty convex polygon");
  } catch (const InvalidConfig& e) {
    bad(std::string("workspace: ") + e.what());
  }
  if (cfg.density.kind == DensityField::Kind::gaussian) {
    if (!(cfg.density.coefficient > 0.0)) bad("density.coefficient must be > 0");
    if (!is_finite(cfg.density.center)) bad("density.center must be finite");
  }
  if (cfg.agent_count < 2) bad("agent_count must be at least 2");
  if (!(cfg.t_final > 0.0) || !std::isfinite(cfg.t_final)) bad("t_final must be > 0");
  if (!(cfg.metrics_dt > 0.0) || !std::isfinite(cfg.metrics_dt)) bad("metrics_dt must be > 0");
  if (!(cfg.quad.rel_tol > 0.0 && cfg.quad.rel_tol < 1.0)) bad("quad.rel_tol must be in (0, 1)");
  if (cfg.quad.max_subdivision_depth < 0) bad("quad.max_subdivision_depth must be >= 0");
  if (!(cfg.report_nu > 0.0)) bad("report_nu must be > 0");

  if (const auto* pts = std::get_if<std::vector<Point2>>(&cfg.initial_positions)) {
    if (cfg.agent_count >= 0 && pts->size() != static_cast<std::size_t>(cfg.agent_count)) {
      bad("initial_positions must list exactly agent_count points");
    }
    for (std::size_t p = 0; p != pts->size(); ++p) {
      if (!is_finite((*pts)[p])) bad("initial position " + std::to_string(p) + " is not finite");
    }
  } else {
    const auto& s = std::get<PositionSampler>(cfg.initial_positions);
    if (!(s.margin >= 0.0)) bad("initial_positions.margin must be >= 0");
    if (!(s.min_separation >= 0.0)) bad("initial_positions.min_separation must be >= 0");
  }

  if (const auto* t = std::get_if<TimerControllerParams>(&cfg.controller)) {
    if (!(t->k1 > 0.0)) bad("controller.k1 must be > 0");
    if (!(t->nu > 0.0)) bad("controller.nu must be > 0");
    if (!(t->epsilon > 0.0 && t->epsilon < 1.0)) bad("controller.epsilon must be in (0, 1)");
    if (!(t->eta_tilde_max > 0.0 && t->eta_tilde_max < t->k1)) {
      bad("controller.eta_tilde_max must be in (0, k1)");
    }
    if (!(t->L_p > 0.0)) bad("controller.L_p must be > 0");
    if (t->timers.empty()) {
      bad("controller.timers must hold one shared entry or one per agent");
    } else if (t->timers.size() != 1 &&
               t->timers.size() != static_cast<std::size_t>(cfg.agent_count)) {
      bad("controller.timers must hold one shared entry or one per agent");
    }
    for (const TimerParams& w : t->timers) {
      if (!(w.T1 > 0.0 && w.T1 <= w.T2)) bad("timer window must satisfy 0 < T1 <= T2");
    }
  } else if (const auto* l = std::get_if<LloydParams>(&cfg.controller)) {
    if (!(l->k2 > 0.0)) bad("controller.k2 must be > 0");
    if (!(l->dt > 0.0)) bad("controller.dt must be > 0");
  } else {
    const auto& s = std::get<SelfTrigParams>(cfg.controller);
    if (!(s.kappa > 0.0)) bad("controller.kappa must be > 0");
    if (!(s.v > 0.0)) bad("controller.v must be > 0");
    if (!(s.tau_min > 0.0 && s.tau_min <= s.tau_max)) {
      bad("controller sampling window must satisfy 0 < tau_min <= tau_max");
    }
  }
  return out;
}

/// Membership with at least `clearance` distance from every edge line.
inline bool contains_with_clearance(const ConvexPolygon& poly, Point2 z, double clearance) {
  const std::size_t m = poly.vertices.size();
  if (m < 3) return false;
  for (std::size_t e2 = 0, e1 = m - 1; e2 != m; e1 = e2++) {
    const Point2 edge = poly.vertices[e2] - poly.vertices[e1];
    const double len = norm(edge);
    if (cross(edge, z - poly.vertices[e1]) < clearance * len) return false;
  }
  return true;
}

/// Rejection-sample `count` positions with edge clearance and pairwise spacing.
inline std::vector<Point2> sample_positions(const ConvexPolygon& workspace, int count,
                                            const PositionSampler& sampler) {
  double xmin = workspace.vertices[0].x, xmax = xmin;
  double ymin = workspace.vertices[0].y, ymax = ymin;
  for (const Point2& v : workspace.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  UniformStream stream(sampler.seed, 0);
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(count));
  const long long max_attempts = 200000LL * std::max(count, 1);
  for (long long attempt = 0; static_cast<int>(out.size()) < count; ++attempt) {
    if (attempt >= max_attempts) {
      throw InvalidConfig("position sampling failed; margin or separation too strict");
    }
    const Point2 z{stream.next_in(xmin, xmax), stream.next_in(ymin, ymax)};
    if (!contains_with_clearance(workspace, z, sampler.margin)) continue;
    bool spaced = true;
    for (const Point2& w : out) {
      if (distance(z, w) < sampler.min_separation) spaced = false;
    }
    if (spaced) out.push_back(z);
  }
  return out;
}

/// Initial positions of the config, sampling them when not explicit.
inline std::vector<Point2> resolve_positions(const ScenarioConfig& cfg) {
  if (const auto* pts = std::get_if<std::vector<Point2>>(&cfg.initial_positions)) {
    return *pts;
  }
  return sample_positions(cfg.workspace, cfg.agent_count,
                          std::get<PositionSampler>(cfg.initial_positions));
}

inline ConvexPolygon benchmark_workspace() {
  return ConvexPolygon{{{0.0, 2.0},
                        {4.0, 0.0},
                        {11.0, 0.0},
                        {15.0, 3.0},
                        {14.0, 8.0},
                        {7.0, 11.0},
                        {1.0, 8.0}}};
}

inline std::vector<std::string> preset_names() {
  return {"validation30", "comparison12_lloyd", "comparison12_selftrig", "comparison12_timer"};
}

/// Built-in scenarios sharing one heptagonal workspace and one gaussian density.
inline ScenarioConfig preset(const std::string& name) {
  ScenarioConfig cfg;
  cfg.workspace = benchmark_workspace();
  cfg.density = DensityField::gaussian({7.5, 4.5}, 0.03);
  cfg.t_final = 150.0;
  cfg.metrics_dt = 0.01;
  cfg.initial_positions = PositionSampler{42, 0.1, 0.1};
  cfg.output_dir = "runs/" + name;

  if (name == "validation30") {
    cfg.agent_count = 30;
    TimerControllerParams t;
    t.k1 = 0.525;
    t.nu = 0.7;
    t.epsilon = 1e-8;
    t.eta_tilde_max = 0.4;
    t.L_p = 5.0;
    t.timers = {TimerParams{0.01, 0.03, {}}};
    cfg.controller = t;
    cfg.report_nu = t.nu;
    return cfg;
  }
  if (name == "comparison12_lloyd") {
    cfg.agent_count = 12;
    cfg.controller = LloydParams{1.0, 0.01};
    cfg.report_nu = 0.5;
    return cfg;
  }
  if (name == "comparison12_selftrig") {
    cfg.agent_count = 12;
    SelfTrigParams s;
    s.kappa = 1.0;
    s.v = 0.35;
    s.tau_min = 0.01;
    s.tau_max = 0.75;
    cfg.controller = s;
    cfg.report_nu = 0.5;
    return cfg;
  }
  if (name == "comparison12_timer") {
    cfg.agent_count = 12;
    TimerControllerParams t;
    t.k1 = 0.5;
    t.nu = 0.5;
    t.epsilon = 1e-8;
    t.eta_tilde_max = 0.3;
    t.L_p = 5.0;
    t.timers = {TimerParams{0.2, 0.65, {}}};
    cfg.controller = t;
    cfg.report_nu = t.nu;
    return cfg;
  }
  throw UnknownPreset("unknown preset '" + name + "'");
}

}  // namespace covsim
