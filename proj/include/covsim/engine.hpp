#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "covsim/controllers.hpp"
#include "covsim/quadrature.hpp"
#include "covsim/scenario.hpp"

namespace covsim {

struct AgentState {
  Point2 position{};
  Point2 control{};   // held velocity command
  double timer = 0.0; // time left until this agent's next event
};

struct EnsembleState {
  std::vector<AgentState> agents;
  double t = 0.0;
  long long j = 0;
};

/// One control computation: the sampled error, the new command, the new timer.
struct HybridEvent {
  double t = 0.0;
  long long j_before = 0;
  std::size_t agent = 0;
  Point2 e_sample{};
  Point2 eta_new{};
  double tau_new = 0.0;
};

struct MetricsRow {
  double t = 0.0;
  std::vector<double> e_norm;
  std::vector<double> eta_tilde_norm;
  double cost = 0.0;
  bool covered = false;
  bool in_U = false;
};

struct SimulationTrace {
  std::vector<HybridEvent> events;
  std::vector<MetricsRow> metrics;
  std::vector<std::vector<Point2>> sampled_positions;  // aligned with metrics
  std::vector<long long> events_per_agent;
  EnsembleState final_state;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Position-level admissibility: finite, inside the workspace, pairwise distinct.
inline std::vector<std::string> position_violations(const std::vector<Point2>& positions,
                                                    const ConvexPolygon& workspace) {
  std::vector<std::string> out;
  for (std::size_t p = 0; p != positions.size(); ++p) {
    if (!is_finite(positions[p])) {
      out.push_back("agent " + std::to_string(p) + " position is not finite");
    } else if (!workspace.contains(positions[p], eps_geom)) {
      out.push_back("agent " + std::to_string(p) + " starts outside the workspace");
    }
  }
  for (std::size_t p = 0; p != positions.size(); ++p) {
    for (std::size_t q = p + 1; q != positions.size(); ++q) {
      if (is_finite(positions[p]) && is_finite(positions[q]) &&
          distance(positions[p], positions[q]) <= eps_geom) {
        out.push_back("agents " + std::to_string(p) + " and " + std::to_string(q) +
                      " start at coincident positions");
      }
    }
  }
  return out;
}

/// Checks every admissibility clause of the initial state and reports all
/// failures: positions inside the workspace and pairwise distinct for every
/// controller; for the timer controller also |eta_p| <= k1, timers inside
/// [T1, T2], and the hold error within its budget.
inline ValidationReport validate_initial(const EnsembleState& state, const ScenarioConfig& cfg) {
  ValidationReport report;
  const auto bad = [&](const std::string& msg) { report.violations.push_back(msg); };
  const std::size_t n = state.agents.size();
  if (n != static_cast<std::size_t>(cfg.agent_count) || n < 2) {
    bad("state must hold agent_count >= 2 agents");
    return report;
  }
  std::vector<Point2> positions(n);
  for (std::size_t p = 0; p != n; ++p) positions[p] = state.agents[p].position;

  for (const std::string& msg : position_violations(positions, cfg.workspace)) bad(msg);
  if (!report.violations.empty()) return report;

  if (const auto* timer = std::get_if<TimerControllerParams>(&cfg.controller)) {
    const double norm_slack = 1.0 + 1e-12;
    for (std::size_t p = 0; p != n; ++p) {
      if (norm(state.agents[p].control) > timer->k1 * norm_slack) {
        bad("agent " + std::to_string(p) + " starts with |eta| above k1");
      }
      const TimerParams& w = timer->timer_for(p);
      if (!(state.agents[p].timer >= w.T1 && state.agents[p].timer <= w.T2)) {
        bad("agent " + std::to_string(p) + " timer starts outside [T1, T2]");
      }
    }
    for (std::size_t p = 0; p != n; ++p) {
      const Point2 e = tracking_error(p, positions, cfg.workspace, cfg.density, cfg.quad);
      const Point2 ht = sample_hold_error(state.agents[p].control, e, *timer);
      if (norm(ht) > timer->eta_tilde_max + 1e-12) {
        bad("agent " + std::to_string(p) + " starts with hold error above eta_tilde_max");
      }
    }
  }
  return report;
}

/// Affine flow of held-velocity agents: positions advance by control * dt,
/// every timer decreases by dt, t advances by dt. Throws FlowOvershoot when
/// dt would push any timer below zero.
inline void flow(EnsembleState& state, double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw FlowOvershoot("flow needs a finite dt >= 0");
  double min_timer = std::numeric_limits<double>::infinity();
  for (const AgentState& a : state.agents) min_timer = std::min(min_timer, a.timer);
  if (dt > min_timer) throw FlowOvershoot("flow step exceeds the smallest remaining timer");
  for (AgentState& a : state.agents) {
    a.position = a.position + dt * a.control;
    a.timer -= dt;
  }
  state.t += dt;
}

/// Timer-controller jump map applied to every agent whose timer reached zero,
/// in ascending agent order. Positions are untouched; j advances once per
/// jumping agent. Returns the number of jumps; appends to `log` when given.
/// Throws NotInJumpSet when no timer has expired.
inline int jump(EnsembleState& state, const ScenarioConfig& cfg,
                std::vector<UniformStream>& reset_streams,
                std::vector<HybridEvent>* log = nullptr) {
  const auto* params = std::get_if<TimerControllerParams>(&cfg.controller);
  if (params == nullptr) throw InvalidConfig("jump map applies to the timer controller");
  bool any_due = false;
  for (const AgentState& a : state.agents) any_due = any_due || a.timer <= 0.0;
  if (!any_due) throw NotInJumpSet("no timer has expired");

  std::vector<Point2> positions(state.agents.size());
  for (std::size_t p = 0; p != state.agents.size(); ++p) positions[p] = state.agents[p].position;

  int jumps = 0;
  for (std::size_t p = 0; p != state.agents.size(); ++p) {
    if (state.agents[p].timer > 0.0) continue;
    const Point2 e = tracking_error(p, positions, cfg.workspace, cfg.density, cfg.quad);
    const JumpOutcome out =
        timer_controller_jump(e, *params, params->timer_for(p), reset_streams[p]);
    if (log != nullptr) {
      log->push_back({state.t, state.j, p, e, out.eta_new, out.tau_new});
    }
    state.agents[p].control = out.eta_new;
    state.agents[p].timer = out.tau_new;
    state.j += 1;
    jumps += 1;
  }
  return jumps;
}

/// Event-driven simulation of one scenario. Every run() call rebuilds its
/// random streams, so repeated runs of one config are identical.
class Engine {
 public:
  explicit Engine(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    const std::vector<std::string> problems = config_violations(cfg_);
    if (!problems.empty()) throw ValidationError(join(problems));
    positions0_ = resolve_positions(cfg_);
  }

  const ScenarioConfig& config() const { return cfg_; }
  const std::vector<Point2>& initial_positions() const { return positions0_; }

  /// Post-initialization state: held commands computed from the t = 0
  /// configuration and timers armed, without running the simulation.
  EnsembleState initial_state() const {
    Machinery m(cfg_, positions0_);
    return m.state;
  }

  SimulationTrace run() const {
    if (!cfg_.allow_inadmissible) {
      const std::vector<std::string> problems =
          position_violations(positions0_, cfg_.workspace);
      if (!problems.empty()) throw ValidationError(join(problems));
    }
    std::optional<Machinery> machinery;
    try {
      machinery.emplace(cfg_, positions0_);
    } catch (const Error& err) {
      throw EngineAbort("run aborted at t=0 j=0: " + std::string(err.what()));
    }
    Machinery& m = *machinery;
    if (!cfg_.allow_inadmissible) {
      const ValidationReport report = validate_initial(m.state, cfg_);
      if (!report.ok()) throw ValidationError(join(report.violations));
    }
    SimulationTrace trace;
    trace.events = std::move(m.init_events);
    trace.events_per_agent.assign(positions0_.size(), 1);
    try {
      main_loop(m, trace);
    } catch (const EngineAbort&) {
      throw;
    } catch (const Error& err) {
      throw EngineAbort("run aborted at t=" + std::to_string(m.state.t) +
                        " j=" + std::to_string(m.state.j) + ": " + err.what());
    }
    trace.final_state = std::move(m.state);
    return trace;
  }

 private:
  static std::string join(const std::vector<std::string>& parts) {
    std::string all;
    for (const std::string& s : parts) {
      if (!all.empty()) all += "; ";
      all += s;
    }
    return all;
  }

  /// Per-run mutable state. Event deadlines of fixed-period schedules are
  /// computed as k * period from an integer index, never by accumulation,
  /// so whether a final event lands exactly at t_final is deterministic.
  struct Machinery {
    const ScenarioConfig& cfg;
    const TimerControllerParams* timer = nullptr;
    const LloydParams* lloyd = nullptr;
    const SelfTrigParams* selftrig = nullptr;
    EnsembleState state;
    std::vector<UniformStream> streams;
    std::vector<double> deadline;
    std::vector<long long> grid_index;   // next deadline index on fixed-period grids
    std::vector<double> grid_period;     // 0 when the agent draws gaps instead
    std::vector<Point2> target;          // selftrig held centroid samples
    std::vector<HybridEvent> init_events;

    Machinery(const ScenarioConfig& config, const std::vector<Point2>& positions0)
        : cfg(config) {
      timer = std::get_if<TimerControllerParams>(&cfg.controller);
      lloyd = std::get_if<LloydParams>(&cfg.controller);
      selftrig = std::get_if<SelfTrigParams>(&cfg.controller);
      const std::size_t n = positions0.size();
      state.agents.resize(n);
      for (std::size_t p = 0; p != n; ++p) state.agents[p].position = positions0[p];
      deadline.assign(n, 0.0);
      grid_index.assign(n, 1);
      grid_period.assign(n, 0.0);
      target.assign(n, Point2{});
      std::uint64_t seed = 0;
      if (timer != nullptr) seed = timer->timers.front().reset.seed;
      if (selftrig != nullptr) seed = selftrig->event_policy.seed;
      streams.reserve(n);
      for (std::size_t p = 0; p != n; ++p) streams.emplace_back(seed, p);
      init_at_zero();
    }

    std::vector<Point2> positions() const {
      std::vector<Point2> out(state.agents.size());
      for (std::size_t p = 0; p != out.size(); ++p) out[p] = state.agents[p].position;
      return out;
    }

    /// t = 0 control computation for every agent, logged as one event each.
    void init_at_zero() {
      const std::vector<Point2> pos = positions();
      for (std::size_t p = 0; p != pos.size(); ++p) {
        const ConvexPolygon cell = voronoi_cell(pos, p, cfg.workspace);
        const Point2 c = weighted_centroid(cell, cfg.density, cfg.quad);
        const Point2 e = c - pos[p];
        double tau0 = 0.0;
        if (timer != nullptr) {
          const TimerParams& w = timer->timer_for(p);
          state.agents[p].control = timer->k1 * sat(e, timer->nu_tilde());
          if (w.reset.kind == ResetPolicyKind::always_T2) {
            tau0 = w.T2;
            grid_period[p] = w.T2;
            deadline[p] = w.T2;
          } else {
            tau0 = streams[p].next_in(w.T1, w.T2);
            deadline[p] = tau0;
          }
        } else if (lloyd != nullptr) {
          state.agents[p].control = lloyd_control(e, lloyd->k2);
          tau0 = lloyd->dt;
          grid_period[p] = lloyd->dt;
          deadline[p] = lloyd->dt;
        } else {
          target[p] = c;
          state.agents[p].control = selftrig_control(c, pos[p], *selftrig);
          if (selftrig->event_policy.kind == SelfTrigEventPolicyKind::periodic) {
            tau0 = selftrig->tau_min;
            grid_period[p] = selftrig->tau_min;
            deadline[p] = selftrig->tau_min;
          } else {
            tau0 = streams[p].next_in(selftrig->tau_min, selftrig->tau_max);
            deadline[p] = tau0;
          }
        }
        state.agents[p].timer = tau0;
        init_events.push_back({0.0, 0, p, e, state.agents[p].control, tau0});
      }
    }

    double next_event_time() const {
      double t = std::numeric_limits<double>::infinity();
      for (double d : deadline) t = std::min(t, d);
      return t;
    }

    /// Lands exactly on t_target; timers are recomputed from deadlines so an
    /// expiring timer reads exactly zero.
    void advance_to(double t_target) {
      const double dt = t_target - state.t;
      for (std::size_t p = 0; p != state.agents.size(); ++p) {
        AgentState& a = state.agents[p];
        if (selftrig != nullptr) {
          a.position = pursue(a.position, target[p], selftrig->kappa, selftrig->v, dt);
          a.control = selftrig_control(target[p], a.position, *selftrig);
        } else {
          a.position = a.position + dt * a.control;
        }
      }
      state.t = t_target;
      for (std::size_t p = 0; p != state.agents.size(); ++p) {
        state.agents[p].timer = deadline[p] - state.t;
      }
    }

    /// Closed-form motion toward a fixed target: straight at speed v while
    /// farther than v/kappa, then exponential decay of the remaining distance.
    static Point2 pursue(Point2 x, Point2 c, double kappa, double v, double dt) {
      const Point2 to = c - x;
      double d = norm(to);
      if (!(d > 0.0) || dt <= 0.0) return x;
      const Point2 dir = to / d;
      const double r = v / kappa;
      double remaining = dt;
      if (d > r) {
        const double linear_time = (d - r) / v;
        if (remaining <= linear_time) return x + (v * remaining) * dir;
        remaining -= linear_time;
        d = r;
      }
      return c - (d * std::exp(-kappa * remaining)) * dir;
    }

    /// Control computation of every agent whose deadline arrived, ascending.
    void fire_due_events(SimulationTrace& trace) {
      const std::vector<Point2> pos = positions();
      for (std::size_t p = 0; p != pos.size(); ++p) {
        if (deadline[p] > state.t) continue;
        const ConvexPolygon cell = voronoi_cell(pos, p, cfg.workspace);
        const Point2 c = weighted_centroid(cell, cfg.density, cfg.quad);
        const Point2 e = c - pos[p];
        double tau_new = 0.0;
        if (timer != nullptr) {
          const TimerParams& w = timer->timer_for(p);
          state.agents[p].control = timer->k1 * sat(e, timer->nu_tilde());
          if (w.reset.kind == ResetPolicyKind::always_T2) {
            grid_index[p] += 1;
            tau_new = w.T2;
            deadline[p] = static_cast<double>(grid_index[p]) * grid_period[p];
          } else {
            tau_new = streams[p].next_in(w.T1, w.T2);
            deadline[p] = state.t + tau_new;
          }
        } else if (lloyd != nullptr) {
          state.agents[p].control = lloyd_control(e, lloyd->k2);
          grid_index[p] += 1;
          tau_new = lloyd->dt;
          deadline[p] = static_cast<double>(grid_index[p]) * grid_period[p];
        } else {
          target[p] = c;
          state.agents[p].control = selftrig_control(c, pos[p], *selftrig);
          if (selftrig->event_policy.kind == SelfTrigEventPolicyKind::periodic) {
            grid_index[p] += 1;
            tau_new = selftrig->tau_min;
            deadline[p] = static_cast<double>(grid_index[p]) * grid_period[p];
          } else {
            tau_new = streams[p].next_in(selftrig->tau_min, selftrig->tau_max);
            deadline[p] = state.t + tau_new;
          }
        }
        trace.events.push_back({state.t, state.j, p, e, state.agents[p].control, tau_new});
        trace.events_per_agent[p] += 1;
        state.agents[p].timer = deadline[p] - state.t;
        state.j += 1;
      }
    }
  };

  void main_loop(Machinery& m, SimulationTrace& trace) const {
    const std::size_t n = positions0_.size();
    const double in_u_threshold =
        m.timer != nullptr
            ? m.timer->eta_tilde_max * m.timer->nu_tilde() / m.timer->k1
            : 0.0;

    const long long grid_count =
        static_cast<long long>(std::floor(cfg_.t_final / cfg_.metrics_dt + 1e-9));
    long long next_sample = 0;
    while (true) {
      // Past the grid end only when the grid missed t_final; one extra sample.
      const double t_metric =
          next_sample <= grid_count
              ? std::min(static_cast<double>(next_sample) * cfg_.metrics_dt, cfg_.t_final)
              : cfg_.t_final;
      const double t_event = m.next_event_time();
      if (t_event < t_metric && t_event < cfg_.t_final) {
        m.advance_to(t_event);
        m.fire_due_events(trace);
        continue;
      }
      m.advance_to(t_metric);
      sample_metrics(m, trace, in_u_threshold, n);
      next_sample += 1;
      if (t_metric >= cfg_.t_final) break;
    }
  }

  void sample_metrics(Machinery& m, SimulationTrace& trace, double in_u_threshold,
                      std::size_t n) const {
    const std::vector<Point2> pos = m.positions();
    MetricsRow row;
    row.t = m.state.t;
    row.e_norm.resize(n);
    row.eta_tilde_norm.assign(n, 0.0);
    double cost = 0.0;
    bool covered = true;
    bool in_u = true;
    for (std::size_t p = 0; p != n; ++p) {
      const ConvexPolygon cell = voronoi_cell(pos, p, cfg_.workspace);
      const Point2 c = weighted_centroid(cell, cfg_.density, cfg_.quad);
      const Point2 e = c - pos[p];
      row.e_norm[p] = norm(e);
      cost += cell_cost(pos[p], cell, cfg_.density, cfg_.quad);
      if (m.timer != nullptr) {
        row.eta_tilde_norm[p] = norm(sample_hold_error(m.state.agents[p].control, e, *m.timer));
        if (row.e_norm[p] < in_u_threshold) in_u = false;
      }
      if (row.e_norm[p] > cfg_.report_nu) covered = false;
    }
    row.cost = cost;
    row.covered = covered;
    row.in_U = m.timer != nullptr ? in_u : true;
    trace.metrics.push_back(std::move(row));
    trace.sampled_positions.push_back(pos);
  }

  ScenarioConfig cfg_;
  std::vector<Point2> positions0_;
};

/// Convenience wrapper: build the engine and run the scenario.
inline SimulationTrace run_scenario(const ScenarioConfig& cfg) { return Engine(cfg).run(); }

}  // namespace covsim
