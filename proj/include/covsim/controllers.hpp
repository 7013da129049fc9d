#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "covsim/geometry.hpp"
#include "covsim/quadrature.hpp"
#include "covsim/rng.hpp"

namespace covsim {

/// Normalizing saturation: x/c inside the ball of radius c, x/|x| outside.
/// The output never exceeds unit norm.
inline Point2 sat(Point2 x, double c) {
  if (!(c > 0.0)) throw InvalidConfig("saturation radius must be positive");
  const double n = norm(x);
  if (n <= c) return x / c;
  return x / n;
}

/// Conventional clamp: identity inside the ball of radius a, radial
/// projection onto it outside.
inline Point2 clamp_sat(Point2 s, double a) {
  if (!(a > 0.0)) throw InvalidConfig("clamp radius must be positive");
  const double n = norm(s);
  if (n <= a) return s;
  return (a / n) * s;
}

/// How an expired timer is re-armed.
enum class ResetPolicyKind { always_T2, uniform_random };

struct ResetPolicy {
  ResetPolicyKind kind = ResetPolicyKind::always_T2;
  std::uint64_t seed = 0;  // uniform_random only
};

/// Per-agent timer window 0 < T1 <= T2 plus the reset rule.
struct TimerParams {
  double T1 = 0.0;
  double T2 = 0.0;
  ResetPolicy reset{};
};

/// Gains and tolerances of the intermittent sample-and-hold controller.
struct TimerControllerParams {
  double k1 = 0.0;
  double nu = 0.0;
  double epsilon = 0.0;        // shrinks nu to nu_tilde = (1 - epsilon) * nu
  double eta_tilde_max = 0.0;  // hold-error budget, must stay below k1
  double L_p = 5.0;            // Lipschitz constant estimate for the centroid map
  std::vector<TimerParams> timers;  // size 1 = shared by all agents, else one per agent

  double nu_tilde() const { return (1.0 - epsilon) * nu; }

  const TimerParams& timer_for(std::size_t agent) const {
    return timers.size() == 1 ? timers.front() : timers.at(agent);
  }
};

/// Continuous benchmark: u_p = k2 * e_p integrated with forward Euler at dt.
struct LloydParams {
  double k2 = 1.0;
  double dt = 0.01;
};

/// How the self-triggered baseline schedules its next sample.
enum class SelfTrigEventPolicyKind { periodic, uniform_random };

struct SelfTrigEventPolicy {
  SelfTrigEventPolicyKind kind = SelfTrigEventPolicyKind::periodic;
  std::uint64_t seed = 0;  // uniform_random only
};

/// Speed-capped pursuit of the last sampled centroid, re-sampled at
/// policy-chosen instants no closer than tau_min and no farther than tau_max.
struct SelfTrigParams {
  double kappa = 1.0;
  double v = 0.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  SelfTrigEventPolicy event_policy{};
};

/// Centroid-tracking error e_p = c_p(x) - x_p for the agent's Voronoi cell.
inline Point2 tracking_error(std::size_t agent, const std::vector<Point2>& positions,
                             const ConvexPolygon& workspace, const DensityField& density,
                             const QuadratureSpec& quad) {
  const ConvexPolygon cell = voronoi_cell(positions, agent, workspace);
  return weighted_centroid(cell, density, quad) - positions[agent];
}

struct JumpOutcome {
  Point2 eta_new{};
  double tau_new = 0.0;
};

/// Jump map of one agent: re-aim the held velocity at the sampled error and
/// re-arm the timer per the reset policy. `stream` feeds uniform_random resets.
inline JumpOutcome timer_controller_jump(Point2 e_p, const TimerControllerParams& params,
                                         const TimerParams& timer, UniformStream& stream) {
  JumpOutcome out;
  out.eta_new = params.k1 * sat(e_p, params.nu_tilde());
  out.tau_new = timer.reset.kind == ResetPolicyKind::always_T2
                    ? timer.T2
                    : stream.next_in(timer.T1, timer.T2);
  return out;
}

/// Mismatch between the held velocity and the one a fresh sample would give.
inline Point2 sample_hold_error(Point2 eta_p, Point2 e_p, const TimerControllerParams& params) {
  return eta_p - params.k1 * sat(e_p, params.nu_tilde());
}

/// Largest T2 for which the hold-error budget is provably respected.
inline double max_dwell_time(const TimerControllerParams& params, std::size_t agent_count) {
  if (agent_count < 2) throw InvalidConfig("dwell-time bound needs at least 2 agents");
  const double growth = params.L_p * std::sqrt(static_cast<double>(agent_count)) + 1.0;
  return params.eta_tilde_max * params.nu_tilde() / (params.k1 * params.k1 * growth);
}

/// Largest k1 for which a given T2 respects the hold-error budget.
/// Inverse of max_dwell_time: feeding its output back as T2 returns k1.
inline double max_gain(const TimerControllerParams& params, double T2, std::size_t agent_count) {
  if (agent_count < 2) throw InvalidConfig("gain bound needs at least 2 agents");
  if (!(T2 > 0.0)) throw InvalidConfig("gain bound needs T2 > 0");
  const double growth = params.L_p * std::sqrt(static_cast<double>(agent_count)) + 1.0;
  return std::sqrt(params.eta_tilde_max * params.nu_tilde() / (T2 * growth));
}

/// Proportional centroid pursuit of the continuous benchmark.
inline Point2 lloyd_control(Point2 e_p, double k2) { return k2 * e_p; }

/// Velocity toward the held centroid sample, capped at speed v.
inline Point2 selftrig_control(Point2 c_sampled, Point2 x_p, const SelfTrigParams& params) {
  return params.kappa * clamp_sat(c_sampled - x_p, params.v / params.kappa);
}

}  // namespace covsim
