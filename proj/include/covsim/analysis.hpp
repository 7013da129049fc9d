#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "covsim/engine.hpp"

namespace covsim {

/// When and how well the run reached max_p |e_p| <= nu.
struct CoverageReport {
  double nu = 0.0;
  std::optional<double> first_time_covered;  // empty when the final sample violates
  double final_max_error = 0.0;
  std::vector<double> per_agent_final_error;
};

/// first_time_covered is the earliest sample time from which every later
/// sample (inclusive) keeps all agents within nu.
inline CoverageReport coverage_report(const SimulationTrace& trace, double nu) {
  if (trace.metrics.empty()) throw InvalidConfig("coverage report needs a sampled trace");
  if (!(nu >= 0.0)) throw InvalidConfig("coverage threshold must be >= 0");
  CoverageReport report;
  report.nu = nu;
  const MetricsRow& last = trace.metrics.back();
  report.per_agent_final_error = last.e_norm;
  report.final_max_error = 0.0;
  for (double e : last.e_norm) report.final_max_error = std::max(report.final_max_error, e);

  const auto row_covered = [&](const MetricsRow& row) {
    for (double e : row.e_norm) {
      if (e > nu) return false;
    }
    return true;
  };
  std::optional<double> first;
  for (std::size_t i = trace.metrics.size(); i-- > 0;) {
    if (!row_covered(trace.metrics[i])) break;
    first = trace.metrics[i].t;
  }
  report.first_time_covered = first;
  return report;
}

struct EtaTildeViolation {
  double t = 0.0;
  std::size_t agent = 0;
  double value = 0.0;
};

/// Largest sampled hold error and every sample exceeding the budget.
struct EtaTildeAudit {
  double max_value = 0.0;
  std::vector<EtaTildeViolation> violations;
};

inline EtaTildeAudit eta_tilde_audit(const SimulationTrace& trace, double eta_tilde_max) {
  EtaTildeAudit audit;
  for (const MetricsRow& row : trace.metrics) {
    for (std::size_t p = 0; p != row.eta_tilde_norm.size(); ++p) {
      const double v = row.eta_tilde_norm[p];
      audit.max_value = std::max(audit.max_value, v);
      if (v > eta_tilde_max) audit.violations.push_back({row.t, p, v});
    }
  }
  return audit;
}

/// One run presented to the resource accountant.
struct NamedTrace {
  std::string name;
  std::string controller;  // "timer", "lloyd" or "selftrig"
  const SimulationTrace* trace = nullptr;
};

struct ResourceEntry {
  std::string name;
  std::string controller;
  std::vector<long long> events_per_agent;
  long long total_events = 0;
  long long voronoi_computations = 0;  // one cell + centroid per logged event
  double total_cost_units = 0.0;       // unit price per event
  bool events_only_undercount = false; // selftrig monitoring overhead is not logged
  double ratio_vs_benchmark = std::numeric_limits<double>::quiet_NaN();
};

struct ResourceReport {
  std::vector<ResourceEntry> entries;
};

/// Event and Voronoi-computation accounting across runs over one horizon.
/// Ratios are taken against the lloyd entry when one is present.
inline ResourceReport resource_report(const std::vector<NamedTrace>& runs) {
  if (runs.empty()) throw InvalidConfig("resource report needs at least one run");
  std::optional<double> horizon;
  for (const NamedTrace& r : runs) {
    if (r.trace == nullptr || r.trace->metrics.empty()) {
      throw InvalidConfig("resource report needs sampled traces");
    }
    const double t_end = r.trace->metrics.back().t;
    if (horizon && std::abs(*horizon - t_end) > 1e-9) {
      throw InvalidConfig("resource report traces must share one t_final");
    }
    horizon = t_end;
  }
  ResourceReport report;
  double benchmark_total = std::numeric_limits<double>::quiet_NaN();
  for (const NamedTrace& r : runs) {
    ResourceEntry entry;
    entry.name = r.name;
    entry.controller = r.controller;
    entry.events_per_agent = r.trace->events_per_agent;
    for (long long c : entry.events_per_agent) entry.total_events += c;
    entry.voronoi_computations = entry.total_events;
    entry.total_cost_units = static_cast<double>(entry.total_events);
    entry.events_only_undercount = r.controller == "selftrig";
    report.entries.push_back(std::move(entry));
    if (r.controller == "lloyd") {
      benchmark_total = static_cast<double>(report.entries.back().total_events);
    }
  }
  if (!std::isnan(benchmark_total) && benchmark_total > 0.0) {
    for (ResourceEntry& entry : report.entries) {
      entry.ratio_vs_benchmark = entry.total_cost_units / benchmark_total;
    }
  }
  return report;
}

/// Realized inter-event gap bounds per agent, from the event log.
struct GapStats {
  std::vector<double> min_gap;
  std::vector<double> max_gap;
};

inline GapStats event_gap_stats(const SimulationTrace& trace, std::size_t agent_count) {
  GapStats stats;
  stats.min_gap.assign(agent_count, std::numeric_limits<double>::infinity());
  stats.max_gap.assign(agent_count, 0.0);
  std::vector<double> last(agent_count, std::numeric_limits<double>::quiet_NaN());
  for (const HybridEvent& ev : trace.events) {
    if (ev.agent >= agent_count) continue;
    if (!std::isnan(last[ev.agent])) {
      const double gap = ev.t - last[ev.agent];
      stats.min_gap[ev.agent] = std::min(stats.min_gap[ev.agent], gap);
      stats.max_gap[ev.agent] = std::max(stats.max_gap[ev.agent], gap);
    }
    last[ev.agent] = ev.t;
  }
  return stats;
}

}  // namespace covsim
