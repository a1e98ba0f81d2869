#pragma once
/**
 * @file metrics.hpp
 * @brief Driving score, violations per kilometer, the ownership trace invariant and takeover scoring.
 */

#include <argus/sim/report.hpp>

#include <map>

namespace argus::sim {

/**
 * Counts frames that break the ownership invariant: a mitigator-owned frame must be free of
 * violations, and a violation in an ADS-owned frame must coincide with a takeover in that frame or
 * the next one.
 */
inline int check_eq8(const std::vector<FrameRecord>& records)
{
  int breaches = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const FrameRecord& r = records[i];
    if (r.violations.empty()) {
      continue;
    }
    if (r.owner == Owner::Mitigator) {
      ++breaches;
      continue;
    }
    const bool fired_now = r.decision.takeover_fired;
    const bool fired_next = i + 1 < records.size() && records[i + 1].decision.takeover_fired;
    if (!fired_now && !fired_next) {
      ++breaches;
    }
  }
  return breaches;
}

/// Rebuilds the run report from a complete trace. The harness and replay both use this.
inline RunReport compute_report(const RunTrace& trace)
{
  RunReport rep;
  rep.scenario = trace.scenario.name;
  rep.argus = trace.config.argus;
  rep.noise = trace.config.noise;
  rep.frames = static_cast<int>(trace.records.size());
  const double dt = trace.dt();
  double meters = 0.0;
  for (const auto& r : trace.records) {
    meters += r.ego.v * dt;
    for (const auto& v : r.violations) {
      rep.violations.push_back(v);
      rep.infraction_score *= v.penalty;
    }
    if (r.decision.takeover_fired && r.cause) {
      rep.takeovers.push_back({r.frame, *r.cause, std::nullopt});
    }
    if (r.decision.control_returned && !rep.takeovers.empty()) {
      rep.takeovers.back().return_frame = r.frame;
    }
  }
  rep.distance_km = meters / 1000.0;
  const double progress = trace.records.empty() ? 0.0 : trace.records.back().progress;
  rep.route_completion = 100.0 * std::min(1.0, progress / trace.scenario.route_length());
  rep.driving_score = rep.route_completion * rep.infraction_score;
  rep.success = rep.violations.empty() && rep.route_completion >= 100.0;
  rep.eq8_violations = check_eq8(trace.records);

  rep.end_reason = EndReason::TimeLimit;
  if (rep.route_completion >= 100.0) {
    rep.end_reason = EndReason::RouteComplete;
  }
  if (!rep.violations.empty()) {
    const ViolationKind last = rep.violations.back().kind;
    if (is_collision(last)) {
      rep.end_reason = EndReason::Collision;
    } else if (last == ViolationKind::StallTimeout) {
      rep.end_reason = EndReason::StallTimeout;
    }
  }
  return rep;
}

struct BenchmarkSummary
{
  int runs{0};
  double success_rate{0.0};      ///< percent
  double route_completion{0.0};  ///< mean percent
  double driving_score{0.0};     ///< mean percent
  double distance_km{0.0};
  std::map<ViolationKind, int> counts;
  double collisions_per_km{0.0};
  double stops_per_km{0.0};   ///< stop-sign and red-light events
  double stalls_per_km{0.0};

  [[nodiscard]] int count(ViolationKind k) const
  {
    const auto it = counts.find(k);
    return it == counts.end() ? 0 : it->second;
  }

  [[nodiscard]] double per_km(ViolationKind k) const
  {
    return distance_km > 0.0 ? count(k) / distance_km : 0.0;
  }
};

inline BenchmarkSummary aggregate(const std::vector<RunReport>& reports)
{
  if (reports.empty()) {
    throw std::invalid_argument("aggregate: no reports");
  }
  BenchmarkSummary s;
  s.runs = static_cast<int>(reports.size());
  int successes = 0;
  int coll = 0;
  int stop = 0;
  int stall = 0;
  for (const auto& r : reports) {
    successes += r.success ? 1 : 0;
    s.route_completion += r.route_completion;
    s.driving_score += r.route_completion * r.infraction_score;
    s.distance_km += r.distance_km;
    for (const auto& v : r.violations) {
      ++s.counts[v.kind];
      if (is_collision(v.kind)) {
        ++coll;
      } else if (is_signal(v.kind)) {
        ++stop;
      } else {
        ++stall;
      }
    }
  }
  const double n = static_cast<double>(reports.size());
  s.success_rate = 100.0 * successes / n;
  s.route_completion /= n;
  s.driving_score /= n;
  if (s.distance_km > 0.0) {
    s.collisions_per_km = coll / s.distance_km;
    s.stops_per_km = stop / s.distance_km;
    s.stalls_per_km = stall / s.distance_km;
  }
  return s;
}

/// Takeover times (seconds) of a run.
inline std::vector<double> takeover_times(const RunReport& r, double dt)
{
  std::vector<double> out;
  for (const auto& t : r.takeovers) {
    out.push_back(t.frame * dt);
  }
  return out;
}

/// Violation labels (seconds) of a run; stalls and signal violations span from their onset.
inline std::vector<ViolationLabel> violation_labels(const RunReport& r, double dt)
{
  std::vector<ViolationLabel> out;
  for (const auto& v : r.violations) {
    const double t = v.frame * dt;
    out.push_back({v.onset_frame ? *v.onset_frame * dt : t, t});
  }
  return out;
}

/// Scores the takeovers of an Argus-on run against the violations its Argus-off twin incurred.
inline TakeoverScore score_takeovers(const RunReport& with_argus, const RunReport& without_argus,
                                     double dt, double window = 3.0)
{
  return argus::score_takeovers(takeover_times(with_argus, dt),
                                violation_labels(without_argus, dt), window);
}

}  // namespace argus::sim
