#pragma once
/**
 * @file harness.hpp
 * @brief Closed-loop runner: snapshot, ADS stub, monitor, gate, mitigator, controller, world step.
 */

#include <argus/sim/ads.hpp>
#include <argus/sim/async_monitor.hpp>
#include <argus/sim/metrics.hpp>
#include <argus/sim/serialize.hpp>

#include <functional>

namespace argus::sim {

/// Ground-truth infraction detection. Also deactivates stop signs once the ego has stopped in them.
class ViolationTracker
{
public:
  ViolationTracker(const WorldState& w, double epsilon, double stall_timeout, PenaltyTable penalties)
  : epsilon_(epsilon), stall_timeout_(stall_timeout), penalties_(penalties),
    inside_(w.signals.size(), false), violated_(w.signals.size(), false),
    entered_(w.signals.size(), 0)
  {
  }

  /// Inspects the world after the step of frame t.
  std::vector<ViolationEvent> step(WorldState& w, int t)
  {
    std::vector<ViolationEvent> out;
    const OrientedBox& ego = w.ego.participant.box;
    for (const auto& a : w.actors) {
      if (sat_intersects(ego, a.participant.box)) {
        ViolationKind k = ViolationKind::CollisionVehicle;
        if (a.participant.kind == ActorKind::Pedestrian) {
          k = ViolationKind::CollisionPedestrian;
        } else if (a.participant.kind == ActorKind::StaticObstacle) {
          k = ViolationKind::CollisionStatic;
        }
        out.push_back({t, k, penalties_.of(k), a.participant.id, std::nullopt});
      }
    }

    bool in_active_region = false;
    for (std::size_t i = 0; i < w.signals.size(); ++i) {
      StopSignal& sig = w.signals[i];
      const bool same_approach =
        std::abs(normalize_angle(ego.center.theta - sig.pose.theta)) < std::numbers::pi / 2.0;
      const bool in = same_approach && sat_intersects(ego, signal_region_box(sig));
      if (in && !inside_[i]) {
        entered_[i] = t;
      }
      if (sig.active && in) {
        in_active_region = true;
        if (sig.kind == SignalKind::StopSign && ego.speed < epsilon_) {
          sig.active = false;
        }
      } else if (sig.active && inside_[i] && !in && !violated_[i]) {
        violated_[i] = true;
        const ViolationKind k =
          sig.kind == SignalKind::StopSign ? ViolationKind::StopSign : ViolationKind::RedLight;
        out.push_back({t, k, penalties_.of(k), sig.id, entered_[i]});
      }
      inside_[i] = in;
    }

    if (ego.speed < epsilon_ && !in_active_region) {
      if (!stall_start_) {
        stall_start_ = t;
      }
      if ((t - *stall_start_ + 1) * w.dt >= stall_timeout_ - 1e-9) {
        out.push_back({t, ViolationKind::StallTimeout, penalties_.of(ViolationKind::StallTimeout),
                       "", stall_start_});
        stall_start_.reset();
      }
    } else {
      stall_start_.reset();
    }
    return out;
  }

private:
  double epsilon_;
  double stall_timeout_;
  PenaltyTable penalties_;
  std::vector<bool> inside_;
  std::vector<bool> violated_;
  std::vector<int> entered_;  ///< frame the ego last entered each region
  std::optional<int> stall_start_;
};

struct RunResult
{
  RunReport report;
  RunTrace trace;
};

inline QueueSnapshot queue_snapshot(const BufferBank& b)
{
  return {b.collision.slots(), b.signal.slots(), b.stall.slots(), b.recovery.slots()};
}

/// Called after each frame with the advanced world and that frame's record.
using FrameObserver = std::function<void(const WorldState&, const FrameRecord&)>;

/// Runs one scenario to route completion, a terminal infraction, or the time limit.
inline RunResult run_scenario(const Scenario& s, const RunConfig& cfg,
                              const FrameObserver& observer = {})
{
  cfg.validate();
  RunResult out;
  out.trace.scenario = s;
  out.trace.config = cfg;
  auto& records = out.trace.records;

  WorldState world = make_world(s);
  std::mt19937_64 rng(s.seed);
  const std::optional<NoiseParams> noise = effective_noise(s, cfg);
  const AdsStub ads(s.ads, s.route);
  const double dt = s.dt();
  const double wheelbase = s.ego.wheelbase;

  PredictionParams pp = cfg.monitor.prediction(wheelbase);
  pp.a_max = cfg.controller.a_max;
  pp.b_comf = cfg.controller.b_comf;

  BufferBank bank(cfg.monitor);
  ControlOwner owner;
  std::optional<BevSnapshot> prev;
  std::unique_ptr<AsyncMonitor> async;
  if (cfg.argus && cfg.async_monitor) {
    async = std::make_unique<AsyncMonitor>(cfg.monitor, pp);
  }
  bool reset_pending = false;

  ViolationTracker tracker(world, cfg.monitor.epsilon, cfg.stall_timeout, cfg.penalties);
  double progress = std::max(0.0, s.route.project(world.ego.participant.box.center.position()).station);
  const double route_len = s.route_length();
  const auto frame_period = std::chrono::duration<double>(dt);

  for (int t = 0; t < s.frame_limit(); ++t) {
    FrameRecord rec;
    rec.frame = t;
    const BevSnapshot snap = snapshot(world, noise, rng);
    rec.snapshot_digest = digest_of(to_json(snap));
    rec.ego = kbm_from_box(snap.ego.box);
    const Trajectory ads_traj = ads.plan(snap);

    GateDecision decision;
    HazardReport report;
    report.frame = t;
    if (cfg.argus) {
      const bool in_takeover = owner.owner == Owner::Mitigator;
      BufferBank view;
      if (async) {
        async->submit({snap, prev.value_or(snap), ads_traj, in_takeover, reset_pending});
        reset_pending = false;
        if (auto res = async->wait_for(t, frame_period)) {
          report = res->report;
          view = std::move(res->bank);
        } else {
          view = BufferBank(cfg.monitor);
        }
      } else {
        const PredictedBoxSet boxes = predict(snap, prev.value_or(snap), ads_traj, pp);
        report = evaluate(boxes, snap, bank, cfg.monitor);
        update_buffers(report, bank, in_takeover);
        view = bank;
      }
      rec.hazard = report;
      rec.queues = queue_snapshot(view);
      auto [d, next] = decide(view, owner, cfg.monitor);
      decision = d;
      owner = next;
      if (d.takeover_fired) {
        if (async) {
          reset_pending = true;
        } else {
          bank.reset_recovery();
        }
      }
    }
    rec.decision = decision;
    rec.owner = owner.owner;
    rec.cause = owner.owner == Owner::Mitigator ? owner.takeover_cause : std::nullopt;

    Trajectory dispatched = ads_traj;
    if (decision.activate_mitigator) {
      const MitigationResult m = mitigate(snap, s.route, report, cfg.mitigator, cfg.idm);
      dispatched = m.trajectory;
      rec.leads = m.leads;
      rec.blocked_cells = m.blocked_cells;
      rec.unreachable = m.unreachable;
    }
    rec.dispatched = dispatched;

    const KbmState ego_now = kbm_from_box(world.ego.participant.box);
    rec.command = vehicle_controller(ego_now, dispatched, wheelbase, cfg.controller);
    const KbmState ego_next = kbm_step(ego_now, rec.command, wheelbase, dt);
    OrientedBox& ego_box = world.ego.participant.box;
    ego_box.center = Pose2(ego_next.x, ego_next.y, ego_next.theta);
    ego_box.speed = ego_next.v;
    advance_participants(world, dt);

    rec.violations = tracker.step(world, t);
    progress = std::max(progress, s.route.project(ego_box.center.position()).station);
    rec.speed_after = ego_box.speed;
    rec.progress = progress;
    rec.world_digest = digest_of(to_json(world));
    rec.digest = record_digest(rec);
    records.push_back(std::move(rec));
    if (observer) {
      observer(world, records.back());
    }
    prev = snap;

    const auto& vio = records.back().violations;
    const bool terminal = std::any_of(vio.begin(), vio.end(), [](const ViolationEvent& v) {
      return is_collision(v.kind) || v.kind == ViolationKind::StallTimeout;
    });
    if (terminal || progress >= route_len) {
      break;
    }
  }
  out.report = compute_report(out.trace);
  return out;
}

/// Digest over every record digest of a trace.
inline std::uint64_t trace_digest(const RunTrace& trace)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& r : trace.records) {
    h = fnv1a64(hex64(r.digest), h);
  }
  return h;
}

}  // namespace argus::sim
