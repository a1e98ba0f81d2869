#pragma once
/**
 * @file gate.hpp
 * @brief Control-ownership state machine between the ADS and the mitigator.
 */

#include <argus/monitor.hpp>

#include <chrono>

namespace argus {

enum class Owner { Ads, Mitigator };
enum class TakeoverCause { Collision, Signal, Stall };

inline std::string_view to_string(Owner o) { return o == Owner::Ads ? "ADS" : "MITIGATOR"; }

inline std::string_view to_string(TakeoverCause c)
{
  switch (c) {
    case TakeoverCause::Collision: return "collision";
    case TakeoverCause::Signal: return "signal";
    case TakeoverCause::Stall: return "stall";
  }
  return "unknown";
}

struct ControlOwner
{
  Owner owner{Owner::Ads};
  int since_frame{0};
  std::optional<TakeoverCause> takeover_cause;
  std::uint64_t recovery_generation{0};  ///< bank generation the return test must observe

  bool operator==(const ControlOwner&) const = default;
};

struct GateDecision
{
  bool dispatch_ads_trajectory{true};
  bool activate_mitigator{false};
  bool control_returned{false};
  bool takeover_fired{false};

  bool operator==(const GateDecision&) const = default;
};

/**
 * One gate step at the bank's current frame.
 *
 * When a takeover fires the caller (the bank's writer) must call bank.reset_recovery() before the
 * next update; the returned owner expects that reset.
 */
inline std::pair<GateDecision, ControlOwner> decide(const BufferBank& bank, const ControlOwner& state,
                                                    const MonitorConfig& cfg)
{
  const int t = bank.last_frame.value_or(0);
  GateDecision d;
  ControlOwner next = state;
  if (state.owner == Owner::Ads) {
    std::optional<TakeoverCause> cause;
    if (bank.collision.popcount() >= cfg.l) {
      cause = TakeoverCause::Collision;
    } else if (bank.signal.popcount() >= cfg.l) {
      cause = TakeoverCause::Signal;
    } else if (bank.stall.all_ones()) {
      cause = TakeoverCause::Stall;
    }
    if (cause) {
      d = {false, true, false, true};
      next = {Owner::Mitigator, t, cause, bank.recovery_generation + 1};
    }
    return {d, next};
  }
  if (bank.recovery_generation == state.recovery_generation && bank.recovery.all_zero()) {
    d = {true, false, true, false};
    next = {Owner::Ads, t, std::nullopt, state.recovery_generation};
  } else {
    d = {false, true, false, false};
  }
  return {d, next};
}

struct TimedDecision
{
  GateDecision decision;
  ControlOwner owner;
  std::chrono::nanoseconds elapsed{0};
};

inline TimedDecision timed_decide(const BufferBank& bank, const ControlOwner& state,
                                  const MonitorConfig& cfg)
{
  const auto t0 = std::chrono::steady_clock::now();
  auto [d, o] = decide(bank, state, cfg);
  const auto t1 = std::chrono::steady_clock::now();
  return {d, o, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)};
}

/// Wall time of one decide() call on a default-configured bank with a pending takeover.
inline std::chrono::nanoseconds gate_latency_probe()
{
  const MonitorConfig cfg;
  BufferBank bank(cfg);
  for (int t = 0; t < cfg.M; ++t) {
    HazardReport r;
    r.frame = t;
    r.collision_flag = t > 0;
    update_buffers(r, bank, false);
  }
  return timed_decide(bank, ControlOwner{}, cfg).elapsed;
}

}  // namespace argus
