#pragma once
/**
 * @file monitor.hpp
 * @brief Collision, stop-signal and stalling hazards over a predicted box set, the circular
 *        takeover/recovery buffers, and takeover-accuracy scoring.
 */

#include <argus/prediction.hpp>

#include <cstdint>
#include <set>

namespace argus {

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct MonitorConfig
{
  int M{5};     ///< collision and signal queue length
  int N{20};    ///< stall queue length
  int R{20};    ///< recovery queue length
  int l{4};     ///< takeover threshold on the collision and signal queues
  int H{60};    ///< prediction horizon, frames
  double epsilon{0.1};  ///< near-stop speed, m/s
  double ego_cap{1.3};
  double vehicle_cap{2.0};
  double pedestrian_cap{1.5};

  void validate() const
  {
    if (M < 1 || N < 1 || R < 1 || H < 1) {
      throw ConfigError("M, N, R and H must all be >= 1");
    }
    if (l < 1 || l > M) {
      throw ConfigError("l must satisfy 1 <= l <= M (l=" + std::to_string(l) +
                        ", M=" + std::to_string(M) + ")");
    }
    if (!(epsilon > 0.0)) {
      throw ConfigError("epsilon must be > 0");
    }
    if (!(ego_cap >= 1.0) || !(vehicle_cap >= 1.0) || !(pedestrian_cap >= 1.0)) {
      throw ConfigError("enlargement caps must be >= 1");
    }
  }

  [[nodiscard]] PredictionParams prediction(double ego_wheelbase) const
  {
    PredictionParams p;
    p.horizon = H;
    p.ego_cap = ego_cap;
    p.vehicle_cap = vehicle_cap;
    p.pedestrian_cap = pedestrian_cap;
    p.ego_wheelbase = ego_wheelbase;
    return p;
  }
};

struct HazardReport
{
  int frame{0};
  std::optional<int> min_collision_frame;  ///< C^t as an absolute frame index
  bool collision_flag{false};
  bool sigvio_flag{false};
  bool stalling_flag{false};
  std::vector<std::string> colliding_actors;  ///< sorted, unique
  std::vector<std::string> violated_regions;  ///< signal ids behind sigvio_flag

  bool operator==(const HazardReport&) const = default;
};

/// Fixed-length circular queue of {0, 1} entries; slots start unset.
class BinaryRing
{
public:
  static constexpr std::int8_t kUnset = -1;

  BinaryRing() = default;
  explicit BinaryRing(int size)
  {
    if (size < 1) {
      throw std::invalid_argument("BinaryRing: size must be >= 1");
    }
    slots_.assign(static_cast<std::size_t>(size), kUnset);
  }

  [[nodiscard]] int size() const { return static_cast<int>(slots_.size()); }

  /// Writes the entry for frame t into slot t mod size.
  void write(int t, bool value)
  {
    const auto i = static_cast<std::size_t>(t % size());
    if (slots_[i] == kUnset) {
      ++recorded_;
    }
    slots_[i] = value ? 1 : 0;
  }

  void reset()
  {
    std::fill(slots_.begin(), slots_.end(), kUnset);
    recorded_ = 0;
  }

  [[nodiscard]] std::int8_t slot(int i) const { return slots_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const std::vector<std::int8_t>& slots() const { return slots_; }
  [[nodiscard]] int recorded() const { return recorded_; }

  [[nodiscard]] int popcount() const
  {
    return static_cast<int>(std::count(slots_.begin(), slots_.end(), std::int8_t{1}));
  }

  [[nodiscard]] bool all_ones() const { return popcount() == size(); }

  /// Every slot recorded and zero.
  [[nodiscard]] bool all_zero() const
  {
    return recorded_ == size() &&
           std::all_of(slots_.begin(), slots_.end(), [](std::int8_t v) { return v == 0; });
  }

  /// Entries of the last `count` frames ending at frame t, oldest first.
  [[nodiscard]] std::vector<std::int8_t> window(int t, int count) const
  {
    std::vector<std::int8_t> out;
    for (int f = t - count + 1; f <= t; ++f) {
      out.push_back(f < 0 ? kUnset : slots_[static_cast<std::size_t>(f % size())]);
    }
    return out;
  }

  bool operator==(const BinaryRing&) const = default;

private:
  std::vector<std::int8_t> slots_;
  int recorded_{0};
};

struct BufferBank
{
  BinaryRing collision;
  BinaryRing signal;
  BinaryRing stall;
  BinaryRing recovery;
  std::optional<int> prev_C;      ///< C^{t-1}
  std::optional<int> last_frame;  ///< frame of the last update
  std::uint64_t recovery_generation{0};

  BufferBank() : BufferBank(MonitorConfig{}) {}
  explicit BufferBank(const MonitorConfig& cfg)
  : collision(cfg.M), signal(cfg.M), stall(cfg.N), recovery(cfg.R)
  {
  }

  /// Marks every recovery entry unset; performed by the buffer owner when a takeover fires.
  void reset_recovery()
  {
    recovery.reset();
    ++recovery_generation;
  }

  bool operator==(const BufferBank&) const = default;
};

class SequencingError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// Smallest absolute frame at which some non-ego actor intersects the ego; regions excluded.
inline std::optional<int> min_collision_frame(const PredictedBoxSet& boxes)
{
  const int n = static_cast<int>(boxes.ego.boxes.size());
  for (int i = 0; i < n; ++i) {
    const OrientedBox& e = boxes.ego.boxes[static_cast<std::size_t>(i)];
    for (const auto& track : boxes.others) {
      if (i < static_cast<int>(track.boxes.size()) &&
          sat_intersects(e, track.boxes[static_cast<std::size_t>(i)])) {
        return boxes.horizon_start + i;
      }
    }
  }
  return std::nullopt;
}

/// True iff the current ego footprint lies in an active signal region.
inline bool valid_stop(const BevSnapshot& snap)
{
  for (const auto& sig : snap.signals) {
    if (auto region = stop_signal_region(sig, snap.ego.box.center.theta)) {
      if (sat_intersects(snap.ego.box, *region)) {
        return true;
      }
    }
  }
  return false;
}

/// Evaluates the three hazards for the current frame. The bank is read, never written.
inline HazardReport evaluate(const PredictedBoxSet& boxes, const BevSnapshot& snap,
                             const BufferBank& bank, const MonitorConfig& cfg)
{
  HazardReport r;
  r.frame = snap.frame;

  r.min_collision_frame = min_collision_frame(boxes);
  r.collision_flag =
    r.min_collision_frame && (!bank.prev_C || *r.min_collision_frame <= *bank.prev_C);

  std::set<std::string> colliding;
  for (const auto& track : boxes.others) {
    for (std::size_t i = 0; i < track.boxes.size() && i < boxes.ego.boxes.size(); ++i) {
      if (sat_intersects(boxes.ego.boxes[i], track.boxes[i])) {
        colliding.insert(track.id);
        break;
      }
    }
  }
  r.colliding_actors.assign(colliding.begin(), colliding.end());

  // A stop sign is honored by one complete stop inside its region. A red light binds for as long
  // as it is red, so any predicted movement inside its region counts.
  for (const auto& region : boxes.regions) {
    const bool red = region.kind == SignalKind::RedLight;
    bool any_overlap = false;
    bool all_fast = true;
    bool any_fast = false;
    for (const auto& e : boxes.ego.boxes) {
      if (sat_intersects(e, region.box)) {
        any_overlap = true;
        if (e.speed > cfg.epsilon) {
          any_fast = true;
        } else {
          all_fast = false;
        }
      }
    }
    if (any_overlap && (red ? any_fast : all_fast)) {
      r.violated_regions.push_back(region.id);
    }
  }
  r.sigvio_flag = !r.violated_regions.empty();

  r.stalling_flag = snap.ego.box.speed < cfg.epsilon && !valid_stop(snap);
  return r;
}

/// Writes the frame's hazard indicators into the bank; the recovery queue only during takeover.
inline void update_buffers(const HazardReport& report, BufferBank& bank, bool in_takeover)
{
  if (bank.last_frame && report.frame <= *bank.last_frame) {
    throw SequencingError("update_buffers: frame " + std::to_string(report.frame) +
                          " does not follow frame " + std::to_string(*bank.last_frame));
  }
  const int t = report.frame;
  bank.collision.write(t, report.collision_flag);
  bank.signal.write(t, report.sigvio_flag);
  bank.stall.write(t, report.stalling_flag);
  if (in_takeover) {
    bank.recovery.write(t, report.collision_flag || report.sigvio_flag || report.stalling_flag);
  }
  bank.prev_C = report.min_collision_frame;
  bank.last_frame = t;
}

struct TakeoverScore
{
  int tp{0};
  int fp{0};
  int fn{0};
  double precision{1.0};
  double recall{1.0};
  double f_beta{1.0};
};

inline double f_beta_score(double precision, double recall, double beta = 3.0)
{
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  return denom > 0.0 ? (1.0 + b2) * precision * recall / denom : 0.0;
}

/// A labeled violation. Instantaneous events have onset == time; a stall spans its whole episode.
struct ViolationLabel
{
  double onset{0.0};  ///< seconds
  double time{0.0};   ///< seconds
};

/**
 * Scores takeover times (seconds) against labeled violations.
 *
 * A takeover at tau covers a violation when onset - window <= tau <= time. Covering at least one
 * violation makes a takeover a true positive, otherwise it is a false positive; an uncovered
 * violation is a false negative. With no takeovers precision is 1; with no violations recall is 1.
 */
inline TakeoverScore score_takeovers(const std::vector<double>& takeovers,
                                     const std::vector<ViolationLabel>& violations,
                                     double window = 3.0, double beta = 3.0)
{
  const auto covers = [&](double tau, const ViolationLabel& v) {
    return tau >= v.onset - window && tau <= v.time;
  };
  TakeoverScore s;
  for (double tau : takeovers) {
    const bool hit = std::any_of(violations.begin(), violations.end(),
                                 [&](const ViolationLabel& v) { return covers(tau, v); });
    hit ? ++s.tp : ++s.fp;
  }
  int covered = 0;
  for (const auto& v : violations) {
    const bool hit =
      std::any_of(takeovers.begin(), takeovers.end(), [&](double tau) { return covers(tau, v); });
    hit ? ++covered : ++s.fn;
  }
  s.precision = takeovers.empty() ? 1.0 : static_cast<double>(s.tp) / takeovers.size();
  s.recall = violations.empty() ? 1.0 : static_cast<double>(covered) / violations.size();
  s.f_beta = f_beta_score(s.precision, s.recall, beta);
  return s;
}

/// Instantaneous violations at the given times.
inline TakeoverScore score_takeovers(const std::vector<double>& takeovers,
                                     const std::vector<double>& violation_times,
                                     double window = 3.0, double beta = 3.0)
{
  std::vector<ViolationLabel> labels;
  labels.reserve(violation_times.size());
  for (double t : violation_times) {
    labels.push_back({t, t});
  }
  return score_takeovers(takeovers, labels, window, beta);
}

}  // namespace argus
