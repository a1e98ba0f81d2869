// Acceptance checks: one PASS or FAIL line per criterion, nonzero exit if any fails.

#include "fixtures.hpp"
#include "idm_follow.hpp"
#include "oracles.hpp"

#include <argus/gate.hpp>
#include <argus/sim/suite.hpp>
#include <argus/sim/trace_io.hpp>

#include <bit>
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace argus;
using namespace argus::sim;

namespace {

struct Outcome
{
  bool pass{true};
  std::string detail;
};

/// Collects failures; the first few are kept for the report line.
class Check
{
public:
  void expect(bool ok, const std::string& what)
  {
    if (!ok) {
      ++failures_;
      if (failures_ <= 3) {
        notes_ += (notes_.empty() ? "" : "; ") + what;
      }
    }
  }
  [[nodiscard]] Outcome done(const std::string& summary) const
  {
    if (failures_ == 0) {
      return {true, summary};
    }
    return {false, std::to_string(failures_) + " failure(s): " + notes_};
  }

private:
  int failures_{0};
  std::string notes_;
};

std::vector<Scenario> golden_scenarios()
{
  std::vector<Scenario> out;
  for (const auto& p : load_manifest(argus_test::scenario_path("golden_suite")).scenario_paths) {
    out.push_back(load_scenario(p));
  }
  return out;
}

const SuiteResult& golden_result(double* seconds = nullptr)
{
  static double elapsed = 0.0;
  static const SuiteResult r = [] {
    const auto scs = golden_scenarios();
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult res = run_suite(scs, RunConfig{}, 1);
    elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }();
  if (seconds != nullptr) {
    *seconds = elapsed;
  }
  return r;
}

Outcome golden_efficacy()
{
  Check c;
  double seconds = 0.0;
  const SuiteResult& r = golden_result(&seconds);
  c.expect(r.runs.size() == 12, "expected 12 scenarios, got " + std::to_string(r.runs.size()));
  for (const auto& p : r.runs) {
    c.expect(!p.off.violations.empty(), p.scenario + ": no violation with Argus off");
    for (const auto& v : p.on.violations) {
      c.expect(!is_collision(v.kind) && !is_signal(v.kind) && v.kind != ViolationKind::StallTimeout,
               p.scenario + ": " + std::string(to_string(v.kind)) + " with Argus on");
    }
    c.expect(p.on.route_completion >= 100.0,
             p.scenario + ": RC " + std::to_string(p.on.route_completion) + " with Argus on");
  }
  c.expect(seconds < 60.0, "suite took " + std::to_string(seconds) + " s");
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << r.runs.size() << " scenarios in " << seconds << " s single-threaded";
  return c.done(os.str());
}

Outcome ownership_invariant()
{
  Check c;
  for (const auto& p : golden_result().runs) {
    c.expect(p.on.eq8_violations == 0,
             p.scenario + ": " + std::to_string(p.on.eq8_violations) + " breaches");
  }
  return c.done("0 breaches on every Argus-on run");
}

Outcome collision_frame_oracle()
{
  Check c;
  std::mt19937_64 rng(1001);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const PredictedBoxSet set = argus_test::random_prediction(rng, 60);
    const auto got = min_collision_frame(set);
    c.expect(got == argus_test::scan_first_collision(set), "instance " + std::to_string(i));
    hits += got ? 1 : 0;
  }
  return c.done("1000 instances, " + std::to_string(hits) + " with a collision, 0 mismatches");
}

Outcome sat_sampling_oracle()
{
  Check c;
  std::mt19937_64 rng(1002);
  int decided = 0;
  int overlapping = 0;
  int drawn = 0;
  while (decided < 1000 && drawn < 5000) {
    ++drawn;
    const OrientedBox a = argus_test::random_box(rng, 4);
    const OrientedBox b = argus_test::random_box(rng, 4);
    const auto verdict = argus_test::sampled_overlap(a, b);
    if (!verdict) {
      continue;
    }
    ++decided;
    overlapping += *verdict ? 1 : 0;
    c.expect(sat_intersects(a, b) == *verdict, "pair " + std::to_string(drawn));
  }
  c.expect(decided >= 1000, "only " + std::to_string(decided) + " decided pairs");
  return c.done(std::to_string(decided) + " decided pairs (" + std::to_string(overlapping) +
                " overlapping), 0 mismatches");
}

Outcome kbm_accuracy()
{
  Check c;
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> v(5, 15), d(-0.06, 0.06), a(-1, 1);
  const double L = 2.7;
  double worst_heading = 0.0;
  double worst_position = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double v0 = v(rng), steer = d(rng), acc = a(rng);
    KbmState s{0, 0, 0, v0};
    for (int i = 0; i < 20; ++i) {
      s = kbm_step(s, {acc, steer}, L, 0.05);
    }
    const auto ref = argus_test::integrate_fine({0, 0, 0, v0}, acc, steer, L, 1.0, 0.001);
    const double travelled = v0 + 0.5 * acc;
    const double h = std::abs(ref.theta) > 0 ? std::abs(s.theta - ref.theta) / std::abs(ref.theta)
                                             : std::abs(s.theta - ref.theta);
    const double p = std::hypot(s.x - ref.x, s.y - ref.y) / travelled;
    worst_heading = std::max(worst_heading, h);
    worst_position = std::max(worst_position, p);
    c.expect(h <= 0.02, "draw " + std::to_string(trial) + " heading " + std::to_string(h));
    c.expect(p <= 0.01, "draw " + std::to_string(trial) + " position " + std::to_string(p));
  }
  std::ostringstream os;
  os.precision(3);
  os << "100 draws, worst heading " << 100 * worst_heading << "%, worst position "
     << 100 * worst_position << "%";
  return c.done(os.str());
}

Outcome idm_checks()
{
  Check c;
  const IdmParams p;
  c.expect(idm_accel(p.v0, LeadingActor{}, p) == 0.0, "free-road equilibrium is not 0");
  LeadingActor far;
  far.net_gap = 400.0;
  far.rel_speed = 0.0;
  c.expect(std::abs(idm_accel(0.0, far, p) - 10.9989) < 1e-12, "standing start is not 10.9989");
  LeadingActor unity;
  unity.rel_speed = 1.5;
  unity.net_gap = idm_desired_gap(p.v0, unity.rel_speed, p);
  c.expect(std::abs(idm_accel(p.v0, unity, p) + 11.0) < 1e-12, "double-unity point is not -11");

  std::mt19937_64 rng(1004);
  IdmParams follow = p;
  follow.v0 = 0.72 * 13.9;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 1000; ++trial) {
    const auto r = argus_test::follow_random_leader(rng, follow);
    min_gap = std::min(min_gap, r.min_gap);
    c.expect(r.min_gap > 0.0, "trial " + std::to_string(trial) + " gap " + std::to_string(r.min_gap));
  }
  std::ostringstream os;
  os.precision(3);
  os << "3 examples exact, 1000 leaders, smallest net gap " << min_gap << " m";
  return c.done(os.str());
}

HazardReport flags(int frame, bool collision, bool signal, bool stall)
{
  HazardReport r;
  r.frame = frame;
  r.collision_flag = collision;
  r.sigvio_flag = signal;
  r.stalling_flag = stall;
  return r;
}

Outcome gate_behavior()
{
  Check c;
  const MonitorConfig cfg;
  c.expect(cfg.l == 4 && cfg.M == 5 && cfg.R == 20, "unexpected gate defaults");
  for (unsigned mask = 0; mask < (1U << cfg.M); ++mask) {
    for (const bool signal : {false, true}) {
      BufferBank bank(cfg);
      for (int t = 0; t < cfg.M; ++t) {
        const bool bit = ((mask >> t) & 1U) != 0;
        update_buffers(flags(t, !signal && bit, signal && bit, false), bank, false);
      }
      const bool fired = decide(bank, ControlOwner{}, cfg).first.takeover_fired;
      c.expect(fired == (std::popcount(mask) >= cfg.l), "mask " + std::to_string(mask));
    }
  }

  std::mt19937_64 rng(1005);
  int returns = 0;
  int shortest = std::numeric_limits<int>::max();
  // Hazards arrive in bursts: a two-state chain switching between calm and hazardous spells.
  std::bernoulli_distribution calm_col(0.05), busy_col(0.8), stall(0.01), flip(0.03);
  for (int run = 0; run < 100; ++run) {
    BufferBank bank(cfg);
    ControlOwner owner;
    std::optional<int> took;
    bool busy = false;
    for (int t = 0; t < 3000; ++t) {
      busy = flip(rng) ? !busy : busy;
      const bool col = busy ? busy_col(rng) : calm_col(rng);
      update_buffers(flags(t, col, false, stall(rng)), bank, owner.owner == Owner::Mitigator);
      const auto [d, next] = decide(bank, owner, cfg);
      owner = next;
      if (d.takeover_fired) {
        bank.reset_recovery();
        took = t;
      }
      if (d.control_returned) {
        ++returns;
        c.expect(took.has_value(), "return without takeover");
        if (took) {
          shortest = std::min(shortest, t - *took);
          c.expect(t - *took >= cfg.R, "returned after " + std::to_string(t - *took) + " frames");
        }
      }
    }
  }
  c.expect(returns > 0, "no control return observed");

  std::vector<std::chrono::nanoseconds> samples;
  for (int i = 0; i < 1001; ++i) {
    samples.push_back(gate_latency_probe());
  }
  std::nth_element(samples.begin(), samples.begin() + 500, samples.end());
  const auto median = samples[500];
  c.expect(median < std::chrono::milliseconds(1),
           "median decide latency " + std::to_string(median.count()) + " ns");
  return c.done("64 queue contents exact, " + std::to_string(returns) +
                " returns (shortest " + std::to_string(shortest) + " frames), median decide " +
                std::to_string(median.count()) + " ns");
}

Outcome takeover_scoring()
{
  Check c;
  // dt 0.05: takeovers at frames 100, 300, 600; violations at frames 140 and 340.
  const double dt = 0.05;
  RunReport on;
  on.argus = true;
  for (const int f : {100, 300, 600}) {
    on.takeovers.push_back({f, TakeoverCause::Collision, std::nullopt});
  }
  RunReport off;
  for (const int f : {140, 340}) {
    off.violations.push_back({f, ViolationKind::CollisionVehicle, 0.6, "npc", std::nullopt});
  }
  const TakeoverScore s = score_takeovers(on, off, dt);
  c.expect(s.tp == 2 && s.fp == 1 && s.fn == 0, "counts TP=" + std::to_string(s.tp) +
                                                  " FP=" + std::to_string(s.fp) +
                                                  " FN=" + std::to_string(s.fn));
  c.expect(std::abs(s.precision - 0.667) < 5e-4, "precision " + std::to_string(s.precision));
  c.expect(std::abs(s.recall - 1.000) < 5e-4, "recall " + std::to_string(s.recall));
  c.expect(std::abs(s.f_beta - 0.952) < 5e-4, "F3 " + std::to_string(s.f_beta));
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << "TP=" << s.tp << " FP=" << s.fp << " FN=" << s.fn << " P=" << s.precision
     << " R=" << s.recall << " F3=" << s.f_beta;
  return c.done(os.str());
}

Outcome rerouting_validity()
{
  Check c;
  std::mt19937_64 rng(1006);
  int fields = 0;
  int detours = 0;
  int draws = 0;
  while (fields < 200 && draws < 5000) {
    ++draws;
    const auto field = argus_test::random_reroute_field(rng);
    if (!field) {
      continue;
    }
    ++fields;
    const std::string tag = "field " + std::to_string(fields);
    const auto& m = field->map;
    const auto out = reroute(field->dense, m);
    for (const auto& p : out) {
      c.expect(m.traversable(p), tag + ": waypoint in a blocked cell");
    }
    bool detour = false;
    for (const auto& p : field->dense) {
      detour = detour || !m.traversable(p);
    }
    detours += detour ? 1 : 0;
    const Cell a = *m.cell_of(field->dense.front());
    const Cell b = *m.cell_of(field->dense.back());
    const auto path = astar(m, a, b, field->dense, {0.0, 0.0});
    const auto ref = argus_test::grid_shortest_path(m, a, b);
    c.expect(ref && std::abs(cell_path_length(m, path) - *ref) < 1e-9, tag + ": A* not shortest");
  }
  c.expect(fields == 200, "only " + std::to_string(fields) + " reachable fields");

  // A goal sealed off by blocked cells raises the documented error.
  OccupancyMap sealed(Pose2(), 40.0, 1.0);
  const Cell goal{40, 60};
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr != 0 || dc != 0) {
        sealed.set_blocked({goal.row + dr, goal.col + dc});
      }
    }
  }
  bool threw = false;
  try {
    astar(sealed, Cell{40, 40}, goal, {});
  } catch (const UnreachableGoal&) {
    threw = true;
  }
  c.expect(threw, "sealed goal did not raise UnreachableGoal");
  threw = false;
  try {
    std::vector<Vec2> dense;
    for (int i = 0; i <= 30; ++i) {
      dense.push_back({static_cast<double>(i), 0.0});
    }
    OccupancyMap wall(Pose2(), 40.0, 1.0);
    for (int r = 0; r < wall.rows(); ++r) {
      wall.set_blocked({r, 55});
    }
    reroute(dense, wall);
  } catch (const UnreachableGoal&) {
    threw = true;
  }
  c.expect(threw, "walled road did not raise UnreachableGoal");
  return c.done(std::to_string(fields) + " fields (" + std::to_string(detours) +
                " needing a detour), A* equals reference, unreachable goals raise");
}

std::string trace_bytes(const RunResult& r)
{
  std::ostringstream os;
  write_trace(os, r.trace, r.report);
  return os.str();
}

Outcome determinism()
{
  Check c;
  const auto scs = golden_scenarios();
  int runs = 0;
  for (const auto& s : scs) {
    for (const bool noise : {false, true}) {
      for (const bool argus : {false, true}) {
        RunConfig cfg;
        cfg.argus = argus;
        cfg.noise = noise;
        const RunResult a = run_scenario(s, cfg);
        const RunResult b = run_scenario(s, cfg);
        const std::string tag = s.name + (noise ? " noise" : "") + (argus ? " on" : " off");
        c.expect(trace_digest(a.trace) == trace_digest(b.trace), tag + ": digests differ");
        c.expect(trace_bytes(a) == trace_bytes(b), tag + ": trace bytes differ");
        runs += 2;
      }
    }
  }
  RunConfig noisy;
  noisy.noise = true;
  const SuiteResult one = run_suite(scs, noisy, 1);
  const SuiteResult four = run_suite(scs, noisy, 4);
  for (std::size_t i = 0; i < scs.size(); ++i) {
    c.expect(one.runs[i].digest_on == four.runs[i].digest_on &&
               one.runs[i].digest_off == four.runs[i].digest_off,
             scs[i].name + ": suite digests depend on the worker count");
  }
  return c.done(std::to_string(runs) + " runs repeat byte-identically, noise on and off; suite "
                "digests equal for 1 and 4 workers");
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
    {"golden suite efficacy", golden_efficacy},
    {"ownership trace invariant", ownership_invariant},
    {"earliest collision frame vs exhaustive scan", collision_frame_oracle},
    {"SAT vs sampling oracle", sat_sampling_oracle},
    {"bicycle model accuracy", kbm_accuracy},
    {"IDM examples and no rear-end", idm_checks},
    {"gate threshold, recovery and latency", gate_behavior},
    {"takeover accuracy scoring", takeover_scoring},
    {"rerouting validity", rerouting_validity},
    {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
