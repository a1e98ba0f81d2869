// argus: run scenarios and suites, score takeovers, replay traces, export plots.
//
// Exit status: 0 ok, 1 verification mismatch, 2 usage, 3 input, 4 internal error.

#include <argus/sim/suite.hpp>
#include <argus/sim/svg.hpp>
#include <argus/sim/trace_io.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace argus;
using namespace argus::sim;

namespace {

enum Exit : int { kOk = 0, kMismatch = 1, kUsage = 2, kInput = 3, kInternal = 4 };

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::string default_out_dir()
{
  const char* env = std::getenv("ARGUS_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "argus_out";
}

bool parse_switch(const std::string& flag, const std::string& v)
{
  if (v == "on" || v == "true" || v == "1") {
    return true;
  }
  if (v == "off" || v == "false" || v == "0") {
    return false;
  }
  throw UsageError(flag + " expects on or off, got '" + v + "'");
}

/// Flags shared by run and suite.
struct CommonOptions
{
  std::string argus{"on"};
  std::string noise{"off"};
  std::optional<double> pos_sigma;
  std::optional<double> heading_sigma;
  std::optional<double> speed_sigma;
  std::optional<double> drop_probability;
  std::optional<std::uint64_t> seed;
  std::string out_dir{default_out_dir()};
  RunConfig cfg;

  void attach(CLI::App* app, bool with_argus)
  {
    if (with_argus) {
      app->add_option("--argus", argus, "on or off")->capture_default_str();
    }
    app->add_option("--noise", noise, "perception noise, on or off")->capture_default_str();
    app->add_option("--noise.position-sigma", pos_sigma, "m");
    app->add_option("--noise.heading-sigma", heading_sigma, "rad");
    app->add_option("--noise.speed-sigma", speed_sigma, "m/s");
    app->add_option("--noise.drop", drop_probability, "per-participant drop probability");
    app->add_option("--seed", seed, "override the scenario seed");
    app->add_option("--out", out_dir, "output directory (default: $ARGUS_OUT_DIR or argus_out)")
      ->capture_default_str();

    auto& m = cfg.monitor;
    app->add_option("--gate.M", m.M, "collision and signal queue length")->capture_default_str();
    app->add_option("--gate.N", m.N, "stall queue length")->capture_default_str();
    app->add_option("--gate.R", m.R, "recovery queue length")->capture_default_str();
    app->add_option("--gate.l", m.l, "takeover threshold")->capture_default_str();
    app->add_option("--monitor.H", m.H, "prediction horizon, frames")->capture_default_str();
    app->add_option("--monitor.epsilon", m.epsilon, "near-stop speed, m/s")->capture_default_str();
    app->add_option("--caps.ego", m.ego_cap)->capture_default_str();
    app->add_option("--caps.vehicle", m.vehicle_cap)->capture_default_str();
    app->add_option("--caps.pedestrian", m.pedestrian_cap)->capture_default_str();

    auto& idm = cfg.idm;
    app->add_option("--idm.s0", idm.s0)->capture_default_str();
    app->add_option("--idm.T", idm.T)->capture_default_str();
    app->add_option("--idm.a", idm.a_max)->capture_default_str();
    app->add_option("--idm.b", idm.b_comf)->capture_default_str();
    app->add_option("--idm.sigma", idm.sigma)->capture_default_str();
    app->add_option("--mitigator.v0-factor", cfg.mitigator.v0_factor,
                    "IDM desired speed as a fraction of the lane limit")
      ->capture_default_str();
    app->add_option("--astar.w-dev", cfg.mitigator.reroute.weights.w_dev)->capture_default_str();
    app->add_option("--astar.w-turn", cfg.mitigator.reroute.weights.w_turn)->capture_default_str();

    auto& p = cfg.penalties;
    app->add_option("--penalty.collision-pedestrian", p.collision_pedestrian)->capture_default_str();
    app->add_option("--penalty.collision-vehicle", p.collision_vehicle)->capture_default_str();
    app->add_option("--penalty.collision-static", p.collision_static)->capture_default_str();
    app->add_option("--penalty.red-light", p.red_light)->capture_default_str();
    app->add_option("--penalty.stop-sign", p.stop_sign)->capture_default_str();
    app->add_option("--stall-timeout", cfg.stall_timeout, "seconds")->capture_default_str();
  }

  /// Validated run configuration; throws UsageError.
  RunConfig resolve()
  {
    RunConfig c = cfg;
    c.argus = parse_switch("--argus", argus);
    c.noise = parse_switch("--noise", noise);
    if (pos_sigma || heading_sigma || speed_sigma || drop_probability) {
      NoiseParams n{0.2, 0.02, 0.2, 0.0};
      n.position_sigma = pos_sigma.value_or(n.position_sigma);
      n.heading_sigma = heading_sigma.value_or(n.heading_sigma);
      n.speed_sigma = speed_sigma.value_or(n.speed_sigma);
      n.drop_probability = drop_probability.value_or(n.drop_probability);
      c.noise_override = n;
      c.noise = true;
    }
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return c;
  }

  Scenario load(const std::string& path) const
  {
    Scenario s = load_scenario(path);
    if (seed) {
      s.seed = *seed;
    }
    return s;
  }
};

void write_text(const fs::path& p, const std::string& text)
{
  std::ofstream os(p);
  if (!os) {
    throw std::runtime_error("cannot write " + p.string());
  }
  os << text;
}

std::string summary_line(const RunReport& r)
{
  std::ostringstream os;
  os << r.scenario << " argus=" << (r.argus ? "on" : "off") << " RC=" << r.route_completion
     << " DS=" << r.driving_score << " violations=" << r.violations.size()
     << " takeovers=" << r.takeovers.size() << " end=" << to_string(r.end_reason);
  return os.str();
}

void write_plots(const fs::path& dir, const std::string& stem, const Scenario& s,
                 const RunConfig& cfg, const RunTrace& trace)
{
  write_text(dir / (stem + ".overhead.svg"), overhead_svg(s, capture_frames(s, cfg)));
  write_text(dir / (stem + ".timeseries.svg"), timeseries_svg(trace));
}

int cmd_run(CommonOptions& o, const std::string& path, bool plot, bool async)
{
  RunConfig cfg = o.resolve();
  cfg.async_monitor = async;
  const Scenario s = o.load(path);
  const RunResult r = run_scenario(s, cfg);
  fs::create_directories(o.out_dir);
  const std::string stem = s.name + (cfg.argus ? ".on" : ".off");
  const fs::path dir(o.out_dir);
  write_text(dir / (stem + ".report.json"), to_json(r.report).dump(2) + "\n");
  write_trace_file((dir / (stem + ".trace.jsonl")).string(), r.trace, r.report);
  if (plot) {
    write_plots(dir, stem, s, cfg, r.trace);
  }
  std::cout << summary_line(r.report) << "\n";
  for (const auto& v : r.report.violations) {
    std::cout << "  frame " << v.frame << ": " << to_string(v.kind)
              << (v.subject.empty() ? "" : " (" + v.subject + ")") << "\n";
  }
  std::cout << "wrote " << (dir / stem).string() << ".{report.json,trace.jsonl}\n";
  return kOk;
}

int cmd_suite(CommonOptions& o, const std::string& manifest_path, int repeat, unsigned jobs)
{
  if (repeat < 1) {
    throw UsageError("--repeat must be >= 1");
  }
  const RunConfig cfg = o.resolve();
  const SuiteManifest m = load_manifest(manifest_path);
  std::vector<Scenario> scenarios;
  for (const auto& p : m.scenario_paths) {
    scenarios.push_back(o.load(p));
  }
  std::vector<SuiteResult> results;
  for (int i = 0; i < repeat; ++i) {
    results.push_back(run_suite(scenarios, cfg, jobs));
  }
  const SuiteResult& first = results.front();
  std::cout << "suite " << m.name << ": " << scenarios.size() << " scenarios, noise "
            << (cfg.noise ? "on" : "off") << "\n";
  if (repeat == 1) {
    std::cout << format_suite_table(first);
  } else {
    // Per-metric means over the repeats, plus whether every repeat produced the same traces.
    std::cout << "mean over " << repeat << " repeats\n";
    std::vector<std::vector<SuiteRow>> rows;
    for (const auto& r : results) {
      rows.push_back(suite_rows(r));
    }
    std::cout << std::left << std::setw(20) << "stub" << std::setw(7) << "argus" << std::right
              << std::setw(9) << "SR%" << std::setw(9) << "RC%" << std::setw(9) << "DS"
              << std::setw(10) << "Coll/km" << std::setw(10) << "Stop/km" << std::setw(10)
              << "Stall/km" << "\n"
              << std::fixed;
    for (std::size_t k = 0; k < rows.front().size(); ++k) {
      double sr = 0, rc = 0, ds = 0, co = 0, st = 0, sl = 0;
      for (const auto& rr : rows) {
        sr += rr[k].summary.success_rate;
        rc += rr[k].summary.route_completion;
        ds += rr[k].summary.driving_score;
        co += rr[k].summary.collisions_per_km;
        st += rr[k].summary.stops_per_km;
        sl += rr[k].summary.stalls_per_km;
      }
      const double n = repeat;
      std::cout << std::left << std::setw(20) << rows.front()[k].stub << std::setw(7)
                << (rows.front()[k].argus ? "on" : "off") << std::right << std::setprecision(1)
                << std::setw(9) << sr / n << std::setw(9) << rc / n << std::setw(9) << ds / n
                << std::setprecision(2) << std::setw(10) << co / n << std::setw(10) << st / n
                << std::setw(10) << sl / n << "\n";
    }
    bool identical = true;
    for (const auto& r : results) {
      for (std::size_t i = 0; i < r.runs.size(); ++i) {
        identical = identical && r.runs[i].digest_on == first.runs[i].digest_on &&
                    r.runs[i].digest_off == first.runs[i].digest_off;
      }
    }
    std::cout << "repeats identical: " << (identical ? "yes" : "no") << "\n";
  }
  fs::create_directories(o.out_dir);
  const fs::path out = fs::path(o.out_dir) / (m.name + ".suite.json");
  write_text(out, suite_json(first).dump(2) + "\n");
  std::cout << "wrote " << out.string() << "\n";
  return kOk;
}

int cmd_score(const std::string& on_path, const std::string& off_path, double window)
{
  const LoadedTrace on = read_trace_file(on_path);
  const LoadedTrace off = read_trace_file(off_path);
  if (!on.report.argus || off.report.argus) {
    throw UsageError("score expects an Argus-on trace followed by an Argus-off trace");
  }
  const TakeoverScore s = score_takeovers(on.report, off.report, on.trace.dt(), window);
  std::cout << std::fixed << std::setprecision(3) << "TP=" << s.tp << " FP=" << s.fp
            << " FN=" << s.fn << " P=" << s.precision << " R=" << s.recall
            << " F3=" << s.f_beta << "\n";
  return kOk;
}

int cmd_replay(const std::string& path, bool resim)
{
  const LoadedTrace lt = read_trace_file(path);
  const ReplayOutcome o = verify_trace(lt, resim);
  for (const auto& m : o.mismatches) {
    std::cout << "mismatch: " << m << "\n";
  }
  std::cout << path << ": " << lt.trace.records.size() << " frames, "
            << (o.ok ? "verified" : "MISMATCH")
            << (o.resimulated ? " (re-simulated)" : "") << "\n";
  return o.ok ? kOk : kMismatch;
}

int cmd_plot(const std::string& path, const std::string& out_dir)
{
  const LoadedTrace lt = read_trace_file(path);
  fs::create_directories(out_dir);
  const auto& t = lt.trace;
  const std::string stem = t.scenario.name + (t.config.argus ? ".on" : ".off");
  write_plots(out_dir, stem, t.scenario, t.config, t);
  std::cout << "wrote " << (fs::path(out_dir) / stem).string() << ".{overhead,timeseries}.svg\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Argus resilience framework: closed-loop driving simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string run_path;
  bool run_plot = false;
  bool run_async = false;
  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("scenario", run_path, "scenario JSON file")->required();
  run->add_flag("--plot", run_plot, "also write SVG plots");
  run->add_flag("--async", run_async, "run the monitor on its own thread");
  run_opts.attach(run, true);

  CommonOptions suite_opts;
  std::string manifest;
  int repeat = 1;
  unsigned jobs = 1;
  auto* suite = app.add_subcommand("suite", "run a manifest with Argus off and on");
  suite->add_option("manifest", manifest, "suite manifest JSON")->required();
  suite->add_option("--repeat", repeat, "repeat the whole suite")->capture_default_str();
  suite->add_option("--jobs", jobs, "parallel workers")->capture_default_str();
  suite_opts.attach(suite, false);

  std::string on_trace;
  std::string off_trace;
  double window = 3.0;
  auto* score = app.add_subcommand("score", "takeover precision, recall and F3");
  score->add_option("on_trace", on_trace, "trace of the Argus-on run")->required();
  score->add_option("off_trace", off_trace, "trace of the Argus-off run")->required();
  score->add_option("--window", window, "seconds a takeover may precede a violation")
    ->capture_default_str();

  std::string replay_path;
  bool no_resim = false;
  auto* replay = app.add_subcommand("replay", "verify a trace file");
  replay->add_option("trace", replay_path)->required();
  replay->add_flag("--no-resim", no_resim, "skip the re-simulation check");

  std::string plot_path;
  std::string plot_out = default_out_dir();
  auto* plot = app.add_subcommand("plot", "write SVG plots for a trace");
  plot->add_option("trace", plot_path)->required();
  plot->add_option("--out", plot_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) {
      return cmd_run(run_opts, run_path, run_plot, run_async);
    }
    if (suite->parsed()) {
      return cmd_suite(suite_opts, manifest, repeat, jobs);
    }
    if (score->parsed()) {
      return cmd_score(on_trace, off_trace, window);
    }
    if (replay->parsed()) {
      return cmd_replay(replay_path, !no_resim);
    }
    if (plot->parsed()) {
      return cmd_plot(plot_path, plot_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ScenarioError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const TraceVersionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const TraceFormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
