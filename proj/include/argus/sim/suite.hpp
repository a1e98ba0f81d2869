#pragma once
/**
 * @file suite.hpp
 * @brief Paired Argus-off/Argus-on runs over a scenario manifest, with the comparison table.
 */

#include <argus/sim/harness.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace argus::sim {

struct SuiteManifest
{
  std::string name;
  std::vector<std::string> scenario_paths;  ///< resolved against the manifest's directory
};

/// Manifest format: {"name": "...", "scenarios": ["a.json", ...]}.
inline SuiteManifest load_manifest(const std::string& path)
{
  std::ifstream is(path);
  if (!is) {
    throw ScenarioError(ScenarioError::Kind::Io, path, "cannot open suite manifest");
  }
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::Parse, path, e.what());
  }
  if (!doc.is_object() || !doc.contains("scenarios") || !doc.at("scenarios").is_array()) {
    throw ScenarioError(ScenarioError::Kind::Schema, path + ":/scenarios",
                        "expected an array of scenario paths");
  }
  SuiteManifest m;
  m.name = doc.value("name", std::string("suite"));
  const auto dir = std::filesystem::path(path).parent_path();
  for (std::size_t i = 0; i < doc.at("scenarios").size(); ++i) {
    const json& e = doc.at("scenarios")[i];
    if (!e.is_string()) {
      throw ScenarioError(ScenarioError::Kind::Schema, path + ":/scenarios/" + std::to_string(i),
                          "expected a path string");
    }
    m.scenario_paths.push_back((dir / e.get<std::string>()).lexically_normal().string());
  }
  return m;
}

struct PairedRun
{
  std::string scenario;
  AdsKind stub{AdsKind::ObliviousFollower};
  double dt{0.05};
  RunReport off;
  RunReport on;
  std::uint64_t digest_off{0};
  std::uint64_t digest_on{0};
  TakeoverScore score;
};

struct SuiteResult
{
  std::vector<PairedRun> runs;  ///< same order as the input scenarios

  [[nodiscard]] std::vector<RunReport> reports(bool argus) const
  {
    std::vector<RunReport> out;
    for (const auto& r : runs) {
      out.push_back(argus ? r.on : r.off);
    }
    return out;
  }

  /// Takeover accuracy pooled over every pair.
  [[nodiscard]] TakeoverScore pooled_score(double beta = 3.0) const
  {
    TakeoverScore s;
    int covered = 0;
    int labels = 0;
    for (const auto& r : runs) {
      s.tp += r.score.tp;
      s.fp += r.score.fp;
      s.fn += r.score.fn;
      labels += static_cast<int>(r.off.violations.size());
    }
    covered = labels - s.fn;
    s.precision = s.tp + s.fp == 0 ? 1.0 : static_cast<double>(s.tp) / (s.tp + s.fp);
    s.recall = labels == 0 ? 1.0 : static_cast<double>(covered) / labels;
    s.f_beta = f_beta_score(s.precision, s.recall, beta);
    return s;
  }
};

inline PairedRun run_pair(const Scenario& s, const RunConfig& base, double window = 3.0)
{
  PairedRun p;
  p.scenario = s.name;
  p.stub = s.ads.kind;
  p.dt = s.dt();
  RunConfig off = base;
  off.argus = false;
  RunConfig on = base;
  on.argus = true;
  RunResult r_off = run_scenario(s, off);
  RunResult r_on = run_scenario(s, on);
  p.digest_off = trace_digest(r_off.trace);
  p.digest_on = trace_digest(r_on.trace);
  p.off = std::move(r_off.report);
  p.on = std::move(r_on.report);
  p.score = score_takeovers(p.on, p.off, p.dt, window);
  return p;
}

/// Runs every scenario in both arms. Workers pull scenarios from a shared counter; results are
/// stored by index, so the output does not depend on scheduling.
inline SuiteResult run_suite(const std::vector<Scenario>& scenarios, const RunConfig& base,
                             unsigned workers = 1)
{
  SuiteResult out;
  out.runs.resize(scenarios.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(scenarios.size());
  const auto work = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        out.runs[i] = run_pair(scenarios[i], base);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(scenarios.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return out;
}

struct SuiteRow
{
  std::string stub;
  bool argus{false};
  BenchmarkSummary summary;
};

/// One row per (stub, argus) pair present in the result, then the two overall rows.
inline std::vector<SuiteRow> suite_rows(const SuiteResult& r)
{
  std::vector<SuiteRow> rows;
  std::map<std::string, std::pair<std::vector<RunReport>, std::vector<RunReport>>> by_stub;
  for (const auto& p : r.runs) {
    auto& slot = by_stub[std::string(to_string(p.stub))];
    slot.first.push_back(p.off);
    slot.second.push_back(p.on);
  }
  for (const auto& [stub, reps] : by_stub) {
    rows.push_back({stub, false, aggregate(reps.first)});
    rows.push_back({stub, true, aggregate(reps.second)});
  }
  if (!r.runs.empty()) {
    rows.push_back({"all", false, aggregate(r.reports(false))});
    rows.push_back({"all", true, aggregate(r.reports(true))});
  }
  return rows;
}

inline std::string format_suite_table(const SuiteResult& r)
{
  std::ostringstream os;
  os << std::fixed;
  os << std::left << std::setw(20) << "stub" << std::setw(7) << "argus" << std::right
     << std::setw(6) << "runs" << std::setw(9) << "SR%" << std::setw(9) << "RC%" << std::setw(9)
     << "DS" << std::setw(10) << "Coll/km" << std::setw(10) << "Stop/km" << std::setw(10)
     << "Stall/km" << '\n';
  for (const auto& row : suite_rows(r)) {
    const auto& s = row.summary;
    os << std::left << std::setw(20) << row.stub << std::setw(7) << (row.argus ? "on" : "off")
       << std::right << std::setw(6) << s.runs << std::setprecision(1) << std::setw(9)
       << s.success_rate << std::setw(9) << s.route_completion << std::setw(9) << s.driving_score
       << std::setprecision(2) << std::setw(10) << s.collisions_per_km << std::setw(10)
       << s.stops_per_km << std::setw(10) << s.stalls_per_km << '\n';
  }
  const TakeoverScore ts = r.pooled_score();
  os << std::setprecision(3) << "takeover accuracy: TP=" << ts.tp << " FP=" << ts.fp
     << " FN=" << ts.fn << " P=" << ts.precision << " R=" << ts.recall << " F3=" << ts.f_beta
     << '\n';
  return os.str();
}

inline json suite_json(const SuiteResult& r)
{
  json rows = json::array();
  for (const auto& row : suite_rows(r)) {
    const auto& s = row.summary;
    json counts = json::object();
    for (const auto k : kAllViolationKinds) {
      counts[std::string(to_string(k))] = s.count(k);
    }
    rows.push_back({{"stub", row.stub},
                    {"argus", row.argus},
                    {"runs", s.runs},
                    {"success_rate", s.success_rate},
                    {"route_completion", s.route_completion},
                    {"driving_score", s.driving_score},
                    {"distance_km", s.distance_km},
                    {"collisions_per_km", s.collisions_per_km},
                    {"stops_per_km", s.stops_per_km},
                    {"stalls_per_km", s.stalls_per_km},
                    {"counts", counts}});
  }
  json runs = json::array();
  for (const auto& p : r.runs) {
    runs.push_back({{"scenario", p.scenario},
                    {"stub", std::string(to_string(p.stub))},
                    {"off", to_json(p.off)},
                    {"on", to_json(p.on)},
                    {"digest_off", hex64(p.digest_off)},
                    {"digest_on", hex64(p.digest_on)},
                    {"takeover_score",
                     {{"tp", p.score.tp},
                      {"fp", p.score.fp},
                      {"fn", p.score.fn},
                      {"precision", p.score.precision},
                      {"recall", p.score.recall},
                      {"f3", p.score.f_beta}}}});
  }
  const TakeoverScore ts = r.pooled_score();
  return {{"rows", rows},
          {"runs", runs},
          {"takeover_accuracy",
           {{"tp", ts.tp},
            {"fp", ts.fp},
            {"fn", ts.fn},
            {"precision", ts.precision},
            {"recall", ts.recall},
            {"f3", ts.f_beta}}}};
}

}  // namespace argus::sim
