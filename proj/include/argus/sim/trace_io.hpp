#pragma once
/**
 * @file trace_io.hpp
 * @brief JSON Lines trace files and their verification by replay.
 *
 * Layout: one header line, one line per frame record, one report line.
 */

#include <argus/sim/harness.hpp>

#include <fstream>

namespace argus::sim {

inline constexpr int kTraceSchemaVersion = 1;

inline void write_trace(std::ostream& os, const RunTrace& trace, const RunReport& report)
{
  json header = {{"type", "header"},
                 {"schema_version", kTraceSchemaVersion},
                 {"scenario", to_json(trace.scenario)},
                 {"config", to_json(trace.config)}};
  os << header.dump() << '\n';
  for (const auto& r : trace.records) {
    json line = record_line(r);
    line["type"] = "frame";
    os << line.dump() << '\n';
  }
  os << json{{"type", "report"}, {"report", to_json(report)}}.dump() << '\n';
}

inline void write_trace_file(const std::string& path, const RunTrace& trace, const RunReport& report)
{
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot write trace file " + path);
  }
  write_trace(os, trace, report);
}

class TraceVersionError : public std::runtime_error
{
public:
  TraceVersionError(int found)
  : std::runtime_error("unsupported trace schema_version " + std::to_string(found) +
                       " (this build reads version " + std::to_string(kTraceSchemaVersion) + ")"),
    found_(found)
  {
  }
  [[nodiscard]] int found() const { return found_; }

private:
  int found_;
};

class TraceFormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct LoadedTrace
{
  RunTrace trace;
  RunReport report;
  std::vector<std::uint64_t> content_digests;  ///< digests recomputed from each frame line
};

inline LoadedTrace read_trace(std::istream& is, const std::string& origin = "<trace>")
{
  LoadedTrace out;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  bool have_report = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    const std::string where = origin + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw TraceFormatError(where + ": " + e.what());
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (!have_header) {
        if (type != "header") {
          throw TraceFormatError(where + ": first line must be the header");
        }
        const int version = j.at("schema_version").get<int>();
        if (version != kTraceSchemaVersion) {
          throw TraceVersionError(version);
        }
        out.trace.scenario = parse_scenario(j.at("scenario"), where + "#scenario");
        out.trace.config = run_config_from_json(j.at("config"));
        have_header = true;
      } else if (type == "frame") {
        out.trace.records.push_back(record_from_json(j));
        j.erase("type");
        j.erase("digest");
        out.content_digests.push_back(digest_of(j));
      } else if (type == "report") {
        out.report = report_from_json(j.at("report"));
        have_report = true;
      } else {
        throw TraceFormatError(where + ": unknown line type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw TraceFormatError(where + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw TraceFormatError(where + ": " + e.what());
    }
  }
  if (!have_header) {
    throw TraceFormatError(origin + ": empty trace");
  }
  if (!have_report) {
    throw TraceFormatError(origin + ": missing report line");
  }
  return out;
}

inline LoadedTrace read_trace_file(const std::string& path)
{
  std::ifstream is(path);
  if (!is) {
    throw TraceFormatError(path + ": cannot open trace file");
  }
  return read_trace(is, path);
}

struct ReplayOutcome
{
  bool ok{true};
  std::vector<std::string> mismatches;
  bool resimulated{false};
};

/**
 * Re-verifies a loaded trace: record digests, the ownership invariant count, every report metric,
 * and (for synchronous runs) a fresh simulation reproducing the same record digests.
 */
inline ReplayOutcome verify_trace(const LoadedTrace& lt, bool resimulate = true)
{
  ReplayOutcome o;
  const auto fail = [&](std::string m) {
    o.ok = false;
    o.mismatches.push_back(std::move(m));
  };
  const auto& recs = lt.trace.records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (lt.content_digests[i] != recs[i].digest) {
      fail("frame " + std::to_string(recs[i].frame) + ": record digest mismatch");
    }
    if (recs[i].frame != static_cast<int>(i)) {
      fail("frame index " + std::to_string(recs[i].frame) + " at position " + std::to_string(i));
    }
  }
  const int eq8 = check_eq8(recs);
  if (eq8 != lt.report.eq8_violations) {
    fail("ownership invariant recount " + std::to_string(eq8) + " != stored " +
         std::to_string(lt.report.eq8_violations));
  }
  const RunReport recomputed = compute_report(lt.trace);
  if (to_json(recomputed) != to_json(lt.report)) {
    fail("report metrics differ from recomputation: stored " + to_json(lt.report).dump() +
         " recomputed " + to_json(recomputed).dump());
  }
  if (resimulate && !lt.trace.config.async_monitor) {
    o.resimulated = true;
    const RunResult rerun = run_scenario(lt.trace.scenario, lt.trace.config);
    const auto& again = rerun.trace.records;
    if (again.size() != recs.size()) {
      fail("re-simulation produced " + std::to_string(again.size()) + " frames, trace has " +
           std::to_string(recs.size()));
    }
    for (std::size_t i = 0; i < std::min(again.size(), recs.size()); ++i) {
      if (again[i].digest != recs[i].digest) {
        fail("re-simulation diverges at frame " + std::to_string(i));
        break;
      }
    }
  }
  return o;
}

}  // namespace argus::sim
