#include "fixtures.hpp"

#include <argus/sim/trace_io.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("argus_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Runs the CLI with ARGUS_OUT_DIR pointing at the test directory; returns the exit code.
  int argus(const std::string& args)
  {
    const std::string cmd = "ARGUS_OUT_DIR='" + dir_.string() + "' '" + ARGUS_CLI_PATH + "' " +
                            args + " > '" + (dir_ / "stdout.txt").string() + "' 2> '" +
                            (dir_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const
  {
    std::ifstream is(dir_ / name);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  }

  void write(const std::string& name, const std::string& text) const
  {
    std::ofstream(dir_ / name) << text;
  }

  std::vector<std::string> trace_lines(const std::string& name) const
  {
    std::vector<std::string> lines;
    std::istringstream is(read(name));
    for (std::string l; std::getline(is, l);) {
      lines.push_back(l);
    }
    return lines;
  }

  static std::string join(const std::vector<std::string>& lines)
  {
    std::string s;
    for (const auto& l : lines) {
      s += l + "\n";
    }
    return s;
  }

  std::string path(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }

  fs::path dir_;
};

std::string fixture(const std::string& name)
{
  return "'" + argus_test::scenario_path(name) + "'";
}

}  // namespace

TEST_F(Cli, HelpExitsZero)
{
  EXPECT_EQ(argus("--help"), 0);
  EXPECT_NE(read("stdout.txt").find("run"), std::string::npos);
}

TEST_F(Cli, MissingSubcommandIsUsageError)
{
  EXPECT_EQ(argus(""), 2);
}

TEST_F(Cli, MissingScenarioIsInputError)
{
  EXPECT_EQ(argus("run " + path("missing.json")), 3);
  EXPECT_NE(read("stderr.txt").find("missing.json"), std::string::npos);
}

TEST_F(Cli, MalformedScenarioIsInputError)
{
  write("bad.json", "{\"schema_version\": 1,");
  EXPECT_EQ(argus("run " + path("bad.json")), 3);
}

TEST_F(Cli, ThresholdAboveQueueLengthIsUsageError)
{
  EXPECT_EQ(argus("run " + fixture("stopsign_runner") + " --gate.l=9 --gate.M=5"), 2);
}

TEST_F(Cli, BadSwitchValueIsUsageError)
{
  EXPECT_EQ(argus("run " + fixture("empty_road") + " --argus=maybe"), 2);
}

TEST_F(Cli, RunWritesReportAndTraceIntoOutDir)
{
  ASSERT_EQ(argus("run " + fixture("stopsign_runner")), 0);
  const json report = json::parse(read("stopsign_runner.on.report.json"));
  EXPECT_EQ(report.at("violations").size(), 0U);
  EXPECT_FALSE(trace_lines("stopsign_runner.on.trace.jsonl").empty());
  EXPECT_NE(read("stdout.txt").find("argus=on"), std::string::npos);
}

TEST_F(Cli, ReplayVerifiesAFreshTrace)
{
  ASSERT_EQ(argus("run " + fixture("stopsign_runner") + " --argus=off"), 0);
  EXPECT_EQ(argus("replay " + path("stopsign_runner.off.trace.jsonl")), 0);
  EXPECT_NE(read("stdout.txt").find("verified"), std::string::npos);
}

TEST_F(Cli, ReplayFlagsATamperedTrace)
{
  ASSERT_EQ(argus("run " + fixture("stopsign_runner") + " --argus=off"), 0);
  auto lines = trace_lines("stopsign_runner.off.trace.jsonl");
  bool edited = false;
  for (auto& l : lines) {
    json j = json::parse(l);
    if (j.at("type") == "frame" && !j.at("violations").empty()) {
      j["violations"] = json::array();
      l = j.dump();
      edited = true;
      break;
    }
  }
  ASSERT_TRUE(edited);
  write("tampered.jsonl", join(lines));
  EXPECT_EQ(argus("replay " + path("tampered.jsonl")), 1);
  EXPECT_NE(read("stdout.txt").find("mismatch"), std::string::npos);
}

TEST_F(Cli, ReplayRejectsAnOldTraceVersion)
{
  ASSERT_EQ(argus("run " + fixture("empty_road")), 0);
  auto lines = trace_lines("empty_road.on.trace.jsonl");
  json h = json::parse(lines.front());
  h["schema_version"] = 0;
  lines.front() = h.dump();
  write("old.jsonl", join(lines));
  EXPECT_EQ(argus("replay " + path("old.jsonl")), 3);
  EXPECT_NE(read("stderr.txt").find("schema_version"), std::string::npos);
}

TEST_F(Cli, ScoreReadsTwoTraces)
{
  ASSERT_EQ(argus("run " + fixture("stopsign_runner")), 0);
  ASSERT_EQ(argus("run " + fixture("stopsign_runner") + " --argus=off"), 0);
  EXPECT_EQ(argus("score " + path("stopsign_runner.on.trace.jsonl") + " " +
                  path("stopsign_runner.off.trace.jsonl")),
            0);
  EXPECT_NE(read("stdout.txt").find("TP=1 FP=0 FN=0"), std::string::npos) << read("stdout.txt");
  EXPECT_EQ(argus("score " + path("stopsign_runner.off.trace.jsonl") + " " +
                  path("stopsign_runner.on.trace.jsonl")),
            2);
}

TEST_F(Cli, SuiteOfOneScenario)
{
  EXPECT_EQ(argus("suite " + fixture("empty_suite")), 0);
  const json j = json::parse(read("empty.suite.json"));
  EXPECT_TRUE(j.is_object());
  EXPECT_NE(read("stdout.txt").find("suite empty"), std::string::npos);
}

TEST_F(Cli, PlotWritesSvgFiles)
{
  ASSERT_EQ(argus("run " + fixture("stopsign_runner") + " --plot"), 0);
  EXPECT_NE(read("stopsign_runner.on.overhead.svg").find("<svg"), std::string::npos);
  EXPECT_NE(read("stopsign_runner.on.timeseries.svg").find("<svg"), std::string::npos);
}
