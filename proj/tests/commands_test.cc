#include "netgame/commands.h"

#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "test_util.h"

namespace netgame {
namespace {

namespace fs = std::filesystem;

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("netgame_cmd_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static fs::path data(const std::string& relative) { return testing::source_path(relative); }
  fs::path tmp(const std::string& name) const { return dir_ / name; }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  int synth(const std::string& scenario, std::optional<StrategyKind> kind, const fs::path& out) {
    std::ostringstream o, e;
    return cmd_synth(data(scenario), kind, out, o, e);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CommandsTest, ExitCodesAreDistinct) {
  EXPECT_EQ(exit_code_for_assumption(1), 10);
  EXPECT_EQ(exit_code_for_assumption(6), 15);
  std::set<int> codes;
  for (int a = 1; a <= 6; ++a) codes.insert(exit_code_for_assumption(a));
  codes.insert({kExitUsage, kExitParse, kExitIo, kExitSynthesis, kExitStaleController,
                kExitDivergence});
  EXPECT_EQ(codes.size(), 12u);
  EXPECT_EQ(codes.count(kExitOk), 0u);
}

TEST_F(CommandsTest, CheckPassesShippedScenarios) {
  for (const char* f : {"scenarios/sensor_network_digraph.json",
                        "scenarios/sensor_network_undirected.json",
                        "scenarios/sensor_network_digraph_general.json",
                        "tests/data/disturbance_free.json", "tests/data/perturbed_digraph.json"}) {
    std::ostringstream out, err;
    EXPECT_EQ(cmd_check(data(f), std::nullopt, out, err), kExitOk) << f << "\n" << out.str();
    EXPECT_NE(out.str().find("assumption 4  PASS"), std::string::npos) << out.str();
  }
}

TEST_F(CommandsTest, CheckRejectsBrokenScenarios) {
  EXPECT_EQ(cmd_check(data("tests/data/digraph_with_cycle.json"), std::nullopt, out_, err_),
            kExitAssumption5);
  EXPECT_NE(out_.str().find("assumption 5  FAIL"), std::string::npos) << out_.str();
  EXPECT_EQ(cmd_check(data("tests/data/disconnected.json"), std::nullopt, out_, err_),
            kExitAssumption6);
  EXPECT_EQ(cmd_check(data("tests/data/decaying_exosystem.json"), std::nullopt, out_, err_),
            kExitAssumption2);
  EXPECT_NE(out_.str().find("assumption 2  FAIL"), std::string::npos);
  EXPECT_EQ(cmd_check(data("tests/data/zero_input.json"), std::nullopt, out_, err_),
            kExitAssumption3);
  // The cyclic graph is still connected, so the general strategy accepts it.
  EXPECT_EQ(cmd_check(data("tests/data/digraph_with_cycle.json"), StrategyKind::kGeneral, out_,
                      err_),
            kExitOk);
}

TEST_F(CommandsTest, CheckReportsParseAndIoErrors) {
  std::ofstream(tmp("bad.json")) << "{\n  \"name\": \n";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_check(tmp("bad.json"), std::nullopt, out, err), kExitParse);
  EXPECT_NE(err.str().find("line"), std::string::npos) << err.str();
  EXPECT_EQ(cmd_check(tmp("absent.json"), std::nullopt, out, err), kExitIo);
}

TEST_F(CommandsTest, NePrintsEquilibrium) {
  EXPECT_EQ(cmd_ne(data("scenarios/sensor_network_digraph.json"), out_, err_), kExitOk);
  const std::string s = out_.str();
  EXPECT_NE(s.find("y*_1 -1 0\n"), std::string::npos) << s;
  EXPECT_NE(s.find("y*_2 0 -0.5\n"), std::string::npos) << s;
  EXPECT_NE(s.find("residual"), std::string::npos);
}

TEST_F(CommandsTest, SynthIsDeterministicAndGated) {
  EXPECT_EQ(synth("scenarios/sensor_network_digraph.json", std::nullopt, tmp("a.json")), kExitOk);
  EXPECT_EQ(synth("scenarios/sensor_network_digraph.json", std::nullopt, tmp("b.json")), kExitOk);
  EXPECT_EQ(slurp(tmp("a.json")), slurp(tmp("b.json")));
  EXPECT_EQ(synth("scenarios/sensor_network_digraph.json", StrategyKind::kGeneral, tmp("g.json")),
            kExitOk);
  EXPECT_NE(slurp(tmp("g.json")), slurp(tmp("a.json")));
  EXPECT_EQ(synth("tests/data/zero_input.json", std::nullopt, tmp("z.json")), kExitAssumption3);
  EXPECT_FALSE(fs::exists(tmp("z.json")));
  EXPECT_EQ(synth("tests/data/digraph_with_cycle.json", std::nullopt, tmp("c.json")),
            kExitAssumption5);
  EXPECT_EQ(synth("scenarios/sensor_network_digraph.json", std::nullopt,
                  tmp("missing_dir/c.json")),
            kExitIo);
}

TEST_F(CommandsTest, SimWritesCsvAndSummary) {
  ASSERT_EQ(synth("scenarios/sensor_network_digraph.json", std::nullopt, tmp("c.json")), kExitOk);
  SimOverrides o;
  o.controllers = tmp("c.json");
  o.out_csv = tmp("run.csv");
  o.svg = tmp("run.svg");
  o.t_end = 40.0;
  EXPECT_EQ(cmd_sim(data("scenarios/sensor_network_digraph.json"), o, out_, err_), kExitOk)
      << err_.str();
  EXPECT_NE(err_.str().find("T_conv"), std::string::npos);
  EXPECT_TRUE(fs::exists(tmp("run_gap.svg")));
  EXPECT_TRUE(fs::exists(tmp("run_error.svg")));
  const std::string csv = slurp(tmp("run.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')).substr(0, 10), "t,y_1_1,y_");
  // Stride 100 over 40000 steps: 401 samples plus the header.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 402);

  o.out_csv = tmp("again.csv");
  o.svg.reset();
  EXPECT_EQ(cmd_sim(data("scenarios/sensor_network_digraph.json"), o, out_, err_), kExitOk);
  EXPECT_EQ(slurp(tmp("again.csv")), csv);
}

TEST_F(CommandsTest, SimDistributedMatchesStackedFile) {
  ASSERT_EQ(synth("scenarios/sensor_network_undirected.json", std::nullopt, tmp("c.json")),
            kExitOk);
  SimOverrides o;
  o.controllers = tmp("c.json");
  o.t_end = 5.0;
  o.out_csv = tmp("stacked.csv");
  ASSERT_EQ(cmd_sim(data("scenarios/sensor_network_undirected.json"), o, out_, err_), kExitOk);
  o.distributed = true;
  o.out_csv = tmp("dist.csv");
  ASSERT_EQ(cmd_sim(data("scenarios/sensor_network_undirected.json"), o, out_, err_), kExitOk);
  const std::string stacked = slurp(tmp("stacked.csv"));
  const std::string dist = slurp(tmp("dist.csv"));
  EXPECT_EQ(std::count(dist.begin(), dist.end(), '\n'), std::count(stacked.begin(), stacked.end(), '\n'));
  EXPECT_EQ(dist.substr(0, dist.find('\n')), stacked.substr(0, stacked.find('\n')));
}

TEST_F(CommandsTest, SimRejectsStaleControllers) {
  ASSERT_EQ(synth("scenarios/sensor_network_digraph.json", std::nullopt, tmp("c.json")), kExitOk);
  SimOverrides o;
  o.controllers = tmp("c.json");
  o.out_csv = tmp("run.csv");
  EXPECT_EQ(cmd_sim(data("scenarios/sensor_network_digraph_general.json"), o, out_, err_),
            kExitStaleController);
  EXPECT_FALSE(fs::exists(tmp("run.csv")));
  o.controllers = tmp("absent.json");
  EXPECT_EQ(cmd_sim(data("scenarios/sensor_network_digraph.json"), o, out_, err_), kExitIo);
}

TEST_F(CommandsTest, SimZeroHorizonWritesHeaderOnly) {
  ASSERT_EQ(synth("scenarios/sensor_network_digraph.json", std::nullopt, tmp("c.json")), kExitOk);
  SimOverrides o;
  o.controllers = tmp("c.json");
  o.out_csv = tmp("run.csv");
  o.t_end = 0.0;
  EXPECT_EQ(cmd_sim(data("scenarios/sensor_network_digraph.json"), o, out_, err_), kExitOk);
  const std::string csv = slurp(tmp("run.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
  EXPECT_EQ(csv.rfind("t,y_1_1", 0), 0u);
}

TEST_F(CommandsTest, SimPerturbationTable) {
  ASSERT_EQ(synth("scenarios/sensor_network_digraph.json", std::nullopt, tmp("c.json")), kExitOk);
  SimOverrides o;
  o.controllers = tmp("c.json");
  o.out_csv = tmp("run.csv");
  o.t_end = 2.0;
  o.perturb_scale = 0.01;
  o.samples = 3;
  o.seed = 4;
  EXPECT_EQ(cmd_sim(data("scenarios/sensor_network_digraph.json"), o, out_, err_), kExitOk);
  const std::string table = out_.str();
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  EXPECT_NE(table.find("yes"), std::string::npos);

  std::ostringstream again, err;
  cmd_sim(data("scenarios/sensor_network_digraph.json"), o, again, err);
  EXPECT_EQ(again.str(), table);
}

}  // namespace
}  // namespace netgame
