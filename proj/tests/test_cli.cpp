// Copyright 2026 The SocialLearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "invariants.hpp"
#include "report.hpp"

namespace sociallearn::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("sociallearn_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SOCIALLEARN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, IniSections) {
  fs::path dir = scratch("ini");
  RunConfig c = load_config(write(dir / "run.cfg",
                                  "[graph]\nfamily = royal_family(3,10)\n"
                                  "[signal]\nmodel = royal_bounded(1.5,-1.5)\n"
                                  "[profile]\nkind = royal_family\ntie_break = one\n"
                                  "[sim]\nhorizon = 12\nreplicates = 40\ntail_window = 3\nseed = 9\n"
                                  "[inject]\nmode = royal_j\nstate = 0\n")
                                .string());
  EXPECT_EQ(c.graph, "royal_family(3,10)");
  EXPECT_EQ(c.profile, "royal_family");
  EXPECT_EQ(c.tie_break, TieBreak::kOne);
  EXPECT_EQ(c.sim.horizon, 12);
  EXPECT_EQ(c.sim.replicates, 40u);
  EXPECT_EQ(c.sim.seed, 9u);
  EXPECT_EQ(c.inject, InjectMode::kRoyalJ);
  EXPECT_EQ(c.inject_state, 0);
}

TEST(Config, JsonMatchesIni) {
  fs::path dir = scratch("json");
  RunConfig a = load_config(write(dir / "a.cfg", "[graph]\nfamily = cycle(7)\n[sim]\nhorizon = 9\nseed = 4\n").string());
  RunConfig b = load_config(
      write(dir / "b.json", R"j({"graph": {"family": "cycle(7)"}, "sim": {"horizon": 9, "seed": 4}})j").string());
  EXPECT_EQ(echo(a), echo(b));
}

TEST(Config, ForcedMovesAndAtoms) {
  RunConfig c;
  apply_setting(c, "profile.forced", "2:0:1; 2:1:0");
  ASSERT_EQ(c.forced.size(), 2u);
  EXPECT_EQ(c.forced[1].agent, 2);
  EXPECT_EQ(c.forced[1].t, 1);
  EXPECT_EQ(c.forced[1].action, 0);
  apply_setting(c, "inject.atoms", "0:1;4:0");
  EXPECT_EQ(c.inject_atoms, (std::vector<std::pair<AgentId, int>>{{0, 1}, {4, 0}}));
  EXPECT_THROW(apply_setting(c, "profile.forced", "2:0"), InvalidInput);
}

TEST(Config, RejectsBadInput) {
  RunConfig c;
  EXPECT_THROW(apply_setting(c, "sim.colour", "blue"), InvalidInput);
  EXPECT_THROW(apply_setting(c, "sim.horizon", "ten"), InvalidInput);
  EXPECT_THROW(apply_setting(c, "inject.state", "2"), InvalidInput);
  EXPECT_THROW(apply_setting(c, "inject.mode", "everyone"), InvalidInput);
  EXPECT_THROW(load_config("/nonexistent/run.cfg"), InvalidInput);
  fs::path dir = scratch("bad");
  EXPECT_THROW(load_config(write(dir / "x.json", "{not json").string()), InvalidInput);
  EXPECT_THROW(load_config(write(dir / "y.cfg", "[sim]\nhorizon = 4\ntail_window = 5\n").string()), InvalidInput);
  EXPECT_THROW(load_config(write(dir / "z.cfg", "[output]\nformat = xml\n").string()), InvalidInput);
}

TEST(Config, EchoIsStableAndComplete) {
  RunConfig c;
  auto e = echo(c);
  EXPECT_EQ(e.front().first, "graph.family");
  RunConfig back;
  for (const auto& [k, v] : e)
    if (!v.empty()) apply_setting(back, k, v);
  EXPECT_EQ(echo(back), e);
}

TEST(Config, BuildersFollowTheConfig) {
  RunConfig c;
  c.graph = "mad_king(2,5,3)";
  c.signal = "mad_king_asym(0)";
  c.profile = "mad_king";
  c.inject = InjectMode::kMadKingJ;
  DirectedGraph g = build_graph(c);
  EXPECT_EQ(g.size(), 12);
  SignalModel m = parse_signal_model(c.signal, 1.0);
  EXPECT_EQ(m, mad_king_asym(0));
  EXPECT_EQ(build_profile(c, g).kind, ProfileKind::kMadKing);
  auto inj = build_injection(c, g, m);
  ASSERT_TRUE(inj.has_value());
  EXPECT_EQ(inj->atoms.size(), 5u);
  for (auto [agent, atom] : inj->atoms) EXPECT_EQ(atom, favouring_one(m));
  EXPECT_THROW(parse_signal_model("symmetric_binary(", 1.0), InvalidInput);
}

RunConfig quick_config() {
  RunConfig c;
  c.graph = "cycle(6)";
  c.sim.horizon = 6;
  c.sim.replicates = 300;
  c.sim.tail_window = 2;
  c.sim.workers = 1;
  c.export_traces = 3;
  return c;
}

TEST(Simulate, ReportIsDeterministic) {
  RunConfig c = quick_config();
  SimulationOutput a = simulate(c);
  c.sim.workers = 3;
  SimulationOutput b = simulate(c);
  EXPECT_EQ(report_text(c, a.report, "csv"), report_text(c, b.report, "csv"));
  EXPECT_EQ(a.traces_csv, b.traces_csv);
  EXPECT_EQ(a.report["seed"], 1);
  EXPECT_TRUE(a.report.contains("config"));
  EXPECT_EQ(a.report["ensemble"]["engine"], "exact");
}

TEST(Simulate, TracesCarryExactPosteriors) {
  RunConfig c = quick_config();
  SimulationOutput out = simulate(c);
  std::istringstream in(out.traces_csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "replicate,state,agent,atom,round,action,tie,posterior");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 8u);
    double p = std::stod(cells[7]);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    if (cells[4] == "0") EXPECT_NEAR(p, cells[3] == "0" ? 0.6 : 0.4, 1e-9);
  }
  EXPECT_EQ(rows, 3 * 6 * 6);
}

TEST(Simulate, CsvReportHasPreamble) {
  RunConfig c = quick_config();
  std::string text = report_text(c, simulate(c).report, "csv");
  EXPECT_EQ(text.rfind("# sociallearn ", 0), 0u);
  EXPECT_NE(text.find("# seed = 1\n"), std::string::npos);
  EXPECT_NE(text.find("\nkey,value\n"), std::string::npos);
  EXPECT_NE(text.find("\nensemble.learning_frequency,"), std::string::npos);
}

TEST(Cli, TopologyExitCodes) {
  fs::path dir = scratch("topology");
  EXPECT_EQ(run_cli("check-topology --graph 'royal_family(3,10)' --out " + dir.string()), 0);
  EXPECT_EQ(run_cli("check-topology --graph 'dipath(4)' --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("check-topology --graph 'hypercube(3)'"), 2);
  EXPECT_EQ(run_cli("no-such-command"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(Cli, SimulateWritesByteIdenticalOutputs) {
  fs::path dir = scratch("simulate");
  fs::path cfg = write(dir / "run.cfg",
                       "[graph]\nfamily = cycle(6)\n[sim]\nhorizon = 6\nreplicates = 200\ntail_window = 2\n"
                       "[output]\nformat = csv\ntraces = 2\n");
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --workers 1 --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --workers 2 --out " + (dir / "b").string()), 0);
  for (const char* f : {"report.csv", "traces.csv"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_EQ(run_cli("simulate --config " + (dir / "missing.cfg").string()), 2);
}

TEST(Cli, SeedFromEnvironment) {
  fs::path dir = scratch("env");
  fs::path cfg = write(dir / "run.cfg", "[graph]\nfamily = cycle(5)\n[sim]\nhorizon = 4\nreplicates = 50\ntail_window = 2\n");
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --seed 77 --out " + (dir / "a").string()), 0);
  const std::string env = "SOCIALLEARN_SEED=77 ";
  const int status = std::system((env + SOCIALLEARN_CLI_PATH + " simulate --config " + cfg.string() + " --out " +
                                  (dir / "b").string() + " >/dev/null 2>&1")
                                     .c_str());
  ASSERT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
  auto report = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
  EXPECT_EQ(report["seed"], 77);
}

TEST(Invariants, UnknownScope) {
  EXPECT_THROW(run_invariants("everything", 1), InvalidInput);
  EXPECT_EQ(run_cli("verify-invariants --scope everything"), 2);
}

class InvariantSuite : public ::testing::TestWithParam<std::string> {};

TEST_P(InvariantSuite, AllPropertiesHold) {
  for (const PropertyResult& r : run_invariants(GetParam(), 1)) {
    EXPECT_TRUE(r.passed) << r.scope << "/" << r.name << ": " << r.detail;
    EXPECT_GT(r.cases, 0u) << r.name;
  }
}

INSTANTIATE_TEST_SUITE_P(Scopes, InvariantSuite,
                         ::testing::Values("graph", "signal", "belief", "strategy", "dynamics", "stats"));

}  // namespace
}  // namespace sociallearn::cli
