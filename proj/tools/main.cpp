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

// sociallearn: command-line harness.
//
//   sociallearn check-topology --graph "royal_family(3,10)"
//   sociallearn graph-distance --graph1 "dicycle(5)" --graph2 "dicycle(8)" --r-max 10
//   sociallearn simulate --config recipes/cycle20_myopic.cfg --out out/
//   sociallearn verify-invariants --scope belief
//
// Exit codes: 0 success, 1 invariant failure, 2 invalid input.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "config.hpp"
#include "invariants.hpp"
#include "report.hpp"
#include "sociallearn/sociallearn.hpp"

namespace {

namespace sl = sociallearn;
namespace cli = sociallearn::cli;
using cli::ordered_json;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInvalid = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  std::string format;
};

void add_common(CLI::App& sub, Common& c) {
  sub.add_option("--config", c.config, "Run configuration (INI or .json)")->envname("SOCIALLEARN_CONFIG");
  sub.add_option("--seed", c.seed, "Master seed")->envname("SOCIALLEARN_SEED");
  sub.add_option("--workers", c.workers, "Worker threads (0: all cores)")->envname("SOCIALLEARN_WORKERS");
  sub.add_option("--out", c.out, "Output directory")->envname("SOCIALLEARN_OUT");
  sub.add_option("--format", c.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->envname("SOCIALLEARN_FORMAT");
}

cli::RunConfig resolve(const Common& c) {
  cli::RunConfig cfg = c.config.empty() ? cli::RunConfig{} : cli::load_config(c.config);
  if (c.seed) cfg.sim.seed = *c.seed;
  if (c.workers) cfg.sim.workers = *c.workers;
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (!c.format.empty()) cfg.format = c.format;
  cli::validate(cfg);
  return cfg;
}

sl::DirectedGraph graph_from(const std::string& spec, const std::string& edges) {
  if (!edges.empty()) {
    std::ifstream in(edges);
    if (!in) throw sl::InvalidInput("cannot open edge list '" + edges + "'");
    return sl::read_edge_list(in);
  }
  return sl::generate(sl::GraphFamilySpec::parse(spec));
}

void emit(const ordered_json& j, const std::string& out_dir, const std::string& name) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    cli::write_file(std::filesystem::path(out_dir) / name, text);
  }
}

int check_topology(const std::string& spec, const std::string& edges, const std::string& out_dir) {
  sl::DirectedGraph g = graph_from(spec, edges);
  if (!sl::is_strongly_connected(g)) {
    std::cerr << "error: graph is not strongly connected\n";
    return kInvalid;
  }
  ordered_json j = {{"version", sl::kVersion},
                    {"graph", g.family ? g.family->to_string() : edges},
                    {"agents", g.size()},
                    {"strongly_connected", true},
                    {"L", sl::min_l_connectivity(g)},
                    {"d", sl::out_degree_bound(g)}};
  emit(j, out_dir, "topology.json");
  return kOk;
}

int graph_distance(const std::string& s1, int root1, const std::string& s2, int root2, int r_max,
                   const std::string& out_dir) {
  sl::DirectedGraph g1 = graph_from(s1, "");
  sl::DirectedGraph g2 = graph_from(s2, "");
  sl::RootedDistance d = sl::rooted_distance(g1, root1, g2, root2, r_max);
  ordered_json j = {{"version", sl::kVersion},
                    {"graph1", s1},
                    {"root1", root1},
                    {"graph2", s2},
                    {"root2", root2},
                    {"r_max", r_max},
                    {"distance", d.value},
                    {"matched_radius", d.matched_radius},
                    {"truncated", d.truncated}};
  emit(j, out_dir, "distance.json");
  return kOk;
}

int simulate(const Common& common) {
  if (common.config.empty()) throw sl::InvalidInput("simulate needs --config");
  cli::RunConfig cfg = resolve(common);
  cli::SimulationOutput result = cli::simulate(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  cli::write_file(dir / ("report." + cfg.format), cli::report_text(cfg, result.report, cfg.format));
  cli::write_file(dir / "traces.csv", cli::csv_preamble(cfg) + result.traces_csv);
  const auto& e = result.report["ensemble"];
  std::cout << "engine " << e["engine"].get<std::string>() << ", " << e["replicates"] << " replicates"
            << ", learning frequency " << e["learning_frequency"]
            << ", agreement " << e["agreement_frequency"] << "\n"
            << "wrote " << (dir / ("report." + cfg.format)).string() << " and "
            << (dir / "traces.csv").string() << "\n";
  return kOk;
}

int verify_invariants(const std::string& scope, const Common& common) {
  cli::RunConfig cfg = resolve(common);
  auto results = cli::run_invariants(scope, cfg.sim.seed);
  bool ok = true;
  ordered_json list = ordered_json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.scope << ": " << r.name << " (" << r.cases
              << " cases)" << (r.passed ? "" : " -- " + r.detail) << "\n";
    list.push_back({{"scope", r.scope}, {"name", r.name}, {"passed", r.passed},
                    {"cases", r.cases}, {"detail", r.detail}});
  }
  std::cout << (ok ? "all invariants hold" : "invariant failures detected") << "\n";
  if (!common.out.empty()) {
    std::filesystem::create_directories(common.out);
    ordered_json j = cli::provenance(cfg);
    j["scope"] = scope;
    j["passed"] = ok;
    j["properties"] = list;
    cli::write_file(std::filesystem::path(common.out) / "invariants.json", j.dump(2) + "\n");
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian social learning on networks"};
  app.set_version_flag("--version", std::string(sl::kVersion));
  app.require_subcommand(1);

  Common topo_c, dist_c, sim_c, inv_c;
  std::string graph_spec, edges;
  auto* topo = app.add_subcommand("check-topology", "Strong connectivity, L and out-degree bound d");
  topo->add_option("--graph", graph_spec, "Graph family, e.g. royal_family(3,10)");
  topo->add_option("--edges", edges, "Edge list file (one 'from to' pair per line)");
  topo->add_option("--out", topo_c.out, "Output directory")->envname("SOCIALLEARN_OUT");

  std::string g1, g2;
  int root1 = 0, root2 = 0, r_max = 10;
  auto* dist = app.add_subcommand("graph-distance", "Rooted-graph distance between two rooted graphs");
  dist->add_option("--graph1", g1, "First graph family")->required();
  dist->add_option("--root1", root1, "Root in the first graph");
  dist->add_option("--graph2", g2, "Second graph family")->required();
  dist->add_option("--root2", root2, "Root in the second graph");
  dist->add_option("--r-max", r_max, "Largest radius compared");
  dist->add_option("--out", dist_c.out, "Output directory")->envname("SOCIALLEARN_OUT");

  auto* sim = app.add_subcommand("simulate", "Run an ensemble and write report and traces");
  add_common(*sim, sim_c);

  std::string scope = "all";
  auto* inv = app.add_subcommand("verify-invariants", "Run the property suites");
  inv->add_option("--scope", scope, "all | graph | signal | belief | strategy | dynamics | stats");
  add_common(*inv, inv_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*topo) {
      if (graph_spec.empty() == edges.empty())
        throw sl::InvalidInput("check-topology needs exactly one of --graph and --edges");
      return check_topology(graph_spec, edges, topo_c.out);
    }
    if (*dist) return graph_distance(g1, root1, g2, root2, r_max, dist_c.out);
    if (*sim) return simulate(sim_c);
    if (*inv) return verify_invariants(scope, inv_c);
  } catch (const sl::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const sl::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kInvalid;
}
