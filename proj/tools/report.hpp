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

#ifndef SOCIALLEARN_TOOLS_REPORT_HPP_
#define SOCIALLEARN_TOOLS_REPORT_HPP_

// Simulation reports (JSON or key,value CSV) and trace CSV files. Every
// artifact carries the config echo, the master seed and the version string,
// and contains no wall-clock data, so reruns are byte-identical.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "sociallearn/sociallearn.hpp"

namespace sociallearn::cli {

using nlohmann::ordered_json;

inline ordered_json provenance(const RunConfig& c) {
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : echo(c)) cfg[k] = v;
  return {{"version", kVersion}, {"seed", c.sim.seed}, {"config", cfg}};
}

// "# key = value" lines heading every CSV file.
inline std::string csv_preamble(const RunConfig& c) {
  std::ostringstream out;
  out << "# sociallearn " << kVersion << "\n# seed = " << c.sim.seed << "\n";
  for (const auto& [k, v] : echo(c)) out << "# " << k << " = " << v << "\n";
  return out.str();
}

inline ordered_json interval_json(const Interval& ci) { return {ci.low, ci.high}; }

inline ordered_json ensemble_json(const EnsembleReport& r) {
  ordered_json per_agent = ordered_json::array();
  for (std::size_t i = 0; i < r.learning.size(); ++i)
    per_agent.push_back({{"agent", i},
                         {"learning", r.learning[i]},
                         {"learning_ci", interval_json(r.learning_ci[i])},
                         {"utility", r.utility[i]}});
  return {{"engine", r.engine},
          {"agents", r.agents},
          {"horizon", r.horizon},
          {"tail_window", r.tail_window},
          {"discount", r.discount},
          {"replicates", r.replicates},
          {"learning_frequency", r.all_learning},
          {"learning_frequency_ci", interval_json(r.all_learning_ci)},
          {"learning_frequency_se", r.all_learning_se()},
          {"non_learning_frequency", r.non_learning()},
          {"mean_agent_learning", r.mean_learning},
          {"mean_agent_learning_se", r.mean_learning_se},
          {"agreement_frequency", r.agreement},
          {"agreement_ci", interval_json(r.agreement_ci)},
          {"tie_events", r.tie_events},
          {"tie_rate", r.tie_rate},
          {"replicates_with_ties", r.replicates_with_ties},
          {"state_one", r.state_one},
          {"utility_remainder_bound", r.utility_remainder},
          {"per_agent", per_agent}};
}

// Named agent groups used for per-role timelines.
inline std::vector<std::pair<std::string, std::vector<AgentId>>> role_groups(const DirectedGraph& g) {
  std::vector<std::pair<std::string, std::vector<AgentId>>> groups;
  if (!g.family) return groups;
  using F = GraphFamilySpec::Family;
  if (g.family->family == F::kRoyalFamily) {
    RoyalFamilyLayout L{g.family->params[0], g.family->params[1]};
    std::vector<AgentId> royals, people;
    for (int k = 0; k < L.royals; ++k) royals.push_back(L.royal(k));
    for (int k = 0; k < L.people; ++k) people.push_back(L.pub(k));
    groups = {{"royals", royals}, {"public", people}};
  } else if (g.family->family == F::kMadKing) {
    MadKingLayout L = mad_king_roles(g).layout;
    std::vector<AgentId> court, bureaucracy, people;
    for (int k = 0; k < L.court; ++k) court.push_back(L.court_member(k));
    for (int k = 0; k < L.bureaucracy; ++k) bureaucracy.push_back(L.bureaucrat(k));
    for (int k = 0; k < L.people; ++k) people.push_back(L.person(k));
    groups = {{"king", {MadKingLayout::king}}, {"regent", {MadKingLayout::regent}},
              {"court", court}, {"bureaucracy", bureaucracy}, {"people", people}};
  }
  return groups;
}

// First round from which every agent plays `a` through the horizon, or
// nullopt when the last round is not unanimous.
inline std::optional<int> unanimous_from(const ActionMatrix& actions, Action a) {
  int from = actions.rounds();
  for (int t = actions.rounds() - 1; t >= 0; --t) {
    bool all = true;
    for (AgentId v = 0; v < actions.agents() && all; ++v) all = actions.at(v, t) == a;
    if (!all) break;
    from = t;
  }
  if (from == actions.rounds()) return std::nullopt;
  return from;
}

struct InjectedSummary {
  std::uint64_t traces = 0;
  std::uint64_t all_one_from_round_1 = 0;
  std::uint64_t all_one_by_round_3 = 0;
  int latest_all_one = -1;  // -1 when some trace never becomes unanimous
  bool every_trace_unanimous = true;
  std::uint64_t people_zero_early = 0;  // mad_king: people play 0 at rounds 0-1
  std::optional<double> min_regent_posterior;  // at round 1, when tracked
  std::vector<std::pair<std::string, std::vector<double>>> timeline;  // share playing 1
};

inline InjectedSummary run_injected(const Policy& policy, const SignalModel& m, const DirectedGraph& g,
                                    SimConfig cfg, const SignalInjection& inj, std::uint64_t traces) {
  cfg.replicates = traces;
  InjectedSummary s;
  s.traces = traces;
  auto groups = role_groups(g);
  for (const auto& [name, members] : groups) s.timeline.emplace_back(name, std::vector<double>(cfg.horizon, 0));
  const bool mad_king = g.family && g.family->family == GraphFamilySpec::Family::kMadKing;
  int latest = 0;
  for (std::uint64_t k = 0; k < traces; ++k) {
    Trace tr = run_trace(policy, m, cfg, k, &inj);
    auto from = unanimous_from(tr.actions, 1);
    if (!from) s.every_trace_unanimous = false;
    else latest = std::max(latest, *from);
    s.all_one_from_round_1 += from && *from <= 1;
    s.all_one_by_round_3 += from && *from <= 3;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
      for (int t = 0; t < cfg.horizon; ++t) {
        double ones = 0;
        for (AgentId v : groups[gi].second) ones += tr.actions.at(v, t);
        s.timeline[gi].second[t] += ones;
      }
    if (mad_king) {
      MadKingLayout L = mad_king_roles(g).layout;
      bool quiet = true;
      for (int q = 0; q < L.people; ++q)
        for (int t = 0; t < std::min(2, cfg.horizon); ++t) quiet = quiet && tr.actions.at(L.person(q), t) == 0;
      s.people_zero_early += quiet;
      if (cfg.horizon > 1)
        if (auto post = policy.posteriors(tr.types)) {
          const double p = (*post)[static_cast<std::size_t>(MadKingLayout::regent) * cfg.horizon + 1];
          s.min_regent_posterior = std::min(s.min_regent_posterior.value_or(1.0), p);
        }
    }
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
    for (double& v : s.timeline[gi].second) v /= static_cast<double>(groups[gi].second.size()) * traces;
  s.latest_all_one = s.every_trace_unanimous ? latest : -1;
  return s;
}

struct SimulationOutput {
  ordered_json report;
  std::string traces_csv;  // body only, without the preamble
};

inline SimulationOutput simulate(const RunConfig& c) {
  validate(c);
  const DirectedGraph g = build_graph(c);
  const SignalModel m = parse_signal_model(c.signal, c.jitter_width);
  const StrategyProfile p = build_profile(c, g);
  auto policy = make_policy(g, m, p, c.sim);
  const EnsembleReport ens = run_ensemble(*policy, m, c.sim);

  SimulationOutput out;
  ordered_json& r = out.report;
  r = provenance(c);
  ordered_json graph = {{"spec", g.family ? g.family->to_string() : std::string("edge list")},
                        {"agents", g.size()},
                        {"edges", g.edge_count()},
                        {"strongly_connected", is_strongly_connected(g)}};
  if (is_strongly_connected(g)) graph["L"] = min_l_connectivity(g);
  graph["d"] = out_degree_bound(g);
  r["graph"] = graph;
  r["signal_model"] = {{"atoms", m.to_string()}, {"p_star", m.p_star()}, {"max_abs_z", m.max_abs_z()}};
  r["profile"] = {{"kind", to_string(p.kind)}, {"tie_break", to_string(p.tie_break)}, {"overlaid", p.overlaid}};
  r["ensemble"] = ensemble_json(ens);

  if (g.family && g.family->family == GraphFamilySpec::Family::kRoyalFamily) {
    const int royals = g.family->params[0];
    const double floor = royal_floor(m, royals);
    const double se = ens.all_learning_se();
    r["royal_floor"] = {{"royals", royals},
                        {"floor", floor},
                        {"non_learning_frequency", ens.non_learning()},
                        {"se", se},
                        {"above_floor_minus_3se", ens.non_learning() >= floor - 3 * se}};
  }
  if (p.mad_king) {
    const MadKingLayout& L = p.mad_king->layout;
    const double lambda = p.mad_king_params.lambda;
    const double delta = p.mad_king_params.delta;
    r["mad_king"] = {{"court", L.court},
                     {"bureaucracy", L.bureaucracy},
                     {"people", L.people},
                     {"delta", delta},
                     {"lambda", lambda},
                     {"exp_court", std::exp(static_cast<double>(L.court))},
                     {"patience", 1 / (1 - lambda)},
                     {"regime_holds", std::exp(static_cast<double>(L.court)) < 1 / (1 - lambda) &&
                                          1 / (1 - lambda) < L.bureaucracy},
                     {"regent_threshold", 1 - std::exp(-delta * L.bureaucracy)}};
  }

  if (auto inj = build_injection(c, g, m)) {
    InjectedSummary s = run_injected(*policy, m, g, c.sim, *inj, c.inject_replicates);
    ordered_json timeline = ordered_json::object();
    for (const auto& [name, series] : s.timeline) timeline[name] = series;
    ordered_json atoms = ordered_json::array();
    for (auto [a, k] : inj->atoms) atoms.push_back({a, k});
    ordered_json j = {{"mode", to_string(c.inject)},
                      {"state", inj->state ? ordered_json(*inj->state) : ordered_json()},
                      {"atoms", atoms},
                      {"traces", s.traces},
                      {"all_one_from_round_1", s.all_one_from_round_1},
                      {"all_one_by_round_3", s.all_one_by_round_3},
                      {"latest_all_one_round", s.latest_all_one},
                      {"role_timeline", timeline}};
    if (g.family && g.family->family == GraphFamilySpec::Family::kMadKing) {
      j["people_zero_rounds_0_1"] = s.people_zero_early;
      if (s.min_regent_posterior) j["min_regent_posterior_round_1"] = *s.min_regent_posterior;
    }
    r["injected"] = j;
  }

  // The posterior column is empty for engines that do not track beliefs.
  std::ostringstream csv;
  csv << std::setprecision(12);
  csv << "replicate,state,agent,atom,round,action,tie,posterior\n";
  for (std::uint64_t k = 0; k < std::min(c.export_traces, c.sim.replicates); ++k) {
    Trace tr = run_trace(*policy, m, c.sim, k);
    std::vector<std::uint8_t> tie(static_cast<std::size_t>(g.size()) * c.sim.horizon, 0);
    for (const TieEvent& e : tr.ties) tie[static_cast<std::size_t>(e.agent) * c.sim.horizon + e.t] = 1;
    const auto post = policy->posteriors(tr.types);
    for (AgentId v = 0; v < g.size(); ++v)
      for (int t = 0; t < c.sim.horizon; ++t) {
        const std::size_t cell = static_cast<std::size_t>(v) * c.sim.horizon + t;
        csv << k << ',' << tr.state << ',' << v << ',' << tr.signals[v].atom << ',' << t << ','
            << static_cast<int>(tr.actions.at(v, t)) << ',' << static_cast<int>(tie[cell]) << ',';
        if (post) csv << (*post)[cell];
        csv << '\n';
      }
  }
  out.traces_csv = csv.str();
  return out;
}

// Flattens nested objects into "a.b.c,value" rows; arrays keep their JSON text.
inline void flatten(const ordered_json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  std::string text = j.is_string() ? j.get<std::string>() : j.dump();
  const bool quote = text.find_first_of(",\"\n") != std::string::npos;
  if (quote) {
    std::string esc;
    for (char ch : text) esc += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    text = "\"" + esc + "\"";
  }
  out << prefix << ',' << text << '\n';
}

inline std::string report_text(const RunConfig& c, const ordered_json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  std::ostringstream out;
  out << csv_preamble(c) << "key,value\n";
  ordered_json body = report;
  body.erase("version");
  body.erase("seed");
  body.erase("config");
  flatten(body, "", out);
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace sociallearn::cli

#endif  // SOCIALLEARN_TOOLS_REPORT_HPP_
