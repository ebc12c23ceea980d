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

#ifndef SOCIALLEARN_TOOLS_CONFIG_HPP_
#define SOCIALLEARN_TOOLS_CONFIG_HPP_

// Run configuration: INI-style "key = value" files with [graph], [signal],
// [profile], [sim], [inject] and [output] sections, or the same layout as a
// JSON object of objects.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "sociallearn/sociallearn.hpp"

namespace sociallearn::cli {

enum class InjectMode { kNone, kRoyalJ, kMadKingJ, kExplicit };

inline const char* to_string(InjectMode m) {
  switch (m) {
    case InjectMode::kNone: return "none";
    case InjectMode::kRoyalJ: return "royal_j";
    case InjectMode::kMadKingJ: return "mad_king_j";
    case InjectMode::kExplicit: return "explicit";
  }
  return "none";
}

struct RunConfig {
  std::string graph = "cycle(20)";
  std::string edge_list;  // overrides `graph` when set
  std::string signal = "symmetric_binary(0.6)";
  double jitter_width = 1.0;
  std::string profile = "myopic";
  TieBreak tie_break = TieBreak::kZero;
  MadKingParams mad_king;
  std::vector<ForcedMove> forced;
  SimConfig sim;
  InjectMode inject = InjectMode::kNone;
  std::optional<State> inject_state;
  std::vector<std::pair<AgentId, int>> inject_atoms;
  std::uint64_t inject_replicates = 100;
  std::string out_dir = "out";
  std::string format = "json";
  std::uint64_t export_traces = 10;
};

using FlatConfig = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    T out;
    if constexpr (std::is_same_v<T, double>) out = std::stod(value, &used);
    else if constexpr (std::is_same_v<T, std::uint64_t>) out = std::stoull(value, &used);
    else out = static_cast<T>(std::stoi(value, &used));
    if (used != value.size()) throw std::invalid_argument(value);
    if constexpr (std::is_same_v<T, std::uint64_t>)
      if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw InvalidInput("config key '" + key + "' expects a number, got '" + value + "'");
  }
}

inline std::string format_double(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

}  // namespace detail

// "agent:t:action" triples separated by ';'. Forced on every history.
inline std::vector<ForcedMove> parse_forced(const std::string& text) {
  std::vector<ForcedMove> moves;
  for (const auto& item : detail::split(text, ';')) {
    auto parts = detail::split(item, ':');
    require(parts.size() == 3, "forced move must read agent:t:action, got '" + item + "'");
    ForcedMove m;
    m.agent = detail::parse_number<int>("profile.forced", parts[0]);
    m.t = detail::parse_number<int>("profile.forced", parts[1]);
    int a = detail::parse_number<int>("profile.forced", parts[2]);
    require(a == 0 || a == 1, "forced action must be 0 or 1");
    m.action = static_cast<Action>(a);
    moves.push_back(m);
  }
  return moves;
}

// "agent:atom" pairs separated by ';'.
inline std::vector<std::pair<AgentId, int>> parse_atom_list(const std::string& text) {
  std::vector<std::pair<AgentId, int>> out;
  for (const auto& item : detail::split(text, ';')) {
    auto parts = detail::split(item, ':');
    require(parts.size() == 2, "injected atom must read agent:atom, got '" + item + "'");
    out.emplace_back(detail::parse_number<int>("inject.atoms", parts[0]),
                     detail::parse_number<int>("inject.atoms", parts[1]));
  }
  return out;
}

inline void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  using detail::parse_number;
  const std::string v = detail::trim(raw);
  if (key == "graph.family") c.graph = v;
  else if (key == "graph.edges") c.edge_list = v;
  else if (key == "signal.model") c.signal = v;
  else if (key == "signal.jitter_width") c.jitter_width = parse_number<double>(key, v);
  else if (key == "profile.kind") c.profile = v;
  else if (key == "profile.tie_break") c.tie_break = parse_tie_break(v);
  else if (key == "profile.delta") c.mad_king.delta = parse_number<double>(key, v);
  else if (key == "profile.lambda") c.mad_king.lambda = parse_number<double>(key, v);
  else if (key == "profile.forced") c.forced = parse_forced(v);
  else if (key == "sim.horizon") c.sim.horizon = parse_number<int>(key, v);
  else if (key == "sim.replicates") c.sim.replicates = parse_number<std::uint64_t>(key, v);
  else if (key == "sim.discount") c.sim.discount = parse_number<double>(key, v);
  else if (key == "sim.tail_window") c.sim.tail_window = parse_number<int>(key, v);
  else if (key == "sim.seed") c.sim.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "sim.engine") c.sim.engine = parse_engine_mode(v);
  else if (key == "sim.budget") c.sim.budget = parse_number<std::uint64_t>(key, v);
  else if (key == "sim.ball_budget") c.sim.ball_budget = parse_number<std::uint64_t>(key, v);
  else if (key == "sim.workers") c.sim.workers = parse_number<int>(key, v);
  else if (key == "inject.mode") {
    if (v == "none") c.inject = InjectMode::kNone;
    else if (v == "royal_j") c.inject = InjectMode::kRoyalJ;
    else if (v == "mad_king_j") c.inject = InjectMode::kMadKingJ;
    else if (v == "explicit") c.inject = InjectMode::kExplicit;
    else throw InvalidInput("inject.mode must be none | royal_j | mad_king_j | explicit");
  } else if (key == "inject.state") {
    int s = parse_number<int>(key, v);
    require(s == 0 || s == 1, "inject.state must be 0 or 1");
    c.inject_state = s;
  } else if (key == "inject.atoms") c.inject_atoms = parse_atom_list(v);
  else if (key == "inject.replicates") c.inject_replicates = parse_number<std::uint64_t>(key, v);
  else if (key == "output.dir") c.out_dir = v;
  else if (key == "output.format") c.format = v;
  else if (key == "output.traces") c.export_traces = parse_number<std::uint64_t>(key, v);
  else throw InvalidInput("unknown config key '" + key + "'");
}

inline void validate(const RunConfig& c) {
  c.sim.validate();
  require(c.format == "json" || c.format == "csv", "output.format must be json or csv");
  require(c.profile == "myopic" || c.profile == "royal_family" || c.profile == "mad_king",
          "profile.kind must be myopic | royal_family | mad_king");
  require(c.jitter_width > 0, "signal.jitter_width must be positive");
  require(c.inject_replicates >= 1, "inject.replicates must be positive");
}

inline FlatConfig read_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  FlatConfig flat;
  const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (json) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput("config '" + path + "' is not valid JSON: " + e.what());
    }
    require(doc.is_object(), "JSON config must be an object of sections");
    for (const auto& [section, body] : doc.items()) {
      require(body.is_object(), "JSON config section '" + section + "' must be an object");
      for (const auto& [key, value] : body.items())
        flat[section + "." + key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    return flat;
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidInput("config '" + path + "': " + e.message() + " at line " +
                       std::to_string(e.line()));
  }
  for (const auto& [section, body] : tree) {
    require(!body.empty(), "config key '" + section + "' must sit inside a [section]");
    for (const auto& [key, value] : body) flat[section + "." + key] = value.data();
  }
  return flat;
}

inline RunConfig load_config(const std::string& path) {
  RunConfig c;
  for (const auto& [key, value] : read_flat_config(path)) apply_setting(c, key, value);
  validate(c);
  return c;
}

// Effective configuration, one "section.key" per entry, in a fixed order.
inline std::vector<std::pair<std::string, std::string>> echo(const RunConfig& c) {
  using detail::format_double;
  std::string forced;
  for (const auto& m : c.forced) {
    if (!forced.empty()) forced += ";";
    forced += std::to_string(m.agent) + ":" + std::to_string(m.t) + ":" + std::to_string(m.action);
  }
  std::string atoms;
  for (const auto& [a, k] : c.inject_atoms) {
    if (!atoms.empty()) atoms += ";";
    atoms += std::to_string(a) + ":" + std::to_string(k);
  }
  return {
      {"graph.family", c.graph},
      {"graph.edges", c.edge_list},
      {"signal.model", c.signal},
      {"signal.jitter_width", format_double(c.jitter_width)},
      {"profile.kind", c.profile},
      {"profile.tie_break", to_string(c.tie_break)},
      {"profile.delta", format_double(c.mad_king.delta)},
      {"profile.lambda", format_double(c.mad_king.lambda)},
      {"profile.forced", forced},
      {"sim.horizon", std::to_string(c.sim.horizon)},
      {"sim.replicates", std::to_string(c.sim.replicates)},
      {"sim.discount", format_double(c.sim.discount)},
      {"sim.tail_window", std::to_string(c.sim.tail_window)},
      {"sim.seed", std::to_string(c.sim.seed)},
      {"sim.engine", to_string(c.sim.engine)},
      {"sim.budget", std::to_string(c.sim.budget)},
      {"sim.ball_budget", std::to_string(c.sim.ball_budget)},
      {"inject.mode", to_string(c.inject)},
      {"inject.state", c.inject_state ? std::to_string(*c.inject_state) : ""},
      {"inject.atoms", atoms},
      {"inject.replicates", std::to_string(c.inject_replicates)},
      {"output.format", c.format},
      {"output.traces", std::to_string(c.export_traces)},
  };
}

// "name(a, b)" or "name".
inline SignalModel parse_signal_model(const std::string& text, double jitter_width) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  std::vector<double> params;
  std::string name = s;
  if (auto open = s.find('('); open != std::string::npos) {
    require(s.back() == ')', "signal model must look like name(args): '" + text + "'");
    name = s.substr(0, open);
    for (const auto& item : detail::split(s.substr(open + 1, s.size() - open - 2), ','))
      params.push_back(detail::parse_number<double>("signal.model", item));
  }
  return builtin_family(name, params, jitter_width);
}

inline DirectedGraph build_graph(const RunConfig& c) {
  if (!c.edge_list.empty()) {
    std::ifstream in(c.edge_list);
    if (!in) throw InvalidInput("cannot open edge list '" + c.edge_list + "'");
    return read_edge_list(in);
  }
  return generate(GraphFamilySpec::parse(c.graph));
}

inline StrategyProfile build_profile(const RunConfig& c, const DirectedGraph& g) {
  StrategyProfile p;
  if (c.profile == "myopic") p = myopic_profile(g, c.tie_break);
  else if (c.profile == "royal_family") p = royal_family_profile(g, c.tie_break);
  else p = mad_king_profile(g, mad_king_roles(g), c.mad_king, c.tie_break);
  if (!c.forced.empty()) p = apply_forced(p, ForcedResponse(c.forced));
  return p;
}

// Index of the atom with the largest log-likelihood ratio.
inline int favouring_one(const SignalModel& m) {
  int best = 0;
  for (int k = 1; k < m.size(); ++k)
    if (m.atom(k).z > m.atom(best).z) best = k;
  return best;
}

inline std::optional<SignalInjection> build_injection(const RunConfig& c, const DirectedGraph& g,
                                                      const SignalModel& m) {
  SignalInjection inj;
  switch (c.inject) {
    case InjectMode::kNone: return std::nullopt;
    case InjectMode::kRoyalJ: {
      require(g.family && g.family->family == GraphFamilySpec::Family::kRoyalFamily,
              "inject.mode = royal_j needs a royal_family graph");
      inj.state = c.inject_state.value_or(0);
      for (int k = 0; k < g.family->params[0]; ++k) inj.atoms.emplace_back(k, favouring_one(m));
      return inj;
    }
    case InjectMode::kMadKingJ: {
      MadKingRoles roles = mad_king_roles(g);
      inj.state = c.inject_state.value_or(0);
      for (int k = 0; k < roles.layout.bureaucracy; ++k)
        inj.atoms.emplace_back(roles.layout.bureaucrat(k), favouring_one(m));
      return inj;
    }
    case InjectMode::kExplicit:
      inj.state = c.inject_state;
      inj.atoms = c.inject_atoms;
      return inj;
  }
  return std::nullopt;
}

}  // namespace sociallearn::cli

#endif  // SOCIALLEARN_TOOLS_CONFIG_HPP_
