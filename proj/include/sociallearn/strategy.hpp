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

#ifndef SOCIALLEARN_STRATEGY_HPP_
#define SOCIALLEARN_STRATEGY_HPP_

// Strategy profiles as per-agent response rules, forced-response overlays on
// history-closed sets, and the two non-learning example profiles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sociallearn/belief.hpp"
#include "sociallearn/errors.hpp"
#include "sociallearn/graph.hpp"
#include "sociallearn/history.hpp"

namespace sociallearn {

inline constexpr int kNeverStationary = std::numeric_limits<int>::max();

// Everything a response may depend on: own signal (atom and jitter half),
// observed history, and the posteriors the agent held along its own path.
struct Observation {
  AgentId agent;
  int t;
  int atom;
  bool jitter_high;
  const HistoryView& history;
  std::span<const BeliefState> beliefs;  // rounds 0..t

  const BeliefState& belief() const { return beliefs.back(); }
};

struct Rule {
  std::function<Decision(const Observation&)> respond;
  // False when respond ignores `history`; engines then skip building it.
  bool reads_history = false;
  // From this round on respond depends only on (atom, jitter, current belief).
  int stationary_from = 0;
};

enum class ProfileKind { kMyopic, kForced, kRoyalFamily, kMadKing, kCustom };

inline const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::kMyopic: return "myopic";
    case ProfileKind::kForced: return "forced";
    case ProfileKind::kRoyalFamily: return "royal_family";
    case ProfileKind::kMadKing: return "mad_king";
    case ProfileKind::kCustom: return "custom";
  }
  return "custom";
}

struct MadKingRoles {
  MadKingLayout layout;

  AgentId king() const { return MadKingLayout::king; }
  AgentId regent() const { return MadKingLayout::regent; }

  enum class Role { kKing, kRegent, kCourt, kBureaucracy, kPeople };
  Role role_of(AgentId v) const {
    if (v == king()) return Role::kKing;
    if (v == regent()) return Role::kRegent;
    if (v < layout.bureaucrat(0)) return Role::kCourt;
    if (v < layout.person(0)) return Role::kBureaucracy;
    return Role::kPeople;
  }
};

struct MadKingParams {
  double delta = 0.01;
  double lambda = 0.99;
};

struct StrategyProfile {
  std::vector<Rule> rules;
  ProfileKind kind = ProfileKind::kCustom;
  TieBreak tie_break = TieBreak::kZero;
  std::optional<MadKingRoles> mad_king;
  MadKingParams mad_king_params;
  // True when every rule plays the myopic best response at every round.
  bool purely_myopic = false;
  // Set by apply_forced; the role-specific engines refuse overlaid profiles.
  bool overlaid = false;

  int size() const { return static_cast<int>(rules.size()); }
  int stationary_from() const {
    int s = 0;
    for (const Rule& r : rules) s = std::max(s, r.stationary_from);
    return s;
  }
  bool reads_history() const {
    return std::any_of(rules.begin(), rules.end(), [](const Rule& r) { return r.reads_history; });
  }
};

inline Rule myopic_rule(TieBreak tie_break) {
  return {[tie_break](const Observation& o) {
            return best_response(o.belief(), tie_break, o.jitter_high);
          },
          false, 0};
}

// Every agent plays the MAP action under its exact posterior, every round.
inline StrategyProfile myopic_profile(const DirectedGraph& g, TieBreak tie_break = TieBreak::kZero) {
  StrategyProfile p;
  p.rules.assign(g.size(), myopic_rule(tie_break));
  p.kind = ProfileKind::kMyopic;
  p.tie_break = tie_break;
  p.purely_myopic = true;
  return p;
}

// ---------------------------------------------------------------------------
// Forced responses

struct ForcedMove {
  AgentId agent = 0;
  int t = 0;
  Action action = 0;
  // Observed column masks for rounds [0, t); nullopt forces every history.
  std::optional<std::vector<std::uint64_t>> history;
};

// A forced-response map q_H on a history-closed domain H.
class ForcedResponse {
 public:
  ForcedResponse() = default;
  explicit ForcedResponse(std::vector<ForcedMove> moves) : moves_(std::move(moves)) {
    validate();
  }

  const std::vector<ForcedMove>& moves() const { return moves_; }
  bool empty() const { return moves_.empty(); }
  int last_round() const {
    int last = -1;
    for (const auto& m : moves_) last = std::max(last, m.t);
    return last;
  }

  std::optional<Action> lookup(AgentId agent, int t, const HistoryView& view) const {
    for (const auto& m : moves_) {
      if (m.agent != agent || m.t != t) continue;
      if (!m.history) return m.action;
      bool match = true;
      for (int r = 0; r < t && match; ++r) match = view.column_mask(r) == (*m.history)[r];
      if (match) return m.action;
    }
    return std::nullopt;
  }

 private:
  static bool covers(const ForcedMove& earlier, const ForcedMove& later) {
    if (!earlier.history) return true;
    if (!later.history) return false;
    return std::equal(earlier.history->begin(), earlier.history->end(), later.history->begin());
  }

  void validate() const {
    for (const auto& m : moves_) {
      require(m.agent >= 0 && m.t >= 0 && m.action <= 1, "malformed forced move");
      require(!m.history || static_cast<int>(m.history->size()) == m.t,
              "forced move history must have one column per earlier round");
      for (int tp = 0; tp < m.t; ++tp) {
        bool found = std::any_of(moves_.begin(), moves_.end(), [&](const ForcedMove& o) {
          return o.agent == m.agent && o.t == tp && covers(o, m);
        });
        require(found, "forced domain is not history-closed: agent " + std::to_string(m.agent) +
                           " is forced at t=" + std::to_string(m.t) + " but not at t=" +
                           std::to_string(tp));
      }
    }
    for (std::size_t a = 0; a < moves_.size(); ++a)
      for (std::size_t b = a + 1; b < moves_.size(); ++b) {
        const auto& x = moves_[a];
        const auto& y = moves_[b];
        if (x.agent != y.agent || x.t != y.t || x.action == y.action) continue;
        bool overlap = !x.history || !y.history || *x.history == *y.history;
        require(!overlap, "conflicting forced actions for agent " + std::to_string(x.agent) +
                              " at t=" + std::to_string(x.t));
      }
  }

  std::vector<ForcedMove> moves_;
};

// On H the forced action is played verbatim; elsewhere the base response.
inline StrategyProfile apply_forced(const StrategyProfile& base, const ForcedResponse& forced) {
  if (forced.empty()) return base;
  for (const auto& m : forced.moves())
    require(m.agent < base.size(), "forced move names agent " + std::to_string(m.agent) +
                                       " outside the profile");
  StrategyProfile p = base;
  p.kind = base.kind == ProfileKind::kMyopic ? ProfileKind::kForced : base.kind;
  p.purely_myopic = false;
  p.overlaid = true;
  auto shared = std::make_shared<const ForcedResponse>(forced);
  for (AgentId i = 0; i < p.size(); ++i) {
    bool touched = std::any_of(forced.moves().begin(), forced.moves().end(),
                               [i](const ForcedMove& m) { return m.agent == i; });
    if (!touched) continue;
    Rule inner = base.rules[i];
    Rule& r = p.rules[i];
    r.respond = [inner, shared](const Observation& o) {
      if (auto a = shared->lookup(o.agent, o.t, o.history)) return Decision{*a, false};
      return inner.respond(o);
    };
    r.reads_history = true;
    r.stationary_from = std::max(inner.stationary_from, shared->last_round() + 1);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Royal family

// All agents myopic from round 0 on; on the event that every royal favours
// state 1 the whole graph then plays 1 from round 1.
inline StrategyProfile royal_family_profile(const DirectedGraph& g,
                                            TieBreak tie_break = TieBreak::kZero) {
  require(g.family && g.family->family == GraphFamilySpec::Family::kRoyalFamily,
          "royal_family_profile needs a royal_family graph");
  StrategyProfile p = myopic_profile(g, tie_break);
  p.kind = ProfileKind::kRoyalFamily;
  return p;
}

// ---------------------------------------------------------------------------
// Mad king

inline MadKingRoles mad_king_roles(const DirectedGraph& g) {
  require(g.family && g.family->family == GraphFamilySpec::Family::kMadKing,
          "mad_king roles need a mad_king graph");
  const auto& p = g.family->params;
  MadKingRoles roles{MadKingLayout{p[0], p[1], p[2]}};
  require(roles.layout.total() == g.size(), "mad_king roles do not match the graph size");
  return roles;
}

// Log-odds level at which the regent locks: P(S=s | F_1) >= 1 - e^{-delta R_B}.
inline double regent_lock_log_odds(double delta, int bureaucracy) {
  double x = delta * bureaucracy;
  return x + std::log1p(-std::exp(-x));
}

namespace detail {

// s if `leader` played s at every round in [from, t), nullopt after a deviation.
inline std::optional<Action> steady_action(const HistoryView& h, AgentId leader, int from, int t) {
  Action s = h.action_of(leader, from);
  for (int r = from + 1; r < t; ++r)
    if (h.action_of(leader, r) != s) return std::nullopt;
  return s;
}

}  // namespace detail

// The five role rules of the mad king construction. Unforced continuations
// (an unlocked regent, a leader who deviated) fall back to myopic play.
inline StrategyProfile mad_king_profile(const DirectedGraph& g, const MadKingRoles& roles,
                                        MadKingParams params, TieBreak tie_break = TieBreak::kZero) {
  require(params.delta > 0, "mad_king delta must be positive");
  require(params.lambda > 0 && params.lambda < 1, "discount must lie in (0,1)");
  require(roles.layout.total() == g.size(), "mad_king roles do not match the graph");
  const MadKingLayout L = roles.layout;
  const double lock = regent_lock_log_odds(params.delta, L.bureaucracy);
  auto myopic = [tie_break](const Observation& o) {
    return best_response(o.belief(), tie_break, o.jitter_high);
  };

  Rule regent{[=](const Observation& o) {
                if (o.t == 0) return myopic(o);
                double z1 = o.beliefs[1].log_odds;
                if (z1 >= lock) return Decision{1, false};
                if (-z1 >= lock) return Decision{0, false};
                return myopic(o);
              },
              true, kNeverStationary};

  Rule king{[=](const Observation& o) {
              for (int k = 0; k < L.people; ++k)
                for (int r = 0; r < std::min(o.t, 2); ++r)
                  if (o.history.action_of(L.person(k), r) == 1) return Decision{1, false};
              if (o.t <= 1) return myopic(o);
              if (auto s = detail::steady_action(o.history, MadKingLayout::regent, 1, o.t))
                return Decision{*s, false};
              return myopic(o);
            },
            true, kNeverStationary};

  Rule bureaucrat{[=](const Observation& o) {
                    if (o.t <= 1) return myopic(o);
                    if (auto s = detail::steady_action(o.history, MadKingLayout::regent, 1, o.t))
                      return Decision{*s, false};
                    return myopic(o);
                  },
                  true, kNeverStationary};

  // Court and people share the tail: copy the king's round-1 action at round
  // 2, then follow his round-2 action until he changes it.
  auto follow_king = [=](const Observation& o) {
    if (o.t == 2) return Decision{o.history.action_of(MadKingLayout::king, 1), false};
    if (auto s = detail::steady_action(o.history, MadKingLayout::king, 2, o.t))
      return Decision{*s, false};
    return myopic(o);
  };
  Rule court{[=](const Observation& o) { return o.t <= 1 ? myopic(o) : follow_king(o); },
             true, kNeverStationary};
  Rule person{[=](const Observation& o) { return o.t <= 1 ? Decision{0, false} : follow_king(o); },
              true, kNeverStationary};

  StrategyProfile p;
  p.kind = ProfileKind::kMadKing;
  p.tie_break = tie_break;
  p.mad_king = roles;
  p.mad_king_params = params;
  p.rules.resize(g.size());
  for (AgentId v = 0; v < g.size(); ++v) {
    switch (roles.role_of(v)) {
      case MadKingRoles::Role::kKing: p.rules[v] = king; break;
      case MadKingRoles::Role::kRegent: p.rules[v] = regent; break;
      case MadKingRoles::Role::kCourt: p.rules[v] = court; break;
      case MadKingRoles::Role::kBureaucracy: p.rules[v] = bureaucrat; break;
      case MadKingRoles::Role::kPeople: p.rules[v] = person; break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Sufficient conditions for acting myopically

struct MyopicConditions {
  bool b1 = false, b2 = false, b3 = false, b4 = false;
  // B1 <= B2 <= B3 <= B4 as events; guaranteed when Y is nondecreasing.
  bool nested = true;
  bool any() const { return b1 || b2 || b3 || b4; }
};

// Y = (Y_0, Y_1, Y_2, Y_3): expected distance of future posteriors from 1/2
// under a myopic continuation.
inline MyopicConditions myopic_condition_check(std::span<const double> y, double lambda) {
  require(y.size() == 4, "myopic_condition_check takes Y_0..Y_3");
  require(lambda > 0 && lambda < 1, "discount must lie in (0,1)");
  for (double v : y) require(v >= 0 && v <= 0.5, "Y values must lie in [0, 1/2]");
  const double lhs = 2 * y[0];
  const double l2 = lambda * lambda;
  MyopicConditions c;
  c.b1 = lhs > l2 * (0.5 - y[0]) / (1 - lambda);
  c.b2 = lhs > l2 * (0.5 - y[1]) / (1 - lambda);
  c.b3 = lhs > l2 * (0.5 - y[2]) / (1 - lambda);
  c.b4 = lhs > l2 * (0.5 - y[2]) + l2 * lambda * (0.5 - y[3]) / (1 - lambda);
  c.nested = (!c.b1 || c.b2) && (!c.b2 || c.b3) && (!c.b3 || c.b4);
  return c;
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_STRATEGY_HPP_
