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

#ifndef SOCIALLEARN_EXACT_ENGINE_HPP_
#define SOCIALLEARN_EXACT_ENGINE_HPP_

// Exact posteriors by enumerating every joint assignment of private types.
//
// For each agent the engine maintains the partition of assignments induced by
// what the agent has seen: a class is (own type, observed columns so far).
// Each round it sums the mass of every class under both states, turns that
// into the class posterior, asks the agent's rule for the class decision, and
// refines each class by the column of neighbor actions that follows. Decisions
// are class-measurable, so one rule call per class covers all assignments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sociallearn/belief.hpp"
#include "sociallearn/errors.hpp"
#include "sociallearn/graph.hpp"
#include "sociallearn/history.hpp"
#include "sociallearn/policy.hpp"
#include "sociallearn/signal_model.hpp"
#include "sociallearn/strategy.hpp"

namespace sociallearn {

struct ExactOptions {
  // Joint type assignments the engine may enumerate.
  std::uint64_t budget = 10'000'000;
  // When set, per-assignment action and tie bits of this agent are kept.
  std::optional<AgentId> record_agent;
};

// Number of joint assignments, or nullopt if it exceeds `cap`.
inline std::optional<std::uint64_t> assignment_count(int types, int agents, std::uint64_t cap) {
  std::uint64_t w = 1;
  for (int i = 0; i < agents; ++i) {
    if (w > cap / static_cast<std::uint64_t>(types)) return std::nullopt;
    w *= static_cast<std::uint64_t>(types);
  }
  return w <= cap ? std::optional<std::uint64_t>(w) : std::nullopt;
}

struct YDecomposition {
  double y = 0;       // log-likelihood ratio of the neighbors' history given own actions
  double z0 = 0;      // own signal's log-likelihood ratio
  double z = 0;       // posterior log odds at t
  double residual() const { return z - y - z0; }
};

class ExactSolution final : public Policy {
 public:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  struct ClassInfo {
    std::uint32_t parent = kNone;
    std::uint32_t mask = 0;  // observed column that led here
    int round = 0;
    int type = 0;
    double m0 = 0;  // sum over member assignments of P(assignment | S=0)
    double m1 = 0;
    BeliefState belief;
    Decision decision;
    double mass() const { return 0.5 * m0 + 0.5 * m1; }
  };

  static ExactSolution solve(const DirectedGraph& g, const SignalModel& m,
                             const StrategyProfile& profile, int horizon, ExactOptions opt = {}) {
    ExactSolution s(g, m, profile, horizon, opt);
    s.run();
    return s;
  }

  int agents() const override { return graph_.size(); }
  int rounds() const override { return horizon_; }
  int types_per_agent() const override { return types_; }
  TieBreak tie_break() const override { return profile_.tie_break; }
  std::string engine_name() const override { return "exact"; }

  const DirectedGraph& graph() const { return graph_; }
  const SignalModel& model() const { return model_; }
  const StrategyProfile& profile() const { return profile_; }
  std::uint64_t assignments() const { return worlds_; }
  // First round from which nothing new is learned; horizon+1 if never seen.
  int frozen_from() const { return frozen_from_; }

  int type_atom(int type) const { return type / levels_; }
  bool type_jitter_high(int type) const { return levels_ == 2 && (type % 2) == 1; }
  double type_mass(int type, State s) const { return model_.atom(type_atom(type)).mass(s) / levels_; }

  const std::vector<ClassInfo>& classes(AgentId i) const { return tables_.at(i).classes; }

  // Class of the agent's information set described by `view`.
  std::optional<std::uint32_t> find_class(const HistoryView& view) const {
    const AgentTable& tab = table_for_view(view);
    std::uint32_t c = static_cast<std::uint32_t>(view.atom() * levels_ +
                                                 (levels_ == 2 && view.jitter_high() ? 1 : 0));
    for (int r = 0; r < view.t(); ++r) {
      auto next = step(tab, c, static_cast<std::uint32_t>(view.column_mask(r)));
      if (!next) return std::nullopt;
      c = *next;
    }
    return c;
  }

  BeliefState posterior(const HistoryView& view) const {
    auto c = find_class(view);
    if (!c) throw InconsistentHistory("history of agent " + std::to_string(view.agent()) +
                                      " at t=" + std::to_string(view.t()) +
                                      " has zero probability under the profile");
    BeliefState b = tables_[view.agent()].classes[*c].belief;
    b.t = view.t();
    return b;
  }

  ActionMatrix play(std::span<const int> types, std::vector<TieEvent>* ties = nullptr) const override {
    ActionMatrix actions(agents(), horizon_);
    walk(types, [&](AgentId i, int t, const ClassInfo& c) {
      actions.set(i, t, c.decision.action);
      if (ties && c.decision.tie) ties->push_back({i, t});
    }, actions);
    return actions;
  }

  std::optional<std::vector<double>> posteriors(std::span<const int> types) const override {
    std::vector<double> out(static_cast<std::size_t>(agents()) * horizon_);
    ActionMatrix scratch(agents(), horizon_);
    walk(types, [&](AgentId i, int t, const ClassInfo& c) {
      out[static_cast<std::size_t>(i) * horizon_ + t] = c.belief.posterior;
      scratch.set(i, t, c.decision.action);
    }, scratch);
    return out;
  }

  // Recorded agent's action / tie bits per assignment (bit t = round t).
  const std::vector<std::uint64_t>& recorded_actions() const { return recorded_actions_; }
  const std::vector<std::uint64_t>& recorded_ties() const { return recorded_ties_; }

  // Joint assignment index <-> per-agent types (agent 0 is the lowest digit).
  std::vector<int> decode(std::uint64_t world) const {
    std::vector<int> types(agents());
    for (int i = 0; i < agents(); ++i) {
      types[i] = static_cast<int>(world % types_);
      world /= types_;
    }
    return types;
  }

  // Z_t = Y_t + Z_0, with Y_t computed independently of the class masses:
  // agent i's own action row is imposed, every other agent's signal is
  // enumerated, and each assignment is kept while the neighbors' simulated
  // rows match the view.
  YDecomposition y_decomposition(const HistoryView& view) const {
    const AgentId me = view.agent();
    const BeliefState b = posterior(view);
    const int t = view.t();
    const auto& nb = graph_.neighborhood(me);
    const int self_row = static_cast<int>(std::lower_bound(nb.begin(), nb.end(), me) - nb.begin());

    const int others = agents() - 1;
    const std::uint64_t count = *assignment_count(types_, others, std::numeric_limits<std::uint64_t>::max());
    double like0 = 0, like1 = 0;
    std::vector<std::uint32_t> cur(agents());
    std::vector<Action> act(agents());
    for (std::uint64_t w = 0; w < count; ++w) {
      std::uint64_t rest = w;
      double w0 = 1, w1 = 1;
      for (AgentId j = 0; j < agents(); ++j) {
        if (j == me) continue;
        int type = static_cast<int>(rest % types_);
        rest /= types_;
        cur[j] = static_cast<std::uint32_t>(type);
        w0 *= type_mass(type, 0);
        w1 *= type_mass(type, 1);
      }
      bool consistent = true;
      for (int r = 0; r < t && consistent; ++r) {
        for (AgentId j = 0; j < agents(); ++j)
          act[j] = j == me ? view.action(self_row, r) : tables_[j].classes[cur[j]].decision.action;
        for (int k = 0; k < view.width() && consistent; ++k)
          consistent = act[nb[k]] == view.action(k, r);
        if (!consistent || r + 1 == t) break;
        for (AgentId j = 0; j < agents(); ++j) {
          if (j == me) continue;
          auto next = step(tables_[j], cur[j], column(j, act));
          if (!next) throw std::logic_error("exact engine: consistent prefix left the class tables");
          cur[j] = *next;
        }
      }
      if (!consistent) continue;
      like0 += w0;
      like1 += w1;
    }
    YDecomposition d;
    d.y = std::log(like1) - std::log(like0);
    d.z0 = model_.atom(view.atom()).z;
    d.z = b.log_odds;
    return d;
  }

 private:
  struct AgentTable {
    std::vector<ClassInfo> classes;
    std::vector<AgentId> rows;
    int width = 0;
    bool dense = false;
    std::vector<std::uint32_t> dense_children;
    std::unordered_map<std::uint64_t, std::uint32_t> children;
    std::vector<std::uint32_t> round_begin;  // first class id of each round
  };

  // Answers at(j, r) for a class from the masks along its parent chain.
  class ClassHistory final : public ActionSource {
   public:
    ClassHistory(const std::vector<AgentId>& rows, std::vector<std::uint32_t> masks)
        : rows_(rows), masks_(std::move(masks)) {}
    Action at(AgentId agent, int round) const override {
      auto it = std::lower_bound(rows_.begin(), rows_.end(), agent);
      if (it == rows_.end() || *it != agent)
        throw InvalidInput("agent " + std::to_string(agent) + " is not observed");
      return (masks_.at(round) >> (it - rows_.begin())) & 1u;
    }

   private:
    const std::vector<AgentId>& rows_;
    std::vector<std::uint32_t> masks_;
  };

  ExactSolution(const DirectedGraph& g, const SignalModel& m, const StrategyProfile& p,
                int horizon, ExactOptions opt)
      : graph_(g), model_(m), profile_(p), horizon_(horizon), options_(opt) {
    require(horizon >= 0 && horizon <= 64, "horizon must lie in [0, 64]");
    require(p.size() == g.size(), "profile and graph disagree on the number of agents");
    require(p.tie_break != TieBreak::kJitter || m.jitter_width() > 0,
            "jitter tie-breaking needs a positive jitter width");
    levels_ = jitter_levels(p.tie_break);
    types_ = m.size() * levels_;
    auto w = assignment_count(types_, g.size(), opt.budget);
    if (!w)
      throw BudgetExceeded("exact engine: " + std::to_string(types_) + "^" +
                           std::to_string(g.size()) + " joint assignments exceed the budget of " +
                           std::to_string(opt.budget) + "; use the Monte Carlo or local engine");
    worlds_ = *w;
    tables_.resize(g.size());
    for (AgentId i = 0; i < g.size(); ++i) {
      AgentTable& tab = tables_[i];
      tab.rows = g.neighborhood(i);
      tab.width = static_cast<int>(tab.rows.size());
      require(tab.width <= 32, "exact engine supports neighborhoods of at most 32 agents");
      tab.dense = tab.width <= 4;
    }
    frozen_from_ = horizon_ + 1;
  }

  const AgentTable& table_for_view(const HistoryView& view) const {
    require(view.agent() >= 0 && view.agent() < agents(), "view names an unknown agent");
    const AgentTable& tab = tables_[view.agent()];
    require(std::equal(tab.rows.begin(), tab.rows.end(), view.rows().begin(), view.rows().end()),
            "view rows must be the agent's sorted neighborhood");
    require(view.atom() >= 0 && view.atom() < model_.size(), "view names an unknown atom");
    require(view.t() <= horizon_, "view is beyond the solved horizon");
    return tab;
  }

  std::optional<std::uint32_t> step(const AgentTable& tab, std::uint32_t c, std::uint32_t mask) const {
    const ClassInfo& info = tab.classes[c];
    if (info.round >= frozen_from_) {
      if (mask != info.mask) return std::nullopt;
      return c;
    }
    if (tab.dense) {
      std::size_t slot = static_cast<std::size_t>(c) << tab.width | mask;
      if (slot >= tab.dense_children.size() || tab.dense_children[slot] == kNone) return std::nullopt;
      return tab.dense_children[slot];
    }
    auto it = tab.children.find(static_cast<std::uint64_t>(c) << 32 | mask);
    if (it == tab.children.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t intern(AgentTable& tab, std::uint32_t c, std::uint32_t mask, int round) {
    if (tab.dense) {
      std::size_t slot = static_cast<std::size_t>(c) << tab.width | mask;
      if (tab.dense_children.size() <= slot)
        tab.dense_children.resize((static_cast<std::size_t>(c) + 1) << tab.width, kNone);
      std::uint32_t& child = tab.dense_children[slot];
      if (child == kNone) child = add_class(tab, c, mask, round);
      return child;
    }
    auto [it, inserted] = tab.children.try_emplace(static_cast<std::uint64_t>(c) << 32 | mask, kNone);
    if (inserted) it->second = add_class(tab, c, mask, round);
    return it->second;
  }

  std::uint32_t add_class(AgentTable& tab, std::uint32_t parent, std::uint32_t mask, int round) {
    ClassInfo info;
    info.parent = parent;
    info.mask = mask;
    info.round = round;
    info.type = tab.classes[parent].type;
    tab.classes.push_back(info);
    return static_cast<std::uint32_t>(tab.classes.size() - 1);
  }

  std::uint32_t column(AgentId i, const std::vector<Action>& act) const {
    std::uint32_t mask = 0;
    const auto& rows = tables_[i].rows;
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (act[rows[k]]) mask |= 1u << k;
    return mask;
  }

  Decision decide(AgentId i, std::uint32_t c) const {
    const AgentTable& tab = tables_[i];
    const ClassInfo& info = tab.classes[c];
    std::vector<BeliefState> beliefs(info.round + 1);
    std::vector<std::uint32_t> masks(info.round);
    for (std::uint32_t k = c; k != kNone; k = tab.classes[k].parent) {
      const ClassInfo& a = tab.classes[k];
      beliefs[a.round] = a.belief;
      if (a.round > 0) masks[a.round - 1] = a.mask;
    }
    ClassHistory source(tab.rows, std::move(masks));
    HistoryView view(i, info.round, type_atom(info.type), tab.rows, source,
                     type_jitter_high(info.type));
    Observation obs{i, info.round, view.atom(), view.jitter_high(), view, beliefs};
    return profile_.rules[i].respond(obs);
  }

  void run() {
    const int n = agents();
    std::vector<double> w0(worlds_), w1(worlds_);
    std::vector<std::uint32_t> cur(worlds_ * static_cast<std::size_t>(n));
    for (AgentId i = 0; i < n; ++i) {
      tables_[i].round_begin.push_back(0);
      for (int type = 0; type < types_; ++type) {
        ClassInfo root;
        root.type = type;
        tables_[i].classes.push_back(root);
      }
    }
    for (std::uint64_t w = 0; w < worlds_; ++w) {
      std::uint64_t rest = w;
      double a = 1, b = 1;
      for (AgentId i = 0; i < n; ++i) {
        int type = static_cast<int>(rest % types_);
        rest /= types_;
        cur[w * n + i] = static_cast<std::uint32_t>(type);
        a *= type_mass(type, 0);
        b *= type_mass(type, 1);
      }
      w0[w] = a;
      w1[w] = b;
    }
    if (options_.record_agent) {
      require(*options_.record_agent >= 0 && *options_.record_agent < n, "record_agent out of range");
      recorded_actions_.assign(worlds_, 0);
      recorded_ties_.assign(worlds_, 0);
    }
    const int stationary = profile_.stationary_from();
    std::vector<Action> act(n);

    for (int t = 0; t <= horizon_; ++t) {
      for (std::uint64_t w = 0; w < worlds_; ++w)
        for (AgentId i = 0; i < n; ++i) {
          ClassInfo& c = tables_[i].classes[cur[w * n + i]];
          c.m0 += w0[w];
          c.m1 += w1[w];
        }
      for (AgentId i = 0; i < n; ++i) {
        auto& classes = tables_[i].classes;
        for (std::size_t c = tables_[i].round_begin[t]; c < classes.size(); ++c) {
          classes[c].belief = BeliefState::from_log_odds(std::log(classes[c].m1) - std::log(classes[c].m0), t);
          classes[c].decision = decide(i, static_cast<std::uint32_t>(c));
        }
      }
      if (t == horizon_) break;

      for (AgentId i = 0; i < n; ++i)
        tables_[i].round_begin.push_back(static_cast<std::uint32_t>(tables_[i].classes.size()));
      for (std::uint64_t w = 0; w < worlds_; ++w) {
        std::uint32_t* row = &cur[w * n];
        for (AgentId i = 0; i < n; ++i) act[i] = tables_[i].classes[row[i]].decision.action;
        if (options_.record_agent) {
          const Decision& d = tables_[*options_.record_agent].classes[row[*options_.record_agent]].decision;
          if (d.action) recorded_actions_[w] |= std::uint64_t{1} << t;
          if (d.tie) recorded_ties_[w] |= std::uint64_t{1} << t;
        }
        for (AgentId i = 0; i < n; ++i) row[i] = intern(tables_[i], row[i], column(i, act), t + 1);
      }

      bool refined = false;
      for (AgentId i = 0; i < n && !refined; ++i) {
        const auto& rb = tables_[i].round_begin;
        refined = tables_[i].classes.size() - rb[t + 1] != rb[t + 1] - rb[t];
      }
      if (!refined && t >= stationary) {
        freeze(t + 1);
        return;
      }
    }
  }

  // Nothing refines after round t = f - 1: classes at f keep their parent's
  // masses and decisions forever, and every later column repeats.
  void freeze(int f) {
    frozen_from_ = f;
    for (auto& tab : tables_) {
      for (std::size_t c = tab.round_begin[f]; c < tab.classes.size(); ++c) {
        ClassInfo& info = tab.classes[c];
        const ClassInfo& parent = tab.classes[info.parent];
        info.m0 = parent.m0;
        info.m1 = parent.m1;
        info.belief = parent.belief;
        info.belief.t = f;
        info.decision = parent.decision;
      }
    }
    if (options_.record_agent) {
      for (std::uint64_t w = 0; w < worlds_; ++w) {
        std::uint64_t bit = std::uint64_t{1} << (f - 1);
        for (int t = f; t < horizon_; ++t) {
          if (recorded_actions_[w] & bit) recorded_actions_[w] |= std::uint64_t{1} << t;
          if (recorded_ties_[w] & bit) recorded_ties_[w] |= std::uint64_t{1} << t;
        }
      }
    }
  }

  template <typename Visit>
  void walk(std::span<const int> types, Visit&& visit, ActionMatrix& actions) const {
    require(static_cast<int>(types.size()) == agents(), "one type per agent expected");
    std::vector<std::uint32_t> cur(agents());
    for (AgentId i = 0; i < agents(); ++i) {
      require(types[i] >= 0 && types[i] < types_, "type out of range");
      cur[i] = static_cast<std::uint32_t>(types[i]);
    }
    std::vector<Action> act(agents());
    for (int t = 0; t < horizon_; ++t) {
      for (AgentId i = 0; i < agents(); ++i) {
        const ClassInfo& c = tables_[i].classes[cur[i]];
        visit(i, t, c);
        act[i] = actions.at(i, t);
      }
      if (t + 1 == horizon_) break;
      for (AgentId i = 0; i < agents(); ++i) {
        auto next = step(tables_[i], cur[i], column(i, act));
        if (!next) throw std::logic_error("exact engine: realized history missing from tables");
        cur[i] = *next;
      }
    }
  }

  DirectedGraph graph_;
  SignalModel model_;
  StrategyProfile profile_;
  int horizon_;
  ExactOptions options_;
  int levels_ = 1;
  int types_ = 0;
  std::uint64_t worlds_ = 0;
  int frozen_from_ = 0;
  std::vector<AgentTable> tables_;
  std::vector<std::uint64_t> recorded_actions_;
  std::vector<std::uint64_t> recorded_ties_;
};

// P(S=1 | F^i_t) for the view, solving the profile just far enough.
inline BeliefState exact_posterior(const DirectedGraph& g, const SignalModel& m,
                                   const StrategyProfile& profile, const HistoryView& view,
                                   ExactOptions opt = {}) {
  return ExactSolution::solve(g, m, profile, view.t(), opt).posterior(view);
}

inline YDecomposition y_decomposition(const DirectedGraph& g, const SignalModel& m,
                                      const StrategyProfile& profile, const HistoryView& view,
                                      ExactOptions opt = {}) {
  return ExactSolution::solve(g, m, profile, view.t(), opt).y_decomposition(view);
}

// Y_l = E[ |P(S=1 | F^i_{t+l}) - 1/2| | F^i_t ] when agent i, holding the
// information in `view`, switches to myopic play from round t on.
inline std::array<double, 4> lookahead_certainty(const DirectedGraph& g, const SignalModel& m,
                                                 const StrategyProfile& profile,
                                                 const HistoryView& view, int max_lookahead = 3,
                                                 ExactOptions opt = {}) {
  require(max_lookahead >= 0 && max_lookahead <= 3, "lookahead is limited to 3 rounds");
  const AgentId me = view.agent();
  const int t0 = view.t();
  std::vector<std::uint32_t> target(t0);
  for (int r = 0; r < t0; ++r) target[r] = static_cast<std::uint32_t>(view.column_mask(r));
  const int atom = view.atom();
  const bool jitter = view.jitter_high();

  StrategyProfile deviated = profile;
  Rule base = profile.rules.at(me);
  TieBreak tb = profile.tie_break;
  deviated.rules[me] = Rule{
      [=](const Observation& o) {
        bool mine = o.t >= t0 && o.atom == atom && (tb != TieBreak::kJitter || o.jitter_high == jitter);
        for (int r = 0; r < t0 && mine; ++r) mine = o.history.column_mask(r) == target[r];
        return mine ? best_response(o.belief(), tb, o.jitter_high) : base.respond(o);
      },
      true, kNeverStationary};
  deviated.purely_myopic = false;

  ExactSolution sol = ExactSolution::solve(g, m, deviated, t0 + max_lookahead, opt);
  auto start = sol.find_class(view);
  if (!start) throw InconsistentHistory("lookahead: view has zero probability under the profile");
  const auto& classes = sol.classes(me);
  const double base_mass = classes[*start].mass();

  const int start_round = classes[*start].round;
  std::array<double, 4> y{};
  for (int l = 0; l <= max_lookahead; ++l) {
    // Frozen classes stand for every later round.
    const int round = std::min(t0 + l, sol.frozen_from());
    double acc = 0;
    for (std::uint32_t c = 0; c < classes.size(); ++c) {
      if (classes[c].round != round) continue;
      std::uint32_t anc = c;
      while (classes[anc].round > start_round) anc = classes[anc].parent;
      if (anc != *start) continue;
      acc += classes[c].mass() / base_mass * std::abs(classes[c].belief.posterior - 0.5);
    }
    y[l] = acc;
  }
  for (int l = max_lookahead + 1; l < 4; ++l) y[l] = y[max_lookahead];
  return y;
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_EXACT_ENGINE_HPP_
