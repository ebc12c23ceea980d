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

#ifndef SOCIALLEARN_LOCAL_ENGINE_HPP_
#define SOCIALLEARN_LOCAL_ENGINE_HPP_

// Myopic play on graphs too large to enumerate. An agent's action at round t
// is a function of the signals in its radius-t ball, so each agent's actions
// through a cutoff round tc are solved exactly on B_tc(i) and then held at
// the round-tc action. Agents with isomorphic balls share one solution.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sociallearn/errors.hpp"
#include "sociallearn/exact_engine.hpp"
#include "sociallearn/graph.hpp"
#include "sociallearn/policy.hpp"
#include "sociallearn/signal_model.hpp"
#include "sociallearn/strategy.hpp"

namespace sociallearn {

struct LocalOptions {
  // Joint assignments allowed per ball.
  std::uint64_t ball_budget = std::uint64_t{1} << 20;
  // Largest cutoff considered; defaults to horizon - 1.
  std::optional<int> max_cutoff;
};

class LocalSolution final : public Policy {
 public:
  static LocalSolution solve(const DirectedGraph& g, const SignalModel& m,
                             const StrategyProfile& profile, int horizon, LocalOptions opt = {}) {
    require(profile.purely_myopic, "the local engine only solves myopic profiles");
    require(profile.size() == g.size(), "profile and graph disagree on the number of agents");
    require(horizon >= 1 && horizon <= 64, "horizon must lie in [1, 64]");
    LocalSolution s;
    s.agents_ = g.size();
    s.horizon_ = horizon;
    s.tie_break_ = profile.tie_break;
    s.types_ = m.size() * jitter_levels(profile.tie_break);
    s.pick_cutoff(g, opt);
    s.build(g, m);
    return s;
  }

  int agents() const override { return agents_; }
  int rounds() const override { return horizon_; }
  int types_per_agent() const override { return types_; }
  TieBreak tie_break() const override { return tie_break_; }
  std::string engine_name() const override { return "local"; }

  // Last round solved exactly; later rounds repeat it.
  int cutoff() const { return cutoff_; }
  // True when every ball covers its whole reachable set, so nothing is cut.
  bool exhaustive() const { return exhaustive_; }
  int distinct_balls() const { return static_cast<int>(reps_.size()); }

  ActionMatrix play(std::span<const int> types, std::vector<TieEvent>* ties = nullptr) const override {
    require(static_cast<int>(types.size()) == agents_, "one type per agent expected");
    ActionMatrix actions(agents_, horizon_);
    for (AgentId i = 0; i < agents_; ++i) {
      const Member& mem = members_[i];
      const Rep& rep = reps_[mem.rep];
      std::uint64_t index = 0;
      for (std::size_t k = 0; k < mem.original.size(); ++k)
        index += static_cast<std::uint64_t>(types[mem.original[k]]) * rep.place[mem.slot[k]];
      const std::uint64_t bits = rep.actions[index];
      const std::uint64_t tie_bits = rep.ties[index];
      for (int t = 0; t < horizon_; ++t) {
        const int r = t <= cutoff_ ? t : cutoff_;
        actions.set(i, t, static_cast<Action>((bits >> r) & 1u));
        if (ties && ((tie_bits >> r) & 1u)) ties->push_back({i, t});
      }
    }
    if (ties) std::sort(ties->begin(), ties->end(), [](const TieEvent& a, const TieEvent& b) {
      return a.t != b.t ? a.t < b.t : a.agent < b.agent;
    });
    return actions;
  }

 private:
  struct Rep {
    RootedBall ball;
    std::vector<std::uint64_t> place;  // local id -> weight in the world index
    std::vector<std::uint64_t> actions;
    std::vector<std::uint64_t> ties;
  };
  struct Member {
    int rep = 0;
    std::vector<AgentId> original;  // own ball, local id -> graph id
    std::vector<int> slot;          // own local id -> representative local id
  };

  // Largest radius whose balls all fit the budget. Once every ball stops
  // growing it holds the agent's whole reachable set and any horizon is exact.
  void pick_cutoff(const DirectedGraph& g, const LocalOptions& opt) {
    const int cap = std::min(opt.max_cutoff.value_or(horizon_ - 1), horizon_ - 1);
    require(cap >= 0, "cutoff must be nonnegative");
    radius_ = -1;
    for (int r = 0; r <= cap; ++r) {
      bool fits = true;
      bool closed = true;
      for (AgentId i = 0; i < g.size() && fits; ++i) {
        const int size = extract_ball(g, i, r).size();
        fits = assignment_count(types_, size, opt.ball_budget).has_value();
        closed = closed && extract_ball(g, i, r + 1).size() == size;
      }
      if (!fits) break;
      radius_ = r;
      exhaustive_ = closed;
      if (closed) break;
    }
    if (radius_ < 0)
      throw BudgetExceeded("local engine: even radius-0 balls exceed the ball budget");
    cutoff_ = exhaustive_ ? horizon_ - 1 : radius_;
  }

  void build(const DirectedGraph& g, const SignalModel& m) {
    members_.resize(agents_);
    for (AgentId i = 0; i < agents_; ++i) {
      RootedBall ball = extract_ball(g, i, radius_);
      Member& mem = members_[i];
      mem.original = ball.original;
      std::optional<std::vector<int>> witness;
      for (std::size_t k = 0; k < reps_.size() && !witness; ++k) {
        witness = balls_isomorphic(ball, reps_[k].ball);
        if (witness) mem.rep = static_cast<int>(k);
      }
      if (!witness) {
        mem.rep = static_cast<int>(reps_.size());
        std::vector<int> identity(ball.size());
        for (int k = 0; k < ball.size(); ++k) identity[k] = k;
        witness = identity;
        reps_.push_back(solve_ball(std::move(ball), m));
      }
      mem.slot = *witness;
    }
  }

  Rep solve_ball(RootedBall ball, const SignalModel& m) const {
    Rep rep;
    StrategyProfile local = myopic_profile(ball.graph, tie_break_);
    ExactOptions eo;
    eo.budget = std::numeric_limits<std::uint64_t>::max();
    eo.record_agent = 0;
    ExactSolution sol = ExactSolution::solve(ball.graph, m, local, cutoff_ + 1, eo);
    rep.place.resize(ball.size());
    std::uint64_t w = 1;
    for (int k = 0; k < ball.size(); ++k) {
      rep.place[k] = w;
      w *= static_cast<std::uint64_t>(types_);
    }
    rep.actions = sol.recorded_actions();
    rep.ties = sol.recorded_ties();
    rep.ball = std::move(ball);
    return rep;
  }

  int agents_ = 0;
  int horizon_ = 0;
  TieBreak tie_break_ = TieBreak::kZero;
  int types_ = 0;
  int cutoff_ = 0;
  int radius_ = 0;
  bool exhaustive_ = false;
  std::vector<Rep> reps_;
  std::vector<Member> members_;
};

}  // namespace sociallearn

#endif  // SOCIALLEARN_LOCAL_ENGINE_HPP_
