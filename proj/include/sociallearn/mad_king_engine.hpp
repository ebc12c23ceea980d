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

#ifndef SOCIALLEARN_MAD_KING_ENGINE_HPP_
#define SOCIALLEARN_MAD_KING_ENGINE_HPP_

// Exact posteriors for the mad king profile by counting.
//
// Court members, bureaucrats and people each see only themselves and one
// leader, and follow the same rule, so a member's whole action row is a
// function of its own atom and the leader's row. The dynamics are therefore
// determined by the count world (king atom, regent atom, number of atom-1
// signals in the court, the bureaucracy and the people), and conditional on
// the observed counts every labeling is equally likely. The engine runs the
// partition refinement of the exact engine over count worlds, with binomial
// weights kept in log space.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sociallearn/belief.hpp"
#include "sociallearn/errors.hpp"
#include "sociallearn/graph.hpp"
#include "sociallearn/history.hpp"
#include "sociallearn/policy.hpp"
#include "sociallearn/signal_model.hpp"
#include "sociallearn/strategy.hpp"

namespace sociallearn {

class MadKingSolution final : public Policy {
 public:
  // Information-set owners: the king, the regent, and one representative of
  // each (group, atom) pair.
  enum Observer { kKing, kRegent, kCourt0, kCourt1, kBureau0, kBureau1, kPeople0, kPeople1 };
  static constexpr int kObservers = 8;
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  struct CountWorld {
    int king_atom = 0;
    int regent_atom = 0;
    int court = 0;        // members holding atom 1
    int bureaucracy = 0;
    int people = 0;
  };

  static MadKingSolution solve(const DirectedGraph& g, const SignalModel& m,
                               const StrategyProfile& profile, int horizon) {
    require(profile.kind == ProfileKind::kMadKing && profile.mad_king && !profile.overlaid,
            "the counting engine needs an unmodified mad_king profile");
    require(m.size() == 2, "the counting engine needs a two-atom signal model");
    require(profile.tie_break != TieBreak::kJitter,
            "the counting engine supports the zero and one tie-breakers");
    require(horizon >= 1 && horizon <= 64, "horizon must lie in [1, 64]");
    MadKingSolution s(g, m, profile, horizon);
    s.run();
    return s;
  }

  int agents() const override { return graph_.size(); }
  int rounds() const override { return horizon_; }
  int types_per_agent() const override { return 2; }
  TieBreak tie_break() const override { return profile_.tie_break; }
  std::string engine_name() const override { return "sufficient-statistic"; }

  std::size_t count_worlds() const { return worlds_.size(); }

  CountWorld world_of(std::span<const int> types) const {
    require(static_cast<int>(types.size()) == agents(), "one type per agent expected");
    for (int x : types) require(x == 0 || x == 1, "type out of range");
    CountWorld w;
    w.king_atom = types[MadKingLayout::king];
    w.regent_atom = types[MadKingLayout::regent];
    for (int k = 0; k < L_.court; ++k) w.court += types[L_.court_member(k)];
    for (int k = 0; k < L_.bureaucracy; ++k) w.bureaucracy += types[L_.bureaucrat(k)];
    for (int k = 0; k < L_.people; ++k) w.people += types[L_.person(k)];
    return w;
  }

  ActionMatrix play(std::span<const int> types, std::vector<TieEvent>* ties = nullptr) const override {
    const std::size_t w = index(world_of(types));
    ActionMatrix actions(agents(), horizon_);
    for (int t = 0; t < horizon_; ++t)
      for (AgentId v = 0; v < agents(); ++v) {
        const int o = observer_of(v, types[v]);
        const std::size_t slot = w * kObservers + o;
        actions.set(v, t, static_cast<Action>((bits_[slot] >> t) & 1u));
        if (ties && ((tie_bits_[slot] >> t) & 1u)) ties->push_back({v, t});
      }
    return actions;
  }

  // Agents x rounds beliefs, row-major.
  std::vector<BeliefState> beliefs(std::span<const int> types) const {
    const std::size_t w = index(world_of(types));
    auto path = class_path(w);
    std::vector<BeliefState> out(static_cast<std::size_t>(agents()) * horizon_);
    for (AgentId v = 0; v < agents(); ++v) {
      const int o = observer_of(v, types[v]);
      for (int t = 0; t < horizon_; ++t)
        out[static_cast<std::size_t>(v) * horizon_ + t] = tables_[o].classes[path[o][t]].belief;
    }
    return out;
  }

  std::optional<std::vector<double>> posteriors(std::span<const int> types) const override {
    auto b = beliefs(types);
    std::vector<double> out(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) out[k] = b[k].posterior;
    return out;
  }

 private:
  struct LogMass {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0;
    void add(double x) {
      if (x <= max) {
        sum += std::exp(x - max);
      } else {
        sum = sum * std::exp(max - x) + 1;
        max = x;
      }
    }
    double value() const { return max + std::log(sum); }
  };

  struct Class {
    std::uint32_t parent = kNone;
    int round = 0;
    int atom = 0;
    Action leader = 0;  // leader's action in the previous round
    int ones = 0;       // court or bureaucracy members who played 1 then
    int people = 0;     // people who played 1 then (king only)
    LogMass m0, m1;
    BeliefState belief;
    Decision decision;
  };

  struct Table {
    AgentId rep = 0;
    std::vector<Class> classes;
    std::unordered_map<std::uint64_t, std::uint32_t> children;
    std::uint32_t round_begin = 0;
  };

  // History of one class, rebuilt on the representative agent's neighborhood.
  class ClassHistory final : public ActionSource {
   public:
    ClassHistory(const MadKingSolution& s, int observer, std::vector<Action> own,
                 std::vector<Action> leader, std::vector<int> ones, std::vector<int> people)
        : s_(s), observer_(observer), own_(std::move(own)), leader_(std::move(leader)),
          ones_(std::move(ones)), people_(std::move(people)) {}

    Action at(AgentId agent, int round) const override {
      const MadKingLayout& L = s_.L_;
      const AgentId self = s_.tables_[observer_].rep;
      if (agent == self) return own_.at(round);
      const AgentId leader = s_.leader_of(observer_);
      if (agent == leader) return leader_.at(round);
      if (observer_ == kKing) {
        if (agent >= L.court_member(0) && agent < L.bureaucrat(0))
          return agent - L.court_member(0) < ones_.at(round);
        if (agent >= L.person(0) && agent < L.total())
          return agent - L.person(0) < people_.at(round);
      }
      if (observer_ == kRegent && agent >= L.bureaucrat(0) && agent < L.person(0))
        return agent - L.bureaucrat(0) < ones_.at(round);
      throw InvalidInput("agent " + std::to_string(agent) + " is not observed by agent " +
                         std::to_string(self));
    }

   private:
    const MadKingSolution& s_;
    int observer_;
    std::vector<Action> own_, leader_;
    std::vector<int> ones_, people_;
  };

  MadKingSolution(const DirectedGraph& g, const SignalModel& m, const StrategyProfile& p, int horizon)
      : graph_(g), model_(m), profile_(p), horizon_(horizon), L_(p.mad_king->layout) {
    require(L_.total() == g.size(), "mad_king roles do not match the graph");
    require(L_.court >= 1 && L_.bureaucracy >= 1 && L_.people >= 1, "every mad_king group needs a member");
    require(L_.court < (1 << 15) && L_.bureaucracy < (1 << 15) && L_.people < (1 << 16),
            "mad_king groups are too large for the counting engine");
    const AgentId reps[kObservers] = {MadKingLayout::king, MadKingLayout::regent,
                                      L_.court_member(0),  L_.court_member(0),
                                      L_.bureaucrat(0),    L_.bureaucrat(0),
                                      L_.person(0),        L_.person(0)};
    for (int o = 0; o < kObservers; ++o) tables_[o].rep = reps[o];
  }

  static int group_atom(int observer) { return (observer - kCourt0) % 2; }

  AgentId leader_of(int observer) const {
    switch (observer) {
      case kKing: return MadKingLayout::regent;
      case kRegent: return MadKingLayout::king;
      case kBureau0:
      case kBureau1: return MadKingLayout::regent;
      default: return MadKingLayout::king;
    }
  }

  int observer_of(AgentId v, int type) const {
    if (v == MadKingLayout::king) return kKing;
    if (v == MadKingLayout::regent) return kRegent;
    if (v < L_.bureaucrat(0)) return kCourt0 + type;
    if (v < L_.person(0)) return kBureau0 + type;
    return kPeople0 + type;
  }

  // Members of the observer's group, and how many hold atom 1 in world w.
  std::pair<int, int> group(int observer, const CountWorld& w) const {
    if (observer == kCourt0 || observer == kCourt1) return {L_.court, w.court};
    if (observer == kBureau0 || observer == kBureau1) return {L_.bureaucracy, w.bureaucracy};
    return {L_.people, w.people};
  }

  std::size_t index(const CountWorld& w) const {
    return ((((static_cast<std::size_t>(w.king_atom) * 2 + w.regent_atom) * (L_.court + 1) + w.court) *
                 (L_.bureaucracy + 1) + w.bureaucracy) * (L_.people + 1)) + w.people;
  }

  static std::uint64_t key(std::uint32_t parent, Action leader, int ones, int people) {
    return static_cast<std::uint64_t>(parent) << 32 | static_cast<std::uint64_t>(leader) << 31 |
           static_cast<std::uint64_t>(ones) << 16 | static_cast<std::uint64_t>(people);
  }

  std::uint32_t child(int observer, std::uint32_t parent, Action leader, int ones, int people) {
    Table& tab = tables_[observer];
    auto [it, inserted] = tab.children.try_emplace(key(parent, leader, ones, people), kNone);
    if (inserted) {
      Class c;
      c.parent = parent;
      c.round = tab.classes[parent].round + 1;
      c.atom = tab.classes[parent].atom;
      c.leader = leader;
      c.ones = ones;
      c.people = people;
      tab.classes.push_back(c);
      it->second = static_cast<std::uint32_t>(tab.classes.size() - 1);
    }
    return it->second;
  }

  std::uint32_t find_child(int observer, std::uint32_t parent, Action leader, int ones,
                           int people) const {
    const Table& tab = tables_[observer];
    auto it = tab.children.find(key(parent, leader, ones, people));
    if (it == tab.children.end()) throw std::logic_error("counting engine: missing class");
    return it->second;
  }

  static double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  }

  Decision decide(int observer, std::uint32_t id) const {
    const Table& tab = tables_[observer];
    const Class& c = tab.classes[id];
    std::vector<BeliefState> beliefs(c.round + 1);
    std::vector<Action> own(c.round), leader(c.round);
    std::vector<int> ones(c.round), people(c.round);
    for (std::uint32_t k = id; k != kNone; k = tab.classes[k].parent) {
      const Class& a = tab.classes[k];
      beliefs[a.round] = a.belief;
      if (a.round > 0) {
        const Class& p = tab.classes[a.parent];
        own[a.round - 1] = p.decision.action;
        leader[a.round - 1] = a.leader;
        ones[a.round - 1] = a.ones;
        people[a.round - 1] = a.people;
      }
    }
    ClassHistory source(*this, observer, std::move(own), std::move(leader), std::move(ones),
                        std::move(people));
    const auto& rows = graph_.neighborhood(tab.rep);
    HistoryView view(tab.rep, c.round, c.atom, rows, source, false);
    Observation obs{tab.rep, c.round, c.atom, false, view, beliefs};
    return profile_.rules[tab.rep].respond(obs);
  }

  // The eight observers' columns seen at the end of round t in world w.
  struct Columns {
    Action act[kObservers];
    int court_ones, bureau_ones, people_ones;
  };

  Columns columns(const CountWorld& w, std::size_t wi, int t) const {
    Columns col{};
    for (int o = 0; o < kObservers; ++o)
      col.act[o] = static_cast<Action>((bits_[wi * kObservers + o] >> t) & 1u);
    auto ones = [&](int o0, int size, int k1) {
      return k1 * col.act[o0 + 1] + (size - k1) * col.act[o0];
    };
    col.court_ones = ones(kCourt0, L_.court, w.court);
    col.bureau_ones = ones(kBureau0, L_.bureaucracy, w.bureaucracy);
    col.people_ones = ones(kPeople0, L_.people, w.people);
    return col;
  }

  void run() {
    const double lp[2][2] = {
        {std::log(model_.atom(0).p0), std::log(model_.atom(1).p0)},
        {std::log(model_.atom(0).p1), std::log(model_.atom(1).p1)}};
    auto log_group = [&](int s, int size, int k1) {
      return log_binomial(size, k1) + k1 * lp[s][1] + (size - k1) * lp[s][0];
    };
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v)
        for (int kc = 0; kc <= L_.court; ++kc)
          for (int kb = 0; kb <= L_.bureaucracy; ++kb)
            for (int kp = 0; kp <= L_.people; ++kp) worlds_.push_back({u, v, kc, kb, kp});
    const std::size_t n = worlds_.size();
    std::vector<double> lw[2];
    for (int s = 0; s < 2; ++s) {
      lw[s].resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const CountWorld& w = worlds_[i];
        lw[s][i] = lp[s][w.king_atom] + lp[s][w.regent_atom] + log_group(s, L_.court, w.court) +
                   log_group(s, L_.bureaucracy, w.bureaucracy) + log_group(s, L_.people, w.people);
      }
    }
    for (auto& tab : tables_)
      for (int a = 0; a < 2; ++a) {
        Class root;
        root.atom = a;
        tab.classes.push_back(root);
      }
    std::vector<std::uint32_t> cur(n * kObservers, kNone);
    std::vector<double> share(n * kObservers, 0);  // log of the member fraction
    for (std::size_t i = 0; i < n; ++i) {
      const CountWorld& w = worlds_[i];
      cur[i * kObservers + kKing] = static_cast<std::uint32_t>(w.king_atom);
      cur[i * kObservers + kRegent] = static_cast<std::uint32_t>(w.regent_atom);
      for (int o = kCourt0; o < kObservers; ++o) {
        auto [size, k1] = group(o, w);
        const int members = group_atom(o) == 1 ? k1 : size - k1;
        if (members == 0) continue;
        cur[i * kObservers + o] = static_cast<std::uint32_t>(group_atom(o));
        share[i * kObservers + o] = std::log(static_cast<double>(members) / size);
      }
    }
    bits_.assign(n * kObservers, 0);
    tie_bits_.assign(n * kObservers, 0);

    for (int t = 0; t < horizon_; ++t) {
      for (std::size_t i = 0; i < n; ++i)
        for (int o = 0; o < kObservers; ++o) {
          const std::uint32_t c = cur[i * kObservers + o];
          if (c == kNone) continue;
          Class& cls = tables_[o].classes[c];
          cls.m0.add(lw[0][i] + share[i * kObservers + o]);
          cls.m1.add(lw[1][i] + share[i * kObservers + o]);
        }
      for (int o = 0; o < kObservers; ++o) {
        Table& tab = tables_[o];
        for (std::size_t c = tab.round_begin; c < tab.classes.size(); ++c) {
          Class& cls = tab.classes[c];
          cls.belief = BeliefState::from_log_odds(cls.m1.value() - cls.m0.value(), t);
          cls.decision = decide(o, static_cast<std::uint32_t>(c));
        }
        tab.round_begin = static_cast<std::uint32_t>(tab.classes.size());
      }
      for (std::size_t i = 0; i < n; ++i)
        for (int o = 0; o < kObservers; ++o) {
          const std::uint32_t c = cur[i * kObservers + o];
          if (c == kNone) continue;
          const Decision& d = tables_[o].classes[c].decision;
          if (d.action) bits_[i * kObservers + o] |= std::uint64_t{1} << t;
          if (d.tie) tie_bits_[i * kObservers + o] |= std::uint64_t{1} << t;
        }
      if (t + 1 == horizon_) break;
      for (std::size_t i = 0; i < n; ++i) {
        const Columns col = columns(worlds_[i], i, t);
        std::uint32_t* c = &cur[i * kObservers];
        c[kKing] = child(kKing, c[kKing], col.act[kRegent], col.court_ones, col.people_ones);
        c[kRegent] = child(kRegent, c[kRegent], col.act[kKing], col.bureau_ones, 0);
        for (int o = kCourt0; o < kObservers; ++o)
          if (c[o] != kNone) c[o] = child(o, c[o], col.act[leader_observer(o)], 0, 0);
      }
    }
  }

  static int leader_observer(int o) { return o == kBureau0 || o == kBureau1 ? kRegent : kKing; }

  std::array<std::vector<std::uint32_t>, kObservers> class_path(std::size_t wi) const {
    const CountWorld& w = worlds_[wi];
    std::array<std::vector<std::uint32_t>, kObservers> path;
    std::array<std::uint32_t, kObservers> c;
    c[kKing] = static_cast<std::uint32_t>(w.king_atom);
    c[kRegent] = static_cast<std::uint32_t>(w.regent_atom);
    for (int o = kCourt0; o < kObservers; ++o) {
      auto [size, k1] = group(o, w);
      const int members = group_atom(o) == 1 ? k1 : size - k1;
      c[o] = members == 0 ? kNone : static_cast<std::uint32_t>(group_atom(o));
    }
    for (int t = 0; t < horizon_; ++t) {
      for (int o = 0; o < kObservers; ++o) path[o].push_back(c[o]);
      if (t + 1 == horizon_) break;
      const Columns col = columns(w, wi, t);
      c[kKing] = find_child(kKing, c[kKing], col.act[kRegent], col.court_ones, col.people_ones);
      c[kRegent] = find_child(kRegent, c[kRegent], col.act[kKing], col.bureau_ones, 0);
      for (int o = kCourt0; o < kObservers; ++o)
        if (c[o] != kNone) c[o] = find_child(o, c[o], col.act[leader_observer(o)], 0, 0);
    }
    return path;
  }

  DirectedGraph graph_;
  SignalModel model_;
  StrategyProfile profile_;
  int horizon_;
  MadKingLayout L_;
  std::array<Table, kObservers> tables_;
  std::vector<CountWorld> worlds_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> tie_bits_;
};

}  // namespace sociallearn

#endif  // SOCIALLEARN_MAD_KING_ENGINE_HPP_
