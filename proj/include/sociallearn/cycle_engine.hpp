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


#ifndef SOCIALLEARN_CYCLE_ENGINE_HPP_
#define SOCIALLEARN_CYCLE_ENGINE_HPP_

// Exact myopic play on an undirected cycle of any length. At round t an
// agent's information set is its type plus the action rows (left, own,
// right) of length t. A row of length l is fixed by the agent's type and its
// neighbors' rows of length l-1, so the agent at distance d from the
// observer only matters through its first t+1-d actions. Summing over the
// ring with rows cut this way, each factor links three adjacent rows, and
// the sum is built level by level from the far side inward. Until the two
// arcs meet the likelihood is the product of the arcs' weights; after that
// the arcs are carried as vectors over the short rows where they meet.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sociallearn/belief.hpp"
#include "sociallearn/errors.hpp"
#include "sociallearn/graph.hpp"
#include "sociallearn/policy.hpp"
#include "sociallearn/signal_model.hpp"
#include "sociallearn/strategy.hpp"

namespace sociallearn {

struct CycleOptions {
  // Triples of rows allowed in any one round.
  std::uint64_t budget = std::uint64_t{1} << 22;
  // Scratch memory for joining the two arcs once they meet.
  std::size_t join_bytes = std::size_t{1} << 29;
};

// Vertex order around the ring when g is an undirected cycle.
inline std::optional<std::vector<AgentId>> cycle_order(const DirectedGraph& g) {
  if (g.size() < 3 || !g.is_symmetric()) return std::nullopt;
  for (AgentId i = 0; i < g.size(); ++i)
    if (g.out_neighbors(i).size() != 2) return std::nullopt;
  std::vector<AgentId> order{0};
  AgentId prev = 0, cur = g.out_neighbors(0)[1];
  while (cur != 0) {
    order.push_back(cur);
    const auto& nb = g.out_neighbors(cur);
    AgentId next = nb[0] == prev ? nb[1] : nb[0];
    prev = cur;
    cur = next;
  }
  if (static_cast<int>(order.size()) != g.size()) return std::nullopt;
  return order;
}

class CycleSolution final : public Policy {
 public:
  static CycleSolution solve(const DirectedGraph& g, const SignalModel& m,
                             const StrategyProfile& profile, int horizon, CycleOptions opt = {}) {
    require(profile.purely_myopic, "the cycle engine only solves myopic profiles");
    require(profile.size() == g.size(), "profile and graph disagree on the number of agents");
    require(horizon >= 1 && horizon <= 64, "horizon must lie in [1, 64]");
    auto order = cycle_order(g);
    require(order.has_value(), "the cycle engine needs an undirected cycle");
    require(profile.tie_break != TieBreak::kJitter || m.jitter_width() > 0,
            "jitter tie-breaking needs a positive jitter width");
    CycleSolution s;
    s.position_.resize(order->size());
    for (std::size_t k = 0; k < order->size(); ++k) s.position_[(*order)[k]] = static_cast<int>(k);
    s.horizon_ = horizon;
    s.tie_break_ = profile.tie_break;
    s.levels_ = jitter_levels(profile.tie_break);
    s.types_ = m.size() * s.levels_;
    require(s.types_ <= 32, "the cycle engine supports at most 32 types");
    for (int type = 0; type < s.types_; ++type) {
      s.mass_[0].push_back(m.atom(type / s.levels_).mass(0) / s.levels_);
      s.mass_[1].push_back(m.atom(type / s.levels_).mass(1) / s.levels_);
    }
    s.run(opt);
    return s;
  }

  int agents() const override { return static_cast<int>(position_.size()); }
  int rounds() const override { return horizon_; }
  int types_per_agent() const override { return types_; }
  TieBreak tie_break() const override { return tie_break_; }
  std::string engine_name() const override { return "cycle"; }

  // Distinct rows and row triples reached in round t.
  std::size_t rows(int t) const { return rounds_.at(t).rows; }
  std::size_t triples(int t) const { return rounds_.at(t).triples.size(); }

  ActionMatrix play(std::span<const int> types, std::vector<TieEvent>* ties = nullptr) const override {
    ActionMatrix actions(agents(), horizon_);
    walk(types, [&](AgentId i, int t, const Triple& tr, int type) {
      bool act = (tr.act >> type) & 1u;
      actions.set(i, t, act ? 1 : 0);
      if (ties && ((tr.tie >> type) & 1u)) ties->push_back({i, t});
      return act;
    });
    return actions;
  }

  std::optional<std::vector<double>> posteriors(std::span<const int> types) const override {
    std::vector<double> out(static_cast<std::size_t>(agents()) * horizon_);
    walk(types, [&](AgentId i, int t, const Triple& tr, int type) {
      out[static_cast<std::size_t>(i) * horizon_ + t] = logistic(log_odds(tr, type));
      return ((tr.act >> type) & 1u) != 0;
    });
    return out;
  }

 private:
  struct Triple {
    std::uint32_t x = 0, y = 0, z = 0;  // left, own, right row
    std::uint32_t valid = 0;            // types consistent with the rows
    std::uint32_t act = 0, tie = 0;     // decision bit per type
    double l0 = 0, l1 = 0;              // likelihood of the rows under S = 0, 1
  };
  struct Round {
    std::size_t rows = 0;
    std::vector<Triple> triples;
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    std::vector<std::array<std::uint32_t, 2>> child;  // row -> row of next round
    std::vector<std::uint32_t> parent;                // row -> row of previous round
  };
  struct Edge {
    std::uint32_t from = 0, to = 0;
    double w0 = 0, w1 = 0;
  };
  // States (inner neighbor's row cut by one round, own row) of one row
  // length, with the weight of everything farther out and the edges that
  // built them from the level below.
  struct Level {
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    std::vector<std::array<double, 2>> env;
    std::vector<Edge> edges;
  };
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  static std::uint64_t key(std::uint64_t x, std::uint64_t y, std::uint64_t z) {
    return (x << 42) | (y << 21) | z;
  }

  double log_odds(const Triple& tr, int type) const {
    return std::log(mass_[1][type] * tr.l1) - std::log(mass_[0][type] * tr.l0);
  }

  template <typename Visit>
  void walk(std::span<const int> types, Visit&& visit) const {
    const int n = agents();
    require(static_cast<int>(types.size()) == n, "one type per agent expected");
    for (int type : types) require(type >= 0 && type < types_, "type out of range");
    std::vector<std::uint32_t> row(n, 0), next(n);
    for (int t = 0; t < horizon_; ++t) {
      const Round& r = rounds_[t];
      for (AgentId agent = 0; agent < n; ++agent) {
        const int k = position_[agent];
        auto it = r.index.find(key(row[(k + n - 1) % n], row[k], row[(k + 1) % n]));
        if (it == r.index.end()) throw std::logic_error("cycle engine: unreachable rows");
        const Triple& tr = r.triples[it->second];
        bool act = visit(agent, t, tr, types[agent]);
        if (t + 1 < horizon_) next[k] = r.child[row[k]][act ? 1 : 0];
      }
      row.swap(next);
    }
  }

  void run(const CycleOptions& opt) {
    rounds_.resize(horizon_);
    Round& first = rounds_[0];
    first.rows = 1;
    first.triples.push_back({0, 0, 0, (types_ == 32 ? ~0u : (1u << types_) - 1)});
    first.index.emplace(key(0, 0, 0), 0);
    first.parent.assign(1, 0);
    layers_.resize(horizon_);
    layers_[0].index.emplace(pair_key(0, 0), 0);
    layers_[0].env.push_back({1.0, 1.0});
    for (int t = 0; t < horizon_; ++t) {
      Round& r = rounds_[t];
      if (2 * t + 1 <= agents()) open_likelihoods(t);
      else closed_likelihoods(t, opt);
      decide(r, t);
      if (t + 1 < horizon_) {
        extend(r, rounds_[t + 1], opt);
        grow_level(t);
      }
    }
  }

  static std::uint64_t pair_key(std::uint64_t x, std::uint64_t y) { return (x << 32) | y; }

  std::uint32_t state(int level, std::uint32_t inner, std::uint32_t own) const {
    const auto& index = layers_[level].index;
    auto it = index.find(pair_key(inner, own));
    return it == index.end() ? kNone : it->second;
  }

  // Mass of the types in `valid` under each state.
  std::array<double, 2> weight(std::uint32_t valid) const {
    std::array<double, 2> w{0.0, 0.0};
    for (int type = 0; type < types_; ++type) {
      if (!((valid >> type) & 1u)) continue;
      w[0] += mass_[0][type];
      w[1] += mass_[1][type];
    }
    return w;
  }

  // While 2t+1 <= n the two neighbors' rows depend on disjoint sets of
  // signals and the likelihood is a product of two environments.
  void open_likelihoods(int t) {
    Round& r = rounds_[t];
    const Level& level = layers_[t];
    for (Triple& tr : r.triples) {
      const std::uint32_t right = state(t, r.parent[tr.y], tr.z);
      const std::uint32_t left = state(t, r.parent[tr.y], tr.x);
      if (right == kNone || left == kNone) continue;
      tr.l0 = level.env[right][0] * level.env[left][0];
      tr.l1 = level.env[right][1] * level.env[left][1];
    }
  }

  // Level t+1 from the decisions of round t: a row of length t+1 whose
  // neighbors are cut to length t, weighted by everything beyond it.
  void grow_level(int t) {
    const Round& r = rounds_[t];
    const Level& below = layers_[t];
    Level& up = layers_[t + 1];
    for (const Triple& tr : r.triples) {
      if (tr.l0 <= 0) continue;
      const std::uint32_t from = state(t, r.parent[tr.y], tr.z);
      if (from == kNone) continue;
      for (int bit = 0; bit < 2; ++bit) {
        const std::uint32_t valid = bit ? tr.act : tr.valid & ~tr.act;
        if (!valid) continue;
        const auto w = weight(valid);
        auto [it, inserted] = up.index.try_emplace(pair_key(tr.x, r.child[tr.y][bit]),
                                                   static_cast<std::uint32_t>(up.env.size()));
        if (inserted) up.env.push_back({0.0, 0.0});
        auto& e = up.env[it->second];
        e[0] += w[0] * below.env[from][0];
        e[1] += w[1] * below.env[from][1];
        up.edges.push_back({from, it->second, w[0], w[1]});
      }
    }
  }

  struct Coupling {
    std::uint32_t right = 0, left = 0;  // states of the base level
    double k0 = 0, k1 = 0;
  };

  // Factors of the agents farthest from the observer. Their rows have
  // length lambda; the arcs on both sides end in base-level states.
  std::vector<Coupling> couplings(int lambda) const {
    const Round& r = rounds_[lambda - 1];
    std::vector<Coupling> out;
    if (agents() % 2 == 0) {
      for (const Triple& tr : r.triples) {
        if (tr.l0 <= 0) continue;
        for (int bit = 0; bit < 2; ++bit) {
          const std::uint32_t valid = bit ? tr.act : tr.valid & ~tr.act;
          if (!valid) continue;
          const auto w = weight(valid);
          const std::uint32_t q = r.child[tr.y][bit];
          const std::uint32_t u = state(lambda, tr.x, q), v = state(lambda, tr.z, q);
          if (u != kNone && v != kNone) out.push_back({u, v, w[0], w[1]});
        }
      }
      return out;
    }
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_left;
    for (std::uint32_t k = 0; k < r.triples.size(); ++k)
      if (r.triples[k].l0 > 0) by_left[pair_key(r.triples[k].x, r.triples[k].y)].push_back(k);
    for (const Triple& a : r.triples) {
      if (a.l0 <= 0) continue;
      auto it = by_left.find(pair_key(a.y, a.z));
      if (it == by_left.end()) continue;
      for (int bit_a = 0; bit_a < 2; ++bit_a) {
        const std::uint32_t valid_a = bit_a ? a.act : a.valid & ~a.act;
        if (!valid_a) continue;
        const auto wa = weight(valid_a);
        const std::uint32_t u = state(lambda, a.x, r.child[a.y][bit_a]);
        if (u == kNone) continue;
        for (std::uint32_t k : it->second) {
          const Triple& b = r.triples[k];
          for (int bit_b = 0; bit_b < 2; ++bit_b) {
            const std::uint32_t valid_b = bit_b ? b.act : b.valid & ~b.act;
            if (!valid_b) continue;
            const auto wb = weight(valid_b);
            const std::uint32_t v = state(lambda, b.z, r.child[b.y][bit_b]);
            if (v != kNone) out.push_back({u, v, wa[0] * wb[0], wa[1] * wb[1]});
          }
        }
      }
    }
    return out;
  }

  // Once the arcs meet, each arc's environment is kept as a vector over the
  // base-level states where it ends, and the two are joined by the far
  // agents' factors. Base states are processed in blocks to bound memory.
  void closed_likelihoods(int t, const CycleOptions& opt) {
    Round& r = rounds_[t];
    const int lambda = t + 1 - agents() / 2;
    std::vector<Coupling> join = couplings(lambda);
    std::sort(join.begin(), join.end(),
              [](const Coupling& a, const Coupling& b) { return a.right < b.right; });
    std::size_t widest = 0;
    for (int l = lambda; l <= t; ++l) widest = std::max(widest, layers_[l].env.size());
    const std::size_t width =
        std::max<std::size_t>(1, opt.join_bytes / (4 * sizeof(double) * std::max<std::size_t>(widest, 1)));

    std::vector<std::uint32_t> right_of(r.triples.size(), kNone), left_of(r.triples.size(), kNone);
    for (std::size_t k = 0; k < r.triples.size(); ++k) {
      const Triple& tr = r.triples[k];
      right_of[k] = state(t, r.parent[tr.y], tr.z);
      left_of[k] = state(t, r.parent[tr.y], tr.x);
    }
    std::vector<std::uint32_t> column(layers_[lambda].env.size(), kNone);
    std::vector<std::uint32_t> members;
    std::vector<double> cur0, cur1, nxt0, nxt1;
    std::size_t first = 0;
    while (first < join.size()) {
      // Block: whole runs of equal right state, plus the left states they meet.
      members.clear();
      std::size_t last = first;
      while (last < join.size() && (members.size() < width || join[last].right == join[last - 1].right)) {
        for (std::uint32_t s : {join[last].right, join[last].left}) {
          if (column[s] == kNone) {
            column[s] = static_cast<std::uint32_t>(members.size());
            members.push_back(s);
          }
        }
        ++last;
      }
      const std::size_t c = members.size();
      cur0.assign(layers_[lambda].env.size() * c, 0.0);
      cur1.assign(cur0.size(), 0.0);
      for (std::size_t j = 0; j < c; ++j) cur0[members[j] * c + j] = cur1[members[j] * c + j] = 1.0;
      for (int l = lambda + 1; l <= t; ++l) {
        nxt0.assign(layers_[l].env.size() * c, 0.0);
        nxt1.assign(nxt0.size(), 0.0);
        for (const Edge& e : layers_[l].edges) {
          const double* a0 = &cur0[e.from * c];
          const double* a1 = &cur1[e.from * c];
          double* b0 = &nxt0[e.to * c];
          double* b1 = &nxt1[e.to * c];
          for (std::size_t j = 0; j < c; ++j) {
            b0[j] += e.w0 * a0[j];
            b1[j] += e.w1 * a1[j];
          }
        }
        cur0.swap(nxt0);
        cur1.swap(nxt1);
      }
      for (std::size_t k = 0; k < r.triples.size(); ++k) {
        if (right_of[k] == kNone || left_of[k] == kNone) continue;
        const double* rr0 = &cur0[right_of[k] * c];
        const double* rr1 = &cur1[right_of[k] * c];
        const double* ll0 = &cur0[left_of[k] * c];
        const double* ll1 = &cur1[left_of[k] * c];
        double s0 = 0, s1 = 0;
        for (std::size_t j = first; j < last; ++j) {
          s0 += rr0[column[join[j].right]] * join[j].k0 * ll0[column[join[j].left]];
          s1 += rr1[column[join[j].right]] * join[j].k1 * ll1[column[join[j].left]];
        }
        r.triples[k].l0 += s0;
        r.triples[k].l1 += s1;
      }
      for (std::uint32_t s : members) column[s] = kNone;
      first = last;
    }
  }

  void decide(Round& r, int t) const {
    for (Triple& tr : r.triples) {
      if (tr.l0 <= 0) continue;
      for (int type = 0; type < types_; ++type) {
        if (!((tr.valid >> type) & 1u)) continue;
        BeliefState b = BeliefState::from_log_odds(log_odds(tr, type), t);
        Decision d = best_response(b, tie_break_, levels_ == 2 && type % 2 == 1);
        if (d.action) tr.act |= 1u << type;
        if (d.tie) tr.tie |= 1u << type;
      }
    }
  }

  // Builds the next round's rows and candidate triples from the reachable ones.
  void extend(Round& r, Round& nx, const CycleOptions& opt) const {
    r.child.assign(r.rows, {kNone, kNone});
    std::uint32_t rows = 0;
    for (const Triple& tr : r.triples) {
      if (tr.l0 <= 0) continue;
      for (int bit = 0; bit < 2; ++bit) {
        std::uint32_t acting = bit ? tr.act : tr.valid & ~tr.act;
        if (acting && r.child[tr.y][bit] == kNone) r.child[tr.y][bit] = rows++;
      }
    }
    nx.rows = rows;
    nx.parent.assign(rows, 0);
    for (std::uint32_t y = 0; y < r.rows; ++y)
      for (std::uint32_t c : r.child[y])
        if (c != kNone) nx.parent[c] = y;
    require(rows < (1u << 21), "cycle engine: too many distinct rows");
    for (const Triple& tr : r.triples) {
      if (tr.l0 <= 0) continue;
      for (int bit = 0; bit < 2; ++bit) {
        std::uint32_t valid = bit ? tr.act : tr.valid & ~tr.act;
        if (!valid) continue;
        std::uint32_t y = r.child[tr.y][bit];
        for (std::uint32_t x : r.child[tr.x]) {
          if (x == kNone) continue;
          for (std::uint32_t z : r.child[tr.z]) {
            if (z == kNone) continue;
            nx.index.emplace(key(x, y, z), static_cast<std::uint32_t>(nx.triples.size()));
            nx.triples.push_back({x, y, z, valid});
          }
        }
      }
    }
    if (nx.triples.size() > opt.budget)
      throw BudgetExceeded("cycle engine: " + std::to_string(nx.triples.size()) +
                           " row triples exceed the budget of " + std::to_string(opt.budget));
  }

  std::vector<int> position_;  // ring position of each agent
  int horizon_ = 0;
  TieBreak tie_break_ = TieBreak::kZero;
  int levels_ = 1;
  int types_ = 0;
  std::array<std::vector<double>, 2> mass_;
  std::vector<Round> rounds_;
  std::vector<Level> layers_;
};

}  // namespace sociallearn

#endif  // SOCIALLEARN_CYCLE_ENGINE_HPP_
