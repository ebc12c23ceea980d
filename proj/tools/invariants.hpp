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

#ifndef SOCIALLEARN_TOOLS_INVARIANTS_HPP_
#define SOCIALLEARN_TOOLS_INVARIANTS_HPP_

// Property suites run by `sociallearn verify-invariants`, one per module
// scope. Each property sweeps randomized instances against an independent
// oracle and records the first counterexample.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sociallearn/sociallearn.hpp"

namespace sociallearn::cli {

struct PropertyResult {
  std::string scope;
  std::string name;
  bool passed = true;
  std::uint64_t cases = 0;
  std::string detail;  // first counterexample

  template <typename Describe>
  void check(bool ok, Describe&& describe) {
    ++cases;
    if (!ok && passed) {
      passed = false;
      detail = describe();
    }
  }
};

inline const std::vector<std::string>& invariant_scopes() {
  static const std::vector<std::string> scopes{"graph", "signal", "belief",
                                               "strategy", "dynamics", "stats"};
  return scopes;
}

// ---------------------------------------------------------------------------
// Random instances

struct SmallInstance {
  DirectedGraph graph;
  SignalModel model;
  StrategyProfile profile;
  int horizon = 1;
};

// A directed Hamiltonian cycle through a random permutation plus random
// extra edges; symmetric with probability 2/5.
inline DirectedGraph random_strong_digraph(Rng& rng, int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = n - 1; k > 0; --k) std::swap(perm[k], perm[rng.below(k + 1)]);
  const bool symmetric = rng.bernoulli(0.4);
  std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
  for (int k = 0; k < n && n > 1; ++k) {
    edge[perm[k]][perm[(k + 1) % n]] = true;
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && rng.bernoulli(0.25)) edge[a][b] = true;
  DirectedGraph g(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && (edge[a][b] || (symmetric && edge[b][a]))) g.add_edge(a, b);
  return g;
}

inline SignalModel random_model(Rng& rng, int atoms) {
  if (atoms == 2 && rng.bernoulli(0.3)) {
    static const double qs[] = {0.6, 0.7, 0.8};
    return symmetric_binary(qs[rng.below(3)], 1.0);
  }
  std::vector<double> p0(atoms), p1(atoms);
  double s0 = 0, s1 = 0;
  for (int k = 0; k < atoms; ++k) {
    p0[k] = 0.05 + rng.uniform();
    p1[k] = 0.05 + rng.uniform();
    s0 += p0[k];
    s1 += p1[k];
  }
  for (int k = 0; k < atoms; ++k) {
    p0[k] /= s0;
    p1[k] /= s1;
  }
  return SignalModel::from_masses(p0, p1, 1.0);
}

// Forces one agent on every history for rounds [0, last].
inline ForcedResponse random_overlay(Rng& rng, int agents, int horizon) {
  const AgentId a = static_cast<AgentId>(rng.below(agents));
  const int last = static_cast<int>(rng.below(horizon));
  std::vector<ForcedMove> moves;
  for (int t = 0; t <= last; ++t)
    moves.push_back({a, t, static_cast<Action>(rng.below(2)), std::nullopt});
  return ForcedResponse(moves);
}

// At most 6 agents, 2-3 atoms, horizon 1-4, and at most 4096 joint
// assignments so that enumeration oracles stay cheap.
inline SmallInstance random_instance(Rng& rng, int max_agents = 6, int max_horizon = 4) {
  for (;;) {
    const int n = 2 + static_cast<int>(rng.below(max_agents - 1));
    const int atoms = rng.bernoulli(0.75) ? 2 : 3;
    const TieBreak tb = static_cast<TieBreak>(rng.below(3));
    const int types = atoms * jitter_levels(tb);
    if (!assignment_count(types, n, 4096)) continue;
    DirectedGraph g = random_strong_digraph(rng, n);
    SignalModel m = random_model(rng, atoms);
    StrategyProfile p = myopic_profile(g, tb);
    const int horizon = 1 + static_cast<int>(rng.below(max_horizon));
    if (rng.bernoulli(0.3)) p = apply_forced(p, random_overlay(rng, n, horizon));
    return {std::move(g), std::move(m), std::move(p), horizon};
  }
}

namespace detail {

inline std::vector<int> draw_types(Rng& rng, const SignalModel& m, TieBreak tb, int agents, State s) {
  std::vector<int> types(agents);
  for (int& t : types) t = encode_type(m.sample(s, rng), m, tb);
  return types;
}

// Enumeration oracle: every joint assignment with its mass under each state
// and the action matrix the solved profile plays on it.
struct WorldTable {
  std::vector<std::vector<int>> types;
  std::vector<ActionMatrix> actions;
  std::vector<double> m0, m1;
};

inline WorldTable enumerate_worlds(const ExactSolution& sol) {
  WorldTable tab;
  const std::uint64_t count = *assignment_count(sol.types_per_agent(), sol.agents(), 1u << 20);
  for (std::uint64_t w = 0; w < count; ++w) {
    auto types = sol.decode(w);
    double a = 1, b = 1;
    for (int t : types) {
      a *= sol.type_mass(t, 0);
      b *= sol.type_mass(t, 1);
    }
    tab.actions.push_back(sol.play(types));
    tab.types.push_back(std::move(types));
    tab.m0.push_back(a);
    tab.m1.push_back(b);
  }
  return tab;
}

inline bool same_prefix(const DirectedGraph& g, AgentId i, const ActionMatrix& a,
                        const ActionMatrix& b, int t) {
  for (AgentId j : g.neighborhood(i))
    for (int r = 0; r < t; ++r)
      if (a.at(j, r) != b.at(j, r)) return false;
  return true;
}

inline HistoryView view_of(const ExactSolution& sol, AgentId i, int t, int type,
                           const ActionMatrix& actions) {
  return HistoryView(i, t, sol.type_atom(type), sol.graph().neighborhood(i), actions,
                     sol.type_jitter_high(type));
}

inline std::string describe_instance(const SmallInstance& inst) {
  return "n=" + std::to_string(inst.graph.size()) + " T=" + std::to_string(inst.horizon) +
         " tie=" + to_string(inst.profile.tie_break) + " model={" + inst.model.to_string() + "}";
}

// All permutations fixing the root: the brute-force isomorphism oracle.
inline bool brute_force_isomorphic(const RootedBall& a, const RootedBall& b) {
  if (a.size() != b.size()) return false;
  const int n = a.size();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (perm[0] != 0) break;
    bool ok = a.graph.edge_count() == b.graph.edge_count();
    for (int u = 0; u < n && ok; ++u)
      for (int v : a.graph.out_neighbors(u)) ok = ok && b.graph.has_edge(perm[u], perm[v]);
    if (ok) return true;
  } while (std::next_permutation(perm.begin() + 1, perm.end()));
  return false;
}

inline DirectedGraph relabeled(const DirectedGraph& g, const std::vector<int>& perm) {
  DirectedGraph h(g.size());
  for (auto [a, b] : g.edges()) h.add_edge(perm[a], perm[b]);
  return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// graph_core

inline std::vector<GraphFamilySpec> sample_family_specs() {
  using S = GraphFamilySpec;
  return {S::dicycle(5),  S::dicycle(8),  S::cycle(6),         S::cycle(9),
          S::chain(7),    S::dipath(1),   S::grid(3, 3),       S::grid(2, 4),
          S::random_regular(8, 3, 7),     S::random_regular(10, 4, 3),
          S::royal_family(2, 5),          S::royal_family(3, 10),
          S::mad_king(1, 2, 2),           S::dicycle(2),       S::cycle(3),
          S::chain(2),    S::grid(1, 5),  S::random_regular(6, 2, 11),
          S::cycle(12),   S::dicycle(12)};
}

inline std::vector<PropertyResult> graph_properties(std::uint64_t seed) {
  std::vector<PropertyResult> out;
  Rng rng(derive_seed(seed, 0, 1));

  std::vector<DirectedGraph> graphs;
  for (const auto& spec : sample_family_specs()) graphs.push_back(generate(spec));

  {
    PropertyResult r{"graph", "families are strongly connected"};
    for (const auto& spec : sample_family_specs())
      r.check(is_strongly_connected(generate(spec)), [&] { return spec.to_string(); });
    out.push_back(r);
  }
  {
    PropertyResult r{"graph", "rooted distance is a metric on 20 rooted graphs"};
    std::vector<std::pair<const DirectedGraph*, AgentId>> pts;
    for (const auto& g : graphs) pts.emplace_back(&g, static_cast<AgentId>(rng.below(g.size())));
    const int r_max = 14;
    const std::size_t n = pts.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        d[a][b] = rooted_distance(*pts[a].first, pts[a].second, *pts[b].first, pts[b].second, r_max).value;
    for (std::size_t a = 0; a < n; ++a) {
      r.check(d[a][a] == 0, [&] { return "d(x,x) != 0 for sample " + std::to_string(a); });
      for (std::size_t b = 0; b < n; ++b) {
        r.check(d[a][b] == d[b][a], [&] { return "asymmetric pair " + std::to_string(a) + "," + std::to_string(b); });
        if (d[a][b] == 0) {
          const int rad = std::max(pts[a].first->size(), pts[b].first->size());
          bool iso = balls_isomorphic(extract_ball(*pts[a].first, pts[a].second, rad),
                                      extract_ball(*pts[b].first, pts[b].second, rad)).has_value();
          r.check(iso, [&] { return "zero distance between non-isomorphic samples"; });
        }
        for (std::size_t c = 0; c < n; ++c)
          r.check(d[a][c] <= d[a][b] + d[b][c],
                  [&] { return "triangle inequality fails at " + std::to_string(a) + "," +
                               std::to_string(b) + "," + std::to_string(c); });
      }
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"graph", "min_l_connectivity is 1 exactly on symmetric graphs"};
    std::vector<DirectedGraph> pool = graphs;
    for (int k = 0; k < 40; ++k) pool.push_back(random_strong_digraph(rng, 2 + static_cast<int>(rng.below(7))));
    for (const auto& g : pool) {
      if (g.size() < 2) continue;
      r.check((min_l_connectivity(g) == 1) == g.is_symmetric(),
              [&] { return "graph of size " + std::to_string(g.size()); });
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"graph", "min_l_connectivity matches BFS over all pairs"};
    std::vector<DirectedGraph> pool = graphs;
    for (int k = 0; k < 40; ++k) pool.push_back(random_strong_digraph(rng, 2 + static_cast<int>(rng.below(7))));
    for (const auto& g : pool) {
      // Each edge i->j needs a return path j ~> i; take the longest BFS one.
      int worst = 1;
      for (AgentId i = 0; i < g.size(); ++i) {
        std::vector<int> back = distances_from(reversed(g), i);
        for (AgentId j : g.out_neighbors(i)) worst = std::max(worst, back[j]);
      }
      r.check(g.size() < 2 || min_l_connectivity(g) == worst,
              [&] { return "graph of size " + std::to_string(g.size()) + ": BFS gives " + std::to_string(worst); });
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"graph", "balls grow with r and cover the graph at the diameter"};
    for (const auto& g : graphs) {
      const int diam = diameter(g);
      for (AgentId i = 0; i < g.size(); ++i) {
        std::vector<AgentId> prev;
        for (int rad = 0; rad <= diam + 1; ++rad) {
          RootedBall b = extract_ball(g, i, rad);
          std::vector<AgentId> cur = b.original;
          std::sort(cur.begin(), cur.end());
          r.check(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()),
                  [&] { return "ball shrinks at r=" + std::to_string(rad); });
          prev = cur;
        }
        RootedBall full = extract_ball(g, i, diam);
        r.check(full.size() == g.size() && full.graph.edge_count() == g.edge_count(),
                [&] { return "ball at the diameter misses part of the graph"; });
      }
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"graph", "balls_isomorphic agrees with brute force on small balls"};
    for (int k = 0; k < 300; ++k) {
      const int n = 2 + static_cast<int>(rng.below(6));
      DirectedGraph a = random_strong_digraph(rng, n);
      DirectedGraph b;
      if (rng.bernoulli(0.5)) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (int q = n - 1; q > 0; --q) std::swap(perm[q], perm[rng.below(q + 1)]);
        b = detail::relabeled(a, perm);
      } else {
        b = random_strong_digraph(rng, n);
      }
      const int rad = static_cast<int>(rng.below(3)) + 1;
      RootedBall ba = extract_ball(a, static_cast<AgentId>(rng.below(n)), rad);
      RootedBall bb = extract_ball(b, static_cast<AgentId>(rng.below(n)), rad);
      if (ba.size() > 8 || bb.size() > 8) continue;
      auto fast = balls_isomorphic(ba, bb);
      bool slow = detail::brute_force_isomorphic(ba, bb);
      r.check(fast.has_value() == slow, [&] { return "disagreement on balls of size " + std::to_string(ba.size()); });
      if (fast) {
        bool witness = true;
        for (int u = 0; u < ba.size(); ++u)
          for (int v : ba.graph.out_neighbors(u)) witness = witness && bb.graph.has_edge((*fast)[u], (*fast)[v]);
        r.check(witness && (*fast)[0] == 0, [&] { return std::string("returned map is not an isomorphism"); });
      }
    }
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// signal_model

inline std::vector<PropertyResult> signal_properties(std::uint64_t seed) {
  std::vector<PropertyResult> out;
  Rng rng(derive_seed(seed, 0, 2));
  std::vector<SignalModel> models{symmetric_binary(0.6), royal_bounded(), mad_king_asym(0.0),
                                  mad_king_asym(0.2)};
  for (int k = 0; k < 200; ++k) models.push_back(random_model(rng, 2 + static_cast<int>(rng.below(4))));

  PropertyResult z{"signal", "atom log-likelihood ratios"};
  PropertyResult prior{"signal", "prior consistency of atom marginals"};
  PropertyResult pstar{"signal", "p* equals single-signal MAP accuracy"};
  for (const auto& m : models) {
    double total = 0, map = 0;
    for (int k = 0; k < m.size(); ++k) {
      const Atom& a = m.atom(k);
      z.check(std::abs(a.z - std::log(a.p1 / a.p0)) <= 1e-12, [&] { return m.to_string(); });
      prior.check(std::abs(m.marginal(k) - (0.5 * a.p0 + 0.5 * a.p1)) <= 1e-15, [&] { return m.to_string(); });
      total += m.marginal(k);
      // Exhaustive MAP: for each atom guess the likelier state.
      map += 0.5 * std::max(a.p0, a.p1);
    }
    prior.check(std::abs(total - 1) <= 1e-12, [&] { return m.to_string(); });
    pstar.check(std::abs(m.p_star() - map) <= 1e-12, [&] { return m.to_string(); });
  }
  out.push_back(z);
  out.push_back(prior);
  out.push_back(pstar);

  PropertyResult jit{"signal", "posteriors and actions do not depend on the jitter width"};
  for (int rep = 0; rep < 3; ++rep) {
    const DirectedGraph g = generate(GraphFamilySpec::cycle(5 + rep));
    const TieBreak tb = rep == 0 ? TieBreak::kZero : TieBreak::kJitter;
    const SignalModel narrow = symmetric_binary(0.6, 1.0);
    const SignalModel wide = symmetric_binary(0.6, 3.5);
    auto p1 = ExactSolution::solve(g, narrow, myopic_profile(g, tb), 8);
    auto p2 = ExactSolution::solve(g, wide, myopic_profile(g, tb), 8);
    SimConfig cfg;
    cfg.horizon = 8;
    cfg.seed = seed + rep;
    for (std::uint64_t k = 0; k < 200; ++k) {
      Trace a = run_trace(p1, narrow, cfg, k);
      Trace b = run_trace(p2, wide, cfg, k);
      jit.check(a.actions == b.actions && a.ties == b.ties && *p1.posteriors(a.types) == *p2.posteriors(b.types),
                [&] { return "cycle(" + std::to_string(5 + rep) + ") replicate " + std::to_string(k); });
    }
  }
  out.push_back(jit);
  return out;
}

// ---------------------------------------------------------------------------
// belief_engine

inline std::vector<PropertyResult> belief_properties(std::uint64_t seed, int instances = 150) {
  std::vector<PropertyResult> out;
  Rng rng(derive_seed(seed, 0, 3));
  PropertyResult bayes{"belief", "posterior equals the enumeration oracle"};
  PropertyResult mart{"belief", "posterior is a martingale"};
  PropertyResult zy{"belief", "log-odds decompose into own signal plus neighbors' history"};
  PropertyResult bound{"belief", "log-odds bounded by signals in the ball"};
  PropertyResult mc{"belief", "likelihood weighting agrees with the exact posterior"};
  PropertyResult local{"belief", "posteriors depend only on the ball"};
  std::uint64_t mc_outliers = 0, mc_cases = 0;

  for (int k = 0; k < instances; ++k) {
    SmallInstance inst = random_instance(rng);
    const auto& g = inst.graph;
    const int n = g.size();
    const int T = inst.horizon;
    auto sol = ExactSolution::solve(g, inst.model, inst.profile, T);
    detail::WorldTable worlds = detail::enumerate_worlds(sol);
    auto what = [&] { return detail::describe_instance(inst); };

    // A realized trace and one agent's views along it.
    const State s = rng.bernoulli(0.5) ? 1 : 0;
    std::vector<int> types = detail::draw_types(rng, inst.model, inst.profile.tie_break, n, s);
    ActionMatrix actions = sol.play(types);
    const AgentId i = static_cast<AgentId>(rng.below(n));
    const double zmax = inst.model.max_abs_z();

    for (int t = 0; t < T; ++t) {
      HistoryView view = detail::view_of(sol, i, t, types[i], actions);
      const BeliefState b = sol.posterior(view);

      double c0 = 0, c1 = 0;
      std::map<std::vector<Action>, std::pair<double, std::size_t>> next;
      for (std::size_t w = 0; w < worlds.types.size(); ++w) {
        if (worlds.types[w][i] != types[i] || !detail::same_prefix(g, i, worlds.actions[w], actions, t)) continue;
        c0 += worlds.m0[w];
        c1 += worlds.m1[w];
        if (t + 1 < T) {
          std::vector<Action> col;
          for (AgentId j : g.neighborhood(i)) col.push_back(worlds.actions[w].at(j, t));
          auto& e = next[col];
          e.first += 0.5 * worlds.m0[w] + 0.5 * worlds.m1[w];
          e.second = w;
        }
      }
      bayes.check(std::abs(b.posterior - c1 / (c0 + c1)) <= 1e-9, what);

      if (t + 1 < T) {
        double expect = 0;
        for (const auto& [col, e] : next) {
          HistoryView v1 = detail::view_of(sol, i, t + 1, types[i], worlds.actions[e.second]);
          expect += e.first / (0.5 * c0 + 0.5 * c1) * sol.posterior(v1).posterior;
        }
        mart.check(std::abs(expect - b.posterior) <= 1e-9, what);
      }

      zy.check(std::abs(sol.y_decomposition(view).residual()) <= 1e-9, what);
      bound.check(std::abs(b.log_odds) <= extract_ball(g, i, t).size() * zmax + 1e-9, what);

      if (k % 3 == 0) {
        Rng mrng(derive_seed(seed, k, 30 + t));
        try {
          McEstimate est = mc_posterior(sol, inst.model, view, 4000, mrng);
          if (!est.high_variance) {
            ++mc_cases;
            if (std::abs(est.belief.posterior - b.posterior) > 4 * est.standard_error + 1e-9) ++mc_outliers;
          }
        } catch (const DegenerateEstimate&) {
        }
      }

      // Signals and strategies outside B_t(i) are redrawn.
      RootedBall ball = extract_ball(g, i, t);
      std::vector<bool> inside(n, false);
      for (AgentId v : ball.original) inside[v] = true;
      std::vector<int> mutated = types;
      std::vector<AgentId> outside;
      for (AgentId v = 0; v < n; ++v)
        if (!inside[v]) {
          mutated[v] = static_cast<int>(rng.below(sol.types_per_agent()));
          outside.push_back(v);
        }
      local.check((*sol.posteriors(mutated))[static_cast<std::size_t>(i) * T + t] ==
                      (*sol.posteriors(types))[static_cast<std::size_t>(i) * T + t],
                  what);
      if (!outside.empty() && !inst.profile.overlaid) {
        const AgentId v = outside[rng.below(outside.size())];
        std::vector<ForcedMove> moves;
        for (int r = 0; r < T; ++r) moves.push_back({v, r, static_cast<Action>(rng.below(2)), std::nullopt});
        auto other = ExactSolution::solve(g, inst.model, apply_forced(inst.profile, ForcedResponse(moves)), T);
        const double a = (*sol.posteriors(types))[static_cast<std::size_t>(i) * T + t];
        const double c = (*other.posteriors(types))[static_cast<std::size_t>(i) * T + t];
        local.check(std::abs(a - c) <= 1e-12, what);
      }
    }
  }
  mc.check(mc_cases > 0 && mc_outliers * 100 <= mc_cases,
           [&] { return std::to_string(mc_outliers) + " of " + std::to_string(mc_cases) + " estimates beyond 4 SE"; });
  mc.cases = mc_cases;
  out.insert(out.end(), {bayes, mart, zy, bound, mc, local});
  return out;
}

// ---------------------------------------------------------------------------
// strategy_engine

inline std::vector<PropertyResult> strategy_properties(std::uint64_t seed) {
  std::vector<PropertyResult> out;
  Rng rng(derive_seed(seed, 0, 4));

  {
    PropertyResult r{"strategy", "forced overlay matches the base rule off its domain"};
    std::uint64_t off_domain = 0;
    for (int k = 0; k < 60; ++k) {
      SmallInstance inst = random_instance(rng, 5, 3);
      if (inst.profile.overlaid || inst.horizon < 2) continue;
      const auto& g = inst.graph;
      const int T = inst.horizon;
      const AgentId a = static_cast<AgentId>(rng.below(g.size()));
      const int width = static_cast<int>(g.neighborhood(a).size());
      const std::vector<std::uint64_t> h1{rng.below(std::uint64_t{1} << width)};
      std::vector<ForcedMove> moves{{a, 0, static_cast<Action>(rng.below(2)), std::vector<std::uint64_t>{}},
                                    {a, 1, static_cast<Action>(rng.below(2)), h1}};
      ForcedResponse forced(moves);
      const StrategyProfile overlaid = apply_forced(inst.profile, forced);
      auto over = ExactSolution::solve(g, inst.model, overlaid, T);
      const std::uint64_t count = *assignment_count(over.types_per_agent(), g.size(), 1u << 20);
      for (std::uint64_t w = 0; w < count; ++w) {
        auto types = over.decode(w);
        ActionMatrix act = over.play(types);
        const std::vector<double> post = *over.posteriors(types);
        for (AgentId j = 0; j < g.size(); ++j) {
          std::vector<BeliefState> beliefs;
          for (int t = 0; t < T; ++t) {
            beliefs.push_back(BeliefState::from_posterior(post[static_cast<std::size_t>(j) * T + t], t));
            HistoryView v(j, t, over.type_atom(types[j]), g.neighborhood(j), act, over.type_jitter_high(types[j]));
            Observation o{j, t, v.atom(), v.jitter_high(), v, std::span<const BeliefState>(beliefs)};
            const Action played = act.at(j, t);
            if (auto f = j == a ? forced.lookup(j, t, v) : std::nullopt) {
              r.check(played == *f, [&] { return "forced action not played: " + detail::describe_instance(inst); });
              continue;
            }
            ++off_domain;
            r.check(overlaid.rules[j].respond(o).action == inst.profile.rules[j].respond(o).action,
                    [&] { return "decision differs off the domain: " + detail::describe_instance(inst); });
          }
        }
      }
    }
    r.check(off_domain > 0, [] { return std::string("no off-domain decisions were generated"); });
    out.push_back(r);
  }
  {
    PropertyResult r{"strategy", "mad_king rage rule never fires without a deviating person"};
    const DirectedGraph g = generate(GraphFamilySpec::mad_king(2, 30, 8));
    const SignalModel m = mad_king_asym(0.0);
    const MadKingRoles roles = mad_king_roles(g);
    const StrategyProfile p = mad_king_profile(g, roles, {0.01, 0.99});
    const int T = 10;
    auto sol = MadKingSolution::solve(g, m, p, T);
    SimConfig cfg;
    cfg.horizon = T;
    cfg.seed = seed;
    for (std::uint64_t k = 0; k < 300; ++k) {
      Trace tr = run_trace(sol, m, cfg, k);
      auto beliefs = sol.beliefs(tr.types);
      bool people_quiet = true;
      for (int q = 0; q < roles.layout.people; ++q)
        for (int t = 0; t < 2; ++t) people_quiet = people_quiet && tr.actions.at(roles.layout.person(q), t) == 0;
      r.check(people_quiet, [&] { return "a person moved at round 0 or 1 in replicate " + std::to_string(k); });
      for (int t = 0; t < T; ++t) {
        // The non-rage branch: myopic through round 1, then the regent's
        // steady action while it lasts.
        Action expected = best_response(beliefs[t], p.tie_break).action;
        if (t >= 2) {
          bool steady = true;
          for (int q = 2; q < t; ++q) steady = steady && tr.actions.at(1, q) == tr.actions.at(1, 1);
          if (steady) expected = tr.actions.at(1, 1);
        }
        r.check(tr.actions.at(0, t) == expected,
                [&] { return "king departs from the unprovoked rule at t=" + std::to_string(t); });
      }
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"strategy", "royal family plays 1 everywhere from round 1 on event J"};
    const DirectedGraph g = generate(GraphFamilySpec::royal_family(5, 9));
    const SignalModel m = symmetric_binary(0.6);
    const StrategyProfile p = royal_family_profile(g);
    SimConfig cfg;
    cfg.horizon = 12;
    cfg.seed = seed;
    auto pol = make_policy(g, m, p, cfg);
    SignalInjection j;
    j.state = 0;
    int plus = 0;
    for (int k = 1; k < m.size(); ++k)
      if (m.atom(k).z > m.atom(plus).z) plus = k;
    for (int k = 0; k < 5; ++k) j.atoms.emplace_back(k, plus);
    for (std::uint64_t k = 0; k < 100; ++k) {
      Trace tr = run_trace(*pol, m, cfg, k, &j);
      bool ones = true;
      for (AgentId v = 0; v < g.size(); ++v)
        for (int t = 1; t < cfg.horizon; ++t) ones = ones && tr.actions.at(v, t) == 1;
      r.check(ones, [&] { return "replicate " + std::to_string(k); });
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"strategy", "sufficient conditions are nested for nondecreasing Y"};
    for (int k = 0; k < 10000; ++k) {
      std::array<double, 4> y;
      for (double& v : y) v = 0.5 * rng.uniform();
      std::sort(y.begin(), y.end());
      const double lambda = 0.01 + 0.98 * rng.uniform();
      MyopicConditions c = myopic_condition_check(y, lambda);
      const bool nested = (!c.b1 || c.b2) && (!c.b2 || c.b3) && (!c.b3 || c.b4);
      r.check(nested && c.nested, [&] { return "lambda=" + std::to_string(lambda); });
    }
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// dynamics_sim

inline bool same_report(const EnsembleReport& a, const EnsembleReport& b) {
  return a.learned == b.learned && a.all_learned == b.all_learned && a.agreed == b.agreed &&
         a.utility == b.utility && a.mean_learning == b.mean_learning &&
         a.mean_learning_se == b.mean_learning_se && a.tie_events == b.tie_events &&
         a.state_one == b.state_one;
}

// Two rooted graphs whose radius-(r+1) balls match.
struct MatchedPair {
  DirectedGraph g1, g2;
  AgentId i1 = 0, i2 = 0;
  int r = 0;
};

inline MatchedPair random_matched_pair(Rng& rng) {
  using S = GraphFamilySpec;
  MatchedPair p;
  p.r = static_cast<int>(rng.below(3));
  const int rho = p.r + 1;
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.below(hi - lo + 1)); };
  switch (rng.below(4)) {
    case 0:  // undirected cycles, balls are paths
      p.g1 = generate(S::cycle(pick(2 * rho + 2, 11)));
      p.g2 = generate(S::cycle(pick(2 * rho + 2, 11)));
      p.i1 = static_cast<AgentId>(rng.below(p.g1.size()));
      p.i2 = static_cast<AgentId>(rng.below(p.g2.size()));
      break;
    case 1: {  // chain interior against a cycle
      const int n = pick(2 * rho + 1, 11);
      p.g1 = generate(S::chain(n));
      p.i1 = pick(rho, n - 1 - rho);
      p.g2 = generate(S::cycle(pick(2 * rho + 2, 11)));
      p.i2 = static_cast<AgentId>(rng.below(p.g2.size()));
      break;
    }
    case 2:  // directed cycles
      p.g1 = generate(S::dicycle(pick(rho + 2, 11)));
      p.g2 = generate(S::dicycle(pick(rho + 2, 11)));
      p.i1 = static_cast<AgentId>(rng.below(p.g1.size()));
      p.i2 = static_cast<AgentId>(rng.below(p.g2.size()));
      break;
    default: {  // one-way path against a directed cycle
      const int n = pick(rho + 1, 11);
      p.g1 = generate(S::dipath(n));
      p.i1 = pick(0, n - 1 - rho);
      p.g2 = generate(S::dicycle(pick(rho + 2, 11)));
      p.i2 = static_cast<AgentId>(rng.below(p.g2.size()));
      break;
    }
  }
  return p;
}

inline std::vector<PropertyResult> dynamics_properties(std::uint64_t seed, int coupling_pairs = 100) {
  std::vector<PropertyResult> out;
  const DirectedGraph g = generate(GraphFamilySpec::cycle(8));
  const SignalModel m = symmetric_binary(0.6);
  SimConfig cfg;
  cfg.horizon = 12;
  cfg.replicates = 1500;
  cfg.seed = seed;
  cfg.workers = 1;
  auto pol = make_policy(g, m, myopic_profile(g), cfg);
  EnsembleReport one = run_ensemble(*pol, m, cfg);
  cfg.workers = 3;
  EnsembleReport three = run_ensemble(*pol, m, cfg);
  EnsembleReport again = run_ensemble(*pol, m, cfg);

  PropertyResult det{"dynamics", "ensembles are determined by the seed"};
  det.check(same_report(one, three), [] { return std::string("1 vs 3 workers differ"); });
  det.check(same_report(three, again), [] { return std::string("repeat run differs"); });
  for (std::uint64_t k = 0; k < 50; ++k) {
    Trace a = run_trace(*pol, m, cfg, k);
    Trace b = run_trace(*pol, m, cfg, k);
    det.check(a.actions == b.actions && a.types == b.types && a.state == b.state,
              [&] { return "trace " + std::to_string(k); });
  }
  out.push_back(det);

  PropertyResult order{"dynamics", "all-agents learning never exceeds any agent's learning"};
  for (AgentId i = 0; i < one.agents; ++i)
    order.check(one.all_learned <= one.learned[i], [&] { return "agent " + std::to_string(i); });
  order.check(one.mean_learning + 1e-12 >= one.all_learning, [] { return std::string("mean below all-agents"); });
  out.push_back(order);

  PropertyResult honest{"dynamics", "reports carry the utility remainder and tail window"};
  honest.check(one.utility_remainder == std::pow(cfg.discount, cfg.horizon) &&
                   one.tail_window == cfg.tail_window && one.horizon == cfg.horizon,
               [] { return std::string("report misses truncation fields"); });
  out.push_back(honest);

  PropertyResult coup{"dynamics", "locality coupling on matched balls"};
  Rng rng(derive_seed(seed, 0, 5));
  for (int k = 0; k < coupling_pairs; ++k) {
    MatchedPair pr = random_matched_pair(rng);
    const TieBreak tb = rng.bernoulli(0.5) ? TieBreak::kZero : TieBreak::kOne;
    const SignalModel mm = rng.bernoulli(0.5) ? symmetric_binary(0.6) : royal_bounded();
    auto p1 = ExactSolution::solve(pr.g1, mm, myopic_profile(pr.g1, tb), pr.r + 1);
    auto p2 = ExactSolution::solve(pr.g2, mm, myopic_profile(pr.g2, tb), pr.r + 1);
    CouplingResult c = locality_coupling_test(pr.g1, pr.i1, p1, pr.g2, pr.i2, p2, mm, pr.r,
                                              derive_seed(seed, k, 6));
    coup.check(c.passed, [&] { return "pair " + std::to_string(k) + " mismatch at t=" +
                                      std::to_string(c.first_mismatch.value_or(-1)); });
  }
  out.push_back(coup);
  return out;
}

// ---------------------------------------------------------------------------
// analysis_stats

inline std::vector<PropertyResult> stats_properties(std::uint64_t seed) {
  std::vector<PropertyResult> out;
  Rng rng(derive_seed(seed, 0, 7));

  {
    PropertyResult r{"stats", "dependence is invariant under relabeling and column flips"};
    for (int rep = 0; rep < 20; ++rep) {
      const int k = 2 + static_cast<int>(rng.below(4));
      const std::size_t N = 3000;
      std::vector<Action> outcomes;
      std::vector<State> states;
      const double couple = rng.uniform();
      for (std::size_t s = 0; s < N; ++s) {
        const State st = rng.bernoulli(0.5) ? 1 : 0;
        states.push_back(st);
        const Action shared = static_cast<Action>(rng.bernoulli(st ? 0.7 : 0.3));
        for (int j = 0; j < k; ++j)
          outcomes.push_back(rng.bernoulli(couple) ? shared : static_cast<Action>(rng.bernoulli(0.5)));
      }
      const double base = dep_s_estimate(EstimatorSample(k, outcomes, states)).dep_s;
      std::vector<int> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      for (int q = k - 1; q > 0; --q) std::swap(perm[q], perm[rng.below(q + 1)]);
      const int flip = static_cast<int>(rng.below(k));
      std::vector<Action> permuted(outcomes.size()), flipped(outcomes);
      for (std::size_t s = 0; s < N; ++s) {
        for (int j = 0; j < k; ++j) permuted[s * k + perm[j]] = outcomes[s * k + j];
        flipped[s * k + flip] ^= 1;
      }
      const double dp = dep_s_estimate(EstimatorSample(k, permuted, states)).dep_s;
      const double df = dep_s_estimate(EstimatorSample(k, flipped, states)).dep_s;
      r.check(std::abs(dp - base) <= 1e-12 && std::abs(df - base) <= 1e-12,
              [&] { return "k=" + std::to_string(k) + " base=" + std::to_string(base); });
    }
    out.push_back(r);
  }
  {
    PropertyResult r{"stats", "majority of independent estimators beats the Hoeffding bound"};
    int wins = 0;
    const int seeds = 20;
    for (int rep = 0; rep < seeds; ++rep) {
      Rng local(derive_seed(seed, rep, 8));
      const int k = 25;
      const double eps = 0.25;
      const std::size_t N = 20000;
      std::vector<Action> outcomes;
      std::vector<State> states;
      for (std::size_t s = 0; s < N; ++s) {
        const State st = local.bernoulli(0.5) ? 1 : 0;
        states.push_back(st);
        for (int j = 0; j < k; ++j)
          outcomes.push_back(static_cast<Action>(local.bernoulli(0.5 + eps) ? st : 1 - st));
      }
      MajorityReport rep_m = majority_aggregate(EstimatorSample(k, outcomes, states), eps);
      wins += rep_m.accuracy >= rep_m.bound - 0.01;
    }
    r.check(wins * 100 >= 95 * seeds, [&] { return std::to_string(wins) + " of " + std::to_string(seeds) + " seeds"; });
    out.push_back(r);
  }
  {
    PropertyResult r{"stats", "royal floor matches the simulated frequency of J with S=0"};
    for (int royals : {1, 3, 5}) {
      for (const SignalModel& m : {royal_bounded(), symmetric_binary(0.6)}) {
        const std::uint64_t N = 200000;
        std::uint64_t hits = 0;
        Rng local(derive_seed(seed, royals, 9));
        for (std::uint64_t s = 0; s < N; ++s) {
          const State st = local.bernoulli(0.5) ? 1 : 0;
          bool all_plus = true;
          for (int q = 0; q < royals; ++q) all_plus = m.atom(m.sample(st, local).atom).z > 0 && all_plus;
          hits += st == 0 && all_plus;
        }
        const double est = static_cast<double>(hits) / N;
        const double se = proportion_se(hits, N);
        r.check(std::abs(est - royal_floor(m, royals)) <= 3 * se,
                [&] { return "R=" + std::to_string(royals) + " estimate " + std::to_string(est); });
      }
    }
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

inline std::vector<PropertyResult> run_invariants(const std::string& scope, std::uint64_t seed) {
  using Suite = std::function<std::vector<PropertyResult>(std::uint64_t)>;
  const std::vector<std::pair<std::string, Suite>> suites{
      {"graph", [](std::uint64_t s) { return graph_properties(s); }},
      {"signal", [](std::uint64_t s) { return signal_properties(s); }},
      {"belief", [](std::uint64_t s) { return belief_properties(s); }},
      {"strategy", [](std::uint64_t s) { return strategy_properties(s); }},
      {"dynamics", [](std::uint64_t s) { return dynamics_properties(s); }},
      {"stats", [](std::uint64_t s) { return stats_properties(s); }},
  };
  if (scope != "all" && std::none_of(suites.begin(), suites.end(), [&](const auto& e) { return e.first == scope; }))
    throw InvalidInput("unknown invariant scope '" + scope +
                       "' (all | graph | signal | belief | strategy | dynamics | stats)");
  std::vector<PropertyResult> out;
  for (const auto& [name, suite] : suites) {
    if (scope != "all" && scope != name) continue;
    auto part = suite(seed);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace sociallearn::cli

#endif  // SOCIALLEARN_TOOLS_INVARIANTS_HPP_
