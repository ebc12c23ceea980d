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

#ifndef SOCIALLEARN_TESTS_ORACLES_HPP_
#define SOCIALLEARN_TESTS_ORACLES_HPP_

// Independent reference implementations used as test oracles. They favour
// obviousness over speed and share no code with the library engines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <vector>

#include "sociallearn/sociallearn.hpp"

namespace sociallearn::oracle {

// Shortest directed path lengths from `from`; -1 when unreachable.
inline std::vector<int> bfs(const DirectedGraph& g, AgentId from) {
  std::vector<int> dist(g.size(), -1);
  std::deque<AgentId> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    AgentId v = queue.front();
    queue.pop_front();
    for (AgentId w = 0; w < g.size(); ++w)
      if (g.has_edge(v, w) && dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

inline bool strongly_connected(const DirectedGraph& g) {
  for (AgentId v = 0; v < g.size(); ++v) {
    auto d = bfs(g, v);
    if (std::count(d.begin(), d.end(), -1) > 0) return false;
  }
  return true;
}

// Longest shortest return path over all edges.
inline int return_path_bound(const DirectedGraph& g) {
  int worst = 0;
  for (AgentId i = 0; i < g.size(); ++i)
    for (AgentId j = 0; j < g.size(); ++j)
      if (g.has_edge(i, j)) worst = std::max(worst, bfs(g, j)[i]);
  return worst;
}

// Root-fixing permutation search over two rooted graphs given as ball
// member lists of their source graphs.
inline bool rooted_isomorphic(const DirectedGraph& ga, std::vector<AgentId> va,
                              const DirectedGraph& gb, std::vector<AgentId> vb) {
  if (va.size() != vb.size()) return false;
  std::sort(va.begin() + 1, va.end());
  std::sort(vb.begin() + 1, vb.end());
  do {
    bool ok = true;
    for (std::size_t x = 0; x < va.size() && ok; ++x)
      for (std::size_t y = 0; y < va.size() && ok; ++y)
        ok = ga.has_edge(va[x], va[y]) == gb.has_edge(vb[x], vb[y]);
    if (ok) return true;
  } while (std::next_permutation(vb.begin() + 1, vb.end()));
  return false;
}

inline std::vector<AgentId> ball_members(const DirectedGraph& g, AgentId root, int r) {
  auto d = bfs(g, root);
  std::vector<AgentId> out{root};
  for (AgentId v = 0; v < g.size(); ++v)
    if (v != root && d[v] >= 0 && d[v] <= r) out.push_back(v);
  return out;
}

// Brute-force myopic dynamics: every joint atom assignment is simulated and
// each agent's posterior is read off by grouping assignments on what the
// agent has seen. Ties go to `tie_action`.
struct MyopicTables {
  int n = 0, T = 0, atoms = 0;
  std::vector<std::vector<int>> types;      // per world
  std::vector<double> m0, m1;               // per world
  std::vector<std::vector<Action>> act;     // per world, agent-major n x T
  std::vector<std::vector<double>> post;    // per world, agent-major n x T
  std::vector<std::vector<bool>> tie;       // per world, agent-major n x T

  std::size_t world_of(const std::vector<int>& t) const {
    std::size_t w = 0;
    for (int i = n - 1; i >= 0; --i) w = w * atoms + t[i];
    return w;
  }
};

inline MyopicTables brute_myopic(const DirectedGraph& g, const SignalModel& m, int T,
                                 Action tie_action = 0) {
  MyopicTables tab;
  tab.n = g.size();
  tab.T = T;
  tab.atoms = m.size();
  std::size_t W = 1;
  for (int i = 0; i < tab.n; ++i) W *= m.size();
  for (std::size_t w = 0; w < W; ++w) {
    std::vector<int> t(tab.n);
    std::size_t rest = w;
    double a = 1, b = 1;
    for (int i = 0; i < tab.n; ++i) {
      t[i] = static_cast<int>(rest % m.size());
      rest /= m.size();
      a *= m.atom(t[i]).p0;
      b *= m.atom(t[i]).p1;
    }
    tab.types.push_back(t);
    tab.m0.push_back(a);
    tab.m1.push_back(b);
  }
  tab.act.assign(W, std::vector<Action>(tab.n * T, 0));
  tab.post.assign(W, std::vector<double>(tab.n * T, 0));
  tab.tie.assign(W, std::vector<bool>(tab.n * T, false));
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < tab.n; ++i) {
      std::map<std::vector<int>, std::pair<double, double>> mass;
      auto key = [&](std::size_t w) {
        std::vector<int> k{tab.types[w][i]};
        for (AgentId j : g.neighborhood(i))
          for (int r = 0; r < t; ++r) k.push_back(tab.act[w][j * T + r]);
        return k;
      };
      for (std::size_t w = 0; w < W; ++w) {
        auto& e = mass[key(w)];
        e.first += tab.m0[w];
        e.second += tab.m1[w];
      }
      for (std::size_t w = 0; w < W; ++w) {
        const auto& e = mass[key(w)];
        const double p = e.second / (e.first + e.second);
        const double z = std::log(e.second) - std::log(e.first);
        tab.post[w][i * T + t] = p;
        const bool tie = std::abs(z) <= 1e-9;
        tab.tie[w][i * T + t] = tie;
        tab.act[w][i * T + t] = tie ? tie_action : static_cast<Action>(z > 0);
      }
    }
  }
  return tab;
}

// Largest |difference| between two vectors.
inline double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0;
  for (std::size_t k = 0; k < a.size(); ++k) g = std::max(g, std::abs(a[k] - b[k]));
  return g;
}

}  // namespace sociallearn::oracle

#endif  // SOCIALLEARN_TESTS_ORACLES_HPP_
