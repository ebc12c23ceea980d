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

#ifndef SOCIALLEARN_GRAPH_HPP_
#define SOCIALLEARN_GRAPH_HPP_

// Directed social networks: representation, family generators, topology
// checks, rooted balls, rooted isomorphism and the rooted-graph metric.
//
// Every query treats the neighborhood of i as its out-neighbors plus i
// itself: an agent always observes its own past actions.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sociallearn/errors.hpp"
#include "sociallearn/rng.hpp"

namespace sociallearn {

using AgentId = int;

inline constexpr int kUnreachable = -1;

struct GraphFamilySpec {
  enum class Family {
    kChain,          // undirected path
    kDipath,         // one-way path 0 -> 1 -> ... -> n-1
    kCycle,          // undirected cycle
    kDicycle,        // directed cycle i -> i+1 mod n
    kGrid,           // undirected a x b lattice
    kRandomRegular,  // undirected d-regular, connected
    kRoyalFamily,    // R-clique plus observing public chain
    kMadKing,        // king, regent, court, bureaucracy, people
  };

  Family family = Family::kCycle;
  std::vector<int> params;
  std::uint64_t seed = 0;

  static GraphFamilySpec chain(int n) { return {Family::kChain, {n}, 0}; }
  static GraphFamilySpec dipath(int n) { return {Family::kDipath, {n}, 0}; }
  static GraphFamilySpec cycle(int n) { return {Family::kCycle, {n}, 0}; }
  static GraphFamilySpec dicycle(int n) { return {Family::kDicycle, {n}, 0}; }
  static GraphFamilySpec grid(int a, int b) { return {Family::kGrid, {a, b}, 0}; }
  static GraphFamilySpec random_regular(int n, int d, std::uint64_t seed) {
    return {Family::kRandomRegular, {n, d}, seed};
  }
  static GraphFamilySpec royal_family(int royals, int n) {
    return {Family::kRoyalFamily, {royals, n}, 0};
  }
  static GraphFamilySpec mad_king(int court, int bureaucracy, int people) {
    return {Family::kMadKing, {court, bureaucracy, people}, 0};
  }

  // Textual form used by configs and the CLI, e.g. "royal_family(5,100)" or
  // "random_regular(20,3,seed=7)".
  std::string to_string() const;
  static GraphFamilySpec parse(const std::string& text);

  friend bool operator==(const GraphFamilySpec&, const GraphFamilySpec&) = default;
};

class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(int n) : out_(checked_size(n)), nbhd_(out_.size()) {
    for (int i = 0; i < n; ++i) nbhd_[i] = {i};
  }

  int size() const { return static_cast<int>(out_.size()); }

  void add_edge(AgentId from, AgentId to) {
    check_vertex(from);
    check_vertex(to);
    require(from != to, "self-loop " + std::to_string(from) + " is not allowed");
    auto& list = out_[from];
    auto pos = std::lower_bound(list.begin(), list.end(), to);
    require(pos == list.end() || *pos != to,
            "duplicate edge " + std::to_string(from) + "->" + std::to_string(to));
    list.insert(pos, to);
    auto& nb = nbhd_[from];
    nb.insert(std::lower_bound(nb.begin(), nb.end(), to), to);
    ++edge_count_;
  }
  void add_undirected_edge(AgentId a, AgentId b) {
    add_edge(a, b);
    add_edge(b, a);
  }

  bool has_edge(AgentId from, AgentId to) const {
    check_vertex(from);
    check_vertex(to);
    return std::binary_search(out_[from].begin(), out_[from].end(), to);
  }

  const std::vector<AgentId>& out_neighbors(AgentId i) const {
    check_vertex(i);
    return out_[i];
  }
  // Sorted, self-inclusive neighborhood. This is also the canonical row order
  // of every history view.
  const std::vector<AgentId>& neighborhood(AgentId i) const {
    check_vertex(i);
    return nbhd_[i];
  }

  std::size_t edge_count() const { return edge_count_; }
  std::vector<std::pair<AgentId, AgentId>> edges() const {
    std::vector<std::pair<AgentId, AgentId>> result;
    result.reserve(edge_count_);
    for (int i = 0; i < size(); ++i)
      for (AgentId j : out_[i]) result.emplace_back(i, j);
    return result;
  }

  bool is_symmetric() const {
    for (int i = 0; i < size(); ++i)
      for (AgentId j : out_[i])
        if (!has_edge(j, i)) return false;
    return true;
  }

  // The family this graph was generated from, when there is one.
  std::optional<GraphFamilySpec> family;

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.out_ == b.out_;
  }

 private:
  static std::size_t checked_size(int n) {
    require(n >= 1, "graph needs at least one vertex");
    return static_cast<std::size_t>(n);
  }
  void check_vertex(AgentId i) const {
    if (i < 0 || i >= size())
      throw InvalidInput("vertex " + std::to_string(i) + " out of range [0," +
                         std::to_string(size()) + ")");
  }

  std::vector<std::vector<AgentId>> out_;
  std::vector<std::vector<AgentId>> nbhd_;
  std::size_t edge_count_ = 0;
};

inline DirectedGraph reversed(const DirectedGraph& g) {
  DirectedGraph r(g.size());
  for (auto [i, j] : g.edges()) r.add_edge(j, i);
  return r;
}

// Directed BFS distances from root; kUnreachable where there is no path.
inline std::vector<int> distances_from(const DirectedGraph& g, AgentId root) {
  require(root >= 0 && root < g.size(), "invalid root " + std::to_string(root));
  std::vector<int> dist(g.size(), kUnreachable);
  dist[root] = 0;
  std::deque<AgentId> queue{root};
  while (!queue.empty()) {
    AgentId v = queue.front();
    queue.pop_front();
    for (AgentId w : g.out_neighbors(v)) {
      if (dist[w] != kUnreachable) continue;
      dist[w] = dist[v] + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

inline bool is_strongly_connected(const DirectedGraph& g) {
  auto all_reached = [](const std::vector<int>& d) {
    return std::none_of(d.begin(), d.end(), [](int x) { return x == kUnreachable; });
  };
  return all_reached(distances_from(g, 0)) &&
         all_reached(distances_from(reversed(g), 0));
}

// Smallest L such that every edge (i,j) has a return path j -> i of length at
// most L. Equals 1 exactly for symmetric edge sets; 0 for a lone vertex.
inline int min_l_connectivity(const DirectedGraph& g) {
  require(is_strongly_connected(g), "min_l_connectivity needs a strongly connected graph");
  int worst = 0;
  for (AgentId j = 0; j < g.size(); ++j) {
    bool has_in = false;
    std::vector<int> dist;
    for (AgentId i = 0; i < g.size() && !has_in; ++i) has_in = g.has_edge(i, j);
    if (!has_in) continue;
    dist = distances_from(g, j);
    for (AgentId i = 0; i < g.size(); ++i)
      if (g.has_edge(i, j)) worst = std::max(worst, dist[i]);
  }
  return worst;
}

// Largest self-inclusive neighborhood size.
inline int out_degree_bound(const DirectedGraph& g) {
  int best = 0;
  for (AgentId i = 0; i < g.size(); ++i)
    best = std::max(best, static_cast<int>(g.neighborhood(i).size()));
  return best;
}

inline int diameter(const DirectedGraph& g) {
  int best = 0;
  for (AgentId i = 0; i < g.size(); ++i)
    for (int d : distances_from(g, i)) {
      if (d == kUnreachable) return std::numeric_limits<int>::max();
      best = std::max(best, d);
    }
  return best;
}

// ---------------------------------------------------------------------------
// Rooted balls

// Induced subgraph on {j : dist(root, j) <= radius}. Local vertex 0 is the
// root; local ids follow (depth, original id) order.
struct RootedBall {
  int radius = 0;
  DirectedGraph graph{1};
  std::vector<AgentId> original;  // local id -> id in the source graph
  std::vector<int> depth;         // local id -> distance from the root

  int size() const { return graph.size(); }
  AgentId root_original() const { return original.front(); }
};

inline RootedBall extract_ball(const DirectedGraph& g, AgentId root, int radius) {
  require(root >= 0 && root < g.size(), "invalid root " + std::to_string(root));
  require(radius >= 0, "ball radius must be nonnegative");
  std::vector<int> dist = distances_from(g, root);
  std::vector<AgentId> members;
  for (AgentId v = 0; v < g.size(); ++v)
    if (dist[v] != kUnreachable && dist[v] <= radius) members.push_back(v);
  std::stable_sort(members.begin(), members.end(),
                   [&](AgentId a, AgentId b) { return dist[a] < dist[b]; });
  std::vector<int> local(g.size(), -1);
  for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = static_cast<int>(k);

  RootedBall ball;
  ball.radius = radius;
  ball.graph = DirectedGraph(static_cast<int>(members.size()));
  ball.original = members;
  for (AgentId v : members) {
    ball.depth.push_back(dist[v]);
    for (AgentId w : g.out_neighbors(v))
      if (local[w] >= 0) ball.graph.add_edge(local[v], local[w]);
  }
  return ball;
}

namespace detail {

struct IsoSearch {
  const RootedBall& a;
  const RootedBall& b;
  std::vector<int> map;      // a-local -> b-local
  std::vector<bool> used;    // b-local taken
  std::vector<int> in_a, in_b;
  std::vector<int> order;    // a-vertices in BFS order

  static std::vector<int> in_degrees(const DirectedGraph& g) {
    std::vector<int> in(g.size(), 0);
    for (auto [i, j] : g.edges()) ++in[j];
    return in;
  }

  IsoSearch(const RootedBall& x, const RootedBall& y)
      : a(x), b(y), map(x.size(), -1), used(y.size(), false),
        in_a(in_degrees(x.graph)), in_b(in_degrees(y.graph)) {
    for (int v = 0; v < a.size(); ++v) order.push_back(v);
  }

  bool compatible(int va, int vb) const {
    if (used[vb] || a.depth[va] != b.depth[vb]) return false;
    if (a.graph.out_neighbors(va).size() != b.graph.out_neighbors(vb).size()) return false;
    if (in_a[va] != in_b[vb]) return false;
    for (int wa = 0; wa < a.size(); ++wa) {
      int wb = wa == va ? vb : map[wa];
      if (wb < 0) continue;
      if (a.graph.has_edge(va, wa) != b.graph.has_edge(vb, wb)) return false;
      if (a.graph.has_edge(wa, va) != b.graph.has_edge(wb, vb)) return false;
    }
    return true;
  }

  bool extend(std::size_t k) {
    if (k == order.size()) return true;
    int va = order[k];
    for (int vb = 0; vb < b.size(); ++vb) {
      if (!compatible(va, vb)) continue;
      map[va] = vb;
      used[vb] = true;
      if (extend(k + 1)) return true;
      map[va] = -1;
      used[vb] = false;
    }
    return false;
  }
};

inline std::vector<int> depth_profile(const RootedBall& ball) {
  std::vector<int> profile;
  for (int v = 0; v < ball.size(); ++v) {
    profile.push_back(ball.depth[v] * 1'000'000 +
                      static_cast<int>(ball.graph.out_neighbors(v).size()));
  }
  std::sort(profile.begin(), profile.end());
  return profile;
}

}  // namespace detail

// Root-preserving, edge-preserving bijection a -> b (local ids), if any.
// Exhaustive backtracking, pruned by depth and in/out degree.
inline std::optional<std::vector<int>> balls_isomorphic(const RootedBall& a,
                                                        const RootedBall& b) {
  if (a.size() != b.size() || a.graph.edge_count() != b.graph.edge_count())
    return std::nullopt;
  if (detail::depth_profile(a) != detail::depth_profile(b)) return std::nullopt;
  detail::IsoSearch search(a, b);
  if (!search.compatible(0, 0)) return std::nullopt;
  search.map[0] = 0;
  search.used[0] = true;
  if (!search.extend(1)) return std::nullopt;
  return search.map;
}

struct RootedDistance {
  double value = 1.0;      // 2^-matched_radius, or 0
  int matched_radius = 0;  // largest r <= r_max with isomorphic balls
  bool truncated = false;  // balls agreed through r_max without exhausting both graphs
};

// Rooted-graph distance 2^-r for the largest r with B_r(g1,i1) ~ B_r(g2,i2),
// searched up to r_max. Reports 0 when both balls cover their whole graphs
// isomorphically; otherwise agreement through r_max is flagged as truncated.
inline RootedDistance rooted_distance(const DirectedGraph& g1, AgentId i1,
                                      const DirectedGraph& g2, AgentId i2, int r_max) {
  require(i1 >= 0 && i1 < g1.size(), "invalid root for first graph");
  require(i2 >= 0 && i2 < g2.size(), "invalid root for second graph");
  require(r_max >= 0, "r_max must be nonnegative");
  RootedDistance result;
  for (int r = 0; r <= r_max; ++r) {
    RootedBall a = extract_ball(g1, i1, r);
    RootedBall b = extract_ball(g2, i2, r);
    if (!balls_isomorphic(a, b)) {
      result.matched_radius = r - 1;
      result.value = std::ldexp(1.0, -(r - 1));
      return result;
    }
    result.matched_radius = r;
    if (a.size() == g1.size() && b.size() == g2.size() &&
        a.graph.edge_count() == g1.edge_count() && b.graph.edge_count() == g2.edge_count()) {
      result.value = 0.0;
      return result;
    }
  }
  result.value = std::ldexp(1.0, -r_max);
  result.truncated = true;
  return result;
}

// ---------------------------------------------------------------------------
// Families

// Vertex layout of royal_family(R, n): royals [0, R), public [R, R + n).
// Royal 0 observes public R.
struct RoyalFamilyLayout {
  int royals = 0;
  int people = 0;
  AgentId royal(int k) const { return k; }
  AgentId pub(int k) const { return royals + k; }
};

// Vertex layout of mad_king(R_C, R_B, n): king 0, regent 1, then court,
// bureaucracy and people in consecutive blocks.
struct MadKingLayout {
  int court = 0;
  int bureaucracy = 0;
  int people = 0;
  static constexpr AgentId king = 0;
  static constexpr AgentId regent = 1;
  AgentId court_member(int k) const { return 2 + k; }
  AgentId bureaucrat(int k) const { return 2 + court + k; }
  AgentId person(int k) const { return 2 + court + bureaucracy + k; }
  int total() const { return 2 + court + bureaucracy + people; }
};

namespace detail {

inline DirectedGraph random_regular_graph(int n, int d, std::uint64_t seed) {
  require(d >= 1 && d < n, "random_regular needs 1 <= d < n");
  require((static_cast<long>(n) * d) % 2 == 0, "random_regular needs n*d even");
  Rng rng(seed);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> stubs;
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < d; ++k) stubs.push_back(v);
    for (std::size_t k = stubs.size(); k > 1; --k)
      std::swap(stubs[k - 1], stubs[rng.below(k)]);
    DirectedGraph g(n);
    bool ok = true;
    for (std::size_t k = 0; ok && k < stubs.size(); k += 2) {
      int a = stubs[k], b = stubs[k + 1];
      if (a == b || g.has_edge(a, b)) ok = false;
      else g.add_undirected_edge(a, b);
    }
    if (ok && is_strongly_connected(g)) return g;
  }
  throw InvalidInput("random_regular: could not draw a simple connected graph");
}

}  // namespace detail

inline DirectedGraph generate(const GraphFamilySpec& spec) {
  using F = GraphFamilySpec::Family;
  const auto& p = spec.params;
  auto need = [&](std::size_t count) {
    require(p.size() == count, "family " + spec.to_string() + " has the wrong parameter count");
  };
  DirectedGraph g;
  switch (spec.family) {
    case F::kChain:
    case F::kDipath: {
      need(1);
      require(p[0] >= 1, "path needs n >= 1");
      g = DirectedGraph(p[0]);
      for (int i = 0; i + 1 < p[0]; ++i) {
        if (spec.family == F::kChain) g.add_undirected_edge(i, i + 1);
        else g.add_edge(i, i + 1);
      }
      break;
    }
    case F::kCycle: {
      need(1);
      require(p[0] >= 3, "undirected cycle needs n >= 3");
      g = DirectedGraph(p[0]);
      for (int i = 0; i < p[0]; ++i) g.add_undirected_edge(i, (i + 1) % p[0]);
      break;
    }
    case F::kDicycle: {
      need(1);
      require(p[0] >= 2, "directed cycle needs n >= 2");
      g = DirectedGraph(p[0]);
      for (int i = 0; i < p[0]; ++i) g.add_edge(i, (i + 1) % p[0]);
      break;
    }
    case F::kGrid: {
      need(2);
      require(p[0] >= 1 && p[1] >= 1, "grid needs positive sides");
      g = DirectedGraph(p[0] * p[1]);
      for (int r = 0; r < p[0]; ++r)
        for (int c = 0; c < p[1]; ++c) {
          int v = r * p[1] + c;
          if (c + 1 < p[1]) g.add_undirected_edge(v, v + 1);
          if (r + 1 < p[0]) g.add_undirected_edge(v, v + p[1]);
        }
      break;
    }
    case F::kRandomRegular:
      need(2);
      g = detail::random_regular_graph(p[0], p[1], spec.seed);
      break;
    case F::kRoyalFamily: {
      need(2);
      require(p[0] >= 1 && p[1] >= 1, "royal_family needs R >= 1 and n >= 1");
      RoyalFamilyLayout layout{p[0], p[1]};
      g = DirectedGraph(p[0] + p[1]);
      for (int a = 0; a < p[0]; ++a)
        for (int b = 0; b < p[0]; ++b)
          if (a != b) g.add_edge(layout.royal(a), layout.royal(b));
      for (int k = 0; k + 1 < p[1]; ++k) g.add_undirected_edge(layout.pub(k), layout.pub(k + 1));
      for (int k = 0; k < p[1]; ++k)
        for (int a = 0; a < p[0]; ++a) g.add_edge(layout.pub(k), layout.royal(a));
      g.add_edge(layout.royal(0), layout.pub(0));
      break;
    }
    case F::kMadKing: {
      need(3);
      require(p[0] >= 1 && p[1] >= 1 && p[2] >= 1, "mad_king needs R_C, R_B, n >= 1");
      MadKingLayout layout{p[0], p[1], p[2]};
      g = DirectedGraph(layout.total());
      g.add_undirected_edge(layout.king, layout.regent);
      for (int k = 0; k < p[0]; ++k) g.add_undirected_edge(layout.king, layout.court_member(k));
      for (int k = 0; k < p[2]; ++k) g.add_undirected_edge(layout.king, layout.person(k));
      for (int k = 0; k < p[1]; ++k) g.add_undirected_edge(layout.regent, layout.bureaucrat(k));
      break;
    }
  }
  g.family = spec;
  return g;
}

inline std::string GraphFamilySpec::to_string() const {
  static const char* names[] = {"chain",          "dipath",       "cycle",   "dicycle",
                                "grid",           "random_regular", "royal_family",
                                "mad_king"};
  std::ostringstream out;
  out << names[static_cast<int>(family)] << '(';
  for (std::size_t k = 0; k < params.size(); ++k) out << (k ? "," : "") << params[k];
  if (family == Family::kRandomRegular) out << ",seed=" << seed;
  out << ')';
  return out.str();
}

inline GraphFamilySpec GraphFamilySpec::parse(const std::string& text) {
  static const std::pair<const char*, Family> names[] = {
      {"chain", Family::kChain},       {"dipath", Family::kDipath},
      {"cycle", Family::kCycle},       {"dicycle", Family::kDicycle},
      {"grid", Family::kGrid},         {"random_regular", Family::kRandomRegular},
      {"royal_family", Family::kRoyalFamily}, {"mad_king", Family::kMadKing}};
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  auto open = s.find('(');
  require(open != std::string::npos && s.back() == ')',
          "graph family must look like name(args): '" + text + "'");
  std::string name = s.substr(0, open);
  GraphFamilySpec spec;
  bool found = false;
  for (const auto& [n, f] : names)
    if (name == n) spec.family = f, found = true;
  require(found, "unknown graph family '" + name + "'");
  std::stringstream args(s.substr(open + 1, s.size() - open - 2));
  std::string item;
  while (std::getline(args, item, ',')) {
    try {
      if (item.rfind("seed=", 0) == 0) spec.seed = std::stoull(item.substr(5));
      else spec.params.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw InvalidInput("bad graph family argument '" + item + "'");
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Edge-list text format: header "n=<count>", then one "i j" pair per line.
// Blank lines and lines starting with '#' are ignored.

inline void write_edge_list(std::ostream& out, const DirectedGraph& g) {
  out << "n=" << g.size() << '\n';
  for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

inline DirectedGraph read_edge_list(std::istream& in) {
  std::string line;
  std::optional<DirectedGraph> g;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    if (!g) {
      require(line.rfind("n=", 0) == 0, "edge list must start with 'n=<count>'");
      int n = 0;
      try {
        n = std::stoi(line.substr(2));
      } catch (const std::exception&) {
        throw InvalidInput("bad vertex count in '" + line + "'");
      }
      g.emplace(n);
      continue;
    }
    std::istringstream fields(line);
    AgentId i, j;
    std::string rest;
    if (!(fields >> i >> j) || (fields >> rest))
      throw InvalidInput("line " + std::to_string(line_no) + ": expected 'i j'");
    g->add_edge(i, j);
  }
  require(g.has_value(), "empty edge list");
  return *g;
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_GRAPH_HPP_
