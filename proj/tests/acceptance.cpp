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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "invariants.hpp"
#include "report.hpp"
#include "sociallearn/sociallearn.hpp"

namespace sociallearn::acceptance {
namespace {

using S = GraphFamilySpec;
using cli::PropertyResult;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

const PropertyResult& find(const std::vector<PropertyResult>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return r;
  throw std::logic_error("no property named " + name);
}

std::string describe(const PropertyResult& r) {
  return r.name + " (" + std::to_string(r.cases) + " cases" + (r.passed ? "" : "; " + r.detail) + ")";
}

SimConfig config(int horizon, int window, std::uint64_t replicates) {
  SimConfig cfg;
  cfg.horizon = horizon;
  cfg.tail_window = window;
  cfg.replicates = replicates;
  cfg.seed = 1;
  return cfg;
}

Outcome single_agent() {
  Outcome o{true, ""};
  for (const SignalModel& m : {symmetric_binary(0.6), royal_bounded()}) {
    DirectedGraph g(1);
    SimConfig cfg = config(1, 1, 100000);
    auto policy = make_policy(g, m, myopic_profile(g), cfg);
    EnsembleReport rep = run_ensemble(*policy, m, cfg);
    const double se = proportion_se(rep.all_learned, rep.replicates);
    const bool ok = std::abs(rep.all_learning - m.p_star()) <= 3 * se;
    o.passed = o.passed && ok;
    o.detail += fmt("freq %.4f vs p* %.4f (3SE %.4f); ", rep.all_learning, m.p_star(), 3 * se);
  }
  return o;
}

Outcome from_property(const PropertyResult& r) { return {r.passed, describe(r)}; }

Outcome agreement(const std::vector<int>& sizes) {
  Outcome o{true, ""};
  for (int n : sizes) {
    DirectedGraph g = generate(S::cycle(n));
    SignalModel m = symmetric_binary(0.6);
    SimConfig cfg = config(30, 5, 5000);
    auto policy = make_policy(g, m, myopic_profile(g), cfg);
    EnsembleReport rep = run_ensemble(*policy, m, cfg);
    const bool ok = rep.agreement >= 0.99;
    o.passed = o.passed && ok;
    o.detail += "n=" + std::to_string(n) + fmt(" agreement %.4f, tie rate %.4f", rep.agreement, rep.tie_rate) +
                (ok ? "; " : " [below 0.99]; ");
  }
  return o;
}

Outcome egalitarian_trend() {
  std::vector<LearningPoint> points;
  std::string engines;
  for (int n : {5, 10, 20, 40}) {
    DirectedGraph g = generate(S::cycle(n));
    SignalModel m = symmetric_binary(0.6);
    SimConfig cfg = config(30, 5, 5000);
    auto policy = make_policy(g, m, myopic_profile(g), cfg);
    points.push_back({n, "cycle", "symmetric_binary(0.6)", cfg.discount, run_ensemble(*policy, m, cfg)});
    engines += std::to_string(n) + ":" + policy->engine_name() + " ";
  }
  TrendSummary mean = compare_learning(points, TrendKind::kEgalitarian, 0, 2.326, LearningMetric::kMeanAgent);
  TrendSummary all = compare_learning(points, TrendKind::kEgalitarian, 0, 2.326, LearningMetric::kAllAgents);
  Outcome o{mean.passed, "mean-agent learning"};
  for (const auto& r : mean.rows) o.detail += fmt(" %.0f:%.4f(se %.4f)", r.n, r.learning, r.se);
  o.detail += "; all-agents";
  for (const auto& r : all.rows) o.detail += fmt(" %.0f:%.4f", r.n, r.learning);
  o.detail += "; engines " + engines;
  for (const auto& f : mean.failures) o.detail += "; " + f;
  return o;
}

Outcome royal_family() {
  DirectedGraph g = generate(S::royal_family(5, 100));
  SignalModel m = symmetric_binary(0.6);
  SimConfig cfg = config(30, 5, 100000);
  auto policy = make_policy(g, m, royal_family_profile(g), cfg);
  EnsembleReport rep = run_ensemble(*policy, m, cfg);
  const double floor = royal_floor(m, 5);
  const double se = rep.all_learning_se();
  const bool above = rep.non_learning() >= floor - 3 * se;

  SignalInjection inj{0, {}};
  for (int k = 0; k < 5; ++k) inj.atoms.emplace_back(k, cli::favouring_one(m));
  int unanimous = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    Trace tr = run_trace(*policy, m, cfg, r, &inj);
    auto from = cli::unanimous_from(tr.actions, 1);
    unanimous += from && *from <= 1;
  }
  return {above && unanimous == 100,
          fmt("non-learning %.5f vs floor %.5f - 3SE %.5f; ", rep.non_learning(), floor, 3 * se) +
              std::to_string(unanimous) + "/100 injected traces all-1 from round 1; engine " + policy->engine_name()};
}

Outcome mad_king() {
  DirectedGraph g = generate(S::mad_king(2, 500, 20));
  MadKingLayout L{2, 500, 20};
  SignalModel m = mad_king_asym(0);
  MadKingParams params{0.01, 0.99};
  StrategyProfile p = mad_king_profile(g, mad_king_roles(g), params);
  SimConfig cfg = config(30, 5, 2000);
  cfg.engine = EngineMode::kSufficientStatistic;
  auto policy = make_policy(g, m, p, cfg);

  const double e_court = std::exp(2.0), patience = 1 / (1 - params.lambda);
  const bool regime = e_court < patience && patience < L.bureaucracy;

  auto people_quiet = [&](const Trace& tr) {
    for (int q = 0; q < L.people; ++q)
      if (tr.actions.at(L.person(q), 0) != 0 || tr.actions.at(L.person(q), 1) != 0) return false;
    return true;
  };
  std::uint64_t quiet = 0;
  for (std::uint64_t r = 0; r < cfg.replicates; ++r) quiet += people_quiet(run_trace(*policy, m, cfg, r));

  SignalInjection inj{0, {}};
  for (int k = 0; k < L.bureaucracy; ++k) inj.atoms.emplace_back(L.bureaucrat(k), cli::favouring_one(m));
  const double threshold = 1 - std::exp(-params.delta * L.bureaucracy);
  double min_regent = 1;
  int converted = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    Trace tr = run_trace(*policy, m, cfg, r, &inj);
    const auto post = *policy->posteriors(tr.types);
    min_regent = std::min(min_regent, post[static_cast<std::size_t>(L.regent) * cfg.horizon + 1]);
    auto from = cli::unanimous_from(tr.actions, 1);
    converted += from && *from <= 3;
  }
  const bool ok = regime && quiet == cfg.replicates && min_regent > threshold && converted == 100;
  return {ok, fmt("e^R_C %.2f < 1/(1-lambda) %.0f < R_B %.0f; ", e_court, patience, L.bureaucracy) +
                  std::to_string(quiet) + "/" + std::to_string(cfg.replicates) + " replicates with quiet people; " +
                  fmt("min regent posterior %.6f vs %.6f; ", min_regent, threshold) + std::to_string(converted) +
                  "/100 injected traces all-1 by round 3; engine " + policy->engine_name()};
}

Outcome myopic_conditions(const std::vector<PropertyResult>& strategy) {
  const PropertyResult& nest = find(strategy, "sufficient conditions are nested for nondecreasing Y");
  DirectedGraph g = generate(S::royal_family(2, 3));
  SignalModel m = royal_bounded();
  StrategyProfile p = royal_family_profile(g);
  ActionMatrix none(g.size(), 1);
  int views = 0, above = 0;
  double lowest = 1;
  for (AgentId i = 0; i < g.size(); ++i)
    for (int atom = 0; atom < m.size(); ++atom) {
      auto y = lookahead_certainty(g, m, p, HistoryView(i, 0, atom, g.neighborhood(i), none));
      ++views;
      above += y[0] >= 0.2;
      lowest = std::min(lowest, y[0]);
    }
  return {nest.passed && above == views,
          describe(nest) + "; Y_0 >= 1/5 on " + std::to_string(above) + "/" + std::to_string(views) +
              fmt(" royal_bounded views (min %.4f)", lowest)};
}

Outcome majority() {
  const int k = 25, N = 100000;
  Rng rng(derive_seed(1, 0, 10));
  std::vector<Action> out;
  std::vector<State> states;
  out.reserve(static_cast<std::size_t>(k) * N);
  for (int n = 0; n < N; ++n) {
    const State s = rng.bernoulli(0.5) ? 1 : 0;
    states.push_back(s);
    for (int j = 0; j < k; ++j) out.push_back(rng.bernoulli(0.75) ? s : static_cast<Action>(1 - s));
  }
  MajorityReport rep = majority_aggregate(EstimatorSample(k, std::move(out), std::move(states)), 0.25);
  return {rep.accuracy >= rep.bound - 3 * rep.standard_error,
          fmt("accuracy %.5f vs bound %.5f - 3SE %.5f", rep.accuracy, rep.bound, 3 * rep.standard_error)};
}

Outcome graph_metric(const std::vector<PropertyResult>& graph) {
  const PropertyResult& metric = find(graph, "rooted distance is a metric on 20 rooted graphs");
  const PropertyResult& minl = find(graph, "min_l_connectivity matches BFS over all pairs");
  const double d = rooted_distance(generate(S::dicycle(5)), 0, generate(S::dicycle(8)), 0, 10).value;
  return {metric.passed && minl.passed && d == 0.125,
          describe(metric) + "; " + describe(minl) + fmt("; D(dicycle5, dicycle8) = %.6f", d)};
}

}  // namespace
}  // namespace sociallearn::acceptance

int main() {
  using namespace sociallearn;
  using namespace sociallearn::acceptance;
  const std::uint64_t seed = 1;
  std::vector<cli::PropertyResult> belief, dynamics, strategy, graph;

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"single-agent baseline", single_agent},
      {"log-odds decomposition",
       [&] {
         belief = cli::belief_properties(seed, 1000);
         return from_property(find(belief, "log-odds decompose into own signal plus neighbors' history"));
       }},
      {"martingale", [&] { return from_property(find(belief, "posterior is a martingale")); }},
      {"locality coupling",
       [&] {
         dynamics = cli::dynamics_properties(seed, 100);
         return from_property(find(dynamics, "locality coupling on matched balls"));
       }},
      {"agreement on cycles", [] { return agreement({5, 10, 15, 20}); }},
      {"egalitarian trend", egalitarian_trend},
      {"royal family non-learning", royal_family},
      {"mad king forced dynamics", mad_king},
      {"myopic-condition arithmetic",
       [&] {
         strategy = cli::strategy_properties(seed);
         return myopic_conditions(strategy);
       }},
      {"majority aggregation", majority},
      {"graph metric",
       [&] {
         graph = cli::graph_properties(seed);
         return graph_metric(graph);
       }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.passed;
    std::printf("criterion %2zu %s: %s [%.1fs] %s\n", k + 1, o.passed ? "PASS" : "FAIL", criteria[k].first.c_str(),
                secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
