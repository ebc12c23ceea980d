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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sociallearn/sociallearn.hpp"

namespace sociallearn {
namespace {

using S = GraphFamilySpec;

std::vector<std::vector<int>> all_worlds(int agents, int types) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(agents, 0);
  while (true) {
    out.push_back(t);
    int k = 0;
    while (k < agents && ++t[k] == types) t[k++] = 0;
    if (k == agents) return out;
  }
}

struct BruteCase {
  S spec;
  SignalModel model;
  int horizon;
  TieBreak tie;
};

class ExactVersusBruteForce : public ::testing::TestWithParam<int> {};

BruteCase brute_case(int k) {
  const SignalModel three = SignalModel::from_masses({0.5, 0.3, 0.2}, {0.2, 0.3, 0.5});
  switch (k) {
    case 0: return {S::cycle(5), symmetric_binary(0.6), 5, TieBreak::kZero};
    case 1: return {S::royal_family(2, 3), royal_bounded(), 5, TieBreak::kZero};
    case 2: return {S::dicycle(4), three, 4, TieBreak::kZero};
    case 3: return {S::grid(2, 3), symmetric_binary(0.7), 4, TieBreak::kOne};
    case 4: return {S::mad_king(1, 1, 2), mad_king_asym(0), 4, TieBreak::kZero};
    case 5: return {S::random_regular(6, 3, 1), symmetric_binary(0.8), 4, TieBreak::kOne};
    default: return {S::chain(4), three, 5, TieBreak::kZero};
  }
}

TEST_P(ExactVersusBruteForce, ActionsTiesAndPosteriorsAgree) {
  BruteCase c = brute_case(GetParam());
  DirectedGraph g = generate(c.spec);
  Action tie_action = c.tie == TieBreak::kOne ? 1 : 0;
  oracle::MyopicTables tab = oracle::brute_myopic(g, c.model, c.horizon, tie_action);
  ExactSolution sol = ExactSolution::solve(g, c.model, myopic_profile(g, c.tie), c.horizon);
  for (const auto& types : all_worlds(g.size(), c.model.size())) {
    const std::size_t w = tab.world_of(types);
    std::vector<TieEvent> ties;
    ActionMatrix a = sol.play(types, &ties);
    auto post = sol.posteriors(types);
    ASSERT_TRUE(post.has_value());
    EXPECT_LE(oracle::max_gap(*post, tab.post[w]), 1e-12) << c.spec.to_string();
    std::vector<bool> tie_flags(g.size() * c.horizon, false);
    for (const TieEvent& e : ties) tie_flags[e.agent * c.horizon + e.t] = true;
    for (AgentId i = 0; i < g.size(); ++i)
      for (int t = 0; t < c.horizon; ++t) {
        ASSERT_EQ(a.at(i, t), tab.act[w][i * c.horizon + t]) << c.spec.to_string();
        ASSERT_EQ(tie_flags[i * c.horizon + t], tab.tie[w][i * c.horizon + t]);
      }
  }
}

INSTANTIATE_TEST_SUITE_P(SmallGraphs, ExactVersusBruteForce, ::testing::Range(0, 7));

struct TwoAgents : ::testing::Test {
  DirectedGraph g = generate(S::chain(2));
  SignalModel m = symmetric_binary(0.75);
  StrategyProfile p = myopic_profile(g);
  ActionMatrix seen{2, 1};
  HistoryView view(Action other) {
    seen.set(0, 0, 1);
    seen.set(1, 0, other);
    return HistoryView(0, 1, 0, g.neighborhood(0), seen);
  }
};

TEST_F(TwoAgents, PrivateBelief) {
  ActionMatrix none(2, 1);
  HistoryView v(0, 0, 0, g.neighborhood(0), none);
  EXPECT_NEAR(exact_posterior(g, m, p, v).posterior, 0.75, 1e-15);
}

TEST_F(TwoAgents, AgreementSharpensThePosterior) {
  EXPECT_NEAR(exact_posterior(g, m, p, view(1)).posterior, 0.9, 1e-14);
}

TEST_F(TwoAgents, DisagreementCancels) {
  BeliefState b = exact_posterior(g, m, p, view(0));
  EXPECT_NEAR(b.posterior, 0.5, 1e-14);
  EXPECT_TRUE(b.is_tie());
}

TEST_F(TwoAgents, LogOddsDecomposition) {
  YDecomposition y = y_decomposition(g, m, p, view(1));
  EXPECT_NEAR(y.y, std::log(3.0), 1e-12);
  EXPECT_NEAR(y.z0, std::log(3.0), 1e-12);
  EXPECT_NEAR(y.z, std::log(9.0), 1e-12);
  EXPECT_NEAR(y.residual(), 0.0, 1e-12);
}

TEST_F(TwoAgents, ImpossibleHistoryIsReported) {
  // Agent 0 holds the atom favouring 1 but is shown playing 0 at round 0.
  ActionMatrix a(2, 1);
  HistoryView v(0, 1, 0, g.neighborhood(0), a);
  EXPECT_THROW(exact_posterior(g, m, p, v), InconsistentHistory);
}

TEST_F(TwoAgents, JitterBreaksTiesByTheUpperHalf) {
  StrategyProfile pj = myopic_profile(g, TieBreak::kJitter);
  ExactSolution sol = ExactSolution::solve(g, m, pj, 2);
  EXPECT_EQ(sol.types_per_agent(), 4);
  for (int j0 : {0, 1})
    for (int j1 : {0, 1}) {
      std::vector<int> types{0 * 2 + j0, 1 * 2 + j1};
      std::vector<TieEvent> ties;
      ActionMatrix a = sol.play(types, &ties);
      EXPECT_EQ(a.at(0, 1), j0);
      EXPECT_EQ(a.at(1, 1), j1);
      EXPECT_EQ(ties, (std::vector<TieEvent>{{0, 1}, {1, 1}}));
    }
}

TEST(BestResponse, TieBreakers) {
  BeliefState tie = BeliefState::from_posterior(0.5);
  EXPECT_EQ(best_response(tie, TieBreak::kZero).action, 0);
  EXPECT_EQ(best_response(tie, TieBreak::kOne).action, 1);
  EXPECT_EQ(best_response(tie, TieBreak::kJitter, true).action, 1);
  EXPECT_EQ(best_response(tie, TieBreak::kJitter, false).action, 0);
  EXPECT_TRUE(best_response(tie, TieBreak::kZero).tie);
  Decision d = best_response(BeliefState::from_posterior(0.6), TieBreak::kZero);
  EXPECT_EQ(d.action, 1);
  EXPECT_FALSE(d.tie);
  TieCounter counter;
  best_response(tie, TieBreak::kOne, counter);
  best_response(BeliefState::from_log_odds(-1), TieBreak::kOne, counter);
  EXPECT_EQ(counter.ties, 1u);
  EXPECT_THROW(parse_tie_break("coin"), InvalidInput);
  EXPECT_EQ(parse_tie_break("jitter"), TieBreak::kJitter);
}

TEST(BeliefState, ExtremePosteriors) {
  EXPECT_TRUE(std::isinf(BeliefState::from_posterior(1.0).log_odds));
  EXPECT_TRUE(std::isinf(BeliefState::from_posterior(0.0).log_odds));
  EXPECT_NEAR(BeliefState::from_log_odds(std::log(9.0)).posterior, 0.9, 1e-15);
}

TEST(ExactEngine, BudgetIsEnforced) {
  DirectedGraph g = generate(S::cycle(12));
  ExactOptions opt;
  opt.budget = 1000;
  EXPECT_THROW(ExactSolution::solve(g, symmetric_binary(0.6), myopic_profile(g), 3, opt), BudgetExceeded);
  EXPECT_FALSE(assignment_count(2, 12, 1000).has_value());
  EXPECT_EQ(assignment_count(3, 4, 1000), 81u);
}

TEST(ExactEngine, DecompositionHoldsAlongTraces) {
  DirectedGraph g = generate(S::royal_family(2, 3));
  SignalModel m = royal_bounded();
  StrategyProfile p = myopic_profile(g);
  ExactSolution sol = ExactSolution::solve(g, m, p, 4);
  for (const auto& types : all_worlds(g.size(), 2)) {
    ActionMatrix a = sol.play(types);
    for (AgentId i = 0; i < g.size(); ++i)
      for (int t = 0; t < 4; ++t) {
        HistoryView v(i, t, types[i], g.neighborhood(i), a);
        YDecomposition y = sol.y_decomposition(v);
        ASSERT_NEAR(y.residual(), 0.0, 1e-9);
        ASSERT_NEAR(y.z, sol.posterior(v).log_odds, 1e-12);
      }
  }
}

TEST(Lookahead, CertaintyIsNondecreasing) {
  for (const BruteCase& c : {brute_case(0), brute_case(1), brute_case(2), brute_case(4)}) {
    DirectedGraph g = generate(c.spec);
    StrategyProfile p = myopic_profile(g, c.tie);
    ExactSolution sol = ExactSolution::solve(g, c.model, p, 3);
    Rng rng(derive_seed(3, 0));
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<int> types;
      for (AgentId i = 0; i < g.size(); ++i) types.push_back(static_cast<int>(rng.below(c.model.size())));
      ActionMatrix a = sol.play(types);
      for (int t = 0; t < 3; ++t) {
        AgentId i = static_cast<AgentId>(rng.below(g.size()));
        HistoryView v(i, t, types[i], g.neighborhood(i), a);
        auto y = lookahead_certainty(g, c.model, p, v);
        EXPECT_NEAR(y[0], std::abs(sol.posterior(v).posterior - 0.5), 1e-12);
        for (int l = 0; l < 3; ++l) EXPECT_LE(y[l], y[l + 1] + 1e-12) << c.spec.to_string();
        for (double x : y) EXPECT_LE(x, 0.5);
      }
    }
  }
}

TEST(Lookahead, RoyalBoundedStartsAboveOneFifth) {
  DirectedGraph g = generate(S::royal_family(2, 3));
  SignalModel m = royal_bounded();
  ActionMatrix none(g.size(), 1);
  for (int atom : {0, 1}) {
    HistoryView v(0, 0, atom, g.neighborhood(0), none);
    auto y = lookahead_certainty(g, m, royal_family_profile(g), v);
    EXPECT_NEAR(y[0], logistic(1.5) - 0.5, 1e-12);
    EXPECT_GE(y[0], 0.2);
  }
}

TEST(MonteCarlo, AgreesWithExactWithinStandardErrors) {
  DirectedGraph g = generate(S::cycle(6));
  SignalModel m = symmetric_binary(0.65);
  ExactSolution sol = ExactSolution::solve(g, m, myopic_profile(g), 4);
  Rng rng(derive_seed(21, 0));
  int checked = 0;
  for (const auto& types : all_worlds(6, 2)) {
    if (rng.below(8) != 0) continue;
    ActionMatrix a = sol.play(types);
    AgentId i = static_cast<AgentId>(rng.below(6));
    HistoryView v(i, 3, types[i], g.neighborhood(i), a);
    McEstimate est = mc_posterior(sol, m, v, 4000, rng);
    double exact = sol.posterior(v).posterior;
    if (est.standard_error == 0) EXPECT_NEAR(est.belief.posterior, exact, 1e-12);
    else EXPECT_LE(std::abs(est.belief.posterior - exact), 5 * est.standard_error + 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(MonteCarlo, SingleParticleIsFlagged) {
  DirectedGraph g = generate(S::cycle(4));
  SignalModel m = symmetric_binary(0.7);
  ExactSolution sol = ExactSolution::solve(g, m, myopic_profile(g), 2);
  ActionMatrix a = sol.play(std::vector<int>{0, 0, 0, 0});
  HistoryView v(0, 0, 0, g.neighborhood(0), a);
  Rng rng(4);
  EXPECT_TRUE(mc_posterior(sol, m, v, 1, rng).high_variance);
  EXPECT_THROW(mc_posterior(sol, m, v, 0, rng), InvalidInput);
}

TEST(MonteCarlo, IsolatedAgentKeepsItsPrivateBelief) {
  DirectedGraph g(1);
  SignalModel m = symmetric_binary(0.7);
  ExactSolution sol = ExactSolution::solve(g, m, myopic_profile(g), 4);
  for (int atom : {0, 1}) {
    ActionMatrix a = sol.play(std::vector<int>{atom});
    HistoryView v(0, 4, atom, g.neighborhood(0), a);
    Rng rng(8);
    McEstimate est = mc_posterior(sol, m, v, 50, rng);
    EXPECT_NEAR(est.belief.posterior, m.private_belief({atom, 0}).value, 1e-15);
    EXPECT_EQ(est.standard_error, 0.0);
  }
}

TEST(MonteCarlo, DegenerateEstimateIsReported) {
  DirectedGraph g = generate(S::chain(2));
  SignalModel m = symmetric_binary(0.75);
  ExactSolution sol = ExactSolution::solve(g, m, myopic_profile(g), 2);
  ActionMatrix a(2, 2);
  HistoryView v(0, 1, 0, g.neighborhood(0), a);
  Rng rng(2);
  EXPECT_THROW(mc_posterior(sol, m, v, 100, rng), DegenerateEstimate);
}

TEST(LocalEngine, MatchesExactThroughTheCutoff) {
  DirectedGraph g = generate(S::cycle(9));
  SignalModel m = symmetric_binary(0.6);
  StrategyProfile p = myopic_profile(g);
  LocalOptions opt;
  opt.ball_budget = 32;
  LocalSolution local = LocalSolution::solve(g, m, p, 6, opt);
  ASSERT_EQ(local.cutoff(), 2);
  EXPECT_FALSE(local.exhaustive());
  EXPECT_EQ(local.distinct_balls(), 1);
  ExactSolution exact = ExactSolution::solve(g, m, p, 6);
  for (const auto& types : all_worlds(9, 2)) {
    ActionMatrix a = local.play(types), b = exact.play(types);
    for (AgentId i = 0; i < 9; ++i)
      for (int t = 0; t < 6; ++t) ASSERT_EQ(a.at(i, t), t <= 2 ? b.at(i, t) : a.at(i, 2));
  }
}

TEST(LocalEngine, ExhaustiveBallsAreExactAtEveryRound) {
  DirectedGraph g = generate(S::royal_family(2, 3));
  SignalModel m = royal_bounded();
  StrategyProfile p = myopic_profile(g);
  LocalSolution local = LocalSolution::solve(g, m, p, 6);
  EXPECT_TRUE(local.exhaustive());
  ExactSolution exact = ExactSolution::solve(g, m, p, 6);
  for (const auto& types : all_worlds(g.size(), 2)) EXPECT_TRUE(local.play(types) == exact.play(types));
}

TEST(LocalEngine, RefusesNonMyopicProfiles) {
  DirectedGraph g = generate(S::cycle(5));
  StrategyProfile p = apply_forced(myopic_profile(g), ForcedResponse({{0, 0, 1, std::nullopt}}));
  EXPECT_THROW(LocalSolution::solve(g, symmetric_binary(0.6), p, 3), InvalidInput);
}

TEST(CountingEngine, MatchesExactOnSmallMadKing) {
  DirectedGraph g = generate(S::mad_king(2, 3, 4));
  SignalModel m = mad_king_asym(0);
  StrategyProfile p = mad_king_profile(g, mad_king_roles(g), {0.01, 0.99});
  MadKingSolution counting = MadKingSolution::solve(g, m, p, 6);
  ExactSolution exact = ExactSolution::solve(g, m, p, 6);
  for (const auto& types : all_worlds(g.size(), 2)) {
    std::vector<TieEvent> t1, t2;
    ASSERT_TRUE(counting.play(types, &t1) == exact.play(types, &t2));
    EXPECT_EQ(t1, t2);
    EXPECT_LE(oracle::max_gap(*counting.posteriors(types), *exact.posteriors(types)), 1e-9);
  }
}

TEST(CountingEngine, RefusesOtherProfiles) {
  DirectedGraph g = generate(S::mad_king(1, 1, 1));
  EXPECT_THROW(MadKingSolution::solve(g, mad_king_asym(0), myopic_profile(g), 4), InvalidInput);
  StrategyProfile p = mad_king_profile(g, mad_king_roles(g), {0.01, 0.99});
  SignalModel three = SignalModel::from_masses({0.5, 0.3, 0.2}, {0.2, 0.3, 0.5});
  EXPECT_THROW(MadKingSolution::solve(g, three, p, 4), InvalidInput);
  EXPECT_THROW(MadKingSolution::solve(g, mad_king_asym(0), apply_forced(p, ForcedResponse({{2, 0, 1, std::nullopt}})), 4),
               InvalidInput);
}

TEST(MakePolicy, AutoModePicksTheEngine) {
  SimConfig cfg;
  cfg.horizon = 4;
  cfg.tail_window = 2;
  DirectedGraph small = generate(S::cycle(6));
  EXPECT_EQ(make_policy(small, symmetric_binary(0.6), myopic_profile(small), cfg)->engine_name(), "exact");
  DirectedGraph big = generate(S::cycle(40));
  EXPECT_EQ(make_policy(big, symmetric_binary(0.6), myopic_profile(big), cfg)->engine_name(), "cycle");
  DirectedGraph path = generate(S::chain(40));
  EXPECT_EQ(make_policy(path, symmetric_binary(0.6), myopic_profile(path), cfg)->engine_name(), "local");
  DirectedGraph king = generate(S::mad_king(2, 30, 8));
  StrategyProfile p = mad_king_profile(king, mad_king_roles(king), {0.01, 0.99});
  EXPECT_EQ(make_policy(king, mad_king_asym(0), p, cfg)->engine_name(), "sufficient-statistic");
  StrategyProfile forced = apply_forced(myopic_profile(big), ForcedResponse({{0, 0, 1, std::nullopt}}));
  EXPECT_THROW(make_policy(big, symmetric_binary(0.6), forced, cfg), BudgetExceeded);
}

}  // namespace
}  // namespace sociallearn
