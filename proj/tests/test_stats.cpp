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

#include "sociallearn/sociallearn.hpp"

namespace sociallearn {
namespace {

using S = GraphFamilySpec;

TEST(WilsonInterval, ClosedFormAtZeroSuccesses) {
  const double z2 = 1.96 * 1.96;
  Interval ci = wilson_interval(0, 10);
  EXPECT_EQ(ci.low, 0.0);
  EXPECT_NEAR(ci.high, z2 / (10 + z2), 1e-15);
}

TEST(WilsonInterval, SymmetricAtOneHalf) {
  Interval ci = wilson_interval(50, 100);
  EXPECT_NEAR(ci.low + ci.high, 1.0, 1e-15);
  const double z2 = 1.96 * 1.96;
  const double half = 1.96 * std::sqrt(0.25 / 100 + z2 / 40000) / (1 + z2 / 100);
  EXPECT_NEAR(ci.high - 0.5, half, 1e-15);
  EXPECT_THROW(wilson_interval(3, 2), InvalidInput);
  EXPECT_THROW(wilson_interval(0, 0), InvalidInput);
}

TEST(WilsonInterval, CoverageNearNominal) {
  Rng rng(derive_seed(6, 0));
  const double p = 0.3;
  int covered = 0;
  const int trials = 4000;
  for (int k = 0; k < trials; ++k) {
    std::uint64_t hits = 0;
    for (int n = 0; n < 80; ++n) hits += rng.bernoulli(p);
    covered += wilson_interval(hits, 80).contains(p);
  }
  EXPECT_GT(covered / double(trials), 0.93);
}

TEST(ProportionSe, FlooredAtTheExtremes) {
  EXPECT_NEAR(proportion_se(25, 100), std::sqrt(0.25 * 0.75 / 100), 1e-15);
  EXPECT_NEAR(proportion_se(0, 100), 0.005, 1e-15);
}

EstimatorSample sample_from(int k, const std::vector<std::vector<Action>>& rows, const std::vector<State>& states) {
  std::vector<Action> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return EstimatorSample(k, flat, states);
}

TEST(Dependence, IdenticalCopiesOfAFairBit) {
  EstimatorSample s = sample_from(2, {{0, 0}, {1, 1}, {0, 0}, {1, 1}}, {0, 0, 1, 1});
  DependenceReport d = dep_s_estimate(s);
  EXPECT_NEAR(d.dep_s, 0.5, 1e-15);
  EXPECT_NEAR(d.tv[0], 0.5, 1e-15);
  EXPECT_EQ(d.samples[0], 2u);
}

TEST(Dependence, SingleEstimatorIsIndependent) {
  EstimatorSample s = sample_from(1, {{0}, {1}, {1}, {0}, {1}}, {0, 0, 1, 1, 1});
  EXPECT_NEAR(dep_s_estimate(s).dep_s, 0.0, 1e-15);
}

TEST(Dependence, ProductLawHasNoDependence) {
  std::vector<std::vector<Action>> rows;
  std::vector<State> states;
  for (State s : {0, 1})
    for (Action a : {0, 1})
      for (Action b : {0, 1}) {
        rows.push_back({a, b});
        states.push_back(s);
      }
  EXPECT_NEAR(dep_s_estimate(sample_from(2, rows, states)).dep_s, 0.0, 1e-15);
}

TEST(Dependence, RequiresBothStates) {
  EstimatorSample s = sample_from(2, {{0, 0}, {1, 1}}, {0, 0});
  EXPECT_THROW(dep_s_estimate(s), InvalidInput);
  EXPECT_THROW(EstimatorSample(2, {0, 1, 1}, {0, 1}), InvalidInput);
  EXPECT_THROW(EstimatorSample(1, {2}, {0}), InvalidInput);
}

TEST(GoodEstimator, IndependentAccurateEstimatorsPass) {
  Rng rng(derive_seed(12, 0));
  const int k = 3, N = 20000;
  std::vector<Action> out;
  std::vector<State> states;
  for (int n = 0; n < N; ++n) {
    State s = rng.bernoulli(0.5);
    states.push_back(s);
    for (int j = 0; j < k; ++j) out.push_back(rng.bernoulli(0.7) ? s : 1 - s);
  }
  GoodEstimatorReport rep = good_estimator_check(EstimatorSample(k, out, states), 0.7, 0.05);
  EXPECT_TRUE(rep.passed);
  EXPECT_TRUE(rep.accuracy_ok);
  EXPECT_GT(rep.dep_margin, 0);
  for (double a : rep.accuracy) EXPECT_NEAR(a, 0.7, 0.02);
  EXPECT_FALSE(good_estimator_check(EstimatorSample(k, out, states), 0.8, 0.05).passed);
}

TEST(GoodEstimator, CopiesFailTheDependenceBound) {
  EstimatorSample s = sample_from(2, {{0, 0}, {1, 1}, {0, 0}, {1, 1}}, {0, 0, 1, 1});
  GoodEstimatorReport rep = good_estimator_check(s, 0.5, 0.2);
  EXPECT_FALSE(rep.passed);
  EXPECT_NEAR(rep.dep_margin, -0.3, 1e-15);
}

TEST(Majority, BeatsTheConcentrationBound) {
  const int k = 25, N = 20000;
  const double eps = 0.25;
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(40, seed));
    std::vector<Action> out;
    std::vector<State> states;
    for (int n = 0; n < N; ++n) {
      State s = rng.bernoulli(0.5);
      states.push_back(s);
      for (int j = 0; j < k; ++j) out.push_back(rng.bernoulli(0.75) ? s : 1 - s);
    }
    MajorityReport rep = majority_aggregate(EstimatorSample(k, out, states), eps);
    EXPECT_NEAR(rep.bound, 1 - std::exp(-2 * eps * eps * k), 1e-15);
    EXPECT_FALSE(rep.dep_s.has_value());
    passed += rep.accuracy >= rep.bound - 2 * rep.standard_error;
  }
  EXPECT_GE(passed, 19);
}

TEST(Majority, ThresholdRule) {
  EstimatorSample s = sample_from(2, {{1, 1}, {1, 0}, {0, 0}, {1, 1}}, {1, 1, 0, 0});
  MajorityReport rep = majority_aggregate(s, 0.3);
  EXPECT_NEAR(rep.alpha1, 0.75, 1e-15);
  EXPECT_EQ(rep.outcomes, (std::vector<Action>{1, 1, 0, 1}));
  EXPECT_NEAR(rep.accuracy, 0.75, 1e-15);
  ASSERT_TRUE(rep.dep_s.has_value());
  EXPECT_THROW(majority_aggregate(s, 0.0), InvalidInput);
}

TEST(RoyalFloor, ClosedForm) {
  EXPECT_NEAR(royal_floor(symmetric_binary(0.6), 3), 0.5 * 0.4 * 0.4 * 0.4, 1e-15);
  SignalModel rb = royal_bounded();
  EXPECT_NEAR(royal_floor(rb, 2), 0.5 * rb.atom(0).p0 * rb.atom(0).p0, 1e-15);
  EXPECT_THROW(royal_floor(rb, 0), InvalidInput);
}

TEST(RoyalFloor, BoundsSimulatedNonLearning) {
  for (int R : {1, 3}) {
    DirectedGraph g = generate(S::royal_family(R, 4));
    SignalModel m = symmetric_binary(0.6);
    SimConfig cfg;
    cfg.horizon = 8;
    cfg.tail_window = 3;
    cfg.replicates = 20000;
    cfg.workers = 1;
    auto policy = make_policy(g, m, royal_family_profile(g), cfg);
    EnsembleReport rep = run_ensemble(*policy, m, cfg);
    EXPECT_GE(rep.non_learning(), royal_floor(m, R) - 3 * rep.all_learning_se()) << "R=" << R;
  }
}

EnsembleReport synthetic(std::uint64_t learned, std::uint64_t N, double mean, double mean_se) {
  EnsembleReport r;
  r.replicates = N;
  r.all_learned = learned;
  r.all_learning = double(learned) / N;
  r.all_learning_ci = wilson_interval(learned, N);
  r.mean_learning = mean;
  r.mean_learning_se = mean_se;
  return r;
}

TEST(CompareLearning, EgalitarianAllowsNoiseButNotDrops) {
  std::vector<LearningPoint> ok{{5, "cycle", "m", 0.99, synthetic(600, 1000, 0, 0)},
                                {10, "cycle", "m", 0.99, synthetic(590, 1000, 0, 0)},
                                {20, "cycle", "m", 0.99, synthetic(700, 1000, 0, 0)}};
  EXPECT_TRUE(compare_learning(ok, TrendKind::kEgalitarian).passed);
  ok[2].report = synthetic(500, 1000, 0, 0);
  TrendSummary bad = compare_learning(ok, TrendKind::kEgalitarian);
  EXPECT_FALSE(bad.passed);
  EXPECT_EQ(bad.failures.size(), 1u);
}

TEST(CompareLearning, MeanAgentMetric) {
  std::vector<LearningPoint> pts{{5, "cycle", "m", 0.99, synthetic(0, 1000, 0.68, 0.01)},
                                 {20, "cycle", "m", 0.99, synthetic(0, 1000, 0.78, 0.01)}};
  TrendSummary s = compare_learning(pts, TrendKind::kEgalitarian, 0, 2.326, LearningMetric::kMeanAgent);
  EXPECT_TRUE(s.passed);
  EXPECT_NEAR(s.rows[1].learning, 0.78, 1e-15);
  EXPECT_NEAR(s.rows[1].ci.high, 0.78 + 1.96 * 0.01, 1e-15);
}

TEST(CompareLearning, RoyalFloorCheckAndWarnings) {
  std::vector<LearningPoint> one{{10, "royal", "m", 0.99, synthetic(900, 1000, 0, 0)}};
  TrendSummary s = compare_learning(one, TrendKind::kRoyalFamily, 0.05);
  EXPECT_TRUE(s.passed);
  EXPECT_FALSE(s.warning.empty());
  EXPECT_FALSE(compare_learning(one, TrendKind::kRoyalFamily, 0.2).passed);
  std::vector<LearningPoint> mixed{{10, "royal", "m", 0.99, synthetic(900, 1000, 0, 0)},
                                   {10, "cycle", "m", 0.99, synthetic(900, 1000, 0, 0)}};
  EXPECT_THROW(compare_learning(mixed, TrendKind::kRoyalFamily), InvalidInput);
}

}  // namespace
}  // namespace sociallearn
