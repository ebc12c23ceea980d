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

#ifndef SOCIALLEARN_STATS_HPP_
#define SOCIALLEARN_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sociallearn/errors.hpp"
#include "sociallearn/history.hpp"
#include "sociallearn/signal_model.hpp"

namespace sociallearn {

struct Interval {
  double low = 0;
  double high = 1;
  bool contains(double x) const { return low <= x && x <= high; }
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96) {
  require(trials > 0, "wilson_interval needs at least one trial");
  require(successes <= trials, "more successes than trials");
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Standard error of a proportion, floored at the Wilson width for p in {0,1}.
inline double proportion_se(std::uint64_t successes, std::uint64_t trials) {
  require(trials > 0, "proportion_se needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  return std::max(std::sqrt(p * (1 - p) / n), 0.5 / n);
}

// k binary estimators observed on N samples, with the realized state.
class EstimatorSample {
 public:
  EstimatorSample(int k, std::vector<Action> outcomes, std::vector<State> states)
      : k_(k), outcomes_(std::move(outcomes)), states_(std::move(states)) {
    require(k >= 1, "need at least one estimator");
    require(!states_.empty(), "need at least one sample");
    require(outcomes_.size() == states_.size() * static_cast<std::size_t>(k),
            "outcome matrix must hold k entries per sample");
    for (Action a : outcomes_) require(a <= 1, "estimator outcomes must be 0 or 1");
    for (State s : states_) require(s == 0 || s == 1, "states must be 0 or 1");
  }

  int k() const { return k_; }
  std::size_t samples() const { return states_.size(); }
  Action at(std::size_t sample, int estimator) const { return outcomes_[sample * k_ + estimator]; }
  State state(std::size_t sample) const { return states_[sample]; }

 private:
  int k_;
  std::vector<Action> outcomes_;
  std::vector<State> states_;
};

struct DependenceReport {
  double dep_s = 0;
  double tv[2] = {0, 0};  // per state
  std::size_t samples[2] = {0, 0};
};

// Max over states of the total variation between the empirical joint law of
// the estimators and the product of its marginals.
inline DependenceReport dep_s_estimate(const EstimatorSample& sample) {
  const int k = sample.k();
  require(k <= 10, "dep_s_estimate supports at most 10 estimators");
  DependenceReport rep;
  for (State s = 0; s <= 1; ++s) {
    std::vector<double> joint(std::size_t{1} << k, 0);
    std::vector<double> marginal(k, 0);
    std::size_t count = 0;
    for (std::size_t n = 0; n < sample.samples(); ++n) {
      if (sample.state(n) != s) continue;
      ++count;
      std::size_t pattern = 0;
      for (int j = 0; j < k; ++j)
        if (sample.at(n, j)) {
          pattern |= std::size_t{1} << j;
          marginal[j] += 1;
        }
      joint[pattern] += 1;
    }
    if (count == 0) throw InvalidInput("dep_s_estimate: no samples with S=" + std::to_string(s));
    rep.samples[s] = count;
    for (double& v : joint) v /= count;
    for (double& v : marginal) v /= count;
    double tv = 0;
    for (std::size_t pattern = 0; pattern < joint.size(); ++pattern) {
      double product = 1;
      for (int j = 0; j < k; ++j) product *= (pattern >> j & 1) ? marginal[j] : 1 - marginal[j];
      tv += std::abs(joint[pattern] - product);
    }
    rep.tv[s] = 0.5 * tv;
  }
  rep.dep_s = std::max(rep.tv[0], rep.tv[1]);
  return rep;
}

struct GoodEstimatorReport {
  std::vector<double> accuracy;
  std::vector<Interval> accuracy_ci;
  bool accuracy_ok = true;
  DependenceReport dependence;
  double dep_margin = 0;  // delta - dep_S
  bool passed = false;
};

// (p, delta)-good: every estimator's Wilson interval reaches p, and dep_S <= delta.
inline GoodEstimatorReport good_estimator_check(const EstimatorSample& sample, double p,
                                                double delta, double z = 1.96) {
  require(p >= 0 && p <= 1, "p must lie in [0,1]");
  require(delta >= 0 && delta <= 1, "delta must lie in [0,1]");
  GoodEstimatorReport rep;
  rep.dependence = dep_s_estimate(sample);
  for (int j = 0; j < sample.k(); ++j) {
    std::uint64_t hits = 0;
    for (std::size_t n = 0; n < sample.samples(); ++n) hits += sample.at(n, j) == sample.state(n);
    rep.accuracy.push_back(static_cast<double>(hits) / sample.samples());
    rep.accuracy_ci.push_back(wilson_interval(hits, sample.samples(), z));
    rep.accuracy_ok = rep.accuracy_ok && rep.accuracy_ci.back().high >= p;
  }
  rep.dep_margin = delta - rep.dependence.dep_s;
  rep.passed = rep.accuracy_ok && rep.dep_margin >= 0;
  return rep;
}

struct MajorityReport {
  std::vector<Action> outcomes;  // aggregate estimate per sample
  double alpha1 = 0;             // empirical E[mean estimate | S=1]
  double accuracy = 0;
  double standard_error = 0;
  double bound = 0;              // 1 - exp(-2 eps^2 k)
  std::optional<double> dep_s;   // when k is small enough to estimate it
};

// Threshold rule 1{mean > alpha1 - eps}.
inline MajorityReport majority_aggregate(const EstimatorSample& sample, double epsilon) {
  require(epsilon > 0 && epsilon <= 0.5, "epsilon must lie in (0, 1/2]");
  const int k = sample.k();
  MajorityReport rep;
  std::vector<double> mean(sample.samples());
  double sum1 = 0;
  std::size_t n1 = 0;
  for (std::size_t n = 0; n < sample.samples(); ++n) {
    int ones = 0;
    for (int j = 0; j < k; ++j) ones += sample.at(n, j);
    mean[n] = static_cast<double>(ones) / k;
    if (sample.state(n) == 1) {
      sum1 += mean[n];
      ++n1;
    }
  }
  if (n1 == 0) throw InvalidInput("majority_aggregate: no samples with S=1");
  rep.alpha1 = sum1 / n1;
  std::uint64_t hits = 0;
  rep.outcomes.resize(sample.samples());
  for (std::size_t n = 0; n < sample.samples(); ++n) {
    rep.outcomes[n] = mean[n] > rep.alpha1 - epsilon;
    hits += rep.outcomes[n] == sample.state(n);
  }
  rep.accuracy = static_cast<double>(hits) / sample.samples();
  rep.standard_error = proportion_se(hits, sample.samples());
  rep.bound = 1 - std::exp(-2 * epsilon * epsilon * k);
  if (k <= 10) rep.dep_s = dep_s_estimate(sample).dep_s;
  return rep;
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_STATS_HPP_
