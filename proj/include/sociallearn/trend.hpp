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

#ifndef SOCIALLEARN_TREND_HPP_
#define SOCIALLEARN_TREND_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sociallearn/dynamics.hpp"
#include "sociallearn/errors.hpp"
#include "sociallearn/signal_model.hpp"
#include "sociallearn/stats.hpp"

namespace sociallearn {

// One ensemble in a size sweep. `family` and `model` are compared verbatim.
struct LearningPoint {
  int n = 0;
  std::string family;
  std::string model;
  double discount = 0;
  EnsembleReport report;
};

enum class TrendKind { kEgalitarian, kRoyalFamily };

// Which learning frequency a trend reads: every agent learns in the same
// replicate, or the fraction of learning agents averaged over replicates.
enum class LearningMetric { kAllAgents, kMeanAgent };

struct TrendRow {
  int n = 0;
  double learning = 0;
  double se = 0;
  Interval ci;
};

struct TrendSummary {
  std::vector<TrendRow> rows;
  bool passed = true;
  std::string warning;
  std::vector<std::string> failures;
};

// P(every royal favours 1, S = 0): half the probability that R i.i.d.
// signals under S=0 all carry positive log-likelihood ratio.
inline double royal_floor(const SignalModel& m, int royals) {
  require(royals >= 1, "royal family needs at least one royal");
  double plus = 0;
  for (const Atom& a : m.atoms())
    if (a.z > 0) plus += a.p0;
  return 0.5 * std::pow(plus, royals);
}

// Egalitarian: learning is nondecreasing in n, each step allowed to dip by
// z * combined SE (one-sided). Royal family: non-learning stays above
// `floor` - 3 SE at every n.
inline TrendSummary compare_learning(const std::vector<LearningPoint>& points, TrendKind kind,
                                     double floor = 0, double z = 2.326,
                                     LearningMetric metric = LearningMetric::kAllAgents) {
  require(!points.empty(), "compare_learning needs at least one report");
  for (const auto& p : points)
    require(p.family == points.front().family && p.model == points.front().model &&
                p.discount == points.front().discount,
            "compare_learning needs reports sharing the family, signal model and discount");
  TrendSummary out;
  for (const auto& p : points) {
    const EnsembleReport& r = p.report;
    if (metric == LearningMetric::kAllAgents) {
      out.rows.push_back({p.n, r.all_learning, r.all_learning_se(), r.all_learning_ci});
    } else {
      const double half = 1.96 * r.mean_learning_se;
      out.rows.push_back({p.n, r.mean_learning, r.mean_learning_se,
                          {std::max(0.0, r.mean_learning - half), std::min(1.0, r.mean_learning + half)}});
    }
  }
  if (points.size() == 1) out.warning = "single report: no trend to compare";

  if (kind == TrendKind::kEgalitarian) {
    for (std::size_t k = 1; k < out.rows.size(); ++k) {
      const TrendRow& a = out.rows[k - 1];
      const TrendRow& b = out.rows[k];
      const double slack = z * std::sqrt(a.se * a.se + b.se * b.se);
      if (b.learning - a.learning < -slack) {
        out.passed = false;
        out.failures.push_back("learning drops from n=" + std::to_string(a.n) + " to n=" +
                               std::to_string(b.n) + " beyond the one-sided bound");
      }
    }
  } else {
    for (const TrendRow& row : out.rows) {
      if (1 - row.learning < floor - 3 * row.se) {
        out.passed = false;
        out.failures.push_back("non-learning at n=" + std::to_string(row.n) +
                               " falls below the royal floor");
      }
    }
  }
  return out;
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_TREND_HPP_
