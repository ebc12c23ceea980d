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

#ifndef SOCIALLEARN_MONTE_CARLO_HPP_
#define SOCIALLEARN_MONTE_CARLO_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sociallearn/belief.hpp"
#include "sociallearn/errors.hpp"
#include "sociallearn/history.hpp"
#include "sociallearn/policy.hpp"
#include "sociallearn/rng.hpp"
#include "sociallearn/signal_model.hpp"

namespace sociallearn {

struct McEstimate {
  BeliefState belief;
  double standard_error = 0;
  std::uint64_t particles = 0;         // per state
  std::uint64_t consistent[2] = {0, 0};  // particles matching the view, by state
  bool high_variance = false;
};

// Likelihood weighting: for each state draw M assignments of the other
// agents' types, keep the own type of the view, play the policy forward and
// count the particles whose neighborhood history matches the view.
inline McEstimate mc_posterior(const Policy& policy, const SignalModel& m, const HistoryView& view,
                               std::uint64_t particles, Rng& rng) {
  require(particles >= 1, "mc_posterior needs at least one particle");
  require(view.agent() >= 0 && view.agent() < policy.agents(), "view names an unknown agent");
  require(view.t() <= policy.rounds(), "view is beyond the policy horizon");
  require(view.atom() >= 0 && view.atom() < m.size(), "view names an unknown atom");
  const int levels = jitter_levels(policy.tie_break());
  require(policy.types_per_agent() == m.size() * levels, "policy and signal model disagree on types");
  const int own = view.atom() * levels + (levels == 2 && view.jitter_high() ? 1 : 0);

  McEstimate est;
  est.particles = particles;
  std::vector<int> types(policy.agents());
  for (State s = 0; s <= 1; ++s) {
    for (std::uint64_t k = 0; k < particles; ++k) {
      for (AgentId j = 0; j < policy.agents(); ++j) {
        if (j == view.agent()) {
          types[j] = own;
          continue;
        }
        Signal sig = m.sample(s, rng);
        types[j] = levels == 2 ? sig.atom * 2 + (jitter_high(sig, m) ? 1 : 0) : sig.atom;
      }
      ActionMatrix a = policy.play(types);
      bool match = true;
      for (int r = 0; r < view.t() && match; ++r)
        for (int row = 0; row < view.width() && match; ++row)
          match = a.at(view.rows()[row], r) == view.action(row, r);
      if (match) ++est.consistent[s];
    }
  }
  if (est.consistent[0] == 0 && est.consistent[1] == 0)
    throw DegenerateEstimate("mc_posterior: none of the " + std::to_string(2 * particles) +
                             " particles reproduced the observed history");

  const double mf = static_cast<double>(particles);
  double like[2], var[2];
  for (State s = 0; s <= 1; ++s) {
    const double frac = est.consistent[s] / mf;
    const double own_mass = m.atom(view.atom()).mass(s);
    like[s] = frac * own_mass;
    var[s] = own_mass * own_mass * frac * (1 - frac) / mf;
  }
  const double total = like[0] + like[1];
  const double post = like[1] / total;
  const double d1 = like[0] / (total * total);
  const double d0 = -like[1] / (total * total);
  est.standard_error = std::sqrt(d1 * d1 * var[1] + d0 * d0 * var[0]);
  est.belief = BeliefState::from_posterior(post, view.t());
  est.high_variance = particles < 30 || est.consistent[0] < 10 || est.consistent[1] < 10;
  return est;
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_MONTE_CARLO_HPP_
