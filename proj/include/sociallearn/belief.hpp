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

#ifndef SOCIALLEARN_BELIEF_HPP_
#define SOCIALLEARN_BELIEF_HPP_

#include <cmath>
#include <cstddef>
#include <limits>

#include "sociallearn/history.hpp"
#include "sociallearn/signal_model.hpp"

namespace sociallearn {

// |log odds| at or below this counts as an exact 1/2 posterior. Masses are
// float sums whose order differs between the two states, so exact equality
// is too strict.
inline constexpr double kTieTolerance = 1e-9;

enum class TieBreak { kZero, kOne, kJitter };

struct BeliefState {
  double posterior = 0.5;  // P(S = 1 | F^i_t)
  double log_odds = 0.0;   // Z^i_t
  int t = 0;

  static BeliefState from_log_odds(double z, int t = 0) { return {logistic(z), z, t}; }
  static BeliefState from_posterior(double p, int t = 0) {
    if (p <= 0) return {0.0, -std::numeric_limits<double>::infinity(), t};
    if (p >= 1) return {1.0, std::numeric_limits<double>::infinity(), t};
    return {p, std::log(p / (1 - p)), t};
  }
  bool is_tie() const { return std::abs(log_odds) <= kTieTolerance; }
};

struct Decision {
  Action action = 0;
  bool tie = false;
};

struct TieCounter {
  std::size_t ties = 0;
};

// MAP action; exact 1/2 is resolved by the tie-breaker and flagged.
inline Decision best_response(const BeliefState& belief, TieBreak tie_break,
                              bool jitter_high = false) {
  if (!belief.is_tie()) return {static_cast<Action>(belief.log_odds > 0 ? 1 : 0), false};
  switch (tie_break) {
    case TieBreak::kZero: return {0, true};
    case TieBreak::kOne: return {1, true};
    case TieBreak::kJitter: return {static_cast<Action>(jitter_high ? 1 : 0), true};
  }
  return {0, true};
}

inline Decision best_response(const BeliefState& belief, TieBreak tie_break,
                              TieCounter& counter, bool jitter_high = false) {
  Decision d = best_response(belief, tie_break, jitter_high);
  if (d.tie) ++counter.ties;
  return d;
}

inline const char* to_string(TieBreak t) {
  switch (t) {
    case TieBreak::kZero: return "zero";
    case TieBreak::kOne: return "one";
    case TieBreak::kJitter: return "jitter";
  }
  return "zero";
}

inline TieBreak parse_tie_break(const std::string& s) {
  if (s == "zero" || s == "0") return TieBreak::kZero;
  if (s == "one" || s == "1") return TieBreak::kOne;
  if (s == "jitter") return TieBreak::kJitter;
  throw InvalidInput("unknown tie breaker '" + s + "' (zero | one | jitter)");
}

// Private types seen by the engines: atom index, times two when ties are
// broken by the jitter so its upper/lower half becomes part of the type.
inline int jitter_levels(TieBreak t) { return t == TieBreak::kJitter ? 2 : 1; }

inline bool jitter_high(const Signal& sig, const SignalModel& m) {
  return sig.jitter >= 0.5 * m.jitter_width();
}

inline int encode_type(const Signal& sig, const SignalModel& m, TieBreak t) {
  return t == TieBreak::kJitter ? sig.atom * 2 + (jitter_high(sig, m) ? 1 : 0) : sig.atom;
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_BELIEF_HPP_
