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

#ifndef SOCIALLEARN_DYNAMICS_HPP_
#define SOCIALLEARN_DYNAMICS_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sociallearn/belief.hpp"
#include "sociallearn/errors.hpp"
#include "sociallearn/exact_engine.hpp"
#include "sociallearn/graph.hpp"
#include "sociallearn/history.hpp"
#include "sociallearn/cycle_engine.hpp"
#include "sociallearn/local_engine.hpp"
#include "sociallearn/mad_king_engine.hpp"
#include "sociallearn/policy.hpp"
#include "sociallearn/rng.hpp"
#include "sociallearn/signal_model.hpp"
#include "sociallearn/stats.hpp"
#include "sociallearn/strategy.hpp"

namespace sociallearn {

// monte-carlo is accepted as a name for the local engine.
enum class EngineMode { kAuto, kExact, kSufficientStatistic, kCycle, kLocal };

inline const char* to_string(EngineMode e) {
  switch (e) {
    case EngineMode::kAuto: return "auto";
    case EngineMode::kExact: return "exact";
    case EngineMode::kSufficientStatistic: return "sufficient-statistic";
    case EngineMode::kCycle: return "cycle";
    case EngineMode::kLocal: return "local";
  }
  return "auto";
}

inline EngineMode parse_engine_mode(const std::string& s) {
  if (s == "auto") return EngineMode::kAuto;
  if (s == "exact") return EngineMode::kExact;
  if (s == "sufficient-statistic") return EngineMode::kSufficientStatistic;
  if (s == "cycle") return EngineMode::kCycle;
  if (s == "local" || s == "monte-carlo") return EngineMode::kLocal;
  throw InvalidInput("unknown engine '" + s + "' (auto | exact | sufficient-statistic | cycle | local)");
}

struct SimConfig {
  int horizon = 30;
  std::uint64_t replicates = 1000;
  double discount = 0.99;
  int tail_window = 5;
  std::uint64_t seed = 1;
  EngineMode engine = EngineMode::kAuto;
  std::uint64_t budget = 10'000'000;
  std::uint64_t ball_budget = std::uint64_t{1} << 20;
  int workers = 0;  // 0: one per hardware thread

  void validate() const {
    require(horizon >= 1 && horizon <= 64, "horizon must lie in [1, 64]");
    require(replicates >= 1, "replicates must be positive");
    require(discount > 0 && discount < 1, "discount must lie in (0,1)");
    require(tail_window >= 1 && tail_window <= horizon, "tail window must lie in [1, horizon]");
    require(workers >= 0, "workers must be nonnegative");
  }
  int worker_count() const {
    if (workers > 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

inline std::unique_ptr<Policy> make_policy(const DirectedGraph& g, const SignalModel& m,
                                           const StrategyProfile& profile, const SimConfig& cfg) {
  cfg.validate();
  auto counting_ok = profile.kind == ProfileKind::kMadKing && profile.mad_king &&
                     !profile.overlaid && m.size() == 2 && profile.tie_break != TieBreak::kJitter;
  EngineMode mode = cfg.engine;
  if (mode == EngineMode::kAuto) {
    const int types = m.size() * jitter_levels(profile.tie_break);
    if (counting_ok) mode = EngineMode::kSufficientStatistic;
    else if (assignment_count(types, g.size(), cfg.budget)) mode = EngineMode::kExact;
    else if (profile.purely_myopic && cycle_order(g)) mode = EngineMode::kCycle;
    else if (profile.purely_myopic) mode = EngineMode::kLocal;
    else
      throw BudgetExceeded("no engine fits: " + std::to_string(types) + "^" +
                           std::to_string(g.size()) + " assignments exceed the budget and the "
                           "profile is neither myopic nor an unmodified mad_king profile");
  }
  switch (mode) {
    case EngineMode::kExact: {
      ExactOptions opt;
      opt.budget = cfg.budget;
      return std::make_unique<ExactSolution>(ExactSolution::solve(g, m, profile, cfg.horizon, opt));
    }
    case EngineMode::kSufficientStatistic:
      return std::make_unique<MadKingSolution>(MadKingSolution::solve(g, m, profile, cfg.horizon));
    case EngineMode::kCycle:
      return std::make_unique<CycleSolution>(CycleSolution::solve(g, m, profile, cfg.horizon));
    case EngineMode::kLocal: {
      LocalOptions opt;
      opt.ball_budget = cfg.ball_budget;
      return std::make_unique<LocalSolution>(LocalSolution::solve(g, m, profile, cfg.horizon, opt));
    }
    case EngineMode::kAuto: break;
  }
  throw std::logic_error("unreachable engine mode");
}

// Fixed parts of a replicate: the state and/or chosen agents' atoms.
struct SignalInjection {
  std::optional<State> state;
  std::vector<std::pair<AgentId, int>> atoms;
};

struct Trace {
  State state = 0;
  std::vector<Signal> signals;
  std::vector<int> types;
  ActionMatrix actions;
  std::vector<TieEvent> ties;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

inline Trace run_trace(const Policy& policy, const SignalModel& m, const SimConfig& cfg,
                       std::uint64_t replicate, const SignalInjection* inject = nullptr) {
  require(policy.rounds() == cfg.horizon, "policy horizon differs from the configured horizon");
  require(policy.types_per_agent() == m.size() * jitter_levels(policy.tie_break()),
          "policy and signal model disagree on types");
  Trace tr;
  tr.replicate = replicate;
  tr.seed = derive_seed(cfg.seed, replicate);
  Rng rng(tr.seed);
  tr.state = rng.bernoulli(0.5) ? 1 : 0;
  if (inject && inject->state) {
    require(*inject->state == 0 || *inject->state == 1, "injected state must be 0 or 1");
    tr.state = *inject->state;
  }
  tr.signals.reserve(policy.agents());
  for (AgentId i = 0; i < policy.agents(); ++i) tr.signals.push_back(m.sample(tr.state, rng));
  if (inject)
    for (auto [agent, atom] : inject->atoms) {
      require(agent >= 0 && agent < policy.agents(), "injected agent out of range");
      require(atom >= 0 && atom < m.size(), "injected atom out of range");
      tr.signals[agent].atom = atom;
    }
  for (const Signal& s : tr.signals) tr.types.push_back(encode_type(s, m, policy.tie_break()));
  tr.actions = policy.play(tr.types, &tr.ties);
  return tr;
}

// Per agent, bit a is set when action a occurs in the last W rounds.
inline std::vector<std::uint8_t> tail_action_set(const Trace& trace, int window) {
  const int T = trace.actions.rounds();
  require(window >= 1 && window <= T, "tail window must lie in [1, horizon]");
  std::vector<std::uint8_t> sets(trace.actions.agents(), 0);
  for (AgentId i = 0; i < trace.actions.agents(); ++i)
    for (int t = T - window; t < T; ++t) sets[i] |= static_cast<std::uint8_t>(1u << trace.actions.at(i, t));
  return sets;
}

struct UtilityResult {
  std::vector<double> utility;  // (1 - lambda) sum_{t<T} lambda^t 1{A = S}
  double remainder = 0;         // lambda^T bounds the truncated tail
};

inline UtilityResult discounted_utility(const Trace& trace, double lambda) {
  require(lambda > 0 && lambda < 1, "discount must lie in (0,1)");
  UtilityResult r;
  const int T = trace.actions.rounds();
  r.utility.assign(trace.actions.agents(), 0);
  for (AgentId i = 0; i < trace.actions.agents(); ++i) {
    double w = 1 - lambda;
    for (int t = 0; t < T; ++t, w *= lambda)
      if (trace.actions.at(i, t) == trace.state) r.utility[i] += w;
  }
  r.remainder = std::pow(lambda, T);
  return r;
}

struct EnsembleReport {
  std::string engine;
  int agents = 0;
  int horizon = 0;
  int tail_window = 0;
  double discount = 0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;

  std::vector<std::uint64_t> learned;  // per agent: tail set == {S}
  std::vector<double> learning;
  std::vector<Interval> learning_ci;
  std::uint64_t all_learned = 0;
  double all_learning = 0;
  Interval all_learning_ci;
  std::uint64_t agreed = 0;  // all tail sets equal
  double agreement = 0;
  Interval agreement_ci;
  double mean_learning = 0;  // average over agents, with replicate-level SE
  double mean_learning_se = 0;
  std::vector<double> utility;
  double utility_remainder = 0;
  std::uint64_t tie_events = 0;
  double tie_rate = 0;  // per agent-round
  std::uint64_t replicates_with_ties = 0;
  std::uint64_t state_one = 0;

  double non_learning() const { return 1 - all_learning; }
  double all_learning_se() const { return proportion_se(all_learned, replicates); }
};

namespace detail {

struct EnsemblePart {
  std::vector<std::uint64_t> learned;
  std::vector<double> utility;
  std::uint64_t all_learned = 0, agreed = 0, tie_events = 0, with_ties = 0, state_one = 0;
  double frac = 0, frac_sq = 0;

  explicit EnsemblePart(int n) : learned(n, 0), utility(n, 0) {}

  void add(const Trace& tr, const SimConfig& cfg) {
    const int n = tr.actions.agents();
    auto sets = tail_action_set(tr, cfg.tail_window);
    auto util = discounted_utility(tr, cfg.discount);
    const std::uint8_t truth = static_cast<std::uint8_t>(1u << tr.state);
    int count = 0;
    bool agree = true;
    for (AgentId i = 0; i < n; ++i) {
      if (sets[i] == truth) {
        ++learned[i];
        ++count;
      }
      agree = agree && sets[i] == sets[0];
      utility[i] += util.utility[i];
    }
    all_learned += count == n;
    agreed += agree;
    const double f = static_cast<double>(count) / n;
    frac += f;
    frac_sq += f * f;
    tie_events += tr.ties.size();
    with_ties += !tr.ties.empty();
    state_one += tr.state == 1;
  }

  void merge(const EnsemblePart& o) {
    for (std::size_t i = 0; i < learned.size(); ++i) {
      learned[i] += o.learned[i];
      utility[i] += o.utility[i];
    }
    all_learned += o.all_learned;
    agreed += o.agreed;
    tie_events += o.tie_events;
    with_ties += o.with_ties;
    state_one += o.state_one;
    frac += o.frac;
    frac_sq += o.frac_sq;
  }
};

}  // namespace detail

// Replicates are cut into fixed blocks and merged in block order, so every
// number is independent of the worker count.
inline EnsembleReport run_ensemble(const Policy& policy, const SignalModel& m, const SimConfig& cfg,
                                   const SignalInjection* inject = nullptr) {
  cfg.validate();
  constexpr std::uint64_t kBlock = 512;
  const int n = policy.agents();
  const std::uint64_t blocks = (cfg.replicates + kBlock - 1) / kBlock;
  std::vector<detail::EnsemblePart> parts(blocks, detail::EnsemblePart(n));
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t b = next++; b < blocks; b = next++) {
      const std::uint64_t end = std::min(cfg.replicates, (b + 1) * kBlock);
      for (std::uint64_t r = b * kBlock; r < end; ++r) parts[b].add(run_trace(policy, m, cfg, r, inject), cfg);
    }
  };
  const int workers = static_cast<int>(std::min<std::uint64_t>(cfg.worker_count(), blocks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  detail::EnsemblePart total(n);
  for (const auto& p : parts) total.merge(p);

  EnsembleReport rep;
  rep.engine = policy.engine_name();
  rep.agents = n;
  rep.horizon = cfg.horizon;
  rep.tail_window = cfg.tail_window;
  rep.discount = cfg.discount;
  rep.replicates = cfg.replicates;
  rep.seed = cfg.seed;
  const double N = static_cast<double>(cfg.replicates);
  rep.learned = total.learned;
  for (AgentId i = 0; i < n; ++i) {
    rep.learning.push_back(total.learned[i] / N);
    rep.learning_ci.push_back(wilson_interval(total.learned[i], cfg.replicates));
    rep.utility.push_back(total.utility[i] / N);
  }
  rep.all_learned = total.all_learned;
  rep.all_learning = total.all_learned / N;
  rep.all_learning_ci = wilson_interval(total.all_learned, cfg.replicates);
  rep.agreed = total.agreed;
  rep.agreement = total.agreed / N;
  rep.agreement_ci = wilson_interval(total.agreed, cfg.replicates);
  rep.mean_learning = total.frac / N;
  const double var = std::max(0.0, total.frac_sq / N - rep.mean_learning * rep.mean_learning);
  rep.mean_learning_se = cfg.replicates > 1 ? std::sqrt(var * N / (N - 1) / N) : 0.0;
  rep.utility_remainder = std::pow(cfg.discount, cfg.horizon);
  rep.tie_events = total.tie_events;
  rep.tie_rate = total.tie_events / (N * n * cfg.horizon);
  rep.replicates_with_ties = total.with_ties;
  rep.state_one = total.state_one;
  return rep;
}

struct CouplingResult {
  bool passed = false;
  int rounds = 0;                    // rounds compared: 0..r
  std::optional<int> first_mismatch;
};

// Couples the signals of B_{r+1}(g1,i1) and B_{r+1}(g2,i2) through a ball
// isomorphism and compares the roots' actions through round r.
inline CouplingResult locality_coupling_test(const DirectedGraph& g1, AgentId i1, const Policy& p1,
                                             const DirectedGraph& g2, AgentId i2, const Policy& p2,
                                             const SignalModel& m, int r, std::uint64_t seed) {
  require(r >= 0, "coupling radius must be nonnegative");
  require(p1.agents() == g1.size() && p2.agents() == g2.size(), "policies do not match the graphs");
  require(p1.rounds() > r && p2.rounds() > r, "policies must cover rounds 0..r");
  require(p1.tie_break() == p2.tie_break(), "coupled profiles must break ties alike");
  RootedBall b1 = extract_ball(g1, i1, r + 1);
  RootedBall b2 = extract_ball(g2, i2, r + 1);
  auto h = balls_isomorphic(b1, b2);
  if (!h) throw InvalidInput("locality coupling needs isomorphic radius-" + std::to_string(r + 1) + " balls");

  Rng rng(seed);
  const State s = rng.bernoulli(0.5) ? 1 : 0;
  std::vector<Signal> sig1, sig2;
  for (AgentId v = 0; v < g1.size(); ++v) sig1.push_back(m.sample(s, rng));
  for (AgentId v = 0; v < g2.size(); ++v) sig2.push_back(m.sample(s, rng));
  for (int k = 0; k < b1.size(); ++k) sig2[b2.original[(*h)[k]]] = sig1[b1.original[k]];
  std::vector<int> t1, t2;
  for (const Signal& x : sig1) t1.push_back(encode_type(x, m, p1.tie_break()));
  for (const Signal& x : sig2) t2.push_back(encode_type(x, m, p2.tie_break()));
  ActionMatrix a1 = p1.play(t1);
  ActionMatrix a2 = p2.play(t2);

  CouplingResult res;
  res.rounds = r + 1;
  for (int t = 0; t <= r && !res.first_mismatch; ++t)
    if (a1.at(i1, t) != a2.at(i2, t)) res.first_mismatch = t;
  res.passed = !res.first_mismatch;
  return res;
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_DYNAMICS_HPP_
