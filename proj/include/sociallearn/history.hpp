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

#ifndef SOCIALLEARN_HISTORY_HPP_
#define SOCIALLEARN_HISTORY_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "sociallearn/errors.hpp"
#include "sociallearn/graph.hpp"

namespace sociallearn {

using Action = std::uint8_t;  // 0 or 1

// Anything that can answer "what did agent j do in round r".
class ActionSource {
 public:
  virtual ~ActionSource() = default;
  virtual Action at(AgentId agent, int round) const = 0;
};

// Agents x rounds, row-major.
class ActionMatrix final : public ActionSource {
 public:
  ActionMatrix() = default;
  ActionMatrix(int agents, int rounds)
      : agents_(agents), rounds_(rounds),
        data_(static_cast<std::size_t>(agents) * static_cast<std::size_t>(rounds), 0) {}

  int agents() const { return agents_; }
  int rounds() const { return rounds_; }

  Action at(AgentId agent, int round) const override { return data_[index(agent, round)]; }
  void set(AgentId agent, int round, Action a) { data_[index(agent, round)] = a; }

  std::span<const Action> row(AgentId agent) const {
    return {data_.data() + static_cast<std::size_t>(agent) * rounds_,
            static_cast<std::size_t>(rounds_)};
  }

  friend bool operator==(const ActionMatrix& a, const ActionMatrix& b) {
    return a.agents_ == b.agents_ && a.rounds_ == b.rounds_ && a.data_ == b.data_;
  }

 private:
  std::size_t index(AgentId agent, int round) const {
    return static_cast<std::size_t>(agent) * static_cast<std::size_t>(rounds_) +
           static_cast<std::size_t>(round);
  }

  int agents_ = 0;
  int rounds_ = 0;
  std::vector<Action> data_;
};

// What agent i has seen before round t: its own signal and the actions of its
// self-inclusive neighborhood over rounds [0, t). Rows follow the sorted
// neighborhood order. Non-owning: the source must outlive the view.
class HistoryView {
 public:
  HistoryView(AgentId agent, int t, int atom, std::span<const AgentId> rows,
              const ActionSource& source, bool jitter_high = false)
      : agent_(agent), t_(t), atom_(atom), jitter_high_(jitter_high), rows_(rows),
        source_(&source) {
    require(t >= 0, "history time must be nonnegative");
  }

  AgentId agent() const { return agent_; }
  int t() const { return t_; }
  int atom() const { return atom_; }
  bool jitter_high() const { return jitter_high_; }
  std::span<const AgentId> rows() const { return rows_; }
  int width() const { return static_cast<int>(rows_.size()); }

  Action action(int row, int round) const { return source_->at(rows_[row], round); }
  // By agent id; the agent must be in the neighborhood.
  Action action_of(AgentId agent, int round) const { return source_->at(agent, round); }

  // Row bitmask of the actions observed in one round.
  std::uint64_t column_mask(int round) const {
    std::uint64_t mask = 0;
    for (int k = 0; k < width(); ++k)
      if (action(k, round)) mask |= std::uint64_t{1} << k;
    return mask;
  }

 private:
  AgentId agent_;
  int t_;
  int atom_;
  bool jitter_high_;
  std::span<const AgentId> rows_;
  const ActionSource* source_;
};

}  // namespace sociallearn

#endif  // SOCIALLEARN_HISTORY_HPP_
