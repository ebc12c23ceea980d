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

#ifndef SOCIALLEARN_POLICY_HPP_
#define SOCIALLEARN_POLICY_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sociallearn/belief.hpp"
#include "sociallearn/history.hpp"

namespace sociallearn {

struct TieEvent {
  AgentId agent = 0;
  int t = 0;
  friend bool operator==(const TieEvent&, const TieEvent&) = default;
};

// A solved profile: maps a joint assignment of private types to the full
// action matrix. Types are encoded by encode_type().
class Policy {
 public:
  virtual ~Policy() = default;

  virtual int agents() const = 0;
  virtual int rounds() const = 0;
  virtual int types_per_agent() const = 0;
  virtual TieBreak tie_break() const = 0;
  virtual std::string engine_name() const = 0;

  virtual ActionMatrix play(std::span<const int> types,
                            std::vector<TieEvent>* ties = nullptr) const = 0;

  // Agents x rounds posteriors, row-major, when the engine tracks them.
  virtual std::optional<std::vector<double>> posteriors(std::span<const int> /*types*/) const {
    return std::nullopt;
  }
};

}  // namespace sociallearn

#endif  // SOCIALLEARN_POLICY_HPP_
