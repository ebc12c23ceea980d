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

#ifndef SOCIALLEARN_ERRORS_HPP_
#define SOCIALLEARN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sociallearn {

// Malformed parameters, graphs, configs or views. The CLI maps this to exit 2.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// The exact engine would enumerate more joint assignments than allowed.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// A history that no joint signal assignment can produce under the profile.
class InconsistentHistory : public std::runtime_error {
 public:
  explicit InconsistentHistory(const std::string& what)
      : std::runtime_error(what) {}
};

// Every Monte Carlo particle was rejected for one of the states.
class DegenerateEstimate : public std::runtime_error {
 public:
  explicit DegenerateEstimate(const std::string& what)
      : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_ERRORS_HPP_
