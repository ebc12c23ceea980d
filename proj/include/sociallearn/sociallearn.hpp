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

#ifndef SOCIALLEARN_SOCIALLEARN_HPP_
#define SOCIALLEARN_SOCIALLEARN_HPP_

#include "sociallearn/belief.hpp"
#include "sociallearn/cycle_engine.hpp"
#include "sociallearn/dynamics.hpp"
#include "sociallearn/errors.hpp"
#include "sociallearn/exact_engine.hpp"
#include "sociallearn/graph.hpp"
#include "sociallearn/history.hpp"
#include "sociallearn/local_engine.hpp"
#include "sociallearn/mad_king_engine.hpp"
#include "sociallearn/monte_carlo.hpp"
#include "sociallearn/policy.hpp"
#include "sociallearn/rng.hpp"
#include "sociallearn/signal_model.hpp"
#include "sociallearn/stats.hpp"
#include "sociallearn/strategy.hpp"
#include "sociallearn/trend.hpp"
#include "sociallearn/version.hpp"

#endif  // SOCIALLEARN_SOCIALLEARN_HPP_
