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

#ifndef SOCIALLEARN_SIGNAL_MODEL_HPP_
#define SOCIALLEARN_SIGNAL_MODEL_HPP_

// Private-signal distributions given the state S. Signals take finitely many
// values ("atoms"), each carrying a log-likelihood ratio z = ln(p1/p0), so all
// Bayesian computations are exact sums. A uniform jitter drawn alongside each
// signal is independent of everything and only ever used to break exact ties.

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sociallearn/errors.hpp"
#include "sociallearn/rng.hpp"

namespace sociallearn {

using State = int;  // 0 or 1

struct Atom {
  double z = 0.0;   // ln(p1 / p0)
  double p0 = 0.0;  // mass under S = 0
  double p1 = 0.0;  // mass under S = 1

  double mass(State s) const { return s == 1 ? p1 : p0; }

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Signal {
  int atom = 0;
  double jitter = 0.0;  // uniform on [0, jitter_width)
};

struct PrivateBelief {
  double value = 0.5;  // P(S = 1 | signal)
};

inline double logistic(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

class SignalModel {
 public:
  static constexpr double kTolerance = 1e-12;

  SignalModel(std::vector<Atom> atoms, double jitter_width)
      : atoms_(std::move(atoms)), jitter_width_(jitter_width) {
    validate();
  }

  // Builds atoms from the two mass vectors, deriving z.
  static SignalModel from_masses(const std::vector<double>& p0,
                                 const std::vector<double>& p1, double jitter_width = 1.0) {
    require(p0.size() == p1.size(), "mass vectors differ in length");
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < p0.size(); ++k) {
      require(p0[k] > 0 && p1[k] > 0,
              "atom " + std::to_string(k) +
                  " violates mutual absolute continuity (both masses must be positive)");
      atoms.push_back({std::log(p1[k] / p0[k]), p0[k], p1[k]});
    }
    return SignalModel(std::move(atoms), jitter_width);
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(int k) const { return atoms_.at(k); }
  int size() const { return static_cast<int>(atoms_.size()); }
  double jitter_width() const { return jitter_width_; }

  double max_abs_z() const {
    double m = 0;
    for (const auto& a : atoms_) m = std::max(m, std::abs(a.z));
    return m;
  }

  // Unconditional atom probability under the uniform prior on S.
  double marginal(int k) const { return 0.5 * atoms_.at(k).p0 + 0.5 * atoms_.at(k).p1; }

  double total_variation() const {
    double sum = 0;
    for (const auto& a : atoms_) sum += std::abs(a.p1 - a.p0);
    return 0.5 * sum;
  }

  // Success probability of the single-signal MAP estimate.
  double p_star() const {
    double tv = total_variation();
    require(tv > kTolerance, "signal measures are identical; p* is undefined");
    return 0.5 + 0.5 * tv;
  }

  Signal sample(State s, Rng& rng) const {
    double u = rng.uniform();
    double jitter = rng.uniform() * jitter_width_;
    double acc = 0;
    for (int k = 0; k < size(); ++k) {
      acc += atoms_[k].mass(s);
      if (u < acc) return {k, jitter};
    }
    return {size() - 1, jitter};
  }

  PrivateBelief private_belief(const Signal& sig) const {
    return {logistic(atoms_.at(sig.atom).z)};
  }

  // Triples printed with 12 significant digits.
  std::string to_string() const {
    std::ostringstream out;
    out << std::setprecision(12);
    for (std::size_t k = 0; k < atoms_.size(); ++k)
      out << (k ? "; " : "") << atoms_[k].z << ' ' << atoms_[k].p0 << ' ' << atoms_[k].p1;
    return out.str();
  }

  friend bool operator==(const SignalModel&, const SignalModel&) = default;

 private:
  void validate() const {
    require(!atoms_.empty(), "signal model needs at least one atom");
    require(jitter_width_ >= 0 && std::isfinite(jitter_width_), "jitter width must be >= 0");
    double s0 = 0, s1 = 0;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      const Atom& a = atoms_[k];
      require((a.p0 > 0) == (a.p1 > 0) && a.p0 >= 0 && a.p1 >= 0,
              "atom " + std::to_string(k) + " violates mutual absolute continuity");
      require(a.p0 > 0, "atom " + std::to_string(k) + " has zero mass");
      require(std::abs(a.z - std::log(a.p1 / a.p0)) <= kTolerance,
              "atom " + std::to_string(k) + " has z inconsistent with ln(p1/p0)");
      for (std::size_t j = 0; j < k; ++j)
        require(atoms_[j].z != a.z, "atoms must have distinct log-likelihood ratios");
      s0 += a.p0;
      s1 += a.p1;
    }
    require(std::abs(s0 - 1) <= kTolerance && std::abs(s1 - 1) <= kTolerance,
            "atom masses must sum to 1 under each state");
  }

  std::vector<Atom> atoms_;
  double jitter_width_ = 1.0;
};

// Two atoms at log-likelihood ratios z_pos > 0 > z_neg, solving
// p1 = e^z p0 with both rows normalized. Atom 0 favours state 1.
inline SignalModel two_point_model(double z_pos, double z_neg, double jitter_width = 1.0) {
  require(z_pos > 0 && z_neg < 0,
          "two-point model needs one positive and one negative log-likelihood ratio");
  double p0_pos = (1 - std::exp(z_neg)) / (std::exp(z_pos) - std::exp(z_neg));
  double p0_neg = 1 - p0_pos;
  double p1_pos = std::exp(z_pos) * p0_pos;
  double p1_neg = 1 - p1_pos;
  return SignalModel({{std::log(p1_pos / p0_pos), p0_pos, p1_pos},
                      {std::log(p1_neg / p0_neg), p0_neg, p1_neg}},
                     jitter_width);
}

// Correct with probability q: atom 0 has z = ln(q/(1-q)), atom 1 the mirror.
inline SignalModel symmetric_binary(double q, double jitter_width = 1.0) {
  require(q > 0 && q < 1 && q != 0.5, "symmetric_binary needs q in (0,1), q != 1/2");
  return SignalModel::from_masses({1 - q, q}, {q, 1 - q}, jitter_width);
}

inline SignalModel royal_bounded(double z_pos = 1.5, double z_neg = -1.5,
                                 double jitter_width = 1.0) {
  return two_point_model(z_pos, z_neg, jitter_width);
}

// Atoms at 1 and -sqrt(7); a positive epsilon moves them to the midpoints of
// (1, 1+eps) and (-sqrt 7, -sqrt 7 + eps).
inline SignalModel mad_king_asym(double epsilon = 0.0, double jitter_width = 1.0) {
  require(epsilon >= 0, "epsilon must be nonnegative");
  return two_point_model(1 + epsilon / 2, -std::sqrt(7.0) + epsilon / 2, jitter_width);
}

// Named constructor used by configs: symmetric_binary(q), royal_bounded(zp,zn),
// mad_king_asym(eps).
inline SignalModel builtin_family(const std::string& name, const std::vector<double>& params,
                                  double jitter_width = 1.0) {
  if (name == "symmetric_binary") {
    require(params.size() == 1, "symmetric_binary takes (q)");
    return symmetric_binary(params[0], jitter_width);
  }
  if (name == "royal_bounded") {
    require(params.size() <= 2, "royal_bounded takes (z_pos, z_neg)");
    return royal_bounded(params.size() > 0 ? params[0] : 1.5,
                         params.size() > 1 ? params[1] : -1.5, jitter_width);
  }
  if (name == "mad_king_asym") {
    require(params.size() <= 1, "mad_king_asym takes (epsilon)");
    return mad_king_asym(params.empty() ? 0.0 : params[0], jitter_width);
  }
  throw InvalidInput("unknown signal family '" + name + "'");
}

}  // namespace sociallearn

#endif  // SOCIALLEARN_SIGNAL_MODEL_HPP_
