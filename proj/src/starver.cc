/*
 * Copyright (c) 2026, The dpsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include "dpsim/starver.hh"

#include "dpsim/error.hh"

namespace dpsim {

Gdp1Starver::Gdp1Starver(PhilosopherId p1, PhilosopherId p2, Mode mode, int patience,
                         int setup_limit)
    : p1_(p1), p2_(p2), mode_(mode), patience_(patience), setup_limit_(setup_limit) {
  if (patience < 1) throw ConfigurationError("starver patience must be positive");
  if (p1 == p2) throw ConfigurationError("starver needs two distinct philosophers");
}

std::string Gdp1Starver::name() const {
  return std::string(mode_ == Mode::kAnalogue ? "gdp1-starver-analogue" : "gdp1-starver") + "(" +
         std::to_string(p1_.value()) + "," + std::to_string(p2_.value()) + ")";
}

void Gdp1Starver::Bind(const Configuration& c) {
  const Topology& t = c.topo();
  n_ = c.n();
  if (p1_.index() >= static_cast<std::size_t>(n_) || p2_.index() >= static_cast<std::size_t>(n_)) {
    throw ConfigurationError("starver philosophers out of range for " + t.name());
  }
  std::optional<Side> shared;
  for (Side s : {Side::kLeft, Side::kRight}) {
    ForkId f = t.fork(p1_, s);
    if (!shared && (t.fork(p2_, Side::kLeft) == f || t.fork(p2_, Side::kRight) == f)) shared = s;
  }
  if (!shared) {
    throw StrategyMismatch(name() + ": philosophers " + std::to_string(p1_.value()) + " and " +
                           std::to_string(p2_.value()) + " share no fork");
  }
  f_ = t.fork(p1_, *shared);
  g_ = t.fork(p1_, Other(*shared));
  if (mode_ != Mode::kAnalogue && !UsesLabels(c.algorithm)) {
    throw StrategyMismatch(name() + " needs an nr-labelled algorithm, got " +
                           ToString(c.algorithm));
  }
  if (mode_ == Mode::kFixture && !Precondition(c)) {
    throw StrategyMismatch(name() + ": nr(" + std::to_string(g_.value()) + ") = " +
                           std::to_string(c.fork(g_).label) + " is not above nr(" +
                           std::to_string(f_.value()) + ") = " +
                           std::to_string(c.fork(f_).label));
  }
  armed_ = mode_ != Mode::kSetup;
  bound_ = true;
}

bool Gdp1Starver::Precondition(const Configuration& c) const {
  return c.fork(g_).label > c.fork(f_).label;
}

bool Gdp1Starver::Waiting(const Configuration& c) const {
  const PhilosopherState& s = c.phil(p1_);
  return s.line == c.layout().take_second && c.fork(g_).holder == p1_;
}

// Who to schedule so that P2 gets hold of f: P2 itself, unless it is waiting
// for a fork somebody else holds.
PhilosopherId Gdp1Starver::Helper(const Configuration& c) const {
  const PhilosopherState& s = c.phil(p2_);
  if (s.line == c.layout().take_first && s.committed) {
    auto holder = c.fork(c.topo().fork(p2_, *s.committed)).holder;
    if (holder && *holder != p1_) return *holder;
  }
  return p2_;
}

PhilosopherId Gdp1Starver::RoundRobin(const Configuration&) {
  PhilosopherId p(next_);
  next_ = (next_ + 1) % n_;
  return p;
}

PhilosopherId Gdp1Starver::Next(const History& history) {
  const Configuration& c = history.current();
  if (!bound_) Bind(c);
  if (!armed_) {
    if (Precondition(c)) {
      armed_ = true;
    } else if (history.size() >= static_cast<std::size_t>(setup_limit_)) {
      throw ExperimentAborted(name() + ": nr ordering did not arise within " +
                              std::to_string(setup_limit_) + " steps");
    } else {
      return RoundRobin(c);
    }
  }
  if (!Waiting(c)) {
    wait_ = 0;
    return RoundRobin(c);
  }
  if (c.fork(f_).holder == p2_) {
    wait_ = 0;
    return p1_;
  }
  if (wait_ < patience_) {
    ++wait_;
    return Helper(c);
  }
  wait_ = 0;
  ++concessions_;
  return p1_;
}

std::optional<std::size_t> Gdp1Starver::FairnessWindow(std::size_t) const {
  return static_cast<std::size_t>(n_) * (patience_ + 2);
}

}  // namespace dpsim
