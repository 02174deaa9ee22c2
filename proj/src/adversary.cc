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

#include "dpsim/adversary.hh"

#include <algorithm>
#include <bit>

#include "dpsim/error.hh"

namespace dpsim {

const StepEvent& History::Advance(PhilosopherId p, DrawSource& draws) {
  if (p.value() < 0 || p.value() >= current_.n()) {
    throw std::logic_error("adversary chose philosopher " + std::to_string(p.value()) +
                           " outside [0, " + std::to_string(current_.n()) + ")");
  }
  events_.push_back(StepInPlace(current_, p, draws));
  return events_.back();
}

Configuration History::SnapshotAt(std::size_t steps) const {
  Configuration c = initial_;
  for (std::size_t i = 0; i < steps && i < events_.size(); ++i) ReplayEvent(c, events_[i]);
  return c;
}

PhilosopherId RoundRobinAdversary::Next(const History& history) {
  n_ = history.current().n();
  PhilosopherId p(next_);
  next_ = (next_ + 1) % n_;
  return p;
}

std::optional<std::size_t> RoundRobinAdversary::FairnessWindow(std::size_t) const {
  return static_cast<std::size_t>(n_);
}

PhilosopherId UniformRandomAdversary::Next(const History& history) {
  return PhilosopherId(static_cast<int>(stream_.UniformInt(0, history.current().n() - 1)));
}

std::unique_ptr<Adversary> RoundRobin() { return std::make_unique<RoundRobinAdversary>(); }

std::unique_ptr<Adversary> UniformRandom(std::uint64_t seed) {
  return std::make_unique<UniformRandomAdversary>(seed);
}

StubbornnessBudget::StubbornnessBudget(std::function<int(int)> per_round)
    : per_round_(std::move(per_round)) {
  int prev = per_round_(1);
  if (prev < 1) throw ConfigurationError("stubbornness budget must allow at least one draw");
  for (int k = 2; k <= 64; ++k) {
    int cur = per_round_(k);
    if (cur < prev) throw ConfigurationError("stubbornness budget must be non-decreasing");
    prev = cur;
  }
  if (per_round_(1 << 20) <= per_round_(1)) {
    throw ConfigurationError("stubbornness budget must grow without bound");
  }
}

StubbornnessBudget StubbornnessBudget::UnionBound(int stubborn_points) {
  int s = std::max(stubborn_points, 1);
  int log2s = static_cast<int>(std::bit_width(static_cast<unsigned>(s - 1)));  // ceil(log2 s)
  return StubbornnessBudget([log2s](int k) { return k + log2s + 1; });
}

StubbornnessBudget StubbornnessBudget::Linear(int extra) {
  return StubbornnessBudget([extra](int k) { return k + extra; });
}

std::size_t RoundPairWindow(std::span<const RoundRecord> rounds, std::size_t trace_length) {
  if (rounds.empty()) return trace_length;
  auto end_of = [&](std::size_t i) {
    return rounds[i].end != 0 || i + 1 < rounds.size() ? rounds[i].end : trace_length;
  };
  std::size_t window = std::max(rounds[0].start, end_of(0) - rounds[0].start);
  for (std::size_t i = 0; i + 1 < rounds.size(); ++i) {
    window = std::max(window, end_of(i + 1) - rounds[i].start);
  }
  return std::max<std::size_t>(window, 1);
}

}  // namespace dpsim
