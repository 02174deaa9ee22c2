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

#ifndef DPSIM_ADVERSARY_HH_
#define DPSIM_ADVERSARY_HH_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpsim/protocol.hh"
#include "dpsim/random.hh"

namespace dpsim {

/**
 * Append-only record of a run: the initial configuration, every event, and the
 * current configuration. Earlier snapshots are recovered by replaying events.
 */
class History {
 public:
  explicit History(Configuration initial)
      : initial_(initial), current_(std::move(initial)) {}

  const Configuration& initial() const { return initial_; }
  const Configuration& current() const { return current_; }
  std::span<const StepEvent> events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  // Executes one step of p on the current configuration and records it.
  const StepEvent& Advance(PhilosopherId p, DrawSource& draws);

  // Configuration after the first `steps` events.
  Configuration SnapshotAt(std::size_t steps) const;

 private:
  Configuration initial_;
  Configuration current_;
  std::vector<StepEvent> events_;
};

// Outcome of a random commitment that a strategy is hoping for.
struct DrawWish {
  enum class Kind {
    kForced,    // the script fails unless the draw goes this way
    kStubborn,  // the script retries until it does
    kFree,      // either outcome is usable; `side` is absent
  };
  PhilosopherId philosopher;
  Kind kind = Kind::kFree;
  std::optional<Side> side;
};

class Adversary {
 public:
  virtual ~Adversary() = default;

  // Chooses the philosopher for the next step from the history so far.
  virtual PhilosopherId Next(const History& history) = 0;

  // Draw outcome the strategy wants from the step it has just chosen, if that
  // step draws. Only verification harnesses act on this.
  virtual std::optional<DrawWish> Wish() const { return std::nullopt; }

  // Guaranteed scheduling window, when the strategy can state one.
  virtual std::optional<std::size_t> FairnessWindow(std::size_t /*trace_length*/) const {
    return std::nullopt;
  }

  virtual std::string name() const = 0;
};

class RoundRobinAdversary : public Adversary {
 public:
  PhilosopherId Next(const History& history) override;
  std::optional<std::size_t> FairnessWindow(std::size_t) const override;
  std::string name() const override { return "round-robin"; }

 private:
  int next_ = 0;
  int n_ = 0;
};

class UniformRandomAdversary : public Adversary {
 public:
  explicit UniformRandomAdversary(std::uint64_t seed) : stream_(seed) {}

  PhilosopherId Next(const History& history) override;
  std::string name() const override { return "uniform-random"; }

 private:
  RandomStream stream_;
};

std::unique_ptr<Adversary> RoundRobin();
std::unique_ptr<Adversary> UniformRandom(std::uint64_t seed);

/**
 * Retry allowance per stubborn point as a function of the round index
 * k = 1, 2, .... Must be non-decreasing and unbounded.
 */
class StubbornnessBudget {
 public:
  explicit StubbornnessBudget(std::function<int(int)> per_round);

  // n_k = k + ceil(log2 s) + 1, so that s stubborn points with fair coin draws
  // fail a round with probability at most 2^-k.
  static StubbornnessBudget UnionBound(int stubborn_points);

  // n_k = k + extra.
  static StubbornnessBudget Linear(int extra);

  int operator()(int round) const { return per_round_(round); }

 private:
  std::function<int(int)> per_round_;
};

// One attempt of a scripted strategy: setup (if any) followed by one round.
struct RoundRecord {
  std::size_t start = 0;  // first step of the attempt
  std::size_t end = 0;    // one past the last step; 0 while open
  int round = 0;          // round index k (1-based) of the attempt
  bool completed = false;
  std::string failure;    // why the attempt was abandoned
};

/**
 * Longest span covered by two consecutive attempts, with the open last attempt
 * extending to trace_length. A philosopher that acts in every round is
 * scheduled at least once in every window of this length.
 */
std::size_t RoundPairWindow(std::span<const RoundRecord> rounds, std::size_t trace_length);

}  // namespace dpsim

#endif /* DPSIM_ADVERSARY_HH_ */
