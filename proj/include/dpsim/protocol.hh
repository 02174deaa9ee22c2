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

#ifndef DPSIM_PROTOCOL_HH_
#define DPSIM_PROTOCOL_HH_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpsim/random.hh"
#include "dpsim/topology.hh"

namespace dpsim {

enum class Algorithm { kLR1, kLR2, kGDP1, kGDP2 };

const char* ToString(Algorithm a);
Algorithm ParseAlgorithm(const std::string& name);

// GDP algorithms order forks by their nr labels instead of drawing a side.
constexpr bool UsesLabels(Algorithm a) { return a == Algorithm::kGDP1 || a == Algorithm::kGDP2; }
// LR2 and GDP2 keep request lists and guest books.
constexpr bool UsesRequests(Algorithm a) { return a == Algorithm::kLR2 || a == Algorithm::kGDP2; }

/**
 * Line numbers of each role in an algorithm's program. Lines an algorithm does
 * not have are 0.
 *
 *            think insert choose take1 relabel take2 eat remove sign release
 *   LR1        1     -      2      3      -      4    5     -     -     6
 *   LR2        1     2      3      4      -      5    6     7     8     9
 *   GDP1       1     -      2      3      4      5    6     -     -     7
 *   GDP2       1     2      3      4      5      6    7     8     9    10
 */
struct ProgramLayout {
  int think;
  int insert;
  int choose;
  int take_first;
  int relabel;
  int take_second;
  int eat;
  int remove;
  int sign;
  int release;
};

const ProgramLayout& Layout(Algorithm a);

/**
 * When each philosopher becomes hungry. With no schedule every philosopher is
 * always hungry: leaving the think line takes a single getHungry step. A
 * schedule lists, per philosopher, how many think steps precede each hungry
 * period; once a philosopher's list is exhausted it thinks forever.
 */
struct HungerModel {
  std::vector<std::vector<int>> think_durations;

  bool always_hungry() const { return think_durations.empty(); }
  // Think steps before the given hungry period, or -1 for "never hungry".
  int Duration(PhilosopherId p, int episode) const;
};

struct ForkState {
  std::optional<PhilosopherId> holder;
  int label = 0;
  // Indexed like Topology::incident(f).
  std::vector<char> requested;
  std::uint64_t use_clock = 0;
  std::vector<std::uint64_t> last_use;

  friend bool operator==(const ForkState&, const ForkState&) = default;
};

struct PhilosopherState {
  int line = 1;
  std::optional<Side> committed;
  bool holds_left = false;
  bool holds_right = false;
  bool hungry = false;
  int eat_remaining = 0;
  // Requests already inserted while at the insert line (0 or 1).
  int inserted = 0;
  // Think steps left before getting hungry; -1 when thinking forever.
  int think_remaining = 0;
  int think_episode = 0;

  bool holds(Side s) const { return s == Side::kLeft ? holds_left : holds_right; }
  int held_count() const { return int{holds_left} + int{holds_right}; }

  friend bool operator==(const PhilosopherState&, const PhilosopherState&) = default;
};

struct ProtocolOptions {
  int eat_steps = 1;
  // Probability that a random commitment picks the left fork.
  double left_bias = 0.5;
};

/**
 * Complete system snapshot. Value type; copies share the immutable topology
 * and hunger model.
 */
struct Configuration {
  std::shared_ptr<const Topology> topology;
  std::shared_ptr<const HungerModel> hunger;
  Algorithm algorithm = Algorithm::kLR1;
  int label_bound = 0;
  ProtocolOptions options;
  std::vector<ForkState> forks;
  std::vector<PhilosopherState> philosophers;

  const Topology& topo() const { return *topology; }
  const ProgramLayout& layout() const { return Layout(algorithm); }
  int n() const { return static_cast<int>(philosophers.size()); }
  int k() const { return static_cast<int>(forks.size()); }

  const ForkState& fork(ForkId f) const { return forks[f.index()]; }
  const PhilosopherState& phil(PhilosopherId p) const { return philosophers[p.index()]; }
  bool IsFree(ForkId f) const { return !fork(f).holder.has_value(); }

  // Fork p committed to; p must be committed.
  ForkId CommittedFork(PhilosopherId p) const;
  bool Requested(ForkId f, PhilosopherId p) const;
  std::uint64_t LastUse(ForkId f, PhilosopherId p) const;

  // At the random or priority choice line, holding nothing.
  bool AtChoice(PhilosopherId p) const;
  bool Eating(PhilosopherId p) const { return phil(p).line == layout().eat; }
  // From getting hungry up to (not including) eating.
  bool Trying(PhilosopherId p) const;

  friend bool operator==(const Configuration& a, const Configuration& b);
};

// All forks free, labels 0, no requests, every philosopher at the think line.
Configuration InitConfiguration(std::shared_ptr<const Topology> topology, Algorithm algorithm,
                                int label_bound, HungerModel hunger = {},
                                ProtocolOptions options = {});

enum class Action {
  kThink,
  kGetHungry,
  kInsertRequest,
  kCommitRandom,
  kCommitPriority,
  kTestAndTakeFirst,
  kCondFail,
  kRelabel,
  kKeepLabel,
  kTestAndTakeSecond,
  kReleaseFirst,
  kEatTick,
  kFinishEat,
  kRemoveRequests,
  kSignGuestBooks,
  kReleaseBoth,
};

const char* ToString(Action a);

struct StepEvent {
  PhilosopherId actor;
  Action action = Action::kThink;
  // Chosen side for commitments, side inserted, side released.
  std::optional<Side> side;
  // Outcome of a test-and-take.
  bool success = false;
  int old_label = 0;
  int new_label = 0;
  // Random draw consumed by this step: 0 = left / 1 = right for commitments,
  // the new label for relabels.
  std::optional<std::int64_t> draw;

  std::string Outcome() const;
  std::string DrawText() const;

  friend bool operator==(const StepEvent&, const StepEvent&) = default;
};

bool IsEatingEvent(const StepEvent& e);

// Source of protocol randomness for a step.
class DrawSource {
 public:
  virtual ~DrawSource() = default;
  virtual Side DrawSide(PhilosopherId p, double left_bias) = 0;
  // Uniform in [1, m].
  virtual int DrawLabel(PhilosopherId p, int m) = 0;
};

/**
 * Independent stream per philosopher, seeded DeriveSeed(seed, i), so the k-th
 * draw of a philosopher does not depend on how the steps are interleaved.
 */
class StreamDraws : public DrawSource {
 public:
  StreamDraws(std::uint64_t seed, int philosophers);

  Side DrawSide(PhilosopherId p, double left_bias) override;
  int DrawLabel(PhilosopherId p, int m) override;

 private:
  std::vector<RandomStream> streams_;
};

// Supplies a fixed answer; used to replay recorded events.
class FixedDraws : public DrawSource {
 public:
  explicit FixedDraws(std::optional<std::int64_t> value) : value_(value) {}

  Side DrawSide(PhilosopherId p, double left_bias) override;
  int DrawLabel(PhilosopherId p, int m) override;

 private:
  std::optional<std::int64_t> value_;
};

bool Enabled(const Configuration& c, PhilosopherId p);

// Courtesy test of LR2/GDP2: nobody else wants f, or everyone else who wants
// it has used it at least as recently as p.
bool Cond(const Configuration& c, ForkId f, PhilosopherId p);

// Executes one atomic step of p in place.
StepEvent StepInPlace(Configuration& c, PhilosopherId p, DrawSource& draws);

std::pair<Configuration, StepEvent> Step(const Configuration& c, PhilosopherId p,
                                         DrawSource& draws);

// Re-executes a recorded event, using its recorded draw.
void ReplayEvent(Configuration& c, const StepEvent& e);

// Throws InvariantViolation when a state invariant fails.
void CheckInvariants(const Configuration& c);

// Throws InvariantViolation when the step before -> after breaks a transition
// property (relabel guard, priority choice, monotone guest books).
void CheckTransition(const Configuration& before, const Configuration& after,
                     const StepEvent& e);

}  // namespace dpsim

#endif /* DPSIM_PROTOCOL_HH_ */
