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

#ifndef DPSIM_SCRIPTED_HH_
#define DPSIM_SCRIPTED_HH_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpsim/adversary.hh"

namespace dpsim {

/**
 * One instruction of a scripted schedule. Roles and forks are named in the
 * script's canonical frame and translated through the current relabeling
 * before they are used.
 */
struct Directive {
  enum class Kind {
    // Schedule `role` until it waits at its choice line holding nothing.
    kPrepare,
    // Schedule `role` once; it must take the fork it committed to.
    kTake,
    // Schedule `role` once; its second-fork test must fail and release.
    kRelease,
    // Schedule `role` until it commits to `fork`, letting it retry through
    // its other fork after each miss. A stubborn point.
    kStubborn,
    // Schedule `role` for one commitment, which must be to `fork`.
    kForced,
    // Schedule `role` for one commitment; the script branches on the outcome.
    kChoose,
    // Schedule `role` through one full meal and back to its choice line.
    kEat,
  };

  Kind kind;
  int role;
  int fork = -1;
  bool may_eat = false;  // kStubborn: retries through a meal are allowed

  static Directive Prepare(int r) { return {Kind::kPrepare, r}; }
  static Directive Take(int r) { return {Kind::kTake, r}; }
  static Directive Release(int r) { return {Kind::kRelease, r}; }
  static Directive Stubborn(int r, int f, bool may_eat = false) {
    return {Kind::kStubborn, r, f, may_eat};
  }
  static Directive Forced(int r, int f) { return {Kind::kForced, r, f}; }
  static Directive Choose(int r) { return {Kind::kChoose, r}; }
  static Directive Eat(int r) { return {Kind::kEat, r}; }
};

using Plan = std::vector<Directive>;

/**
 * Interpreter for scripted stubborn schedules. A script supplies a setup plan
 * that drives the system from "everyone waiting at the choice line" into its
 * blockade state, and a round plan that leads from the blockade back into an
 * isomorphic one. On a failed expectation the attempt is abandoned: the
 * interpreter drains the system (lets holders finish) and starts the setup
 * again. Without a retry limit stubborn points are unbounded.
 */
class ScriptedAdversary : public Adversary {
 public:
  ScriptedAdversary(Topology expected, Algorithm native);

  PhilosopherId Next(const History& history) override;
  std::optional<DrawWish> Wish() const override;
  std::optional<std::size_t> FairnessWindow(std::size_t trace_length) const override;

  // Stubborn-point interface used by Fairize().
  void SetRetryLimit(std::function<int(int round)> limit) { retry_limit_ = std::move(limit); }
  void SetAbandonOnFailure(bool wait) { wait_after_failure_ = wait; }
  // Lets the script run against an algorithm it was not written for; every
  // attempt whose steps do not match the script is then abandoned.
  void AllowForeignAlgorithm() { foreign_ok_ = true; }
  // Runs the script on `history`; nullopt when an attempt has just failed
  // and SetAbandonOnFailure(true) is in effect.
  std::optional<PhilosopherId> Advance(const History& history);
  bool abandoned() const { return mode_ == Mode::kAbandoned; }
  void Reenter(std::size_t step);

  // Number of stubborn points in setup plus one round.
  virtual int StubbornPoints() const = 0;
  // Canonical philosophers that must not eat while the script is on track.
  virtual bool InScope(PhilosopherId canonical) const = 0;

  // The topology the script is written for.
  const Topology& topology() const { return expected_; }
  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  int completed_rounds() const { return completed_; }
  // Current canonical-to-actual relabeling.
  const Relabeling& frame() const { return frame_; }
  // Step indices at which a round ended in its target state.
  const std::vector<std::size_t>& round_ends() const { return round_ends_; }
  // Step indices at which a setup reached its blockade.
  const std::vector<std::size_t>& setup_ends() const { return setup_ends_; }
  bool in_setup() const { return mode_ != Mode::kScript || in_setup_; }

 protected:
  virtual Plan SetupPlan() const = 0;
  // Called when a kChoose commitment lands on `drawn` (canonical fork). Returns
  // the frame change (new = old * change) and the directives to run next.
  virtual std::pair<Relabeling, Plan> OnChoice(int role, ForkId drawn) const = 0;
  virtual Plan RoundPlan() const = 0;
  // Relabeling of canonical names carried out by one round.
  virtual Relabeling RoundShift() const = 0;

  Relabeling IdentityFrame() const;

 private:
  enum class Mode { kScript, kDrain, kAbandoned };
  enum class Sub { kStart, kAwaitDraw, kRecover, kAwaitTake, kEating };

  PhilosopherId Actual(int role) const { return frame_(PhilosopherId(role)); }
  ForkId ActualFork(int fork) const { return frame_(ForkId(fork)); }

  void Observe(const History& history);
  void ObserveEvent(const Configuration& c, const StepEvent& e);
  std::optional<PhilosopherId> Decide(const History& history);
  std::optional<PhilosopherId> DecideDirective(const Configuration& c);
  std::optional<PhilosopherId> DecideDrain(const Configuration& c);
  void Fail(const std::string& why);
  void FinishDirective();
  void StartAttempt(std::size_t step);
  void LoadSetup();
  int CurrentBudget() const;
  bool CommitmentOk(const StepEvent& e) const;

  void CheckApplicable(const Configuration& c) const;

  Topology expected_;
  Algorithm native_;
  bool foreign_ok_ = false;
  std::function<int(int)> retry_limit_;
  bool wait_after_failure_ = false;
  bool checked_ = false;

  Mode mode_ = Mode::kDrain;
  Relabeling frame_;
  Plan plan_;
  std::size_t pc_ = 0;
  bool in_setup_ = true;
  Sub sub_ = Sub::kStart;
  int draws_ = 0;
  int sub_steps_ = 0;
  int drain_steps_ = 0;

  std::optional<PhilosopherId> scheduled_;
  std::size_t scheduled_at_ = 0;
  std::size_t step_ = 0;  // history size at the current decision

  int round_index_ = 0;
  int completed_ = 0;
  std::vector<RoundRecord> rounds_;
  std::vector<std::size_t> round_ends_;
  std::vector<std::size_t> setup_ends_;
};

/**
 * Doubled triangle under LR1. Canonical names follow the arc numbering of
 * DoubledTriangle(). The blockade has arc 2 holding fork 0, arc 1 committed to
 * fork 1 and arc 0 committed to fork 2; one round hands the holding role to
 * arc 3 and rotates the other roles accordingly.
 */
class DoubledTriangleScript : public ScriptedAdversary {
 public:
  DoubledTriangleScript();

  int StubbornPoints() const override { return 3; }
  bool InScope(PhilosopherId) const override { return true; }
  std::string name() const override { return "stubborn-triangle"; }

 protected:
  Plan SetupPlan() const override;
  std::pair<Relabeling, Plan> OnChoice(int role, ForkId drawn) const override;
  Plan RoundPlan() const override;
  Relabeling RoundShift() const override;
};

/**
 * Ring with a pendant arc under LR1. In the blockade every ring philosopher
 * holds one fork and waits for the other, all facing the same way round the
 * ring, while the pendant philosopher is committed to the shared fork 0. A
 * round reverses the direction of the blockade; the pendant philosopher eats
 * once in every round and no ring philosopher does.
 */
class PendantRingScript : public ScriptedAdversary {
 public:
  explicit PendantRingScript(int ring_size);

  int StubbornPoints() const override { return ring_size_ + 2; }
  bool InScope(PhilosopherId p) const override { return p.value() < ring_size_; }
  std::string name() const override { return "stubborn-pendant-ring"; }
  PhilosopherId pendant() const { return PhilosopherId(ring_size_); }

 protected:
  Plan SetupPlan() const override;
  std::pair<Relabeling, Plan> OnChoice(int role, ForkId drawn) const override;
  Plan RoundPlan() const override;
  Relabeling RoundShift() const override;

 private:
  Relabeling Mirror() const;
  int ring_size_;
};

/**
 * Theta graph under LR2. The three paths play three roles: one path holds the
 * forks on its B side, one holds the forks on its A side, and the third holds
 * its B-side forks except for its last philosopher, who is committed to hub B.
 * A round is three waves of stubborn commitments that rotate the roles among
 * the paths and return to the very same configuration. Nobody eats, so every
 * guest book stays empty and Cond never blocks.
 */
class ThetaScript : public ScriptedAdversary {
 public:
  ThetaScript(int len1, int len2, int len3);

  int StubbornPoints() const override;
  bool InScope(PhilosopherId) const override { return true; }
  std::string name() const override { return "stubborn-theta"; }

 protected:
  Plan SetupPlan() const override;
  std::pair<Relabeling, Plan> OnChoice(int role, ForkId drawn) const override;
  Plan RoundPlan() const override;
  Relabeling RoundShift() const override;

 private:
  // Philosopher j (1-based from hub A) of path q and the fork between
  // philosophers j and j+1 (j = 0 is A, j = len is B).
  int Arc(int q, int j) const;
  int Node(int q, int j) const;
  Plan HalfRound(int bh, int ah, int mid) const;
  Plan Chain(int bh, int ah, int mid, int skip_path, int skip_index) const;
  Relabeling HubSwap() const;

  int len_[3];
  int arc_base_[3];
  int node_base_[3];
};

/**
 * Wraps a scripted strategy so that every stubborn point of round k gives up
 * after budget(k) draws. The abandoned round is followed by one round-robin
 * rotation over all philosophers, after which the script drains the system
 * and starts again. The wrapped script may face any algorithm.
 */
class FairizedAdversary : public Adversary {
 public:
  FairizedAdversary(std::unique_ptr<ScriptedAdversary> inner, StubbornnessBudget budget);

  PhilosopherId Next(const History& history) override;
  std::optional<DrawWish> Wish() const override;
  std::optional<std::size_t> FairnessWindow(std::size_t trace_length) const override;
  std::string name() const override { return "fairize(" + inner_->name() + ")"; }

  const ScriptedAdversary& inner() const { return *inner_; }

 private:
  std::unique_ptr<ScriptedAdversary> inner_;
  StubbornnessBudget budget_;
  bool rotating_ = false;
  bool last_from_inner_ = false;
  int rotation_left_ = 0;
};

std::unique_ptr<ScriptedAdversary> StubbornDoubledTriangle();
std::unique_ptr<ScriptedAdversary> StubbornPendantRing(int ring_size);
std::unique_ptr<ScriptedAdversary> StubbornTheta(int len1, int len2, int len3);

std::unique_ptr<FairizedAdversary> Fairize(std::unique_ptr<ScriptedAdversary> inner,
                                           std::optional<StubbornnessBudget> budget = {});

}  // namespace dpsim

#endif /* DPSIM_SCRIPTED_HH_ */
