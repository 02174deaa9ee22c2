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

#ifndef DPSIM_ANALYSIS_ESTIMATE_HH_
#define DPSIM_ANALYSIS_ESTIMATE_HH_

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dpsim/analysis/oracles.hh"
#include "dpsim/analysis/predicates.hh"
#include "dpsim/engine.hh"

namespace dpsim {

/**
 * Runs fn(0), ..., fn(count - 1) on up to `workers` threads and returns the
 * results in index order, so aggregates do not depend on the worker count.
 * The first exception thrown by any call is rethrown.
 */
template <class Fn>
auto ParallelMap(std::size_t count, int workers, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// "From source, target is reached with probability at least bound."
struct ProgressStatement {
  StatePredicate source;
  StatePredicate target;
  Rational bound = 1;
};

struct EstimateReport {
  std::string source;
  std::string target;
  std::uint64_t trials = 0;     // trials in which the source was reached
  std::uint64_t successes = 0;
  std::uint64_t skipped = 0;    // trials in which the source never held
  std::size_t horizon = 0;
  double estimate = 0;
  Interval ci;
  // Traces on which the requested unless property failed.
  std::uint64_t unless_failures = 0;

  double half_width() const { return (ci.high - ci.low) / 2; }
};

struct EstimateOptions {
  int workers = 1;
  bool checked = false;
  // Checked on every trace from its first configuration.
  std::vector<std::pair<StatePredicate, StatePredicate>> unless;
  // Eating estimates normally stop a trial once it has succeeded; this keeps
  // it running to the horizon so the unless monitors see the whole trace.
  bool full_horizon = false;
};

/**
 * For each trial: run the template (seeded per trial) until the source holds,
 * waiting at most spec.horizon steps, then for up to `horizon` more steps; the
 * trial succeeds if the target holds at some configuration of that window.
 */
EstimateReport EstimateProgress(const ProgressStatement& statement, const RunSpec& spec,
                                std::uint64_t trials, std::size_t horizon,
                                const EstimateOptions& options = {});

/**
 * Trials of a scripted (usually fairized) strategy. A trial succeeds when no
 * in-scope philosopher finishes a meal before the script has completed
 * `rounds` rounds, or before spec.horizon steps if that comes first.
 */
struct NoProgressOptions {
  int rounds = 20;
  int workers = 1;
  bool checked = false;
  // In-scope philosophers; the script's own scope when empty.
  std::vector<PhilosopherId> scope;
};

struct NoProgressReport {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double estimate = 0;
  Interval ci;
  std::uint64_t rounds_completed = 0;  // summed over trials
  // Script rounds end in a relabeled copy of their start; two consecutive
  // ones bring the configuration back under the identity, so a full round
  // is a pair of consecutive attempts.
  std::size_t max_half_round = 0;
  std::size_t max_full_round = 0;
  std::size_t max_gap = 0;  // longest stretch without some philosopher
  // Violations of the fairness monitor at window = max_full_round.
  std::uint64_t fairness_violations = 0;
  // Completed rounds that ended with a non-empty guest book at a fork with
  // only in-scope philosophers.
  std::uint64_t guest_book_violations = 0;
};

NoProgressReport EstimateNoProgress(const RunSpec& spec, std::uint64_t trials,
                                    const NoProgressOptions& options = {});

/**
 * Success = every philosopher in `who` (all when empty) finishes a meal within
 * spec.horizon steps, or any one of them does when `require_all` is false.
 * Unless properties are checked along the way.
 */
struct EatReport {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double estimate = 0;
  Interval ci;
  std::uint64_t unless_failures = 0;
  std::uint64_t fairness_violations = 0;  // at each trace's stated window
  std::size_t max_steps = 0;              // longest trial
};

EatReport EstimateEating(const RunSpec& spec, std::uint64_t trials,
                         const std::vector<PhilosopherId>& who, bool require_all = true,
                         const EstimateOptions& options = {});

enum class Composition { kConcatenation, kUnion };

/**
 * Concatenation: reports are S->S', S'->S'', S->S''; the last must reach the
 * product of the first two. Union: reports are S1->S', S2->S', S1|S2->S'; the
 * last must reach the smaller of the first two. Slack is the sum of the
 * interval half-widths.
 */
bool LemmaConsistency(const std::vector<EstimateReport>& reports, Composition composition);

// A positive short-horizon estimate plus the unless property on every trace
// should drive the long-horizon estimate to `target` or above.
bool PersistenceWins(const EstimateReport& short_run, const EstimateReport& long_run,
                     double target = 0.99);

}  // namespace dpsim

#endif /* DPSIM_ANALYSIS_ESTIMATE_HH_ */
