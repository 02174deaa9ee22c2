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

#ifndef DPSIM_RANDOM_HH_
#define DPSIM_RANDOM_HH_

#include <cstdint>
#include <random>

namespace dpsim {

/**
 * Seed derivation used everywhere a run needs an independent stream:
 *
 *   DeriveSeed(parent, index) = Mix64(parent ^ Mix64(index + 0x9e3779b97f4a7c15))
 *
 * where Mix64 is the SplitMix64 output function. Stream domains:
 * philosopher i uses index i, the adversary uses kAdversaryStream, and trial t
 * of a batch uses kTrialStream + t.
 */
std::uint64_t Mix64(std::uint64_t x);
std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t index);

inline constexpr std::uint64_t kAdversaryStream = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kTrialStream = std::uint64_t{1} << 33;

/**
 * 64-bit Mersenne Twister with portable conversions. The standard
 * distributions are implementation-defined, so draws are computed here to keep
 * runs bitwise reproducible across standard libraries.
 */
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double NextUnit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], by rejection.
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);

  bool Bernoulli(double p) { return NextUnit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dpsim

#endif /* DPSIM_RANDOM_HH_ */
