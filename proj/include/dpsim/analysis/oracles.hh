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

#ifndef DPSIM_ANALYSIS_ORACLES_HH_
#define DPSIM_ANALYSIS_ORACLES_HH_

#include <cstdint>

#include "dpsim/rational.hh"

namespace dpsim {

// Probability that k values drawn uniformly from [1, m] are pairwise
// distinct: m! / (m^k (m - k)!). Requires 1 <= k <= m.
Rational DistinctValueProbability(int m, int k);

// The same probability by counting injective assignments among all m^k.
// Refuses (CapExceeded) when m^k exceeds `cap`.
Rational DistinctValueEnumerate(int m, int k, std::uint64_t cap = 10'000'000);

struct ProductBound {
  Rational product;  // prod_{j=1}^{m} (1 - p^j)
  Rational bound;    // 1 - p - p^2 + p^{m+1}
  Rational limit;    // 1 - p - p^2, the bound as m grows
};

// Requires 0 < p <= 1/2 and m >= 1.
ProductBound ProductLowerBound(const Rational& p, int m);

struct Interval {
  double low = 0;
  double high = 0;
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

// Wilson score interval for a binomial proportion.
Interval Wilson(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ95);

}  // namespace dpsim

#endif /* DPSIM_ANALYSIS_ORACLES_HH_ */
