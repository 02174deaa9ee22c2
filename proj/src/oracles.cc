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

#include "dpsim/analysis/oracles.hh"

#include <cmath>
#include <vector>

#include "dpsim/error.hh"

namespace dpsim {

Rational DistinctValueProbability(int m, int k) {
  if (k < 1 || m < 1) throw DomainError("distinct-value probability needs k, m >= 1");
  if (k > m) {
    throw DomainError("distinct-value probability needs k <= m, got k = " + std::to_string(k) +
                      ", m = " + std::to_string(m));
  }
  // m! / (m - k)! = m (m-1) ... (m-k+1)
  BigInt falling = 1;
  for (int i = 0; i < k; ++i) falling *= m - i;
  return Rational(falling, boost::multiprecision::pow(BigInt(m), k));
}

Rational DistinctValueEnumerate(int m, int k, std::uint64_t cap) {
  if (k < 1 || m < 1) throw DomainError("enumeration needs k, m >= 1");
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) {
    if (total > cap / static_cast<std::uint64_t>(m)) {
      throw CapExceeded(std::to_string(m) + "^" + std::to_string(k) +
                        " assignments exceed the enumeration cap of " + std::to_string(cap));
    }
    total *= m;
  }
  std::vector<int> value(k, 0);
  std::vector<int> used(m, 0);
  std::uint64_t injective = 0;
  // Odometer over all assignments, tracking value multiplicities.
  for (int i = 0; i < k; ++i) ++used[0];
  for (std::uint64_t n = 0; n < total; ++n) {
    bool distinct = true;
    for (int v = 0; v < m && distinct; ++v) distinct = used[v] <= 1;
    if (distinct) ++injective;
    for (int i = 0; i < k; ++i) {
      --used[value[i]];
      if (++value[i] < m) {
        ++used[value[i]];
        break;
      }
      value[i] = 0;
      ++used[0];
    }
  }
  return Rational(BigInt(injective), BigInt(total));
}

ProductBound ProductLowerBound(const Rational& p, int m) {
  if (p <= 0 || p > Rational(1, 2)) {
    throw DomainError("product bound needs 0 < p <= 1/2, got " + ToString(p));
  }
  if (m < 1) throw DomainError("product bound needs m >= 1");
  ProductBound b;
  b.product = 1;
  Rational power = 1;
  for (int j = 1; j <= m; ++j) {
    power *= p;
    b.product *= 1 - power;
  }
  b.limit = 1 - p - p * p;
  b.bound = b.limit + power * p;
  return b;
}

Interval Wilson(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double centre = (phat + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
  Interval w{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (successes == 0) w.low = 0.0;
  if (successes == trials) w.high = 1.0;
  return w;
}

}  // namespace dpsim
