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

#include "dpsim/random.hh"

#include <limits>
#include <sstream>

#include "dpsim/error.hh"
#include "dpsim/rational.hh"

namespace dpsim {

std::uint64_t Mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t index) {
  return Mix64(parent ^ Mix64(index + 0x9e3779b97f4a7c15ULL));
}

std::int64_t RandomStream::UniformInt(std::int64_t lo, std::int64_t hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(engine_());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % range);
}

Rational ParseRational(const std::string& text) {
  auto bad = [&]() { return DomainError("not a rational number: '" + text + "'"); };
  if (text.empty()) throw bad();
  try {
    if (auto slash = text.find('/'); slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) throw bad();
      return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
      std::string whole = text.substr(0, dot);
      std::string frac = text.substr(dot + 1);
      bool negative = !whole.empty() && whole[0] == '-';
      if (negative) whole.erase(0, 1);
      if (whole.empty()) whole = "0";
      if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos ||
          whole.find_first_not_of("0123456789") != std::string::npos) {
        throw bad();
      }
      BigInt den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      Rational r(BigInt(whole) * den + BigInt(frac), den);
      return negative ? Rational(-r) : r;
    }
    return Rational(BigInt(text));
  } catch (const std::runtime_error&) {
    throw bad();
  }
}

std::string ToString(const Rational& r) {
  std::ostringstream out;
  out << numerator(r);
  if (denominator(r) != 1) out << "/" << denominator(r);
  return out.str();
}

double ToDouble(const Rational& r) { return r.convert_to<double>(); }

Rational Pow(const Rational& base, int exponent) {
  Rational result = 1;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

}  // namespace dpsim
