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

#ifndef DPSIM_RATIONAL_HH_
#define DPSIM_RATIONAL_HH_

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace dpsim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts "a/b", an integer, or a finite decimal such as "0.25".
Rational ParseRational(const std::string& text);

// "a/b", or "a" when the denominator is 1.
std::string ToString(const Rational& r);

double ToDouble(const Rational& r);

Rational Pow(const Rational& base, int exponent);

}  // namespace dpsim

#endif /* DPSIM_RATIONAL_HH_ */
