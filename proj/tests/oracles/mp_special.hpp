// Copyright 2026 The hsreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// High-precision reference implementations used only by tests. They share no
// code with the library: everything is evaluated in 50-digit binary floating
// point with series/continued-fraction forms and generous term counts.
#ifndef HSREG_TESTS_ORACLES_MP_SPECIAL_HPP_
#define HSREG_TESTS_ORACLES_MP_SPECIAL_HPP_

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <stdexcept>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;

inline const mp& mp_pi() {
  static const mp pi = boost::math::constants::pi<mp>();
  return pi;
}

// B_2, B_4, ..., B_30.
inline mp bernoulli_even(int k) {
  static const char* num[] = {"1",      "-1",        "1",       "-1",           "5",
                              "-691",   "7",         "-3617",   "43867",        "-174611",
                              "854513", "-236364091", "8553103", "-23749461029", "8615841276005"};
  static const char* den[] = {"6",   "30",   "42", "30",  "66",  "2730", "6",    "510",
                              "798", "330",  "138", "2730", "6",  "870",  "14322"};
  return mp(num[k - 1]) / mp(den[k - 1]);
}

constexpr int kShiftTo = 60;
constexpr int kStirlingTerms = 15;

inline mp lgamma(mp x) {
  if (x <= 0) throw std::domain_error("oracle::lgamma: x must be positive");
  mp prod = 1;
  while (x < kShiftTo) {
    prod *= x;
    x += 1;
  }
  mp sum = (x - mp(0.5)) * log(x) - x + log(2 * mp_pi()) / 2;
  mp xpow = x;
  const mp x2 = x * x;
  for (int k = 1; k <= kStirlingTerms; ++k) {
    sum += bernoulli_even(k) / (mp(2 * k) * mp(2 * k - 1) * xpow);
    xpow *= x2;
  }
  return sum - log(prod);
}

inline mp digamma(mp x) {
  if (x <= 0) throw std::domain_error("oracle::digamma: x must be positive");
  mp shift = 0;
  while (x < kShiftTo) {
    shift += 1 / x;
    x += 1;
  }
  mp sum = log(x) - 1 / (2 * x);
  const mp x2 = x * x;
  mp xpow = x2;
  for (int k = 1; k <= kStirlingTerms; ++k) {
    sum -= bernoulli_even(k) / (mp(2 * k) * xpow);
    xpow *= x2;
  }
  return sum - shift;
}

// P(a, x) by its power series; every term is positive so no cancellation.
inline mp lower_gamma_series(const mp& a, const mp& x) {
  if (a <= 0 || x < 0) throw std::domain_error("oracle::lower_gamma_series");
  if (x == 0) return 0;
  mp term = 1 / a;
  mp sum = term;
  const mp eps = mp("1e-45");
  for (int n = 1; n < 200000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * eps && a + n > x) break;
  }
  return sum * exp(a * log(x) - x - lgamma(a));
}

// Q(a, x) by the Legendre continued fraction, modified Lentz evaluation.
// Only valid (and only used) for x > a + 1.
inline mp upper_gamma_fraction(const mp& a, const mp& x) {
  const mp tiny = mp("1e-300");
  const mp eps = mp("1e-45");
  mp b = x + 1 - a;
  mp c = 1 / tiny;
  mp d = 1 / b;
  mp h = d;
  for (int i = 1; i < 200000; ++i) {
    const mp an = -mp(i) * (mp(i) - a);
    b += 2;
    d = an * d + b;
    if (abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (abs(c) < tiny) c = tiny;
    d = 1 / d;
    const mp delta = d * c;
    h *= delta;
    if (abs(delta - 1) < eps) break;
  }
  return exp(a * log(x) - x - lgamma(a)) * h;
}

inline mp reg_lower_gamma(const mp& a, const mp& x) { return lower_gamma_series(a, x); }

}  // namespace oracle

#endif  // HSREG_TESTS_ORACLES_MP_SPECIAL_HPP_
