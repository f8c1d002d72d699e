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

#ifndef HSREG_SPECIAL_FUNCTIONS_HPP_
#define HSREG_SPECIAL_FUNCTIONS_HPP_

namespace hsreg {

// ln Gamma(x) for x > 0. Shifts x upward by recurrence until the Stirling
// series is accurate, then subtracts the log of the shift product.
double log_gamma(double x);

// psi(x) = d/dx ln Gamma(x) for x > 0, same shift-then-asymptotic scheme.
double digamma(double x);

// P(a, x) = gamma(a, x) / Gamma(a), a > 0, x >= 0. Power series for
// x < a + 1, Lentz continued fraction for the complement otherwise.
double reg_lower_incomplete_gamma(double a, double x);

// Q(a, x) = 1 - P(a, x), computed without cancellation in the upper tail.
double reg_upper_incomplete_gamma(double a, double x);

// Standard normal CDF.
double normal_cdf(double z);

// Standard normal quantile (probit) for p in (0, 1). Rational approximation
// followed by one Halley refinement against erfc.
double normal_quantile(double p);

}  // namespace hsreg

#endif  // HSREG_SPECIAL_FUNCTIONS_HPP_
