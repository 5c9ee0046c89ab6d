// Copyright 2026 The lftree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LFTREE_SPECIAL_FUNCTIONS_HPP
#define LFTREE_SPECIAL_FUNCTIONS_HPP

namespace lftree::special {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1],
/// evaluated with the Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

/// Upper tail P(F > f) of the F distribution with (d1, d2) degrees of freedom.
double f_upper_tail(double f, double d1, double d2);

/// Student t cumulative distribution function.
double student_t_cdf(double t, double nu);

/// Two-sided tail 2 (1 - T_nu(|t|)).
double student_t_two_sided(double t, double nu);

}  // namespace lftree::special

#endif  // LFTREE_SPECIAL_FUNCTIONS_HPP
