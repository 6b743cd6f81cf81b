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
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpvb/rng.hpp"
#include "dpvb/special.hpp"

namespace dpvb {

/// Concentration parameters of a Dirichlet distribution. Every entry must be
/// positive and the dimension at least 2.
struct DirichletParams {
  std::vector<double> alpha;

  DirichletParams() = default;
  explicit DirichletParams(std::vector<double> a) : alpha(std::move(a)) { validate(); }

  static DirichletParams constant(std::size_t dim, double value) {
    return DirichletParams(std::vector<double>(dim, value));
  }

  void validate() const {
    if (alpha.size() < 2) throw std::domain_error("DirichletParams: need at least 2 cells");
    for (double a : alpha)
      if (!(a > 0.0)) throw std::domain_error("DirichletParams: entries must be positive");
  }

  std::size_t size() const { return alpha.size(); }
  double operator[](std::size_t i) const { return alpha[i]; }
  double sum() const {
    double s = 0.0;
    for (double a : alpha) s += a;
    return s;
  }
};

/// Inverse-Gaussian parameters; the distribution mean equals mu.
struct InverseGaussianParams {
  double lambda = 1.0;  // shape
  double mu = 1.0;      // mean

  InverseGaussianParams() = default;
  InverseGaussianParams(double lambda_in, double mu_in) : lambda(lambda_in), mu(mu_in) {
    if (!(lambda > 0.0) || !(mu > 0.0))
      throw std::domain_error("InverseGaussianParams: lambda and mu must be positive");
  }

  double mean() const { return mu; }
};

/// E[log p_i] under Dirichlet(alpha): psi(alpha_i) - psi(sum alpha).
inline std::vector<double> dirichlet_expected_log(const DirichletParams& params) {
  params.validate();
  const double psi_total = digamma(params.sum());
  std::vector<double> out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out[i] = digamma(params.alpha[i]) - psi_total;
  return out;
}

/// Standard normal draw via the Marsaglia polar method. The second variate of
/// each accepted pair is discarded so the sampler stays stateless.
inline double sample_normal(RngStream& rng) {
  for (;;) {
    const double u = 2.0 * rng.uniform01() - 1.0;
    const double v = 2.0 * rng.uniform01() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

/// Gamma(shape, 1) draw, Marsaglia-Tsang squeeze with the shape<1 boost.
inline double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0)) throw std::domain_error("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::pow(rng.uniform01(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = sample_normal(rng);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Dirichlet draw: normalized independent gammas. Sums to 1 within 1e-12.
inline std::vector<double> sample_dirichlet(const DirichletParams& params, RngStream& rng) {
  params.validate();
  std::vector<double> out(params.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = sample_gamma(params.alpha[i], rng);
    total += out[i];
  }
  if (total <= 0.0) {
    // All gammas underflowed (pathologically small alphas); fall back to uniform.
    for (double& x : out) x = 1.0 / static_cast<double>(out.size());
    return out;
  }
  for (double& x : out) x /= total;
  return out;
}

/// Binomial(n, p) by summing Bernoulli trials. O(n), which is plenty for the
/// table sizes this library works with.
inline std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng) {
  if (n < 0) throw std::domain_error("sample_binomial: n must be nonnegative");
  if (!(p >= 0.0) || !(p <= 1.0)) throw std::domain_error("sample_binomial: p must be in [0,1]");
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < n; ++i)
    if (rng.uniform01() < p) ++count;
  return count;
}

/// Multinomial(n, p) via sequential conditional binomials.
inline std::vector<std::int64_t> sample_multinomial(std::int64_t n, std::span<const double> p,
                                                    RngStream& rng) {
  if (n < 0) throw std::domain_error("sample_multinomial: n must be nonnegative");
  if (p.size() < 1) throw std::domain_error("sample_multinomial: empty probability vector");
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw std::domain_error("sample_multinomial: negative probability");
    total += x;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::domain_error("sample_multinomial: probabilities must sum to 1");
  std::vector<std::int64_t> out(p.size(), 0);
  std::int64_t remaining = n;
  double mass = 1.0;
  for (std::size_t j = 0; j + 1 < p.size() && remaining > 0; ++j) {
    double cond = mass > 0.0 ? p[j] / mass : 1.0;
    if (cond < 0.0) cond = 0.0;
    if (cond > 1.0) cond = 1.0;
    const std::int64_t k = sample_binomial(remaining, cond, rng);
    out[j] = k;
    remaining -= k;
    mass -= p[j];
  }
  out[p.size() - 1] = remaining;
  return out;
}

/// Laplace(location, scale) draw by inverse CDF.
inline double sample_laplace(double location, double scale, RngStream& rng) {
  if (!(scale > 0.0)) throw std::domain_error("sample_laplace: scale must be positive");
  const double u = rng.uniform01() - 0.5;
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return location - scale * sign * std::log1p(-2.0 * std::fabs(u));
}

/// Rayleigh(scale) draw by inverse CDF.
inline double sample_rayleigh(double scale, RngStream& rng) {
  if (!(scale > 0.0)) throw std::domain_error("sample_rayleigh: scale must be positive");
  return scale * std::sqrt(-2.0 * std::log(rng.uniform01()));
}

/// log density of Laplace(location, scale): -log(2 scale) - |x - location| / scale.
inline double laplace_log_density(double x, double location, double scale) {
  if (!(scale > 0.0)) throw std::domain_error("laplace_log_density: scale must be positive");
  return -std::log(2.0 * scale) - std::fabs(x - location) / scale;
}

/// log density of InverseGaussian(lambda, mu) at x > 0.
inline double inverse_gaussian_log_density(double x, const InverseGaussianParams& params) {
  if (!(x > 0.0)) throw std::domain_error("inverse_gaussian_log_density: x must be positive");
  const double diff = x - params.mu;
  return 0.5 * std::log(params.lambda / (2.0 * std::numbers::pi * x * x * x)) -
         params.lambda * diff * diff / (2.0 * params.mu * params.mu * x);
}

}  // namespace dpvb
