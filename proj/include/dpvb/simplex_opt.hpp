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
// First-order interior-point maximizer for concave objectives of the form
//   f(theta) = sum_i  quad_i theta_i^2 + lin_i theta_i + ent_i theta_i log theta_i
// over the probability simplex, with quad_i <= 0 and ent_i <= 0. The search
// direction theta_i (grad_i - <theta, grad>) is tangent to the simplex and an
// ascent direction; an Armijo backtracking rule picks the step, capped so
// that iterates stay strictly interior.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dpvb {

/// Coefficients of one simplex-constrained objective. `quad` multiplies
/// theta^2, `lin` multiplies theta, `ent` multiplies theta log theta.
struct SimplexObjective {
  std::vector<double> quad;  // each <= 0
  std::vector<double> lin;
  std::vector<double> ent;   // each <= 0

  void validate() const {
    if (quad.size() < 2 || quad.size() != lin.size() || quad.size() != ent.size())
      throw std::invalid_argument("SimplexObjective: coefficient vectors must match, dim >= 2");
    for (std::size_t i = 0; i < quad.size(); ++i) {
      if (quad[i] > 0.0) throw std::invalid_argument("SimplexObjective: quad coefficients must be <= 0");
      if (ent[i] > 0.0) throw std::invalid_argument("SimplexObjective: ent coefficients must be <= 0");
    }
  }

  std::size_t dimension() const { return quad.size(); }
};

struct LineSearchConfig {
  double sigma = 1e-4;             // Armijo sufficient-increase constant
  double nu = 0.5;                 // backtracking shrink factor
  int max_backtracks = 50;
  double boundary_fraction = 0.99;  // fraction of the positivity-preserving cap

  void validate() const {
    if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("LineSearchConfig: sigma in (0,1)");
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("LineSearchConfig: nu in (0,1)");
    if (max_backtracks < 1) throw std::invalid_argument("LineSearchConfig: max_backtracks >= 1");
    if (!(boundary_fraction > 0.0 && boundary_fraction < 1.0))
      throw std::invalid_argument("LineSearchConfig: boundary_fraction in (0,1)");
  }
};

struct SimplexResult {
  std::vector<double> theta;
  std::vector<double> trace;  // objective values, nondecreasing
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline void check_interior_simplex(const std::vector<double>& theta, std::size_t dim,
                                   double sum_tol = 1e-9) {
  if (theta.size() != dim) throw std::domain_error("simplex point: dimension mismatch");
  double sum = 0.0;
  for (double t : theta) {
    if (!(t > 0.0)) throw std::domain_error("simplex point: must be strictly interior");
    sum += t;
  }
  if (std::fabs(sum - 1.0) > sum_tol) throw std::domain_error("simplex point: must sum to 1");
}

inline double simplex_value_unchecked(const SimplexObjective& obj, const std::vector<double>& theta) {
  double f = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double t = theta[i];
    f += obj.quad[i] * t * t + obj.lin[i] * t + obj.ent[i] * t * std::log(t);
  }
  return f;
}

}  // namespace detail

/// f(theta) at a strictly interior simplex point.
inline double objective_value(const SimplexObjective& obj, const std::vector<double>& theta) {
  obj.validate();
  detail::check_interior_simplex(theta, obj.dimension());
  return detail::simplex_value_unchecked(obj, theta);
}

/// Gradient component i: 2 quad_i theta_i + lin_i + ent_i (1 + log theta_i).
inline std::vector<double> objective_gradient(const SimplexObjective& obj,
                                              const std::vector<double>& theta) {
  obj.validate();
  detail::check_interior_simplex(theta, obj.dimension());
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    g[i] = 2.0 * obj.quad[i] * theta[i] + obj.lin[i] + obj.ent[i] * (1.0 + std::log(theta[i]));
  return g;
}

/// Search direction d_i = theta_i (grad_i - <theta, grad>). Components sum to
/// zero, and <grad, d> = sum theta_i (grad_i - <theta,grad>)^2 >= 0, so d is an
/// ascent direction, vanishing exactly when all gradient components agree.
inline std::vector<double> search_direction(const SimplexObjective& obj,
                                            const std::vector<double>& theta) {
  const auto g = objective_gradient(obj, theta);
  double inner = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) inner += theta[i] * g[i];
  std::vector<double> d(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) d[i] = theta[i] * (g[i] - inner);
  return d;
}

/// Maximizes the objective from a strictly interior start. Iterates stay
/// interior (the step is capped below the boundary), accepted steps satisfy
/// the Armijo condition so the trace is nondecreasing, and termination is on
/// max_i |d_i| < tol. Hitting max_iter returns the best iterate with
/// converged = false.
inline SimplexResult maximize(const SimplexObjective& obj, const std::vector<double>& theta0,
                              const LineSearchConfig& cfg = {}, double tol = 1e-8,
                              int max_iter = 200) {
  obj.validate();
  cfg.validate();
  detail::check_interior_simplex(theta0, obj.dimension());
  if (!(tol > 0.0)) throw std::invalid_argument("maximize: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("maximize: max_iter must be >= 1");

  const std::size_t n = obj.dimension();
  SimplexResult res;
  res.theta = theta0;
  double f = detail::simplex_value_unchecked(obj, res.theta);
  res.trace.push_back(f);

  std::vector<double> g(n), d(n), cand(n);
  int it = 0;
  for (; it < max_iter; ++it) {
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = res.theta[i];
      g[i] = 2.0 * obj.quad[i] * t + obj.lin[i] + obj.ent[i] * (1.0 + std::log(t));
      inner += t * g[i];
    }
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = res.theta[i] * (g[i] - inner);
      dmax = std::max(dmax, std::fabs(d[i]));
    }
    if (dmax < tol) {
      res.converged = true;
      break;
    }

    // Positivity-preserving step cap: s < -1 / min_j (d_j / theta_j) when some
    // d_j < 0, otherwise unbounded.
    double s_max = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (d[i] < 0.0) s_max = std::min(s_max, -res.theta[i] / d[i]);
    double s = std::min(1.0, cfg.boundary_fraction * s_max);

    double gd = 0.0;
    for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];

    bool accepted = false;
    bool stalled = false;
    double f_cand = 0.0;
    for (int k = 0; k < cfg.max_backtracks; ++k) {
      bool positive = true;
      bool moved = false;
      double cand_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cand[i] = res.theta[i] + s * d[i];
        if (!(cand[i] > 0.0)) {
          positive = false;
          break;
        }
        moved = moved || cand[i] != res.theta[i];
        cand_sum += cand[i];
      }
      if (positive && !moved) {
        // The step underflowed below one ulp of theta; shrinking further
        // cannot help.
        stalled = true;
        break;
      }
      if (positive) {
        // Project back onto the simplex: sum(d) is zero only up to rounding,
        // and at large coefficient scales that residual would otherwise
        // accumulate across iterations.
        moved = false;
        for (std::size_t i = 0; i < n; ++i) {
          cand[i] /= cand_sum;
          moved = moved || cand[i] != res.theta[i];
        }
        if (!moved) {
          stalled = true;
          break;
        }
        f_cand = detail::simplex_value_unchecked(obj, cand);
        if (f_cand >= f + cfg.sigma * s * gd) {
          accepted = true;
          break;
        }
      }
      s *= cfg.nu;
    }
    if (!accepted || stalled) {
      // No improving step representable at this scale: numerically stationary.
      res.converged = true;
      break;
    }

    res.theta = cand;
    f = f_cand;
    res.trace.push_back(f);

    // Floor any coordinate that collapsed numerically before the next
    // gradient evaluation; the entropy term keeps exact iterates interior but
    // finite precision still needs the guard.
    bool floored = false;
    for (double& t : res.theta)
      if (t < 1e-12) {
        t = 1e-12;
        floored = true;
      }
    if (floored) {
      double sum = 0.0;
      for (double t : res.theta) sum += t;
      for (double& t : res.theta) t /= sum;
    }
  }
  res.iterations = it;
  return res;
}

}  // namespace dpvb
