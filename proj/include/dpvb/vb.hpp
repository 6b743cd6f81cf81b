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
// Mean-field variational fitter for the noisy-marginal posterior. The missing
// counts get multinomial variational distributions with free parameters
// theta (class margin) and theta_cond (per class and feature); the
// probability blocks get free-form posteriors, whose optima are Dirichlet;
// and the Laplace noise kernel is handled through its Gaussian scale-mixture
// representation, whose mixing variables beta have inverse-Gaussian optima
// with mean b / sqrt(E[(m - n)^2]).
//
// The monitored objective collapses the beta block to its profiled value
// -sqrt(E[(m-n)^2]) / b, which is the tight value of the quadratic
// minorizer; each coordinate update maximizes a minorizer of this objective
// that touches it at the current point, so the trace is nondecreasing.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpvb/distributions.hpp"
#include "dpvb/estimators.hpp"
#include "dpvb/model.hpp"
#include "dpvb/privacy.hpp"
#include "dpvb/simplex_opt.hpp"
#include "dpvb/special.hpp"
#include "dpvb/table.hpp"

namespace dpvb {

enum class InitMode { kFromNaive, kUniform };

struct FitConfig {
  double tol = 1e-6;      // relative bound-increase threshold
  int max_iter = 500;
  LineSearchConfig line_search;
  InitMode init = InitMode::kFromNaive;
  double solver_tol = 1e-8;
  int solver_max_iter = 200;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("FitConfig: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("FitConfig: max_iter must be >= 1");
    line_search.validate();
    if (!(solver_tol > 0.0)) throw std::invalid_argument("FitConfig: solver_tol must be positive");
    if (solver_max_iter < 1) throw std::invalid_argument("FitConfig: solver_max_iter >= 1");
  }
};

/// All variational parameters: multinomial parameters theta, Dirichlet
/// parameters gamma for q(p), inverse-Gaussian means for q(beta), and the
/// monitored bound value.
struct VariationalState {
  std::vector<double> theta_class;                    // interior simplex, length I
  std::vector<RealTable> theta_cond;                  // [k](i, j), interior rows
  DirichletParams gamma_class;                        // q(p_class)
  std::vector<std::vector<DirichletParams>> gamma_cond;  // [k][i], q(p_cond)
  std::vector<RealTable> beta_mean;                   // [k](i, j), E[beta] > 0
  double bound = 0.0;
  int iteration = 0;
};

struct FitResult {
  VariationalState state;
  bool converged = false;
  std::vector<double> trace;  // bound per iteration, starting at the initial state
};

/// E[(m - n)^2] under the two-stage multinomial variational distribution,
/// evaluated in the numerically stable form (m - N u)^2 + N u (1 - u) with
/// u = theta_i * theta_ij, which is algebraically identical to
/// N(N-1) theta_i^2 theta_ij^2 + N theta_i theta_ij + m^2 - 2 m N theta_i theta_ij
/// and manifestly nonnegative.
inline double expected_sq_deviation(double theta_i, double theta_ij, double m, std::int64_t n) {
  const double u = theta_i * theta_ij;
  const double mean = static_cast<double>(n) * u;
  const double resid = m - mean;
  return resid * resid + static_cast<double>(n) * u * (1.0 - u);
}

/// Quadratic minorizer of the Laplace log kernel:
/// -|m - n|/b >= -((m-n)^2 / (b alpha) + alpha / b) / 2, tight at alpha = |m - n|.
inline double quadratic_minorizer(double m, double n, double alpha, double b) {
  if (!(alpha > 0.0)) throw std::domain_error("quadratic_minorizer: alpha must be positive");
  if (!(b > 0.0)) throw std::domain_error("quadratic_minorizer: b must be positive");
  const double resid = m - n;
  return -0.5 * (resid * resid / (b * alpha) + alpha / b);
}

namespace detail {

inline constexpr double kSqDeviationFloor = 1e-12;
inline constexpr double kThetaLogFloor = 1e-10;

inline double floored_log(double x) { return std::log(std::max(x, kThetaLogFloor)); }

}  // namespace detail

/// q(beta) update: inverse Gaussian with lambda = 1 and mean b / sqrt(s),
/// where s = E[(m - n)^2] floored at 1e-12 for the degenerate exact-fit cell.
inline void update_q_beta(VariationalState& state, const NoisyMarginals& noisy) {
  const double b = noisy.spec.scale;
  for (std::size_t k = 0; k < noisy.values.size(); ++k)
    for (int i = 0; i < noisy.values[k].rows(); ++i)
      for (int j = 0; j < noisy.values[k].cols(); ++j) {
        const double s =
            std::max(expected_sq_deviation(state.theta_class[i], state.theta_cond[k](i, j),
                                           noisy.values[k](i, j), noisy.shape.n_total),
                     detail::kSqDeviationFloor);
        state.beta_mean[k](i, j) = b / std::sqrt(s);
      }
}

/// q(p_cond) update: Dirichlet(N theta_i theta_ij + alpha_ij) per (i, k).
inline void update_q_p_cond(VariationalState& state, const NoisyMarginals& noisy,
                            const PriorSpec& priors) {
  const double n_total = static_cast<double>(noisy.shape.n_total);
  for (std::size_t k = 0; k < state.theta_cond.size(); ++k)
    for (int i = 0; i < state.theta_cond[k].rows(); ++i) {
      std::vector<double> gamma(state.theta_cond[k].cols());
      for (int j = 0; j < state.theta_cond[k].cols(); ++j)
        gamma[j] = n_total * state.theta_class[i] * state.theta_cond[k](i, j) +
                   priors.alpha_cond[k][i][j];
      state.gamma_cond[k][i] = DirichletParams(std::move(gamma));
    }
}

/// q(p_class) update: Dirichlet(N theta_i + alpha_i).
inline void update_q_p_class(VariationalState& state, const NoisyMarginals& noisy,
                             const PriorSpec& priors) {
  const double n_total = static_cast<double>(noisy.shape.n_total);
  std::vector<double> gamma(state.theta_class.size());
  for (std::size_t i = 0; i < gamma.size(); ++i)
    gamma[i] = n_total * state.theta_class[i] + priors.alpha_class[i];
  state.gamma_class = DirichletParams(std::move(gamma));
}

/// Coefficients of the theta_cond block objective for fixed (i, k), holding
/// E[beta] and E[log p] at their current values.
inline SimplexObjective theta_cond_objective(const VariationalState& state,
                                             const NoisyMarginals& noisy, int i, int k) {
  const double n_total = static_cast<double>(noisy.shape.n_total);
  const double b = noisy.spec.scale;
  const double b2 = b * b;
  const double theta_i = state.theta_class[i];
  const auto elog = dirichlet_expected_log(state.gamma_cond[k][i]);
  const int num_levels = state.theta_cond[k].cols();

  SimplexObjective obj;
  obj.quad.resize(num_levels);
  obj.lin.resize(num_levels);
  obj.ent.resize(num_levels);
  for (int j = 0; j < num_levels; ++j) {
    const double eb = state.beta_mean[k](i, j);
    const double m = noisy.values[k](i, j);
    obj.quad[j] = -n_total * (n_total - 1.0) * theta_i * theta_i * eb / (2.0 * b2);
    obj.lin[j] = -n_total * theta_i * eb / (2.0 * b2) + n_total * m * theta_i * eb / b2 +
                 n_total * theta_i * elog[j];
    obj.ent[j] = -n_total * theta_i;
  }
  return obj;
}

/// Coefficients of the theta_class block objective, holding E[beta],
/// E[log p], and theta_cond at their current values.
inline SimplexObjective theta_class_objective(const VariationalState& state,
                                              const NoisyMarginals& noisy) {
  const double n_total = static_cast<double>(noisy.shape.n_total);
  const double b = noisy.spec.scale;
  const double b2 = b * b;
  const int num_classes = static_cast<int>(state.theta_class.size());
  const auto elog_class = dirichlet_expected_log(state.gamma_class);

  SimplexObjective obj;
  obj.quad.assign(num_classes, 0.0);
  obj.lin.assign(num_classes, 0.0);
  obj.ent.assign(num_classes, -n_total);
  for (int i = 0; i < num_classes; ++i) {
    double quad_acc = 0.0;
    double lin_acc = 0.0;
    for (std::size_t k = 0; k < state.theta_cond.size(); ++k) {
      const auto elog = dirichlet_expected_log(state.gamma_cond[k][i]);
      for (int j = 0; j < state.theta_cond[k].cols(); ++j) {
        const double tij = state.theta_cond[k](i, j);
        const double eb = state.beta_mean[k](i, j);
        const double m = noisy.values[k](i, j);
        quad_acc += n_total * (n_total - 1.0) * tij * tij * eb / (2.0 * b2);
        lin_acc += n_total * tij *
                   (-eb / (2.0 * b2) + m * eb / b2 + elog[j] - detail::floored_log(tij));
      }
    }
    obj.quad[i] = -quad_acc;
    obj.lin[i] = lin_acc + n_total * elog_class[i];
  }
  return obj;
}

/// One interior-point ascent on the theta_cond block for fixed (i, k).
inline void theta_cond_step(VariationalState& state, const NoisyMarginals& noisy,
                            const PriorSpec& /*priors*/, int i, int k, const FitConfig& cfg) {
  const SimplexObjective obj = theta_cond_objective(state, noisy, i, k);
  std::vector<double> start(state.theta_cond[k].cols());
  for (int j = 0; j < state.theta_cond[k].cols(); ++j) start[j] = state.theta_cond[k](i, j);
  const SimplexResult res =
      maximize(obj, start, cfg.line_search, cfg.solver_tol, cfg.solver_max_iter);
  for (int j = 0; j < state.theta_cond[k].cols(); ++j) state.theta_cond[k](i, j) = res.theta[j];
}

/// One interior-point ascent on the theta_class block.
inline void theta_class_step(VariationalState& state, const NoisyMarginals& noisy,
                             const PriorSpec& /*priors*/, const FitConfig& cfg) {
  const SimplexObjective obj = theta_class_objective(state, noisy);
  const SimplexResult res =
      maximize(obj, state.theta_class, cfg.line_search, cfg.solver_tol, cfg.solver_max_iter);
  state.theta_class = res.theta;
}

/// Monitored objective, with the beta block collapsed to its profiled value
/// -sqrt(s)/b. Prior normalizing constants are omitted (constant in all
/// variational parameters).
inline double monitored_bound(const VariationalState& state, const NoisyMarginals& noisy,
                              const PriorSpec& priors) {
  const double n_total = static_cast<double>(noisy.shape.n_total);
  const double b = noisy.spec.scale;
  double bound = 0.0;
  for (std::size_t k = 0; k < state.theta_cond.size(); ++k) {
    for (int i = 0; i < state.theta_cond[k].rows(); ++i) {
      const auto elog = dirichlet_expected_log(state.gamma_cond[k][i]);
      for (int j = 0; j < state.theta_cond[k].cols(); ++j) {
        const double tij = state.theta_cond[k](i, j);
        const double s = std::max(expected_sq_deviation(state.theta_class[i], tij,
                                                        noisy.values[k](i, j), noisy.shape.n_total),
                                  detail::kSqDeviationFloor);
        bound -= std::sqrt(s) / b;
        const double pseudo = n_total * state.theta_class[i] * tij;
        bound += (pseudo + priors.alpha_cond[k][i][j] - 1.0) * elog[j];
        bound -= pseudo * detail::floored_log(tij);
      }
      bound += dirichlet_entropy(state.gamma_cond[k][i].alpha);
    }
  }
  const auto elog_class = dirichlet_expected_log(state.gamma_class);
  for (std::size_t i = 0; i < state.theta_class.size(); ++i) {
    bound += (n_total * state.theta_class[i] + priors.alpha_class[i] - 1.0) * elog_class[i];
    bound -= n_total * state.theta_class[i] * detail::floored_log(state.theta_class[i]);
  }
  bound += dirichlet_entropy(state.gamma_class.alpha);
  return bound;
}

namespace detail {

/// Pulls a probability vector a small distance toward uniform so that every
/// entry is strictly positive.
inline std::vector<double> pull_to_interior(const std::vector<double>& probs, double weight) {
  const double uniform = 1.0 / static_cast<double>(probs.size());
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    out[i] = (1.0 - weight) * probs[i] + weight * uniform;
  return out;
}

}  // namespace detail

/// Builds the starting state: theta from the naive estimate (pulled 1e-6
/// toward uniform to guarantee interiority) or uniform; gamma from the
/// priors; beta from one q(beta) pass at those thetas.
inline VariationalState initialize(const NoisyMarginals& noisy, const PriorSpec& priors,
                                   InitMode mode) {
  noisy.validate();
  priors.validate(noisy.shape);
  const ModelShape& shape = noisy.shape;

  VariationalState state;
  if (mode == InitMode::kFromNaive) {
    const ModelParams naive = naive_estimate(noisy).point;
    state.theta_class = detail::pull_to_interior(naive.class_probs, 1e-6);
    state.theta_cond.reserve(shape.num_features);
    for (int k = 0; k < shape.num_features; ++k) {
      RealTable table(shape.num_classes, shape.levels[k]);
      for (int i = 0; i < shape.num_classes; ++i) {
        std::vector<double> row(shape.levels[k]);
        for (int j = 0; j < shape.levels[k]; ++j) row[j] = naive.cond_probs[k](i, j);
        row = detail::pull_to_interior(row, 1e-6);
        for (int j = 0; j < shape.levels[k]; ++j) table(i, j) = row[j];
      }
      state.theta_cond.push_back(std::move(table));
    }
  } else {
    state.theta_class.assign(shape.num_classes, 1.0 / shape.num_classes);
    state.theta_cond.reserve(shape.num_features);
    for (int k = 0; k < shape.num_features; ++k)
      state.theta_cond.emplace_back(shape.num_classes, shape.levels[k],
                                    1.0 / shape.levels[k]);
  }

  state.gamma_class = priors.alpha_class;
  state.gamma_cond = priors.alpha_cond;
  state.beta_mean.reserve(shape.num_features);
  for (int k = 0; k < shape.num_features; ++k)
    state.beta_mean.emplace_back(shape.num_classes, shape.levels[k], 1.0);
  update_q_beta(state, noisy);
  state.bound = monitored_bound(state, noisy, priors);
  state.iteration = 0;
  return state;
}

/// Full coordinate-ascent fit. Each sweep runs
///   q(beta) -> q(p_cond) -> q(p_class) -> theta_cond for every (i,k) -> theta_class
/// and then re-evaluates the monitored bound; convergence is declared when
/// the relative increase |M_t+1 - M_t| / (1 + |M_t|) drops below cfg.tol.
/// Deterministic given its inputs.
inline FitResult fit(const NoisyMarginals& noisy, const PriorSpec& priors, const FitConfig& cfg) {
  cfg.validate();
  FitResult result;
  result.state = initialize(noisy, priors, cfg.init);
  result.trace.push_back(result.state.bound);
  result.converged = false;

  for (int t = 1; t <= cfg.max_iter; ++t) {
    update_q_beta(result.state, noisy);
    update_q_p_cond(result.state, noisy, priors);
    update_q_p_class(result.state, noisy, priors);
    for (std::size_t k = 0; k < result.state.theta_cond.size(); ++k)
      for (int i = 0; i < result.state.theta_cond[k].rows(); ++i)
        theta_cond_step(result.state, noisy, priors, i, static_cast<int>(k), cfg);
    theta_class_step(result.state, noisy, priors, cfg);

    const double prev = result.trace.back();
    const double bound = monitored_bound(result.state, noisy, priors);
    result.state.bound = bound;
    result.state.iteration = t;
    result.trace.push_back(bound);
    if (std::fabs(bound - prev) / (1.0 + std::fabs(prev)) < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

/// Packages a finished fit as a posterior summary: Dirichlet posteriors for
/// every block and their means as the point estimate.
inline PosteriorEstimate estimate_from_fit(const FitResult& result, const ModelShape& shape) {
  const VariationalState& state = result.state;

  PosteriorEstimate est;
  est.method = EstimatorKind::kVb;
  est.iterations = state.iteration;
  est.converged = result.converged;
  est.class_posterior = state.gamma_class;
  est.cond_posterior = state.gamma_cond;

  const double class_total = state.gamma_class.sum();
  est.point.class_probs.resize(shape.num_classes);
  for (int i = 0; i < shape.num_classes; ++i)
    est.point.class_probs[i] = state.gamma_class[i] / class_total;
  est.point.cond_probs.reserve(shape.num_features);
  for (int k = 0; k < shape.num_features; ++k) {
    RealTable probs(shape.num_classes, shape.levels[k]);
    for (int i = 0; i < shape.num_classes; ++i) {
      const double total = state.gamma_cond[k][i].sum();
      for (int j = 0; j < shape.levels[k]; ++j)
        probs(i, j) = state.gamma_cond[k][i][j] / total;
    }
    est.point.cond_probs.push_back(std::move(probs));
  }
  return est;
}

/// Runs the fitter and packages the result.
inline PosteriorEstimate vb_estimate(const NoisyMarginals& noisy, const PriorSpec& priors,
                                     const FitConfig& cfg) {
  return estimate_from_fit(fit(noisy, priors, cfg), noisy.shape);
}

}  // namespace dpvb
