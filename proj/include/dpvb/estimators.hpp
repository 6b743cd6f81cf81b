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
// Point/posterior estimators compared in the simulation study. The naive and
// variational estimators consume only the noisy release; the Bayes estimator
// is the privacy-free reference and takes the true tables by signature.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpvb/model.hpp"
#include "dpvb/privacy.hpp"

namespace dpvb {

enum class EstimatorKind { kNaive, kVb, kBayes };

inline std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kNaive: return "naive";
    case EstimatorKind::kVb: return "vb";
    case EstimatorKind::kBayes: return "bayes";
  }
  throw std::invalid_argument("estimator_name: unknown kind");
}

inline EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "naive") return EstimatorKind::kNaive;
  if (name == "vb") return EstimatorKind::kVb;
  if (name == "bayes") return EstimatorKind::kBayes;
  throw std::invalid_argument("estimator_from_name: unknown estimator '" + name + "'");
}

/// One estimator's output. `point` always holds valid simplex estimates; the
/// Dirichlet posteriors are present for the Bayesian-flavored methods.
struct PosteriorEstimate {
  EstimatorKind method = EstimatorKind::kNaive;
  std::optional<DirichletParams> class_posterior;
  std::vector<std::vector<DirichletParams>> cond_posterior;  // [k][i], may be empty
  ModelParams point;
  int iterations = 0;
  bool converged = true;
};

/// Clamp noisy counts to [0, N], renormalize each (class, feature) row, and
/// reconcile a single class estimate from the clamped row totals summed over
/// features. Degenerate rows (all mass clamped away) fall back to uniform.
inline PosteriorEstimate naive_estimate(const NoisyMarginals& noisy) {
  noisy.validate();
  const ModelShape& shape = noisy.shape;
  const double n_total = static_cast<double>(shape.n_total);

  PosteriorEstimate est;
  est.method = EstimatorKind::kNaive;
  est.point.cond_probs.reserve(shape.num_features);

  std::vector<double> class_mass(shape.num_classes, 0.0);
  double total_mass = 0.0;
  for (int k = 0; k < shape.num_features; ++k) {
    RealTable probs(shape.num_classes, shape.levels[k]);
    for (int i = 0; i < shape.num_classes; ++i) {
      double row_total = 0.0;
      for (int j = 0; j < shape.levels[k]; ++j) {
        const double clamped = std::clamp(noisy.values[k](i, j), 0.0, n_total);
        probs(i, j) = clamped;
        row_total += clamped;
      }
      if (row_total > 0.0) {
        for (int j = 0; j < shape.levels[k]; ++j) probs(i, j) /= row_total;
      } else {
        for (int j = 0; j < shape.levels[k]; ++j) probs(i, j) = 1.0 / shape.levels[k];
      }
      class_mass[i] += row_total;
      total_mass += row_total;
    }
    est.point.cond_probs.push_back(std::move(probs));
  }

  est.point.class_probs.resize(shape.num_classes);
  for (int i = 0; i < shape.num_classes; ++i)
    est.point.class_probs[i] =
        total_mass > 0.0 ? class_mass[i] / total_mass : 1.0 / shape.num_classes;
  return est;
}

/// Variant of the naive estimator that pushes the clamped counts through a
/// conjugate Dirichlet update instead of using raw frequencies. The class
/// pseudo-counts are the clamped row totals averaged over features, keeping
/// them on the scale of N.
inline PosteriorEstimate naive_estimate_conjugate(const NoisyMarginals& noisy,
                                                  const PriorSpec& priors) {
  noisy.validate();
  priors.validate(noisy.shape);
  const ModelShape& shape = noisy.shape;
  const double n_total = static_cast<double>(shape.n_total);

  PosteriorEstimate est;
  est.method = EstimatorKind::kNaive;
  est.cond_posterior.resize(shape.num_features);
  est.point.cond_probs.reserve(shape.num_features);

  std::vector<double> class_mass(shape.num_classes, 0.0);
  for (int k = 0; k < shape.num_features; ++k) {
    RealTable probs(shape.num_classes, shape.levels[k]);
    est.cond_posterior[k].reserve(shape.num_classes);
    for (int i = 0; i < shape.num_classes; ++i) {
      std::vector<double> gamma(shape.levels[k]);
      double gamma_sum = 0.0;
      for (int j = 0; j < shape.levels[k]; ++j) {
        const double clamped = std::clamp(noisy.values[k](i, j), 0.0, n_total);
        class_mass[i] += clamped / shape.num_features;
        gamma[j] = clamped + priors.alpha_cond[k][i][j];
        gamma_sum += gamma[j];
      }
      for (int j = 0; j < shape.levels[k]; ++j) probs(i, j) = gamma[j] / gamma_sum;
      est.cond_posterior[k].emplace_back(std::move(gamma));
    }
    est.point.cond_probs.push_back(std::move(probs));
  }

  std::vector<double> gamma_class(shape.num_classes);
  double gamma_total = 0.0;
  for (int i = 0; i < shape.num_classes; ++i) {
    gamma_class[i] = class_mass[i] + priors.alpha_class[i];
    gamma_total += gamma_class[i];
  }
  est.point.class_probs.resize(shape.num_classes);
  for (int i = 0; i < shape.num_classes; ++i)
    est.point.class_probs[i] = gamma_class[i] / gamma_total;
  est.class_posterior = DirichletParams(std::move(gamma_class));
  return est;
}

/// Conjugate Dirichlet-multinomial posterior from the exact counts.
inline PosteriorEstimate bayes_estimate(const TrueMarginals& truth, const PriorSpec& priors) {
  if (!check_consistency(truth))
    throw std::domain_error("bayes_estimate: inconsistent marginal tables");
  priors.validate(truth.shape);
  const ModelShape& shape = truth.shape;

  PosteriorEstimate est;
  est.method = EstimatorKind::kBayes;
  est.cond_posterior.resize(shape.num_features);
  est.point.cond_probs.reserve(shape.num_features);

  for (int k = 0; k < shape.num_features; ++k) {
    RealTable probs(shape.num_classes, shape.levels[k]);
    est.cond_posterior[k].reserve(shape.num_classes);
    for (int i = 0; i < shape.num_classes; ++i) {
      std::vector<double> gamma(shape.levels[k]);
      double gamma_sum = 0.0;
      for (int j = 0; j < shape.levels[k]; ++j) {
        gamma[j] = static_cast<double>(truth.counts[k](i, j)) + priors.alpha_cond[k][i][j];
        gamma_sum += gamma[j];
      }
      for (int j = 0; j < shape.levels[k]; ++j) probs(i, j) = gamma[j] / gamma_sum;
      est.cond_posterior[k].emplace_back(std::move(gamma));
    }
    est.point.cond_probs.push_back(std::move(probs));
  }

  std::vector<double> gamma_class(shape.num_classes);
  double gamma_total = 0.0;
  for (int i = 0; i < shape.num_classes; ++i) {
    gamma_class[i] = static_cast<double>(truth.class_counts[i]) + priors.alpha_class[i];
    gamma_total += gamma_class[i];
  }
  est.point.class_probs.resize(shape.num_classes);
  for (int i = 0; i < shape.num_classes; ++i)
    est.point.class_probs[i] = gamma_class[i] / gamma_total;
  est.class_posterior = DirichletParams(std::move(gamma_class));
  return est;
}

/// Study metric: summed squared difference over the class simplex and every
/// conditional simplex.
inline double squared_error(const ModelParams& estimate, const ModelParams& truth) {
  if (estimate.class_probs.size() != truth.class_probs.size() ||
      estimate.cond_probs.size() != truth.cond_probs.size())
    throw std::invalid_argument("squared_error: shape mismatch");
  double err = 0.0;
  for (std::size_t i = 0; i < truth.class_probs.size(); ++i) {
    const double diff = estimate.class_probs[i] - truth.class_probs[i];
    err += diff * diff;
  }
  for (std::size_t k = 0; k < truth.cond_probs.size(); ++k) {
    if (!estimate.cond_probs[k].same_shape(truth.cond_probs[k]))
      throw std::invalid_argument("squared_error: shape mismatch");
    for (int i = 0; i < truth.cond_probs[k].rows(); ++i)
      for (int j = 0; j < truth.cond_probs[k].cols(); ++j) {
        const double diff = estimate.cond_probs[k](i, j) - truth.cond_probs[k](i, j);
        err += diff * diff;
      }
  }
  return err;
}

}  // namespace dpvb
