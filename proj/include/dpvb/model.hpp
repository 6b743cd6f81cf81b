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
// Naive Bayes (conditional independence) data model: parameter containers,
// the sufficient-statistic tables n_ij^k, and the synthetic-data generator.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dpvb/distributions.hpp"
#include "dpvb/rng.hpp"
#include "dpvb/table.hpp"

namespace dpvb {

/// Dimensions of the model: I classes, K features, feature k taking J_k
/// levels, and N records in total.
struct ModelShape {
  int num_classes = 0;             // I
  int num_features = 0;            // K
  std::vector<int> levels;         // J_k, one entry per feature
  std::int64_t n_total = 0;        // N

  void validate() const {
    if (num_classes < 2) throw std::invalid_argument("ModelShape: need at least 2 classes");
    if (num_features < 1) throw std::invalid_argument("ModelShape: need at least 1 feature");
    if (static_cast<int>(levels.size()) != num_features)
      throw std::invalid_argument("ModelShape: levels must have one entry per feature");
    for (int j : levels)
      if (j < 2) throw std::invalid_argument("ModelShape: each feature needs at least 2 levels");
    if (n_total < 0) throw std::invalid_argument("ModelShape: n_total must be nonnegative");
  }

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Class simplex p(Y=i) and per-feature conditional simplices p(X_k=j | Y=i).
/// cond_probs[k] is an I x J_k table.
struct ModelParams {
  std::vector<double> class_probs;
  std::vector<RealTable> cond_probs;

  void validate(const ModelShape& shape, double tol = 1e-9) const {
    shape.validate();
    if (static_cast<int>(class_probs.size()) != shape.num_classes)
      throw std::invalid_argument("ModelParams: class_probs dimension mismatch");
    if (static_cast<int>(cond_probs.size()) != shape.num_features)
      throw std::invalid_argument("ModelParams: cond_probs dimension mismatch");
    auto check_simplex = [tol](const double* v, int d) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        if (!(v[i] >= 0.0) || !(v[i] <= 1.0))
          throw std::invalid_argument("ModelParams: probabilities must lie in [0,1]");
        s += v[i];
      }
      if (std::fabs(s - 1.0) > tol)
        throw std::invalid_argument("ModelParams: probabilities must sum to 1");
    };
    check_simplex(class_probs.data(), shape.num_classes);
    for (int k = 0; k < shape.num_features; ++k) {
      if (cond_probs[k].rows() != shape.num_classes || cond_probs[k].cols() != shape.levels[k])
        throw std::invalid_argument("ModelParams: conditional table dimension mismatch");
      for (int i = 0; i < shape.num_classes; ++i)
        check_simplex(&cond_probs[k](i, 0), shape.levels[k]);
    }
  }
};

/// Exact sufficient statistics: per-feature tables n_ij^k and the shared
/// class margin n_i, with sum_j n_ij^k = n_i for every i and k.
struct TrueMarginals {
  std::vector<CountTable> counts;        // counts[k](i, j) = n_ij^k
  std::vector<std::int64_t> class_counts;  // n_i
  ModelShape shape;
};

/// Dirichlet prior for every probability block: one for the class simplex and
/// one per (feature, class) conditional simplex. alpha_cond[k][i] has length J_k.
struct PriorSpec {
  DirichletParams alpha_class;
  std::vector<std::vector<DirichletParams>> alpha_cond;

  static PriorSpec uniform(const ModelShape& shape, double alpha = 1.0) {
    shape.validate();
    if (!(alpha > 0.0)) throw std::invalid_argument("PriorSpec: alpha must be positive");
    PriorSpec prior;
    prior.alpha_class = DirichletParams::constant(static_cast<std::size_t>(shape.num_classes), alpha);
    prior.alpha_cond.resize(shape.num_features);
    for (int k = 0; k < shape.num_features; ++k) {
      prior.alpha_cond[k].assign(shape.num_classes,
                                 DirichletParams::constant(static_cast<std::size_t>(shape.levels[k]), alpha));
    }
    return prior;
  }

  void validate(const ModelShape& shape) const {
    shape.validate();
    alpha_class.validate();
    if (alpha_class.size() != static_cast<std::size_t>(shape.num_classes))
      throw std::invalid_argument("PriorSpec: class prior dimension mismatch");
    if (static_cast<int>(alpha_cond.size()) != shape.num_features)
      throw std::invalid_argument("PriorSpec: conditional prior dimension mismatch");
    for (int k = 0; k < shape.num_features; ++k) {
      if (static_cast<int>(alpha_cond[k].size()) != shape.num_classes)
        throw std::invalid_argument("PriorSpec: conditional prior dimension mismatch");
      for (const auto& block : alpha_cond[k]) {
        block.validate();
        if (block.size() != static_cast<std::size_t>(shape.levels[k]))
          throw std::invalid_argument("PriorSpec: conditional prior dimension mismatch");
      }
    }
  }
};

/// Draws model parameters from their Dirichlet priors, one block at a time.
inline ModelParams sample_model_params(const ModelShape& shape, const PriorSpec& prior,
                                       RngStream& rng) {
  prior.validate(shape);
  ModelParams params;
  params.class_probs = sample_dirichlet(prior.alpha_class, rng);
  params.cond_probs.reserve(shape.num_features);
  for (int k = 0; k < shape.num_features; ++k) {
    RealTable table(shape.num_classes, shape.levels[k]);
    for (int i = 0; i < shape.num_classes; ++i) {
      const auto row = sample_dirichlet(prior.alpha_cond[k][i], rng);
      for (int j = 0; j < shape.levels[k]; ++j) table(i, j) = row[j];
    }
    params.cond_probs.push_back(std::move(table));
  }
  return params;
}

/// Generates the sufficient statistics: one multinomial draw of the class
/// margin n_i, then conditional multinomials per (class, feature). The same
/// class margin conditions every feature's table.
inline TrueMarginals sample_counts(const ModelParams& params, const ModelShape& shape,
                                   RngStream& rng) {
  params.validate(shape);
  TrueMarginals out;
  out.shape = shape;
  out.class_counts = sample_multinomial(shape.n_total, params.class_probs, rng);
  out.counts.reserve(shape.num_features);
  for (int k = 0; k < shape.num_features; ++k) {
    CountTable table(shape.num_classes, shape.levels[k]);
    for (int i = 0; i < shape.num_classes; ++i) {
      const std::span<const double> row(&params.cond_probs[k](i, 0),
                                        static_cast<std::size_t>(shape.levels[k]));
      const auto draw = sample_multinomial(out.class_counts[i], row, rng);
      for (int j = 0; j < shape.levels[k]; ++j) table(i, j) = draw[j];
    }
    out.counts.push_back(std::move(table));
  }
  return out;
}

/// True iff all structural invariants hold exactly: nonnegative entries,
/// sum_j n_ij^k = n_i for every (i, k), and sum_i n_i = N.
inline bool check_consistency(const TrueMarginals& m) {
  const ModelShape& shape = m.shape;
  if (static_cast<int>(m.class_counts.size()) != shape.num_classes) return false;
  if (static_cast<int>(m.counts.size()) != shape.num_features) return false;
  std::int64_t total = 0;
  for (std::int64_t n : m.class_counts) {
    if (n < 0) return false;
    total += n;
  }
  if (total != shape.n_total) return false;
  for (int k = 0; k < shape.num_features; ++k) {
    if (m.counts[k].rows() != shape.num_classes || m.counts[k].cols() != shape.levels[k])
      return false;
    for (int i = 0; i < shape.num_classes; ++i) {
      std::int64_t row = 0;
      for (int j = 0; j < shape.levels[k]; ++j) {
        if (m.counts[k](i, j) < 0) return false;
        row += m.counts[k](i, j);
      }
      if (row != m.class_counts[i]) return false;
    }
  }
  return true;
}

}  // namespace dpvb
