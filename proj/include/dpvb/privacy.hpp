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
// Laplace-mechanism release of the K two-way marginal tables. Each table is a
// histogram query with global sensitivity 2 when N is fixed, so per-table
// noise scale b = 2/epsilon gives epsilon-DP per table and K*epsilon for the
// full release. Everything downstream of privatize() consumes only
// NoisyMarginals, never the raw tables.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpvb/distributions.hpp"
#include "dpvb/model.hpp"
#include "dpvb/rng.hpp"
#include "dpvb/table.hpp"

namespace dpvb {

inline constexpr double kHistogramSensitivity = 2.0;

/// Noise scale b = 2/epsilon for one marginal-table query.
inline double laplace_scale(double epsilon) {
  if (!(epsilon > 0.0)) throw std::domain_error("laplace_scale: epsilon must be positive");
  return kHistogramSensitivity / epsilon;
}

/// Privacy parameters of one released query.
struct PrivacySpec {
  double epsilon_per_query = 0.0;
  double sensitivity = kHistogramSensitivity;
  double scale = 0.0;  // sensitivity / epsilon_per_query

  static PrivacySpec for_epsilon(double epsilon) {
    PrivacySpec spec;
    spec.epsilon_per_query = epsilon;
    spec.sensitivity = kHistogramSensitivity;
    spec.scale = laplace_scale(epsilon);
    return spec;
  }

  void validate() const {
    if (!(epsilon_per_query > 0.0)) throw std::domain_error("PrivacySpec: epsilon must be positive");
    if (!(sensitivity > 0.0)) throw std::domain_error("PrivacySpec: sensitivity must be positive");
    if (std::fabs(scale - sensitivity / epsilon_per_query) > 1e-12 * scale)
      throw std::domain_error("PrivacySpec: scale must equal sensitivity/epsilon");
  }
};

/// The released data: real-valued cells m_ij^k (which may be negative or
/// exceed N), the per-query privacy spec, and the composed budget K*epsilon.
/// N travels in the clear inside `shape`; the sensitivity-2 calibration
/// already assumes it is public.
struct NoisyMarginals {
  std::vector<RealTable> values;  // values[k](i, j) = m_ij^k
  PrivacySpec spec;
  ModelShape shape;
  double total_epsilon = 0.0;

  void validate() const {
    shape.validate();
    spec.validate();
    if (static_cast<int>(values.size()) != shape.num_features)
      throw std::invalid_argument("NoisyMarginals: table count mismatch");
    for (int k = 0; k < shape.num_features; ++k)
      if (values[k].rows() != shape.num_classes || values[k].cols() != shape.levels[k])
        throw std::invalid_argument("NoisyMarginals: table dimension mismatch");
    const double expected = shape.num_features * spec.epsilon_per_query;
    if (std::fabs(total_epsilon - expected) > 1e-9 * expected)
      throw std::invalid_argument("NoisyMarginals: total_epsilon must equal K*epsilon");
  }
};

/// Adds independent Laplace(0, 2/epsilon) noise to every cell of every table.
/// No clamping or rounding happens here; released values stay raw reals.
inline NoisyMarginals privatize(const TrueMarginals& truth, double epsilon, RngStream& rng) {
  truth.shape.validate();
  NoisyMarginals out;
  out.shape = truth.shape;
  out.spec = PrivacySpec::for_epsilon(epsilon);
  out.total_epsilon = truth.shape.num_features * epsilon;
  out.values.reserve(truth.counts.size());
  for (const CountTable& table : truth.counts) {
    RealTable noisy(table.rows(), table.cols());
    for (int i = 0; i < table.rows(); ++i)
      for (int j = 0; j < table.cols(); ++j)
        noisy(i, j) = static_cast<double>(table(i, j)) + sample_laplace(0.0, out.spec.scale, rng);
    out.values.push_back(std::move(noisy));
  }
  return out;
}

/// log P(probe | t1) - log P(probe | t2) under the mechanism's product of
/// Laplace densities. For neighboring datasets (one record changed, so each
/// table moves by L1 distance at most 2) the absolute value is bounded by
/// K*epsilon.
inline double dp_log_ratio_bound(const TrueMarginals& t1, const TrueMarginals& t2, double epsilon,
                                 const std::vector<RealTable>& probe) {
  if (!(t1.shape == t2.shape)) throw std::domain_error("dp_log_ratio_bound: shape mismatch");
  if (probe.size() != t1.counts.size())
    throw std::domain_error("dp_log_ratio_bound: probe shape mismatch");
  const double b = laplace_scale(epsilon);
  double ratio = 0.0;
  for (std::size_t k = 0; k < probe.size(); ++k) {
    if (!probe[k].same_shape(RealTable(t1.counts[k].rows(), t1.counts[k].cols())))
      throw std::domain_error("dp_log_ratio_bound: probe shape mismatch");
    for (int i = 0; i < probe[k].rows(); ++i)
      for (int j = 0; j < probe[k].cols(); ++j) {
        const double x = probe[k](i, j);
        ratio += laplace_log_density(x, static_cast<double>(t1.counts[k](i, j)), b) -
                 laplace_log_density(x, static_cast<double>(t2.counts[k](i, j)), b);
      }
  }
  return ratio;
}

}  // namespace dpvb
