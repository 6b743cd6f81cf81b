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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dpvb/estimators.hpp"
#include "dpvb/model.hpp"

using namespace dpvb;

namespace {

ModelShape small_shape(std::int64_t n) { return ModelShape{2, 3, {2, 2, 2}, n}; }

}  // namespace

TEST_CASE("shape validation") {
  CHECK_THROWS_AS((ModelShape{1, 2, {2, 2}, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelShape{2, 0, {}, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelShape{2, 2, {2}, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelShape{2, 2, {2, 1}, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelShape{2, 2, {2, 2}, -1}.validate()), std::invalid_argument);
  CHECK_NOTHROW((ModelShape{2, 2, {2, 3}, 0}.validate()));
}

TEST_CASE("sampled parameters are valid simplices and reproducible") {
  const ModelShape shape = small_shape(50);
  const PriorSpec prior = PriorSpec::uniform(shape);
  RngStream a(11, 1), b(11, 1);
  const ModelParams pa = sample_model_params(shape, prior, a);
  const ModelParams pb = sample_model_params(shape, prior, b);
  CHECK_NOTHROW(pa.validate(shape));
  CHECK(pa.class_probs == pb.class_probs);
  for (int k = 0; k < shape.num_features; ++k) CHECK(pa.cond_probs[k] == pb.cond_probs[k]);
}

TEST_CASE("prior/shape mismatch is a configuration error") {
  const ModelShape shape = small_shape(50);
  const PriorSpec wrong = PriorSpec::uniform(ModelShape{3, 3, {2, 2, 2}, 50});
  RngStream rng(1);
  CHECK_THROWS_AS(sample_model_params(shape, wrong, rng), std::invalid_argument);
}

TEST_CASE("dirichlet(5,5) block entries average 1/2 over replicates") {
  const ModelShape shape{2, 1, {2}, 10};
  const PriorSpec prior = PriorSpec::uniform(shape, 5.0);
  RngStream rng(321);
  const int reps = 10000;
  double mean = 0.0;
  for (int r = 0; r < reps; ++r)
    mean += sample_model_params(shape, prior, rng).cond_probs[0](0, 0);
  mean /= reps;
  // Var of Beta(5,5) is 25/(100*11) = 1/44.
  const double se = std::sqrt(1.0 / 44.0 / reps);
  CHECK(std::fabs(mean - 0.5) < 3.0 * se);
}

TEST_CASE("counts generator honors degenerate inputs") {
  const ModelShape empty = small_shape(0);
  const PriorSpec prior = PriorSpec::uniform(empty);
  RngStream rng(9);
  const ModelParams params = sample_model_params(empty, prior, rng);
  const TrueMarginals zero = sample_counts(params, empty, rng);
  CHECK(check_consistency(zero));
  for (const auto& t : zero.counts)
    for (auto v : t.data()) CHECK(v == 0);

  ModelShape shape = small_shape(40);
  ModelParams point;
  point.class_probs = {1.0, 0.0};
  for (int k = 0; k < shape.num_features; ++k) {
    RealTable t(2, 2);
    t(0, 0) = 0.25;
    t(0, 1) = 0.75;
    t(1, 0) = 0.5;
    t(1, 1) = 0.5;
    point.cond_probs.push_back(t);
  }
  const TrueMarginals mass = sample_counts(point, shape, rng);
  CHECK(mass.class_counts == std::vector<std::int64_t>{40, 0});
  for (const auto& t : mass.counts) {
    CHECK(t.row_sum(0) == 40);
    CHECK(t(1, 0) == 0);
    CHECK(t(1, 1) == 0);
  }
}

TEST_CASE("cell means match N p_i p_ij over replicates") {
  const ModelShape shape{2, 2, {2, 2}, 30};
  ModelParams params;
  params.class_probs = {0.4, 0.6};
  for (int k = 0; k < 2; ++k) {
    RealTable t(2, 2);
    t(0, 0) = 0.2;
    t(0, 1) = 0.8;
    t(1, 0) = 0.7;
    t(1, 1) = 0.3;
    params.cond_probs.push_back(t);
  }
  RngStream rng(5150);
  const int reps = 10000;
  double mean = 0.0, sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto truth = sample_counts(params, shape, rng);
    REQUIRE(check_consistency(truth));
    const double v = static_cast<double>(truth.counts[0](0, 1));
    mean += v;
    sq += v * v;
  }
  mean /= reps;
  sq /= reps;
  const double expected = 30.0 * 0.4 * 0.8;  // N p_i p_ij
  const double se = std::sqrt(std::max(sq - mean * mean, 0.0) / reps);
  CHECK(std::fabs(mean - expected) < 3.0 * se);
}

TEST_CASE("every feature shares the class margin") {
  const ModelShape shape{3, 4, {2, 3, 2, 4}, 120};
  const PriorSpec prior = PriorSpec::uniform(shape);
  RngStream rng(7777);
  for (int r = 0; r < 50; ++r) {
    const auto params = sample_model_params(shape, prior, rng);
    const auto truth = sample_counts(params, shape, rng);
    REQUIRE(check_consistency(truth));
    for (int k = 0; k < shape.num_features; ++k)
      for (int i = 0; i < shape.num_classes; ++i)
        CHECK(truth.counts[k].row_sum(i) == truth.class_counts[i]);
  }
}

TEST_CASE("check_consistency flags broken row sums") {
  const ModelShape shape = small_shape(25);
  const PriorSpec prior = PriorSpec::uniform(shape);
  RngStream rng(2);
  const auto params = sample_model_params(shape, prior, rng);
  TrueMarginals truth = sample_counts(params, shape, rng);
  REQUIRE(check_consistency(truth));
  truth.counts[1](0, 1) += 1;
  CHECK_FALSE(check_consistency(truth));
}

TEST_CASE("non-private estimator error shrinks with N") {
  const PriorSpec unused;
  RngStream rng(31);
  double err_small = 0.0, err_large = 0.0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    for (std::int64_t n : {std::int64_t{50}, std::int64_t{500}}) {
      const ModelShape shape{2, 5, {2, 2, 2, 2, 2}, n};
      const PriorSpec prior = PriorSpec::uniform(shape);
      const auto params = sample_model_params(shape, prior, rng);
      const auto truth = sample_counts(params, shape, rng);
      const double err = squared_error(bayes_estimate(truth, prior).point, params);
      (n == 50 ? err_small : err_large) += err;
    }
  }
  CHECK(err_large / reps < err_small / reps);
}
