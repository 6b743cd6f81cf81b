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

#include "dpvb/distributions.hpp"
#include "dpvb/rng.hpp"
#include "dpvb/special.hpp"

using dpvb::digamma;

TEST_CASE("digamma matches high-precision references") {
  // psi(1) = -gamma, psi(2) = 1 - gamma, psi(1/2) = -gamma - 2 log 2.
  CHECK(std::fabs(digamma(1.0) - (-0.5772156649015329)) < 1e-10);
  CHECK(std::fabs(digamma(2.0) - 0.4227843350984671) < 1e-10);
  CHECK(std::fabs(digamma(0.5) - (-1.9635100260214235)) < 1e-10);
  // Accuracy across the contracted range [1e-6, 1e6].
  CHECK(std::fabs(digamma(1e-6) - (-1000000.5772140200)) < 1e-10);
  CHECK(std::fabs(digamma(1e-3) - (-1000.5755719318103)) < 1e-10);
  CHECK(std::fabs(digamma(6.0) - 1.7061176684318005) < 1e-10);
  CHECK(std::fabs(digamma(10.0) - 2.2517525890667211) < 1e-10);
  CHECK(std::fabs(digamma(123.456) - 4.8118293238289854) < 1e-10);
  CHECK(std::fabs(digamma(1e6) - 13.8155100579641908) < 1e-10);
}

TEST_CASE("digamma rejects the nonpositive domain") {
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
  CHECK_THROWS_AS(digamma(-1.5), std::domain_error);
}

TEST_CASE("digamma satisfies the recurrence psi(x+1) - psi(x) = 1/x") {
  dpvb::RngStream rng(314159);
  for (int i = 0; i < 1000; ++i) {
    const double x = 0.1 + 99.9 * rng.uniform01();
    CHECK(std::fabs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-10);
  }
}

TEST_CASE("dirichlet_expected_log closed forms") {
  const auto flat = dpvb::dirichlet_expected_log(dpvb::DirichletParams({1.0, 1.0}));
  CHECK(std::fabs(flat[0] - (-1.0)) < 1e-12);
  CHECK(std::fabs(flat[1] - (-1.0)) < 1e-12);

  // psi(2) - psi(4) = -(1/2 + 1/3) = -5/6.
  const auto sym = dpvb::dirichlet_expected_log(dpvb::DirichletParams({2.0, 2.0}));
  CHECK(std::fabs(sym[0] - (-5.0 / 6.0)) < 1e-12);
  CHECK(std::fabs(sym[1] - (-5.0 / 6.0)) < 1e-12);
}

TEST_CASE("dirichlet_expected_log is symmetric and negative") {
  const auto equal = dpvb::dirichlet_expected_log(dpvb::DirichletParams({3.7, 3.7, 3.7, 3.7}));
  for (double v : equal) {
    CHECK(v == equal[0]);
    CHECK(v < 0.0);
  }
  const auto mixed = dpvb::dirichlet_expected_log(dpvb::DirichletParams({0.4, 2.0, 9.0}));
  for (double v : mixed) CHECK(v < 0.0);
}

TEST_CASE("dirichlet entropy closed form") {
  // Dir(1,1) is uniform on [0,1]: zero differential entropy.
  CHECK(std::fabs(dpvb::dirichlet_entropy({1.0, 1.0})) < 1e-12);
  CHECK(std::fabs(dpvb::dirichlet_entropy({2.0, 3.0}) - (-0.2349066497880008)) < 1e-10);
  CHECK(std::fabs(dpvb::dirichlet_entropy({2.5, 4.5}) - (-0.39269329842862)) < 1e-10);
  CHECK(std::fabs(dpvb::dirichlet_entropy({1.0, 2.0, 3.0}) - (-1.2443445622221003)) < 1e-10);
}
