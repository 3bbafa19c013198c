// Copyright 2026 The cwl Authors
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

#include <random>

#include "cwl/bethe.hpp"
#include "doctest.h"

using namespace cwl;

TEST_CASE("zero energy gives a sign flip") {
  for (int n = 1; n <= 5; ++n) CHECK(std::abs(transmission_phase(0.0, n, 1.0) - cplx(-1.0)) < 1e-15);
  CHECK(std::abs(transmission_phase(0.0, 2, 3.7) - cplx(-1.0)) < 1e-15);
}

TEST_CASE("high energy limit") {
  for (int n = 1; n <= 3; ++n) {
    const double E = 1e6 * n * n;
    const cplx t = transmission_phase(E, n, 1.0);
    CHECK(std::abs(t - cplx(1.0)) < 2e-6);
    CHECK(t.imag() < 0.0);
  }
}

TEST_CASE("unimodular") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> e(-50.0, 50.0);
  std::uniform_int_distribution<int> n(1, 8);
  for (int k = 0; k < 100; ++k) {
    const cplx t = transmission_phase(e(rng), n(rng), 1.0);
    CHECK(std::abs(std::norm(t) - 1.0) < 1e-12);
  }
}

TEST_CASE("even chains are transparent at zero energy") {
  for (int M = 1; M <= 6; ++M) {
    cplx prod = 1.0;
    for (int i = 0; i < M; ++i) prod *= transmission_phase(0.0, 2, 1.0);
    CHECK(std::abs(prod - std::pow(-1.0, M)) < 1e-14);
  }
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(transmission_phase(0.0, 0, 1.0), ConfigError);
  CHECK_THROWS_AS(transmission_phase(0.0, 1, 0.0), ConfigError);
}
