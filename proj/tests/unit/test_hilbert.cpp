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

#include "cwl/hilbert.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cwl;

TEST_CASE("annihilation and number operators") {
  const Matrix a = Matrix(annihilation(5));
  CHECK(a.rows() == 6);
  for (int n = 1; n <= 5; ++n) CHECK(std::abs(a(n - 1, n) - std::sqrt(double(n))) < 1e-15);
  const Matrix n = Matrix(number_operator(5));
  CHECK((n - a.adjoint() * a).norm() < 1e-14);
  // [a, a^dag] = 1 except in the top level.
  const Matrix comm = a * a.adjoint() - a.adjoint() * a;
  for (int k = 0; k < 5; ++k) CHECK(std::abs(comm(k, k) - 1.0) < 1e-14);
  CHECK_THROWS_AS(annihilation(-1), ConfigError);
}

TEST_CASE("tensor and embed") {
  const Operator a = annihilation(2);
  const Operator s = annihilation(1);
  const Matrix t = Matrix(tensor({s, a}));
  CHECK(t.rows() == 6);
  const std::vector<int> dims = {2, 3};
  const Matrix e = Matrix(embed(a, 1, dims));
  CHECK((e - Matrix(tensor({identity(2), a}))).norm() < 1e-15);
  CHECK_THROWS_AS(tensor(std::span<const Operator>{}), ConfigError);
  CHECK_THROWS_AS(embed(a, 0, dims), ConfigError);
  CHECK_THROWS_AS(embed(a, 3, dims), ConfigError);
}

TEST_CASE("displacement operator matches the matrix exponential") {
  for (cplx beta : {cplx(0.3, 0.0), cplx(-0.7, 1.1), cplx(1.5, -0.4)}) {
    const int cutoff = 20;
    const Matrix d = displacement_operator(beta, cutoff);
    const Matrix ref = oracle::displacement_expm(beta, cutoff);
    CHECK((d - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("coherent state amplitudes are Poissonian") {
  const cplx beta(1.2, -0.5);
  const Ket k = coherent_state(beta, default_coherent_cutoff(beta));
  const double nbar = std::norm(beta);
  double fact = 1.0;
  for (int n = 0; n < 8; ++n) {
    if (n > 0) fact *= n;
    const double p = std::exp(-nbar) * std::pow(nbar, n) / fact;
    CHECK(std::abs(std::norm(k.amplitudes()(n)) - p) < 1e-12);
  }
  CHECK(std::abs(k.amplitudes().norm() - 1.0) < 1e-12);
}

TEST_CASE("displacing the vacuum gives the coherent state") {
  const cplx beta(0.8, 0.6);
  const int c = default_coherent_cutoff(beta);
  Matrix vac = Matrix::Zero(c + 1, c + 1);
  vac(0, 0) = 1.0;
  const Matrix rho = displace(vac, beta);
  const Vector psi = coherent_state(beta, c).amplitudes();
  CHECK(fidelity(rho, psi) > 1 - 1e-10);
}

TEST_CASE("DensityMatrix validation") {
  Matrix m = Matrix::Identity(2, 2) * 0.5;
  CHECK_NOTHROW(DensityMatrix(m, {2}));
  CHECK_THROWS_AS(DensityMatrix(m, {3}), ConfigError);
  Matrix bad_trace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix(bad_trace, {2}), NumericalError);
  Matrix nonherm = m;
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix(nonherm, {2}), NumericalError);
  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(negative, {2}), NumericalError);
}

TEST_CASE("partial trace of a product state returns the factors") {
  std::mt19937 rng(7);
  const Matrix ra = oracle::random_density(3, 2, rng);
  const Matrix rb = oracle::random_density(4, 3, rng);
  const Matrix prod = oracle::TwoMode::kron(ra, rb);
  const std::vector<int> dims = {3, 4};
  CHECK((partial_trace(prod, dims, 0) - ra).norm() < 1e-13);
  CHECK((partial_trace(prod, dims, 1) - rb).norm() < 1e-13);
}

TEST_CASE("trace distance and fidelity of pure states") {
  const Vector p = coherent_state(0.5, 20).amplitudes();
  const Vector q = coherent_state(cplx(0.2, 0.4), 20).amplitudes();
  const double ov = std::norm(p.dot(q));
  const Matrix rp = p * p.adjoint(), rq = q * q.adjoint();
  CHECK(std::abs(fidelity(rp, rq) - ov) < 1e-9);
  CHECK(std::abs(fidelity(rp, q) - ov) < 1e-12);
  CHECK(std::abs(trace_distance(rp, rq) - std::sqrt(1 - ov)) < 1e-9);
}

TEST_CASE("metric properties on random states") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracle::random_density(5, 1 + trial % 5, rng);
    const Matrix b = oracle::random_density(5, 1 + (trial * 3) % 5, rng);
    const double td = trace_distance(a, b);
    const double f = fidelity(a, b);
    CHECK(td >= -1e-12);
    CHECK(td <= 1 + 1e-12);
    CHECK(std::abs(td - trace_distance(b, a)) < 1e-12);
    CHECK(f <= 1 + 1e-9);
    // Fuchs-van de Graaf.
    CHECK(1 - std::sqrt(f) <= td + 1e-9);
    CHECK(td <= std::sqrt(1 - f) + 1e-9);
    CHECK(std::abs(fidelity(a, a) - 1) < 1e-8);
  }
}
