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

#include "cwl/ansatz.hpp"
#include "cwl/integrator.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cwl;

TEST_CASE("recovers an exact displaced mixture") {
  std::mt19937 rng(31);
  std::normal_distribution<double> g;
  Matrix q(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q(i, j) = {g(rng), g(rng)};
  const Matrix basis = Eigen::HouseholderQR<Matrix>(q).householderQ();
  const std::vector<double> w = {0.7, 0.2, 0.1};
  const int dim = 30;
  Matrix tilde = Matrix::Zero(dim, dim);
  for (int i = 0; i < 3; ++i) {
    Vector v = Vector::Zero(dim);
    v.head(3) = basis.col(i);
    tilde += w[i] * v * v.adjoint();
  }
  const cplx alpha(0.9, 0.0);
  const double tau = 1.5;
  const Matrix rho = displace(tilde, std::sqrt(tau) * alpha);
  const AnsatzFit fit = fit_displaced_mixture(DensityMatrix(rho, {dim}), alpha, tau);
  CHECK(fit.fidelity > 1 - 1e-8);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(fit.weights[i] - w[i]) < 1e-6);
  // Rows are orthonormal.
  CHECK((fit.coefficients * fit.coefficients.adjoint() - Matrix::Identity(3, 3)).norm() < 1e-10);
  const Matrix sigma = ansatz_state(fit, dim);
  CHECK(std::abs(sigma.trace() - 1.0) < 1e-8);
}

TEST_CASE("coherent state is a one-component ansatz") {
  const cplx alpha(0.5, 0.3);
  const double tau = 2.0;
  const Vector psi = coherent_state(std::sqrt(tau) * alpha, 25).amplitudes();
  const AnsatzFit fit = fit_displaced_mixture(DensityMatrix(psi * psi.adjoint(), {26}), alpha, tau, 3, 1);
  CHECK(fit.fidelity > 1 - 1e-9);
  CHECK(std::abs(fit.weights[0] - 1.0) < 1e-8);
  CHECK(std::abs(std::abs(fit.coefficients(0, 0)) - 1.0) < 1e-8);
}

TEST_CASE("phase convention of the coefficients") {
  SystemConfig cfg;
  cfg.alpha = 0.9;
  const BinSpec bin{0.5, 1.5};
  const Trajectory tr = propagate(cfg, bin);
  const AnsatzFit fit = fit_displaced_mixture(tr.rho_v, cfg.alpha, bin.tau);
  for (Eigen::Index i = 0; i < fit.coefficients.rows(); ++i) {
    for (Eigen::Index j = 0; j < fit.coefficients.cols(); ++j) {
      if (std::abs(fit.coefficients(i, j)) > 1e-8) {
        CHECK(std::abs(fit.coefficients(i, j).imag()) < 1e-12);
        CHECK(fit.coefficients(i, j).real() > 0.0);
        break;
      }
    }
  }
  CHECK(fit.overlap <= fit.fidelity + 1e-12);
  CHECK(fit.weights[0] >= fit.weights[1]);
}

TEST_CASE("argument validation") {
  const DensityMatrix rho(Matrix::Identity(4, 4) / 4.0, {4});
  CHECK_THROWS_AS(fit_displaced_mixture(rho, 0.5, 1.0, 0, 1), ConfigError);
  CHECK_THROWS_AS(fit_displaced_mixture(rho, 0.5, 1.0, 5, 1), ConfigError);
  CHECK_THROWS_AS(fit_displaced_mixture(rho, 0.5, 1.0, 2, 3), ConfigError);
}
