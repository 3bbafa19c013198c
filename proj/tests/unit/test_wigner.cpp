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
#include <sstream>

#include "cwl/wigner.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cwl;

namespace {

Matrix fock(int n, int dim) {
  Matrix r = Matrix::Zero(dim, dim);
  r(n, n) = 1.0;
  return r;
}

}  // namespace

TEST_CASE("vacuum and Fock-state values") {
  CHECK(std::abs(wigner_point(fock(0, 3), 0.0) - 2.0 / std::numbers::pi) < 1e-14);
  for (cplx beta : {cplx(0.0), cplx(0.3, 0.4), cplx(-1.1, 0.2), cplx(2.0, -1.5)}) {
    CHECK(std::abs(wigner_point(fock(1, 4), beta) - oracle::wigner_fock1(beta)) < 1e-13);
  }
  // Parity at the origin: W(0) = (2/pi)(-1)^n.
  for (int n = 0; n < 8; ++n)
    CHECK(std::abs(wigner_point(fock(n, 10), 0.0) - 2.0 / std::numbers::pi * (n % 2 ? -1 : 1)) < 1e-12);
}

TEST_CASE("agrees with the displaced-parity oracle on random states") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    const Matrix rho = oracle::random_density(6, 2 + trial, rng);
    for (cplx beta : {cplx(0.2, -0.1), cplx(-0.9, 0.7), cplx(1.3, 0.4)})
      CHECK(std::abs(wigner_point(rho, beta) - oracle::wigner_parity(rho, beta)) < 1e-10);
  }
}

TEST_CASE("normalization and positivity of classical states") {
  const cplx beta(1.0, -0.5);
  const Vector psi = coherent_state(beta, 30).amplitudes();
  const WignerResult w = wigner_grid(Matrix(psi * psi.adjoint()), centered_grid(beta, 4.0, 0.05));
  CHECK(std::abs(w.norm - 1.0) < 1e-6);
  CHECK(w.negativity < 1e-12);
  CHECK(w.values.minCoeff() > -1e-12);

  // Thermal state with n = 0.5.
  const int d = 40;
  Matrix th = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n) th(n, n) = std::pow(0.5 / 1.5, n) / 1.5;
  th /= th.trace().real();
  const WignerResult wt = wigner_grid(th, centered_grid(0.0, 4.0, 0.05));
  CHECK(std::abs(wt.norm - 1.0) < 1e-6);
  CHECK(wt.negativity < 1e-12);
}

TEST_CASE("single-photon negativity") {
  const double expected = 2.0 * std::exp(-0.5) - 1.0;
  const NegativityEstimate est = refined_negativity(fock(1, 4), centered_grid(0.0, 4.0, 0.05));
  CHECK(std::abs(est.value - expected) < 2e-3);
  const WignerResult fine = wigner_grid(fock(1, 4), centered_grid(0.0, 4.0, 0.02));
  CHECK(std::abs(fine.negativity - expected) < 1e-3);
  CHECK(std::abs(fine.norm - 1.0) < 1e-6);
}

TEST_CASE("grid validation") {
  WignerGrid g;
  g.spacing = 0.2;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.spacing = 0.05;
  g.x_max = g.x_min;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  const WignerGrid c = centered_grid(cplx(1.0, 2.0), 1.0, 0.05);
  CHECK(c.nx() == 41);
  CHECK(c.np() == 41);
  CHECK(std::abs(c.x_min - 0.0) < 1e-15);
  CHECK(std::abs(c.p_max - 3.0) < 1e-15);
}

TEST_CASE("CSV output") {
  const WignerResult w = wigner_grid(fock(0, 2), centered_grid(0.0, 0.1, 0.05));
  std::ostringstream os;
  write_wigner_csv(os, w);
  const std::string s = os.str();
  CHECK(s.rfind("x,p,W\n", 0) == 0);
  CHECK(s.find('\r') == std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + w.grid.nx() * w.grid.np());
}
