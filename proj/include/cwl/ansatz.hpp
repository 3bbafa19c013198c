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

#pragma once

#include <vector>

#include "cwl/hilbert.hpp"

namespace cwl {

/// Mixture of displaced few-photon states sum_i p_i |psi_i><psi_i| with
/// |psi_i> = D(sqrt(tau) alpha) sum_j a_{ij} |j>.
struct AnsatzFit {
  std::vector<double> weights;  // descending
  Matrix coefficients;          // rows a_i over |0> .. |span-1>, orthonormal
  double fidelity = 0.0;        // Uhlmann
  double overlap = 0.0;         // Tr[rho_v sigma]
  cplx displacement{0.0, 0.0};
  int span = 3;
};

/// Takes the `components` largest eigenpairs of D^dag rho_v D, projects the
/// eigenvectors onto span{|0>, ..., |span-1>} and re-orthonormalizes them
/// in descending-eigenvalue order. The first non-negligible coefficient of
/// each row is made real and positive.
AnsatzFit fit_displaced_mixture(const DensityMatrix& rho_v, cplx alpha, double tau, int span = 3,
                                int components = 3);

/// The fitted state sigma (normalized) in the lab frame, same dimension as rho_v.
Matrix ansatz_state(const AnsatzFit& fit, int dim);

}  // namespace cwl
