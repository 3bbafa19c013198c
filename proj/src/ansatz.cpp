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

#include "cwl/ansatz.hpp"

#include <cmath>

namespace cwl {

namespace {

void fix_phase(Eigen::Ref<Eigen::RowVectorXcd> row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (std::abs(row(j)) > 1e-10) {
      row *= std::conj(row(j)) / std::abs(row(j));
      return;
    }
  }
}

}  // namespace

AnsatzFit fit_displaced_mixture(const DensityMatrix& rho_v, cplx alpha, double tau, int span, int components) {
  if (rho_v.dims().size() != 1) throw ConfigError("ansatz fit needs a single-mode state");
  const int d = rho_v.dim();
  if (span < 1 || span > d || components < 1 || components > span)
    throw ConfigError("invalid ansatz span or component count");

  AnsatzFit fit;
  fit.span = span;
  fit.displacement = std::sqrt(tau) * alpha;
  const Matrix tilde = displace(rho_v.matrix(), -fit.displacement);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (tilde + tilde.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");

  fit.coefficients = Matrix::Zero(components, span);
  int basis_fill = 0;
  for (int i = 0; i < components; ++i) {
    const int idx = d - 1 - i;  // eigenvalues ascend
    fit.weights.push_back(std::max(0.0, es.eigenvalues()(idx)));
    Eigen::RowVectorXcd row = es.eigenvectors().col(idx).head(span).transpose();
    // Gram-Schmidt against the rows already fixed; fall back to canonical
    // vectors when the projection vanishes.
    for (int attempt = 0;; ++attempt) {
      for (int k = 0; k < i; ++k) {
        const cplx ov = fit.coefficients.row(k).dot(row);
        row -= ov * fit.coefficients.row(k);
      }
      if (row.norm() > 1e-12) break;
      if (basis_fill >= span || attempt > span) throw NumericalError("ansatz basis degenerate");
      row = Eigen::RowVectorXcd::Unit(span, basis_fill++);
    }
    row /= row.norm();
    fix_phase(row);
    fit.coefficients.row(i) = row;
  }

  const Matrix sigma = ansatz_state(fit, d);
  fit.overlap = std::real((rho_v.matrix() * sigma).trace());
  fit.fidelity = fidelity(rho_v.matrix(), sigma);
  return fit;
}

Matrix ansatz_state(const AnsatzFit& fit, int dim) {
  Matrix tilde = Matrix::Zero(dim, dim);
  double total = 0.0;
  for (std::size_t i = 0; i < fit.weights.size(); ++i) {
    Vector v = Vector::Zero(dim);
    v.head(fit.span) = fit.coefficients.row(static_cast<Eigen::Index>(i)).transpose();
    tilde += fit.weights[i] * v * v.adjoint();
    total += fit.weights[i];
  }
  if (!(total > 0.0)) throw NumericalError("ansatz weights vanish");
  tilde /= total;
  return displace(tilde, fit.displacement);
}

}  // namespace cwl
