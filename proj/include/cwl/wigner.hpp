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

#include <iosfwd>
#include <vector>

#include "cwl/hilbert.hpp"

namespace cwl {

/// Rectangular lattice of beta = x + i p.
struct WignerGrid {
  double x_min = -4.0;
  double x_max = 4.0;
  double p_min = -4.0;
  double p_max = 4.0;
  double spacing = 0.05;

  void validate() const;
  int nx() const;
  int np() const;
};

/// Grid centered on `center` with the given half-width.
WignerGrid centered_grid(cplx center, double half_width = 4.0, double spacing = 0.05);

struct WignerResult {
  WignerGrid grid;
  std::vector<double> xs;
  std::vector<double> ps;
  // values(i, j) = W(xs[j] + i ps[i]).
  Eigen::MatrixXd values;
  double negativity = 0.0;
  double norm = 0.0;
};

/// W(beta) = (2/pi) Tr[rho D(beta) P D(beta)^dag], P the photon parity,
/// normalized so that the integral over dx dp is Tr rho.
double wigner_point(const Matrix& rho, cplx beta);

/// Wigner function of a single-mode Fock-basis state on a grid. Grids
/// coarser than 0.1 are rejected.
WignerResult wigner_grid(const DensityMatrix& rho, const WignerGrid& grid);
WignerResult wigner_grid(const Matrix& rho, const WignerGrid& grid);

/// Trapezoidal integral of |min(0, W)|.
double negativity(const WignerResult& w);

struct NegativityEstimate {
  double value = 0.0;
  double spacing = 0.0;
  double previous = 0.0;  // value at twice the final spacing
  int refinements = 0;
};

/// Total negativity with spacing halved until two successive values agree
/// to within `rel_tol` (or an absolute floor of 1e-6).
NegativityEstimate refined_negativity(const Matrix& rho, WignerGrid grid, double rel_tol = 0.01,
                                      int max_refinements = 3);

/// CSV with header "x,p,W".
void write_wigner_csv(std::ostream& os, const WignerResult& w);

}  // namespace cwl
