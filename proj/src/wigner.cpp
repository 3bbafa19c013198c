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

#include "cwl/wigner.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "cwl/parallel.hpp"

namespace cwl {

void WignerGrid::validate() const {
  if (!(spacing > 0.0)) throw ConfigError("Wigner grid spacing must be positive");
  if (spacing > 0.1) throw ConfigError("Wigner grid spacing above 0.1 is too coarse");
  if (!(x_max > x_min) || !(p_max > p_min)) throw ConfigError("Wigner grid bounds are empty");
}

int WignerGrid::nx() const { return static_cast<int>(std::floor((x_max - x_min) / spacing + 1e-9)) + 1; }
int WignerGrid::np() const { return static_cast<int>(std::floor((p_max - p_min) / spacing + 1e-9)) + 1; }

WignerGrid centered_grid(cplx center, double half_width, double spacing) {
  return {center.real() - half_width, center.real() + half_width, center.imag() - half_width,
          center.imag() + half_width, spacing};
}

double wigner_point(const Matrix& rho, cplx beta) {
  // Laguerre-polynomial recursion over the Fock elements of the displaced
  // parity operator.
  const int n = static_cast<int>(rho.rows());
  std::vector<cplx> wl(n);
  wl[0] = std::exp(-2.0 * std::norm(beta)) / std::numbers::pi;
  double w = std::real(rho(0, 0)) * std::real(wl[0]);
  for (int k = 1; k < n; ++k) {
    wl[k] = 2.0 * beta * wl[k - 1] / std::sqrt(static_cast<double>(k));
    w += 2.0 * std::real(rho(0, k) * wl[k]);
  }
  const cplx bc = std::conj(beta);
  for (int m = 1; m < n; ++m) {
    const double sm = std::sqrt(static_cast<double>(m));
    cplx temp = wl[m];
    wl[m] = (2.0 * bc * temp - sm * wl[m - 1]) / sm;
    w += std::real(rho(m, m) * wl[m]);
    for (int k = m + 1; k < n; ++k) {
      const cplx next = (2.0 * beta * wl[k - 1] - sm * temp) / std::sqrt(static_cast<double>(k));
      temp = wl[k];
      wl[k] = next;
      w += 2.0 * std::real(rho(m, k) * wl[k]);
    }
  }
  return 2.0 * w;
}

namespace {

double trapezoid(const Eigen::MatrixXd& v, double h, bool negative_part) {
  double acc = 0.0;
  const auto rows = v.rows(), cols = v.cols();
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double wi = (i == 0 || i == rows - 1) ? 0.5 : 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double wj = (j == 0 || j == cols - 1) ? 0.5 : 1.0;
      const double x = negative_part ? std::max(0.0, -v(i, j)) : v(i, j);
      acc += wi * wj * x;
    }
  }
  return acc * h * h;
}

}  // namespace

WignerResult wigner_grid(const Matrix& rho, const WignerGrid& grid) {
  grid.validate();
  if (rho.rows() != rho.cols()) throw ConfigError("Wigner function needs a square single-mode matrix");
  WignerResult out;
  out.grid = grid;
  const int nx = grid.nx(), np = grid.np();
  out.xs.resize(nx);
  out.ps.resize(np);
  for (int j = 0; j < nx; ++j) out.xs[j] = grid.x_min + j * grid.spacing;
  for (int i = 0; i < np; ++i) out.ps[i] = grid.p_min + i * grid.spacing;
  out.values.resize(np, nx);
  parallel_for(static_cast<std::size_t>(np), [&](std::size_t i) {
    for (int j = 0; j < nx; ++j) out.values(i, j) = wigner_point(rho, cplx(out.xs[j], out.ps[i]));
  });
  out.norm = trapezoid(out.values, grid.spacing, false);
  out.negativity = trapezoid(out.values, grid.spacing, true);
  return out;
}

WignerResult wigner_grid(const DensityMatrix& rho, const WignerGrid& grid) {
  if (rho.dims().size() != 1) throw ConfigError("Wigner function needs a single-mode state");
  return wigner_grid(rho.matrix(), grid);
}

double negativity(const WignerResult& w) { return trapezoid(w.values, w.grid.spacing, true); }

NegativityEstimate refined_negativity(const Matrix& rho, WignerGrid grid, double rel_tol, int max_refinements) {
  NegativityEstimate est;
  est.spacing = grid.spacing;
  est.value = wigner_grid(rho, grid).negativity;
  est.previous = est.value;
  for (int r = 0; r < max_refinements; ++r) {
    grid.spacing *= 0.5;
    const double v = wigner_grid(rho, grid).negativity;
    est.previous = est.value;
    est.value = v;
    est.spacing = grid.spacing;
    est.refinements = r + 1;
    if (std::abs(v - est.previous) <= std::max(rel_tol * std::abs(v), 1e-6)) break;
  }
  return est;
}

void write_wigner_csv(std::ostream& os, const WignerResult& w) {
  const auto old = os.precision(17);
  os << "x,p,W\n";
  for (std::size_t i = 0; i < w.ps.size(); ++i)
    for (std::size_t j = 0; j < w.xs.size(); ++j)
      os << w.xs[j] << ',' << w.ps[i] << ',' << w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
         << '\n';
  os.precision(old);
}

}  // namespace cwl
