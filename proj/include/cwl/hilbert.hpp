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

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cwl {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
// Column-compressed sparse storage for Hamiltonians and jump operators.
using Operator = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

inline constexpr cplx kI{0.0, 1.0};

// Raised for invalid input or configuration (CLI exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical procedure fails or a result violates an
// invariant (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerances enforced by DensityMatrix.
struct StateTolerance {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double min_eigenvalue = -1e-8;
};

/// Hermitian, unit-trace, positive semidefinite matrix over a composite
/// space. `dims` lists subsystem dimensions in tensor order; their product
/// equals the matrix dimension.
class DensityMatrix {
 public:
  // The trivial one-dimensional state.
  DensityMatrix() : entries_(Matrix::Ones(1, 1)), dims_{1} {}
  DensityMatrix(Matrix entries, std::vector<int> dims, StateTolerance tol = {});

  const Matrix& matrix() const { return entries_; }
  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return static_cast<int>(entries_.rows()); }

 private:
  Matrix entries_;
  std::vector<int> dims_;
};

/// Unit-norm state vector.
class Ket {
 public:
  explicit Ket(Vector amplitudes, double norm_tol = 1e-12);

  const Vector& amplitudes() const { return amplitudes_; }
  int dim() const { return static_cast<int>(amplitudes_.size()); }

 private:
  Vector amplitudes_;
};

Operator identity(int dim);
/// Truncated annihilation operator on {|0>, ..., |cutoff>}.
Operator annihilation(int cutoff);
Operator number_operator(int cutoff);

/// Kronecker product in the given order.
Operator tensor(std::span<const Operator> ops);
Operator tensor(std::initializer_list<Operator> ops);

/// Lifts `op` acting on subsystem `index` to the full composite space.
Operator embed(const Operator& op, int index, std::span<const int> dims);

/// Smallest cutoff that keeps the coherent-state truncation leakage
/// below 1e-10: ceil(|beta|^2 + 6|beta| + 10).
int default_coherent_cutoff(cplx beta);

/// Coherent state |beta> on {|0>, ..., |cutoff>}, renormalized over the
/// truncation.
Ket coherent_state(cplx beta, int cutoff);

/// Fock-basis matrix elements <m|D(beta)|n> for m, n <= cutoff. Entries
/// are the exact infinite-space elements restricted to the retained block.
Matrix displacement_operator(cplx beta, int cutoff);

/// D(beta) rho D(beta)^dagger, restricted to the dimension of rho.
Matrix displace(const Matrix& rho, cplx beta);

DensityMatrix pure_state(const Ket& psi);

/// Reduced state of subsystem `keep`.
DensityMatrix partial_trace(const DensityMatrix& rho, int keep);
Matrix partial_trace(const Matrix& rho, std::span<const int> dims, int keep);

double trace_distance(const Matrix& a, const Matrix& b);
/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
double fidelity(const Matrix& a, const Matrix& b);
/// <psi|rho|psi>.
double fidelity(const Matrix& rho, const Vector& psi);

double min_eigenvalue(const Matrix& m);
double hermiticity_defect(const Matrix& m);

/// Hermitian positive square root via eigendecomposition.
Matrix psd_sqrt(const Matrix& m);

/// Zero-pads or truncates a single-mode matrix to `dim` levels.
Matrix resize_mode(const Matrix& rho, int dim);

}  // namespace cwl
