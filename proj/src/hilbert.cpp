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

#include "cwl/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cwl {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue decomposition failed");
  return es.eigenvalues();
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix entries, std::vector<int> dims, StateTolerance tol)
    : entries_(std::move(entries)), dims_(std::move(dims)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    throw ConfigError("density matrix must be square and nonempty");
  if (dims_.empty()) dims_ = {static_cast<int>(entries_.rows())};
  const long prod = std::accumulate(dims_.begin(), dims_.end(), 1L, std::multiplies<long>());
  if (prod != entries_.rows()) throw ConfigError("subsystem dimensions do not match matrix size");

  const double herm = hermiticity_defect(entries_);
  if (herm > tol.hermiticity)
    throw NumericalError("density matrix not Hermitian (defect " + fmt_double(herm) + ")");
  const double tr_err = std::abs(entries_.trace() - 1.0);
  if (tr_err > tol.trace)
    throw NumericalError("density matrix trace deviates from 1 by " + fmt_double(tr_err));
  const double lmin = min_eigenvalue(entries_);
  if (lmin < tol.min_eigenvalue)
    throw NumericalError("density matrix has negative eigenvalue " + fmt_double(lmin));
}

Ket::Ket(Vector amplitudes, double norm_tol) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw ConfigError("empty ket");
  if (std::abs(amplitudes_.norm() - 1.0) > norm_tol) throw NumericalError("ket is not normalized");
}

Operator identity(int dim) {
  Operator id(dim, dim);
  id.setIdentity();
  return id;
}

Operator annihilation(int cutoff) {
  if (cutoff < 0) throw ConfigError("cutoff must be nonnegative");
  const int d = cutoff + 1;
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int n = 1; n < d; ++n) trips.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  Operator a(d, d);
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

Operator number_operator(int cutoff) {
  const int d = cutoff + 1;
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int n = 1; n < d; ++n) trips.emplace_back(n, n, static_cast<double>(n));
  Operator num(d, d);
  num.setFromTriplets(trips.begin(), trips.end());
  return num;
}

Operator tensor(std::span<const Operator> ops) {
  if (ops.empty()) throw ConfigError("tensor product of an empty operator list");
  for (const auto& op : ops)
    if (op.rows() != op.cols()) throw ConfigError("tensor factors must be square");

  Operator acc = ops[0];
  for (std::size_t k = 1; k < ops.size(); ++k) {
    const Operator& b = ops[k];
    const long db = b.rows();
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(static_cast<std::size_t>(acc.nonZeros() * b.nonZeros()));
    for (int ca = 0; ca < acc.outerSize(); ++ca)
      for (Operator::InnerIterator ia(acc, ca); ia; ++ia)
        for (int cb = 0; cb < b.outerSize(); ++cb)
          for (Operator::InnerIterator ib(b, cb); ib; ++ib)
            trips.emplace_back(ia.row() * db + ib.row(), ia.col() * db + ib.col(),
                               ia.value() * ib.value());
    Operator next(acc.rows() * db, acc.cols() * db);
    next.setFromTriplets(trips.begin(), trips.end());
    acc = std::move(next);
  }
  return acc;
}

Operator tensor(std::initializer_list<Operator> ops) {
  return tensor(std::span<const Operator>(ops.begin(), ops.size()));
}

Operator embed(const Operator& op, int index, std::span<const int> dims) {
  if (index < 0 || index >= static_cast<int>(dims.size())) throw ConfigError("subsystem index out of range");
  if (op.rows() != dims[index]) throw ConfigError("operator does not match subsystem dimension");
  long left = 1, right = 1;
  for (int i = 0; i < index; ++i) left *= dims[i];
  for (std::size_t i = index + 1; i < dims.size(); ++i) right *= dims[i];
  std::vector<Operator> parts;
  if (left > 1) parts.push_back(identity(static_cast<int>(left)));
  parts.push_back(op);
  if (right > 1) parts.push_back(identity(static_cast<int>(right)));
  return tensor(std::span<const Operator>(parts));
}

int default_coherent_cutoff(cplx beta) {
  const double r = std::abs(beta);
  return static_cast<int>(std::ceil(r * r + 6.0 * r + 10.0));
}

Ket coherent_state(cplx beta, int cutoff) {
  if (cutoff < 0) throw ConfigError("cutoff must be nonnegative");
  Vector c(cutoff + 1);
  c(0) = std::exp(-0.5 * std::norm(beta));
  for (int n = 1; n <= cutoff; ++n) c(n) = c(n - 1) * beta / std::sqrt(static_cast<double>(n));
  c /= c.norm();
  return Ket(std::move(c));
}

Matrix displacement_operator(cplx beta, int cutoff) {
  if (cutoff < 0) throw ConfigError("cutoff must be nonnegative");
  const int d = cutoff + 1;
  Matrix disp(d, d);
  // Column 0 is |beta> without renormalization; D|n> = (a^dag - conj(beta)) D|n-1> / sqrt(n).
  // a^dag only raises, so every retained entry is exact.
  disp(0, 0) = std::exp(-0.5 * std::norm(beta));
  for (int m = 1; m < d; ++m) disp(m, 0) = disp(m - 1, 0) * beta / std::sqrt(static_cast<double>(m));
  const cplx bc = std::conj(beta);
  for (int n = 1; n < d; ++n) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    disp(0, n) = -bc * disp(0, n - 1) * inv;
    for (int m = 1; m < d; ++m)
      disp(m, n) = (std::sqrt(static_cast<double>(m)) * disp(m - 1, n - 1) - bc * disp(m, n - 1)) * inv;
  }
  return disp;
}

Matrix displace(const Matrix& rho, cplx beta) {
  const Matrix disp = displacement_operator(beta, static_cast<int>(rho.rows()) - 1);
  return disp * rho * disp.adjoint();
}

DensityMatrix pure_state(const Ket& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), {psi.dim()});
}

Matrix partial_trace(const Matrix& rho, std::span<const int> dims, int keep) {
  if (keep < 0 || keep >= static_cast<int>(dims.size())) throw ConfigError("subsystem index out of range");
  long left = 1, right = 1;
  for (int i = 0; i < keep; ++i) left *= dims[i];
  for (std::size_t i = keep + 1; i < dims.size(); ++i) right *= dims[i];
  const long k = dims[keep];
  if (left * k * right != rho.rows()) throw ConfigError("subsystem dimensions do not match matrix size");
  Matrix out = Matrix::Zero(k, k);
  for (long a = 0; a < k; ++a)
    for (long b = 0; b < k; ++b) {
      cplx s = 0;
      for (long l = 0; l < left; ++l)
        for (long r = 0; r < right; ++r) s += rho((l * k + a) * right + r, (l * k + b) * right + r);
      out(a, b) = s;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep) {
  Matrix red = partial_trace(rho.matrix(), rho.dims(), keep);
  return DensityMatrix(std::move(red), {rho.dims()[keep]});
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError("trace distance of mismatched matrices");
  return 0.5 * hermitian_eigenvalues(a - b).cwiseAbs().sum();
}

Matrix psd_sqrt(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  // Eigenvalues at the rounding level of the largest one are treated as zero;
  // their square roots would otherwise inject O(sqrt(eps)) errors.
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(ev.size()) *
                       std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const Eigen::VectorXd s = ev.unaryExpr([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ConfigError("fidelity of mismatched matrices");
  const Matrix sa = psd_sqrt(a);
  const Eigen::VectorXd ev = hermitian_eigenvalues(sa * b * sa);
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(ev.size()) *
                       std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double s = ev.unaryExpr([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; }).sum();
  return std::min(1.0, s * s);
}

double fidelity(const Matrix& rho, const Vector& psi) {
  if (rho.rows() != psi.size()) throw ConfigError("fidelity of mismatched state sizes");
  return std::real(psi.dot(rho * psi));
}

double min_eigenvalue(const Matrix& m) { return hermitian_eigenvalues(m).minCoeff(); }

double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

Matrix resize_mode(const Matrix& rho, int dim) {
  Matrix out = Matrix::Zero(dim, dim);
  const int n = std::min<int>(dim, static_cast<int>(rho.rows()));
  out.topLeftCorner(n, n) = rho.topLeftCorner(n, n);
  return out;
}

}  // namespace cwl
