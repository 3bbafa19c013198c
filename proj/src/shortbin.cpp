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

#include "cwl/shortbin.hpp"

#include <cmath>
#include <sstream>

namespace cwl {

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

int infer_levels(const DensityMatrix& rho, int M) {
  if (M == 0) return 2;
  const auto& d = rho.dims();
  if (static_cast<int>(d.size()) == M) return d[0];
  // Single-block dims: recover the per-emitter level count from the size.
  for (int lv : {2, 3})
    if (std::lround(std::pow(lv, M)) == rho.dim()) return lv;
  throw ConfigError("emitter state dimension does not match M");
}

}  // namespace

void EmitterMoments::validate() const {
  if (table.rows() != M + 1 || table.cols() != M + 1) throw ConfigError("invalid moments table: wrong size");
  if (std::abs(table(0, 0) - 1.0) > 1e-8) throw ConfigError("invalid moments table: entry (0,0) != 1");
  if ((table - table.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw ConfigError("invalid moments table: not Hermitian-symmetric");
}

Matrix chain_lowering_matrix(int M, int levels) {
  if (M < 0 || (levels != 2 && levels != 3)) throw ConfigError("invalid emitter chain");
  std::vector<int> dims(M, levels);
  Operator single(levels, levels);
  single.insert(0, 1) = 1.0;
  const int de = static_cast<int>(std::lround(std::pow(levels, M)));
  Operator s(de, de);
  for (int i = 0; i < M; ++i) s += embed(single, i, dims);
  return Matrix(s);
}

EmitterMoments emitter_moments(const Matrix& rho_emitters, int M, int levels) {
  const Matrix s = chain_lowering_matrix(M, levels);
  if (rho_emitters.rows() != s.rows() || rho_emitters.cols() != s.cols())
    throw ConfigError("emitter state dimension does not match M");
  const Matrix sp = s.adjoint();
  std::vector<Matrix> up(M + 2), down(M + 2);
  up[0] = down[0] = Matrix::Identity(s.rows(), s.cols());
  for (int k = 1; k <= M + 1; ++k) {
    up[k] = up[k - 1] * sp;
    down[k] = down[k - 1] * s;
  }
  if (down[M + 1].cwiseAbs().maxCoeff() != 0.0) throw NumericalError("chain lowering operator is not nilpotent");

  EmitterMoments mom;
  mom.M = M;
  mom.table.resize(M + 1, M + 1);
  for (int n = 0; n <= M; ++n)
    for (int m = 0; m <= M; ++m) mom.table(n, m) = (rho_emitters * up[n] * down[m]).trace();
  return mom;
}

EmitterMoments emitter_moments(const DensityMatrix& rho_emitters, int M) {
  return emitter_moments(rho_emitters.matrix(), M, infer_levels(rho_emitters, M));
}

int shortbin_cutoff(cplx alpha, double tau, int M) {
  const double n = tau * std::norm(alpha) + M;
  return std::max(M, static_cast<int>(std::ceil(n + 6.0 * std::sqrt(n))));
}

Matrix shortbin_matrix(const EmitterMoments& mom, cplx alpha, double tau, double kappa, int cutoff) {
  mom.validate();
  if (!(tau > 0.0) || !(kappa > 0.0)) throw ConfigError("tau and kappa must be positive");
  const int M = mom.M;
  if (cutoff <= 0) cutoff = shortbin_cutoff(alpha, tau, M);
  if (cutoff < M) throw ConfigError("cutoff below the emitter count");
  const int d = cutoff + 1;

  Matrix mix = Matrix::Zero(d, d);
  const double skt = std::sqrt(kappa * tau);
  for (int n = 0; n <= M; ++n)
    for (int m = 0; m <= M; ++m) {
      const cplx w = mom.table(n, m) * std::pow(skt, n + m);
      for (int k = 0; k <= std::min(n, m); ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        mix(m - k, n - k) += w * sign / (factorial(k) * std::sqrt(factorial(n - k) * factorial(m - k)));
      }
    }
  return displace(mix, std::sqrt(tau) * alpha);
}

ShortBinResult shortbin_rho(const EmitterMoments& mom, cplx alpha, double tau, double kappa, int cutoff) {
  Matrix raw = shortbin_matrix(mom, alpha, tau, kappa, cutoff);
  ShortBinResult res;
  res.displaced = displace(raw, -std::sqrt(tau) * alpha);
  const cplx tr = raw.trace();
  res.trace_deficit = 1.0 - std::real(tr);
  raw /= std::real(tr);
  raw = 0.5 * (raw + raw.adjoint()).eval();
  if (kappa * tau > 0.05) {
    std::ostringstream os;
    os << "kappa*tau = " << kappa * tau << " exceeds the short-bin range (0.05)";
    res.warning = os.str();
  }
  res.rho = DensityMatrix(std::move(raw), {static_cast<int>(res.displaced.rows())});
  return res;
}

Matrix shortbin_oracle(const Matrix& rho_emitters, int M, int levels, cplx alpha, double tau, double kappa,
                       int k_max, int cutoff) {
  if (k_max < 2) throw ConfigError("k_max must be at least 2");
  if (cutoff <= 0) cutoff = shortbin_cutoff(alpha, tau, M);
  const Matrix s = chain_lowering_matrix(M, levels);
  if (rho_emitters.rows() != s.rows()) throw ConfigError("emitter state dimension does not match M");
  const int de = static_cast<int>(s.rows());
  const Matrix b = std::sqrt(tau) * (alpha * Matrix::Identity(de, de) + std::sqrt(kappa) * s);
  const Matrix bd = b.adjoint();

  const int top = cutoff + k_max;
  std::vector<Matrix> left(top + 1), right(top + 1);  // rho (b^dag)^j and b^j
  left[0] = rho_emitters;
  right[0] = Matrix::Identity(de, de);
  for (int j = 1; j <= top; ++j) {
    left[j] = left[j - 1] * bd;
    right[j] = right[j - 1] * b;
  }
  auto expect = [&](int n, int m) { return left[n].cwiseProduct(right[m].transpose()).sum(); };

  const int d = cutoff + 1;
  Matrix out(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      cplx sum = 0.0, prev = 0.0, last = 0.0;
      double inv_kfact = 1.0;
      for (int k = 0; k <= k_max; ++k) {
        if (k > 0) inv_kfact /= k;
        const cplx term = ((k % 2 == 0) ? 1.0 : -1.0) * inv_kfact * expect(n + k, m + k);
        sum += term;
        prev = last;
        last = term;
      }
      const double r = std::abs(prev) > 0.0 ? std::abs(last) / std::abs(prev) : 0.0;
      const double tail = r < 1.0 ? std::abs(last) * r / (1.0 - r) : std::abs(last);
      if (!(tail < 1e-10) && std::abs(last) > 0.0) {
        std::ostringstream os;
        os << "short-bin series not converged at element (" << m << "," << n << "), tail " << tail;
        throw NumericalError(os.str());
      }
      out(m, n) = sum / std::sqrt(factorial(n) * factorial(m));
    }
  return out;
}

}  // namespace cwl
