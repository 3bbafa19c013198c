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

#include <string>

#include "cwl/hilbert.hpp"

namespace cwl {

/// Chain moments <(s^+)^n (s^-)^m>, 0 <= n, m <= M, of the collective
/// lowering operator s^- = sum_i |G_i><W_i|.
struct EmitterMoments {
  int M = 0;
  Matrix table;  // table(n, m)

  void validate() const;
};

/// Collective lowering operator on M emitters with `levels` levels each.
Matrix chain_lowering_matrix(int M, int levels);

/// Moments from an emitter-only state; subsystem dims of `rho_emitters`
/// give the emitter level count.
EmitterMoments emitter_moments(const DensityMatrix& rho_emitters, int M);
EmitterMoments emitter_moments(const Matrix& rho_emitters, int M, int levels);

/// ceil(tau|alpha|^2 + M + 6 sqrt(tau|alpha|^2 + M)).
int shortbin_cutoff(cplx alpha, double tau, int M);

struct ShortBinResult {
  // Renormalized to unit trace.
  DensityMatrix rho;
  // The mixture in the displaced frame, D^dag rho D, supported on |0>..|M>.
  Matrix displaced;
  // 1 - Tr before renormalization.
  double trace_deficit = 0.0;
  // Non-empty when kappa tau exceeds the validated range.
  std::string warning;
};

/// Closed-form short-bin state: a mixture of up-to-M-photon-added coherent
/// states built from the chain moments at t0, displaced by sqrt(tau) alpha.
/// A cutoff of 0 selects shortbin_cutoff().
Matrix shortbin_matrix(const EmitterMoments& mom, cplx alpha, double tau, double kappa, int cutoff = 0);
ShortBinResult shortbin_rho(const EmitterMoments& mom, cplx alpha, double tau, double kappa, int cutoff = 0);

/// Direct series for the same state: rho_{mn} = <:(b^dag)^n exp(-b^dag b) b^m:> / sqrt(n! m!)
/// with b = sqrt(tau)(alpha + sqrt(kappa) s^-), expanded to k_max terms as
/// products of finite emitter matrices. Throws NumericalError when the
/// ratio-test tail estimate exceeds 1e-10.
Matrix shortbin_oracle(const Matrix& rho_emitters, int M, int levels, cplx alpha, double tau, double kappa,
                       int k_max = 30, int cutoff = 0);

}  // namespace cwl
