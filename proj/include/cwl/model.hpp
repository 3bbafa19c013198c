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

/// Integration and truncation controls shared by all propagations.
struct Numerics {
  double rtol = 1e-8;
  double atol = 1e-10;
  // Largest step inside the bin, as a fraction of tau.
  double max_step_bin_fraction = 1.0 / 50.0;
  double min_step = 1e-15;
  long max_steps = 20'000'000;
  long max_dim = 4096;
  int output_points = 500;
  // Re-run with cutoff + 4 and require trace distance < cutoff_tol. A
  // default cutoff is raised in steps of 4 until the check passes.
  bool check_cutoff = false;
  double cutoff_tol = 1e-6;
  int positivity_samples = 10;
};

/// Physical parameters. Rates are in absolute units; with kappa = 1 they
/// are in units of kappa, and alpha is in units of sqrt(kappa).
struct SystemConfig {
  cplx alpha{0.9, 0.0};
  double kappa = 1.0;
  double Gamma = 0.0;
  double gamma_D = 0.0;
  int M = 1;
  // 0 selects two-level emitters when gamma_D == 0, three-level otherwise.
  int emitter_levels = 0;
  // 0 selects default_cavity_cutoff().
  int cavity_cutoff = 0;
  Numerics numerics;

  void validate() const;
  int levels() const;
};

/// Flat temporal mode v(t) = 1/sqrt(tau) on (t0, t0 + tau].
struct BinSpec {
  double t0 = 0.0;
  double tau = 1.0;
  // Clamp on |g_v(t)|; the default 1e3 corresponds to 1e3 sqrt(kappa) at kappa = 1.
  double g_max = 1e3;

  void validate() const;
  double end() const { return t0 + tau; }
};

/// Virtual-cavity coupling g_v(t) = -v*(t) / sqrt(int_0^t |v|^2), i.e.
/// -1/sqrt(t - t0) inside the bin, clamped to |g_v| <= g_max; zero outside.
cplx mode_gv(const BinSpec& bin, double t);

/// ceil(tau|alpha|^2 + M + 6 sqrt(tau|alpha|^2 + M)) + 2.
int default_cavity_cutoff(const SystemConfig& cfg, const BinSpec& bin);
int resolved_cavity_cutoff(const SystemConfig& cfg, const BinSpec& bin);

/// Drive convention. kDisplaced evolves the state with the coherent
/// cavity amplitude factored out: the cavity drive is dropped and only the
/// emitter drive i sqrt(kappa)(alpha* s^- - alpha s^+) remains.
enum class Frame { kLab, kDisplaced };

struct JumpTerm {
  Operator op;
  double rate;
};

/// Time-dependent Lindblad generator over emitter_1 x ... x emitter_M x cavity.
/// A cavity cutoff of 0 yields a one-level cavity (emitters only).
class Generator {
 public:
  Generator(const SystemConfig& cfg, const BinSpec& bin, Frame frame, int cavity_cutoff);

  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return dim_; }
  int cavity_cutoff() const { return dims_.back() - 1; }
  const BinSpec& bin() const { return bin_; }

  Operator hamiltonian(double t) const;
  std::vector<JumpTerm> jump_operators(double t) const;

  /// d rho / dt. With `hermitian_input` the input is assumed Hermitian,
  /// which halves the cost of the commutator.
  void apply(double t, const Matrix& rho, Matrix& out, bool hermitian_input = true) const;

  /// Diagonal of |W_i><W_i| on the full space.
  const std::vector<Eigen::VectorXd>& excited_masks() const { return excited_masks_; }
  const Operator& chain_lowering() const { return chain_lowering_; }
  const Operator& cavity_lowering() const { return b_; }

 private:
  SystemConfig cfg_;
  BinSpec bin_;
  Frame frame_;
  std::vector<int> dims_;
  int dim_ = 0;

  Operator chain_lowering_;  // sum_i sigma_i^-
  Operator b_;
  Operator h_static_;        // H_sys + emitter drive
  Operator h_gconj_;         // coefficient of g* in H
  Operator h_g_;             // coefficient of g in H
  Operator heff_static_, heff_gconj_, heff_g_, heff_gabs2_;
  std::vector<JumpTerm> static_jumps_;
  std::vector<Eigen::VectorXd> excited_masks_;
};

Operator build_hamiltonian(const SystemConfig& cfg, const BinSpec& bin, double t);
std::vector<JumpTerm> build_jump_operators(const SystemConfig& cfg, const BinSpec& bin, double t);
/// Lindblad right-hand side for an arbitrary (not necessarily Hermitian) matrix.
Matrix liouvillian_apply(const SystemConfig& cfg, const BinSpec& bin, double t, const Matrix& rho);

}  // namespace cwl
