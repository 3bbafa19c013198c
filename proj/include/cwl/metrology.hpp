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

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cwl/hilbert.hpp"
#include "cwl/integrator.hpp"

namespace cwl {

// Mach-Zehnder convention used throughout: 50/50 splitters with an i phase
// on reflection, B = [[1, i], [i, 1]] / sqrt(2); phase phi applied to arm a
// between the splitters, P = diag(e^{i phi}, 1). Output modes c' = B P B c.
// Port b carries the coherent state |sqrt(N_b) e^{i b_phase}>.
inline constexpr const char* kMachZehnderConvention =
    "50/50 splitters B=[[1,i],[i,1]]/sqrt2, phase diag(exp(i phi),1) in arm a, J_z=(n_a'-n_b')/2";

/// Normally ordered moments mu(p, q) = <a^dag^p a^q> for p + q <= 4.
struct MomentSet {
  Eigen::Matrix<cplx, 5, 5> mu = Eigen::Matrix<cplx, 5, 5>::Zero();
  double N_a = 0.0;

  void validate() const;
};

/// Moments of a single-mode state. With `check_truncation`, the
/// contribution of the four highest Fock levels to any moment must stay
/// below `truncation_tol`; otherwise NumericalError("cutoff too small").
MomentSet extract_moments(const Matrix& rho, bool check_truncation = true, double truncation_tol = 1e-8);

struct ConvergedMoments {
  Trajectory trajectory;  // at the final cutoff
  MomentSet moments;
  int cutoff = 0;
  // Largest moment change between cutoff - 4 and cutoff.
  double change = 0.0;
};

/// Propagates at increasing cavity cutoffs (steps of 4, starting from the
/// configured one) until all moments change by less than `tol`.
ConvergedMoments converged_moments(const SystemConfig& cfg, const BinSpec& bin, double tol = 1e-8,
                                   int max_rounds = 8);

MomentSet coherent_moments(cplx beta);
/// Zero-mean Gaussian moments from <a^dag a> = n and <a a> = m (Wick).
MomentSet gaussian_moments(double n, cplx m);
/// Squeezed vacuum S(r e^{i theta})|0>: n = sinh^2 r, m = -e^{i theta} sinh r cosh r.
MomentSet squeezed_vacuum_moments(double r, double theta);

/// Output-port mode transformation U(phi) = B P(phi) B.
Eigen::Matrix2cd mach_zehnder_unitary(double phi);

struct MZResult {
  std::vector<double> phi_grid;
  std::vector<double> mean_jz;
  std::vector<double> var_jz;
  double N_a = 0.0;           // mean photon number in port a
  double N_b = 0.0;
  double shot_noise_N_a = 0.0;  // port-a photon number used for the shot-noise reference
  double phi_opt = 0.0;
  double delta_phi = 0.0;
  double delta_phi_sn = 0.0;  // 1 / sqrt(shot_noise_N_a + N_b)
  double improvement = 0.0;   // delta_phi_sn / delta_phi - 1
  double delta_phi_cr = std::numeric_limits<double>::quiet_NaN();
  double cr_improvement = std::numeric_limits<double>::quiet_NaN();
  double squeezing_theta = std::numeric_limits<double>::quiet_NaN();
  std::string convention = kMachZehnderConvention;
};

/// Uniform grid on the open interval (0, pi).
std::vector<double> default_phi_grid(int points = 800);

struct JzPoint {
  double mean = 0.0;
  double var = 0.0;
  double slope = 0.0;  // d<J_z>/dphi
};

/// Exact <J_z>, Var J_z and the analytic phase derivative at one phase.
JzPoint jz_statistics(const MomentSet& mom, double N_b, double phi, double b_phase = 0.0);

/// Estimator sensitivity min_phi Delta J_z / |d<J_z>/dphi| over the grid,
/// refined by golden-section search around the best grid point. Points
/// with |slope| < 1e-9 (N_a + N_b) are skipped. A negative
/// `shot_noise_N_a` uses the state's own N_a for the shot-noise reference.
MZResult jz_sensitivity(const MomentSet& mom, double N_b, std::span<const double> phi_grid,
                        double shot_noise_N_a = -1.0, double b_phase = 0.0);

struct CramerRaoResult {
  double qfi = 0.0;
  double delta_phi_cr = 0.0;
  // Spread of the QFI over the phases checked (should vanish).
  double qfi_phase_spread = 0.0;
  int cutoff_b = 0;
};

/// Quantum Cramer-Rao bound for the state after the first splitter with
/// rho_v in port a and |sqrt(N_b)> in port b. The phase generator is
/// J_z = (n_a - n_b)/2 (no external phase reference). The QFI follows from
/// the symmetric-logarithmic-derivative formula over the eigenpairs of the
/// two-mode state; those are the transformed eigenpairs of rho_v.
/// A cutoff_b of 0 selects default_coherent_cutoff(sqrt(N_b)).
CramerRaoResult crb(const Matrix& rho_v, double N_b, double phi, int cutoff_b = 0, long max_dim = 4'000'000,
                    double b_phase = 0.0);

/// Classical Fisher information of output photon counting at phase phi
/// (diagnostic; cost grows with N_b^2).
double counting_fisher_information(const Matrix& rho_v, double N_b, double phi, int cutoff_b = 0,
                                   double b_phase = 0.0);

/// Squeezed vacuum with sinh^2 r = N_a_match in port a; the squeezing
/// angle is chosen from {0, pi/2, pi, 3pi/2} and refined.
MZResult squeezed_reference(double N_a_match, double N_b, std::span<const double> phi_grid);

// Two-mode Fock-space helpers (rows: photons in mode a, cols: mode b).

/// Applies the linear-optics transformation whose Heisenberg action is
/// c' = U c to a two-mode state; photon number is conserved, so the output
/// holds up to (rows + cols - 2) photons per mode.
Matrix apply_two_mode_unitary(const Matrix& psi, const Eigen::Matrix2cd& u);

/// Product amplitudes psi_a(m) psi_b(n).
Matrix product_state(const Vector& a, const Vector& b);

}  // namespace cwl
