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

#include "cwl/model.hpp"

#include <cmath>

namespace cwl {

namespace {

constexpr int kGround = 0;
constexpr int kExcited = 1;
constexpr int kDark = 2;

Operator single_entry(int dim, int row, int col) {
  Operator op(dim, dim);
  op.insert(row, col) = 1.0;
  op.makeCompressed();
  return op;
}

Operator pruned(Operator op) {
  op.prune(cplx(0.0), 1e-300);
  op.makeCompressed();
  return op;
}

}  // namespace

void SystemConfig::validate() const {
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (Gamma < 0.0 || gamma_D < 0.0) throw ConfigError("Gamma and gamma_D must be nonnegative");
  if (M < 0) throw ConfigError("emitter count M must be nonnegative");
  if (emitter_levels != 0 && emitter_levels != 2 && emitter_levels != 3)
    throw ConfigError("emitter_levels must be 2 or 3");
  if (emitter_levels == 2 && gamma_D > 0.0)
    throw ConfigError("gamma_D > 0 requires three-level emitters");
  if (cavity_cutoff != 0 && cavity_cutoff < 2) throw ConfigError("cavity_cutoff must be >= 2");
  if (!(numerics.rtol > 0.0) || !(numerics.atol > 0.0)) throw ConfigError("tolerances must be positive");
  if (numerics.output_points < 2) throw ConfigError("output_points must be >= 2");
}

int SystemConfig::levels() const {
  if (emitter_levels != 0) return emitter_levels;
  return gamma_D > 0.0 ? 3 : 2;
}

void BinSpec::validate() const {
  if (t0 < 0.0) throw ConfigError("bin start t0 must be nonnegative");
  if (!(tau > 0.0)) throw ConfigError("bin width tau must be positive");
  if (!(g_max > 0.0)) throw ConfigError("g_max must be positive");
}

cplx mode_gv(const BinSpec& bin, double t) {
  if (t <= bin.t0 || t > bin.end()) return 0.0;
  const double s = t - bin.t0;
  const double mag = 1.0 / std::sqrt(s);
  return -std::min(mag, bin.g_max);
}

int default_cavity_cutoff(const SystemConfig& cfg, const BinSpec& bin) {
  const double n = bin.tau * std::norm(cfg.alpha) + cfg.M;
  return std::max(2, static_cast<int>(std::ceil(n + 6.0 * std::sqrt(n))) + 2);
}

int resolved_cavity_cutoff(const SystemConfig& cfg, const BinSpec& bin) {
  return cfg.cavity_cutoff > 0 ? cfg.cavity_cutoff : default_cavity_cutoff(cfg, bin);
}

Generator::Generator(const SystemConfig& cfg, const BinSpec& bin, Frame frame, int cavity_cutoff)
    : cfg_(cfg), bin_(bin), frame_(frame) {
  cfg_.validate();
  bin_.validate();
  if (cavity_cutoff < 0) throw ConfigError("cavity cutoff must be nonnegative");
  const int lv = cfg_.levels();
  dims_.assign(cfg_.M, lv);
  dims_.push_back(cavity_cutoff + 1);
  long d = 1;
  for (int x : dims_) {
    d *= x;
    if (d > cfg_.numerics.max_dim)
      throw ConfigError("Hilbert space dimension exceeds numerics.max_dim (" +
                        std::to_string(cfg_.numerics.max_dim) + ")");
  }
  dim_ = static_cast<int>(d);

  const double sk = std::sqrt(cfg_.kappa);
  const cplx a = cfg_.alpha;
  const cplx ac = std::conj(a);

  std::vector<Operator> sm(cfg_.M), nw(cfg_.M);
  chain_lowering_ = Operator(dim_, dim_);
  Operator nw_sum(dim_, dim_);
  for (int i = 0; i < cfg_.M; ++i) {
    sm[i] = embed(single_entry(lv, kGround, kExcited), i, dims_);
    nw[i] = embed(single_entry(lv, kExcited, kExcited), i, dims_);
    chain_lowering_ += sm[i];
    nw_sum += nw[i];
  }
  b_ = embed(annihilation(cavity_cutoff), cfg_.M, dims_);
  const Operator le = sk * chain_lowering_;
  const Operator le_dag = Operator(le.adjoint());
  const Operator b_dag = Operator(b_.adjoint());

  // Chiral exchange: -i kappa/2 sum_{i>j} (s_i^+ s_j^- - s_j^+ s_i^-).
  Operator h_sys(dim_, dim_);
  for (int i = 0; i < cfg_.M; ++i)
    for (int j = 0; j < i; ++j) {
      Operator x = Operator(sm[i].adjoint()) * sm[j];
      h_sys += (-kI * 0.5 * cfg_.kappa) * (x - Operator(x.adjoint()));
    }

  // Emitter part of i(alpha* L - alpha L^dag); identical in both frames.
  const Operator h_drive_e = kI * (ac * le - a * le_dag);
  h_static_ = pruned(h_sys + h_drive_e);

  // Cavity drive i(alpha* g* b - alpha g b^dag) and exchange
  // (i/2)(sqrt(kappa) g* s^+ b - sqrt(kappa) g b^dag s^-).
  Operator exch_gconj = (0.5 * kI) * Operator(le_dag * b_);
  Operator exch_g = (-0.5 * kI) * Operator(b_dag * le);
  if (frame_ == Frame::kLab) {
    h_gconj_ = pruned(exch_gconj + (kI * ac) * b_);
    h_g_ = pruned(exch_g + (-kI * a) * b_dag);
  } else {
    h_gconj_ = pruned(exch_gconj);
    h_g_ = pruned(exch_g);
  }

  // L^dag L with L = le + g* b, plus the static channels.
  const Operator k_static = Operator(le_dag * le) + (cfg_.Gamma + cfg_.gamma_D) * nw_sum;
  const Operator k_gconj = Operator(le_dag * b_);
  const Operator k_g = Operator(b_dag * le);
  const Operator k_gabs2 = Operator(b_dag * b_);
  heff_static_ = pruned(h_static_ + (-0.5 * kI) * k_static);
  heff_gconj_ = pruned(h_gconj_ + (-0.5 * kI) * k_gconj);
  heff_g_ = pruned(h_g_ + (-0.5 * kI) * k_g);
  heff_gabs2_ = pruned((-0.5 * kI) * k_gabs2);

  for (int i = 0; i < cfg_.M; ++i) {
    if (cfg_.Gamma > 0.0) static_jumps_.push_back({sm[i], cfg_.Gamma});
  }
  if (lv == 3) {
    for (int i = 0; i < cfg_.M; ++i) {
      if (cfg_.gamma_D > 0.0)
        static_jumps_.push_back({embed(single_entry(lv, kDark, kExcited), i, dims_), cfg_.gamma_D});
    }
  }

  for (int i = 0; i < cfg_.M; ++i) {
    Eigen::VectorXd mask(dim_);
    for (int k = 0; k < dim_; ++k) mask(k) = std::real(nw[i].coeff(k, k));
    excited_masks_.push_back(std::move(mask));
  }
}

Operator Generator::hamiltonian(double t) const {
  const cplx g = mode_gv(bin_, t);
  return pruned(h_static_ + std::conj(g) * h_gconj_ + g * h_g_);
}

std::vector<JumpTerm> Generator::jump_operators(double t) const {
  const cplx g = mode_gv(bin_, t);
  std::vector<JumpTerm> out;
  out.push_back({pruned(std::sqrt(cfg_.kappa) * chain_lowering_ + std::conj(g) * b_), 1.0});
  out.insert(out.end(), static_jumps_.begin(), static_jumps_.end());
  return out;
}

void Generator::apply(double t, const Matrix& rho, Matrix& out, bool hermitian_input) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw ConfigError("state dimension does not match generator");
  const cplx g = mode_gv(bin_, t);
  const cplx gc = std::conj(g);

  Operator heff = heff_static_;
  Operator coll = std::sqrt(cfg_.kappa) * chain_lowering_;
  if (g != 0.0) {
    heff += gc * heff_gconj_ + g * heff_g_ + std::norm(g) * heff_gabs2_;
    coll += gc * b_;
  }

  Matrix x = heff * rho;
  if (hermitian_input) {
    out = -kI * x;
    out += kI * x.adjoint();
  } else {
    Matrix y = heff * rho.adjoint();
    out = -kI * x;
    out += kI * y.adjoint();
  }

  // A rho A^dag = (A (A rho)^dag)^dag holds for any rho.
  Matrix z = coll * rho;
  Matrix w = coll * z.adjoint();
  out += w.adjoint();
  for (const auto& jt : static_jumps_) {
    z.noalias() = jt.op * rho;
    w.noalias() = jt.op * z.adjoint();
    out += jt.rate * w.adjoint();
  }
}

Operator build_hamiltonian(const SystemConfig& cfg, const BinSpec& bin, double t) {
  Generator gen(cfg, bin, Frame::kLab, resolved_cavity_cutoff(cfg, bin));
  return gen.hamiltonian(t);
}

std::vector<JumpTerm> build_jump_operators(const SystemConfig& cfg, const BinSpec& bin, double t) {
  Generator gen(cfg, bin, Frame::kLab, resolved_cavity_cutoff(cfg, bin));
  return gen.jump_operators(t);
}

Matrix liouvillian_apply(const SystemConfig& cfg, const BinSpec& bin, double t, const Matrix& rho) {
  Generator gen(cfg, bin, Frame::kLab, resolved_cavity_cutoff(cfg, bin));
  Matrix out;
  gen.apply(t, rho, out, false);
  return out;
}

}  // namespace cwl
