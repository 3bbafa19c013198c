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

#include "cwl/metrology.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace cwl {

namespace {

constexpr double kPi = std::numbers::pi;

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

cplx ipow(cplx z, int k) {
  cplx r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

template <typename F>
double golden_section_min(F&& f, double a, double b, int iters = 80) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && std::abs(b - a) > 1e-13; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

Vector coherent_amplitudes(cplx beta, int cutoff) { return coherent_state(beta, cutoff).amplitudes(); }

}  // namespace

void MomentSet::validate() const {
  if (std::abs(mu(0, 0) - 1.0) > 1e-8) throw ConfigError("moment set: mu(0,0) must be 1");
  for (int p = 0; p <= 4; ++p)
    for (int q = 0; p + q <= 4; ++q)
      if (std::abs(mu(p, q) - std::conj(mu(q, p))) > 1e-10) throw ConfigError("moment set: not Hermitian");
  if (N_a < -1e-12) throw ConfigError("moment set: negative photon number");
}

MomentSet extract_moments(const Matrix& rho, bool check_truncation, double truncation_tol) {
  if (rho.rows() != rho.cols() || rho.rows() < 1) throw ConfigError("moments need a square single-mode matrix");
  const int d = static_cast<int>(rho.rows());
  const Matrix a = Matrix(annihilation(d - 1));
  const Matrix ad = a.adjoint();

  auto compute = [&](const Matrix& r) {
    MomentSet ms;
    std::vector<Matrix> up(5), down(5);
    up[0] = down[0] = Matrix::Identity(d, d);
    for (int k = 1; k <= 4; ++k) {
      up[k] = up[k - 1] * ad;
      down[k] = down[k - 1] * a;
    }
    for (int p = 0; p <= 4; ++p)
      for (int q = 0; p + q <= 4; ++q) ms.mu(p, q) = (r * up[p] * down[q]).trace();
    ms.N_a = std::real(ms.mu(1, 1));
    return ms;
  };

  MomentSet ms = compute(rho);
  if (check_truncation) {
    if (d <= 5) throw NumericalError("cutoff too small for moment extraction");
    Matrix low = rho;
    low.bottomRows(4).setZero();
    low.rightCols(4).setZero();
    const MomentSet ref = compute(low);
    const double diff = (ms.mu - ref.mu).cwiseAbs().maxCoeff();
    if (diff > truncation_tol) {
      std::ostringstream os;
      os << "cutoff too small: top Fock levels change moments by " << diff;
      throw NumericalError(os.str());
    }
  }
  return ms;
}

ConvergedMoments converged_moments(const SystemConfig& cfg, const BinSpec& bin, double tol, int max_rounds) {
  SystemConfig c = cfg;
  c.cavity_cutoff = resolved_cavity_cutoff(cfg, bin);
  Trajectory prev = propagate(c, bin);
  MomentSet prev_mom = extract_moments(prev.rho_v.matrix(), false);
  double change = 0.0;
  for (int round = 0; round < max_rounds; ++round) {
    c.cavity_cutoff += 4;
    Trajectory next = propagate(c, bin);
    MomentSet mom = extract_moments(next.rho_v.matrix(), false);
    change = (mom.mu - prev_mom.mu).cwiseAbs().maxCoeff();
    if (change < tol) return {std::move(next), mom, c.cavity_cutoff, change};
    prev = std::move(next);
    prev_mom = mom;
  }
  std::ostringstream os;
  os << "cutoff too small: moments still change by " << change << " at cutoff " << c.cavity_cutoff;
  throw NumericalError(os.str());
}

MomentSet coherent_moments(cplx beta) {
  MomentSet ms;
  for (int p = 0; p <= 4; ++p)
    for (int q = 0; p + q <= 4; ++q) ms.mu(p, q) = ipow(std::conj(beta), p) * ipow(beta, q);
  ms.N_a = std::norm(beta);
  return ms;
}

MomentSet gaussian_moments(double n, cplx m) {
  // Isserlis/Wick over the daggered (first p) and plain (last q) factors.
  MomentSet ms;
  for (int p = 0; p <= 4; ++p)
    for (int q = 0; p + q <= 4; ++q) {
      std::vector<int> ops;  // 1 = a^dag, 0 = a
      ops.insert(ops.end(), p, 1);
      ops.insert(ops.end(), q, 0);
      auto pair_value = [&](int x, int y) -> cplx {
        if (x == 1 && y == 1) return std::conj(m);
        if (x == 0 && y == 0) return m;
        return n;
      };
      std::function<cplx(std::vector<int>)> wick = [&](std::vector<int> rest) -> cplx {
        if (rest.empty()) return 1.0;
        if (rest.size() % 2 == 1) return 0.0;
        cplx acc = 0.0;
        for (std::size_t j = 1; j < rest.size(); ++j) {
          std::vector<int> sub;
          for (std::size_t k = 1; k < rest.size(); ++k)
            if (k != j) sub.push_back(rest[k]);
          acc += pair_value(rest[0], rest[j]) * wick(sub);
        }
        return acc;
      };
      ms.mu(p, q) = wick(ops);
    }
  ms.N_a = n;
  return ms;
}

MomentSet squeezed_vacuum_moments(double r, double theta) {
  const double sh = std::sinh(r), ch = std::cosh(r);
  return gaussian_moments(sh * sh, -std::polar(1.0, theta) * sh * ch);
}

Eigen::Matrix2cd mach_zehnder_unitary(double phi) {
  Eigen::Matrix2cd bs;
  bs << 1.0, kI, kI, 1.0;
  bs /= std::sqrt(2.0);
  Eigen::Matrix2cd ph = Eigen::Matrix2cd::Zero();
  ph(0, 0) = std::polar(1.0, phi);
  ph(1, 1) = 1.0;
  return bs * ph * bs;
}

namespace {

Eigen::Matrix2cd mach_zehnder_derivative(double phi) {
  Eigen::Matrix2cd bs;
  bs << 1.0, kI, kI, 1.0;
  bs /= std::sqrt(2.0);
  Eigen::Matrix2cd dph = Eigen::Matrix2cd::Zero();
  dph(0, 0) = kI * std::polar(1.0, phi);
  return bs * dph * bs;
}

// J_z = sum_ij X_ij c_i^dag c_j for output rows u0, u1 of U.
Eigen::Matrix2cd jz_coefficients(const Eigen::Matrix2cd& u) {
  Eigen::Matrix2cd x;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      x(i, j) = 0.5 * (std::conj(u(0, i)) * u(0, j) - std::conj(u(1, i)) * u(1, j));
  return x;
}

Eigen::Matrix2cd jz_coefficient_derivative(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& du) {
  Eigen::Matrix2cd x;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      x(i, j) = 0.5 * (std::conj(du(0, i)) * u(0, j) + std::conj(u(0, i)) * du(0, j) -
                       std::conj(du(1, i)) * u(1, j) - std::conj(u(1, i)) * du(1, j));
  return x;
}

}  // namespace

JzPoint jz_statistics(const MomentSet& mom, double N_b, double phi, double b_phase) {
  const cplx beta = std::polar(std::sqrt(N_b), b_phase);
  const cplx bc = std::conj(beta);
  // <(a^dag)^p (b^dag)^r a^q b^s> with b coherent.
  auto ev = [&](int p, int r, int q, int s) { return mom.mu(p, q) * ipow(bc, r) * ipow(beta, s); };
  auto e1 = [&](int i, int j) { return ev(i == 0, i == 1, j == 0, j == 1); };
  auto e2 = [&](int i, int k, int j, int l) {
    return ev((i == 0) + (k == 0), (i == 1) + (k == 1), (j == 0) + (l == 0), (j == 1) + (l == 1));
  };

  const Eigen::Matrix2cd u = mach_zehnder_unitary(phi);
  const Eigen::Matrix2cd x = jz_coefficients(u);
  const Eigen::Matrix2cd dx = jz_coefficient_derivative(u, mach_zehnder_derivative(phi));

  cplx mean = 0.0, slope = 0.0, second = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      mean += x(i, j) * e1(i, j);
      slope += dx(i, j) * e1(i, j);
    }
  // J_z^2 = sum X_ij X_kl (c_i^dag c_k^dag c_j c_l + delta_jk c_i^dag c_l).
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          cplx term = e2(i, k, j, l);
          if (j == k) term += e1(i, l);
          second += x(i, j) * x(k, l) * term;
        }
  JzPoint pt;
  pt.mean = std::real(mean);
  pt.slope = std::real(slope);
  pt.var = std::max(0.0, std::real(second) - pt.mean * pt.mean);
  return pt;
}

std::vector<double> default_phi_grid(int points) {
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k) g[k] = kPi * (k + 0.5) / points;
  return g;
}

MZResult jz_sensitivity(const MomentSet& mom, double N_b, std::span<const double> phi_grid, double shot_noise_N_a,
                        double b_phase) {
  mom.validate();
  if (N_b < 0.0) throw ConfigError("N_b must be nonnegative");
  if (phi_grid.size() < 400) throw ConfigError("phi grid needs at least 400 points");
  MZResult res;
  res.N_a = mom.N_a;
  res.N_b = N_b;
  res.shot_noise_N_a = shot_noise_N_a >= 0.0 ? shot_noise_N_a : mom.N_a;
  res.phi_grid.assign(phi_grid.begin(), phi_grid.end());

  const double flat = 1e-9 * (mom.N_a + N_b);
  auto sensitivity = [&](double phi) {
    const JzPoint pt = jz_statistics(mom, N_b, phi, b_phase);
    if (std::abs(pt.slope) < flat) return std::numeric_limits<double>::infinity();
    return std::sqrt(pt.var) / std::abs(pt.slope);
  };

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < phi_grid.size(); ++k) {
    const JzPoint pt = jz_statistics(mom, N_b, phi_grid[k], b_phase);
    res.mean_jz.push_back(pt.mean);
    res.var_jz.push_back(pt.var);
    if (std::abs(pt.slope) < flat) continue;
    const double s = std::sqrt(pt.var) / std::abs(pt.slope);
    if (s < best) {
      best = s;
      best_k = k;
    }
  }
  if (!std::isfinite(best)) throw NumericalError("J_z signal is flat over the whole phase grid");

  const double lo = phi_grid[best_k > 0 ? best_k - 1 : best_k];
  const double hi = phi_grid[best_k + 1 < phi_grid.size() ? best_k + 1 : best_k];
  double phi_opt = phi_grid[best_k];
  if (hi > lo) {
    const double cand = golden_section_min(sensitivity, lo, hi);
    if (sensitivity(cand) < best) phi_opt = cand;
  }
  res.phi_opt = phi_opt;
  res.delta_phi = std::min(best, sensitivity(phi_opt));
  res.delta_phi_sn = 1.0 / std::sqrt(res.shot_noise_N_a + N_b);
  res.improvement = res.delta_phi_sn / res.delta_phi - 1.0;
  return res;
}

Matrix product_state(const Vector& a, const Vector& b) { return a * b.transpose(); }

Matrix apply_two_mode_unitary(const Matrix& psi, const Eigen::Matrix2cd& u) {
  const int ma = static_cast<int>(psi.rows()) - 1;
  const int mb = static_cast<int>(psi.cols()) - 1;
  const int top = ma + mb;
  Matrix out = Matrix::Zero(top + 1, top + 1);

  // log |u| and phases; zero entries only contribute at exponent 0.
  double lu[2][2];
  cplx ph[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double m = std::abs(u(i, j));
      lu[i][j] = m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity();
      ph[i][j] = m > 0.0 ? u(i, j) / m : cplx(1.0);
    }
  std::vector<double> lf(top + 1);
  for (int n = 0; n <= top; ++n) lf[n] = log_factorial(n);

  // a^dag -> u00 a^dag + u10 b^dag,  b^dag -> u01 a^dag + u11 b^dag.
  auto term = [&](int m, int j, int col) {  // col 0: from a^dag, col 1: from b^dag
    const int to_a = j, to_b = m - j;
    double l = lf[m] - lf[j] - lf[m - j];
    cplx p = 1.0;
    if (to_a > 0) {
      l += to_a * lu[0][col];
      p *= ipow(ph[0][col], to_a);
    }
    if (to_b > 0) {
      l += to_b * lu[1][col];
      p *= ipow(ph[1][col], to_b);
    }
    return std::pair<double, cplx>(l, p);
  };

  for (int m = 0; m <= ma; ++m)
    for (int n = 0; n <= mb; ++n) {
      const cplx c = psi(m, n);
      if (std::abs(c) < 1e-18) continue;
      const double base = -0.5 * (lf[m] + lf[n]);
      for (int j = 0; j <= m; ++j) {
        const auto [la, pa] = term(m, j, 0);
        if (!std::isfinite(la)) continue;
        for (int k = 0; k <= n; ++k) {
          const auto [lb, pb] = term(n, k, 1);
          if (!std::isfinite(lb)) continue;
          const int na = j + k, nb = m + n - j - k;
          const double l = base + la + lb + 0.5 * (lf[na] + lf[nb]);
          out(na, nb) += c * pa * pb * std::exp(l);
        }
      }
    }
  return out;
}

CramerRaoResult crb(const Matrix& rho_v, double N_b, double phi, int cutoff_b, long max_dim, double b_phase) {
  if (N_b < 0.0) throw ConfigError("N_b must be nonnegative");
  const cplx beta = std::polar(std::sqrt(N_b), b_phase);
  CramerRaoResult res;
  res.cutoff_b = cutoff_b > 0 ? cutoff_b : default_coherent_cutoff(beta);
  const long top = rho_v.rows() + res.cutoff_b - 1;
  if ((top + 1) * (top + 1) > max_dim) throw NumericalError("two-mode state exceeds the memory limit");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_v + rho_v.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of rho_v failed");
  const Vector bvec = coherent_amplitudes(beta, res.cutoff_b);

  Eigen::Matrix2cd bs;
  bs << 1.0, kI, kI, 1.0;
  bs /= std::sqrt(2.0);

  std::vector<double> lam;
  std::vector<Matrix> psi;
  const double lmax = es.eigenvalues().maxCoeff();
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double l = es.eigenvalues()(k);
    if (l <= 1e-14 * lmax) continue;
    lam.push_back(l);
    psi.push_back(apply_two_mode_unitary(product_state(es.eigenvectors().col(k), bvec), bs));
  }

  auto qfi_at = [&](double ph) {
    const int n = static_cast<int>(psi[0].rows());
    std::vector<Matrix> s(psi.size());
    Matrix gdiag(n, n);  // J_z = (n_a - n_b)/2
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gdiag(i, j) = 0.5 * (i - j);
    for (std::size_t k = 0; k < psi.size(); ++k) {
      s[k] = psi[k];
      for (int i = 0; i < n; ++i) s[k].row(i) *= std::polar(1.0, ph * i);
    }
    double f = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Matrix gk = s[k].cwiseProduct(gdiag);
      f += 4.0 * lam[k] * gk.squaredNorm();
      for (std::size_t l = 0; l < s.size(); ++l) {
        const cplx gkl = (s[k].conjugate().cwiseProduct(s[l].cwiseProduct(gdiag))).sum();
        f -= 8.0 * lam[k] * lam[l] / (lam[k] + lam[l]) * std::norm(gkl);
      }
    }
    return f;
  };

  double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
  for (double ph : {phi, phi + 0.7, phi + 1.9}) {
    const double f = qfi_at(ph);
    fmin = std::min(fmin, f);
    fmax = std::max(fmax, f);
  }
  res.qfi = fmax;
  res.qfi_phase_spread = fmax - fmin;
  if (!(res.qfi > 0.0)) throw NumericalError("quantum Fisher information vanishes");
  res.delta_phi_cr = 1.0 / std::sqrt(res.qfi);
  return res;
}

double counting_fisher_information(const Matrix& rho_v, double N_b, double phi, int cutoff_b, double b_phase) {
  const cplx beta = std::polar(std::sqrt(N_b), b_phase);
  if (cutoff_b <= 0) cutoff_b = default_coherent_cutoff(beta);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_v + rho_v.adjoint()));
  const Vector bvec = coherent_amplitudes(beta, cutoff_b);
  const double h = 1e-4;
  auto distribution = [&](double ph) {
    Eigen::MatrixXd p;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const double l = es.eigenvalues()(k);
      if (l <= 1e-14) continue;
      const Matrix out =
          apply_two_mode_unitary(product_state(es.eigenvectors().col(k), bvec), mach_zehnder_unitary(ph));
      if (p.size() == 0) p = Eigen::MatrixXd::Zero(out.rows(), out.cols());
      p += l * out.cwiseAbs2();
    }
    return p;
  };
  const Eigen::MatrixXd p0 = distribution(phi), pp = distribution(phi + h), pm = distribution(phi - h);
  double f = 0.0;
  for (Eigen::Index i = 0; i < p0.size(); ++i)
    if (p0(i) > 1e-14) {
      const double d = (pp(i) - pm(i)) / (2.0 * h);
      f += d * d / p0(i);
    }
  return f;
}

MZResult squeezed_reference(double N_a_match, double N_b, std::span<const double> phi_grid) {
  if (N_a_match < 0.0) throw ConfigError("N_a_match must be nonnegative");
  const double r = std::asinh(std::sqrt(N_a_match));
  auto eval = [&](double theta) { return jz_sensitivity(squeezed_vacuum_moments(r, theta), N_b, phi_grid); };
  double best_theta = 0.0;
  MZResult best = eval(0.0);
  for (double th : {kPi / 2, kPi, 3 * kPi / 2}) {
    MZResult cand = eval(th);
    if (cand.delta_phi < best.delta_phi) {
      best = std::move(cand);
      best_theta = th;
    }
  }
  if (r > 0.0) {
    const double th = golden_section_min([&](double t) { return eval(t).delta_phi; }, best_theta - kPi / 4,
                                         best_theta + kPi / 4, 40);
    MZResult cand = eval(th);
    if (cand.delta_phi < best.delta_phi) {
      best = std::move(cand);
      best_theta = th;
    }
  }
  best.squeezing_theta = best_theta;
  return best;
}

}  // namespace cwl
