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

#include "cwl/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cwl {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double atol, double rtol) {
  const auto n = static_cast<double>(err.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < err.size(); ++k) {
    const double sc = atol + rtol * std::max(std::abs(y0(k)), std::abs(y1(k)));
    const double r = std::abs(err(k)) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / n);
}

struct PopulationRecord {
  double t;
  std::vector<double> p;
  std::vector<double> dp;
};

// Observer that records excited populations and their derivatives at each
// accepted step, tracks trace drift and samples the spectrum.
class RunMonitor {
 public:
  RunMonitor(const Generator& gen, std::vector<double> sample_times, PropagationDiagnostics& diag,
             std::vector<PopulationRecord>& records)
      : gen_(gen), samples_(std::move(sample_times)), diag_(diag), records_(records) {}

  void operator()(double t, const Matrix& y, const Matrix& dy) {
    const auto& masks = gen_.excited_masks();
    PopulationRecord rec{t, {}, {}};
    for (const auto& m : masks) {
      double p = 0.0, dp = 0.0;
      for (int k = 0; k < gen_.dim(); ++k) {
        p += m(k) * std::real(y(k, k));
        dp += m(k) * std::real(dy(k, k));
      }
      rec.p.push_back(p);
      rec.dp.push_back(dp);
    }
    if (!records_.empty() && records_.back().t == t) records_.pop_back();
    records_.push_back(std::move(rec));

    diag_.max_trace_drift = std::max(diag_.max_trace_drift, std::abs(y.trace() - 1.0));
    while (next_sample_ < samples_.size() && samples_[next_sample_] <= t) {
      ++next_sample_;
      diag_.min_sampled_eigenvalue = std::min(diag_.min_sampled_eigenvalue, min_eigenvalue(y));
    }
  }

 private:
  const Generator& gen_;
  std::vector<double> samples_;
  std::size_t next_sample_ = 0;
  PropagationDiagnostics& diag_;
  std::vector<PopulationRecord>& records_;
};

StepControl control_for(const Numerics& num, double h_max) {
  StepControl ctl;
  ctl.rtol = num.rtol;
  ctl.atol = num.atol;
  ctl.h_max = h_max;
  ctl.min_step = num.min_step;
  ctl.max_steps = num.max_steps;
  return ctl;
}

void check_trace(const PropagationDiagnostics& diag) {
  if (diag.max_trace_drift > 1e-8) {
    std::ostringstream os;
    os << "trace drift " << diag.max_trace_drift << " exceeds 1e-8";
    throw NumericalError(os.str());
  }
}

Matrix embed_vacuum_cavity(const Matrix& rho_e, int cavity_dim) {
  const int de = static_cast<int>(rho_e.rows());
  Matrix out = Matrix::Zero(de * cavity_dim, de * cavity_dim);
  for (int i = 0; i < de; ++i)
    for (int j = 0; j < de; ++j) out(i * cavity_dim, j * cavity_dim) = rho_e(i, j);
  return out;
}

Matrix ground_state(int dim) {
  Matrix rho = Matrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  return rho;
}

std::vector<double> evenly_spaced(double a, double b, int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = (n == 1) ? a : a + (b - a) * k / (n - 1);
  return out;
}

// Cubic Hermite resampling of the recorded populations.
void resample_populations(const std::vector<PopulationRecord>& recs, int n_emitters, Trajectory& traj) {
  traj.populations.assign(n_emitters, std::vector<double>(traj.times.size(), 0.0));
  if (recs.empty() || n_emitters == 0) return;
  std::size_t seg = 0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    while (seg + 2 < recs.size() && recs[seg + 1].t < t) ++seg;
    const auto& r0 = recs[seg];
    const auto& r1 = recs[std::min(seg + 1, recs.size() - 1)];
    const double h = r1.t - r0.t;
    for (int i = 0; i < n_emitters; ++i) {
      double v;
      if (h <= 0.0) {
        v = r0.p[i];
      } else {
        const double s = std::clamp((t - r0.t) / h, 0.0, 1.0);
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        v = h00 * r0.p[i] + h10 * h * r0.dp[i] + h01 * r1.p[i] + h11 * h * r1.dp[i];
      }
      traj.populations[i][k] = v;
    }
  }
}

Matrix integrate_emitters(const SystemConfig& cfg, const BinSpec& bin, double t_end, Matrix rho_e,
                          double t_start, PropagationDiagnostics& diag, std::vector<PopulationRecord>& recs,
                          std::vector<double> samples) {
  if (t_end <= t_start) return rho_e;
  Generator gen(cfg, bin, Frame::kLab, 0);
  RunMonitor mon(gen, std::move(samples), diag, recs);
  Rhs f = [&gen](double t, const Matrix& y, Matrix& dy) { gen.apply(t, y, dy); };
  const double h_max = std::max(t_end, 1.0 / cfg.kappa) / 50.0;
  StepStats st = integrate_dopri5(f, t_start, t_end, rho_e, control_for(cfg.numerics, h_max),
                                  [&mon](double t, const Matrix& y, const Matrix& dy) { mon(t, y, dy); });
  diag.accepted_steps += st.accepted;
  diag.rejected_steps += st.rejected;
  diag.rhs_evaluations += st.evaluations;
  return rho_e;
}

Matrix integrate_bin(const SystemConfig& cfg, const BinSpec& bin, Frame frame, int cutoff, const Matrix& rho_e,
                     PropagationDiagnostics& diag, std::vector<PopulationRecord>& recs,
                     std::vector<double> samples, std::vector<int>& dims_out) {
  Generator gen(cfg, bin, frame, cutoff);
  dims_out = gen.dims();
  Matrix rho = embed_vacuum_cavity(rho_e, cutoff + 1);
  RunMonitor mon(gen, std::move(samples), diag, recs);
  Rhs f = [&gen](double t, const Matrix& y, Matrix& dy) { gen.apply(t, y, dy); };
  const double h_max = bin.tau * cfg.numerics.max_step_bin_fraction;
  StepStats st = integrate_dopri5(f, bin.t0, bin.end(), rho, control_for(cfg.numerics, h_max),
                                  [&mon](double t, const Matrix& y, const Matrix& dy) { mon(t, y, dy); });
  diag.accepted_steps += st.accepted;
  diag.rejected_steps += st.rejected;
  diag.rhs_evaluations += st.evaluations;
  return rho;
}

// A default cutoff that fails the convergence check is raised in steps of
// 4 up to `escalations` times; an explicit cutoff fails immediately.
Trajectory run(const SystemConfig& cfg, const BinSpec& bin, Frame frame, const Matrix* rho_e_t0,
               int escalations = -1) {
  if (escalations < 0) escalations = cfg.cavity_cutoff > 0 ? 0 : 6;
  cfg.validate();
  bin.validate();
  const int cutoff = resolved_cavity_cutoff(cfg, bin);
  const int de = static_cast<int>(std::lround(std::pow(cfg.levels(), cfg.M)));

  Trajectory traj;
  traj.frame = frame;
  auto& diag = traj.diagnostics;
  diag.cavity_cutoff = cutoff;

  const double t_begin = rho_e_t0 ? bin.t0 : 0.0;
  const int ns = std::max(cfg.numerics.positivity_samples, 1);
  const std::vector<double> samples = evenly_spaced(t_begin, bin.end(), ns);
  std::vector<double> pre_samples, bin_samples;
  for (double s : samples) (s < bin.t0 ? pre_samples : bin_samples).push_back(s);

  std::vector<PopulationRecord> recs;
  Matrix rho_e = rho_e_t0 ? *rho_e_t0 : ground_state(de);
  if (rho_e.rows() != de) throw ConfigError("emitter state dimension does not match configuration");
  if (!rho_e_t0) rho_e = integrate_emitters(cfg, bin, bin.t0, rho_e, 0.0, diag, recs, pre_samples);
  traj.rho_emitters_t0 = rho_e;

  std::vector<int> dims;
  Matrix rho = integrate_bin(cfg, bin, frame, cutoff, rho_e, diag, recs, bin_samples, dims);
  check_trace(diag);

  // Clean the O(eps) anti-Hermitian residue before validating.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  traj.rho_final = DensityMatrix(rho, dims);
  traj.rho_v = partial_trace(traj.rho_final, cfg.M);
  const Matrix& rv = traj.rho_v.matrix();
  diag.top_level_population = std::real(rv(rv.rows() - 1, rv.rows() - 1));

  if (cfg.numerics.check_cutoff) {
    PropagationDiagnostics scratch;
    std::vector<PopulationRecord> scratch_recs;
    std::vector<int> dims2;
    Matrix rho2 = integrate_bin(cfg, bin, frame, cutoff + 4, rho_e, scratch, scratch_recs, {}, dims2);
    const Matrix rv2 = partial_trace(rho2, dims2, cfg.M);
    diag.cutoff_check_distance = trace_distance(resize_mode(rv, cutoff + 5), rv2);
    if (diag.cutoff_check_distance > cfg.numerics.cutoff_tol) {
      if (escalations > 0) {
        SystemConfig raised = cfg;
        raised.cavity_cutoff = cutoff + 4;
        const Matrix start = traj.rho_emitters_t0;
        return run(raised, bin, frame, rho_e_t0 ? &start : nullptr, escalations - 1);
      }
      std::ostringstream os;
      os << "cavity cutoff " << cutoff << " not converged (cutoff+4 changes rho_v by "
         << diag.cutoff_check_distance << ")";
      throw NumericalError(os.str());
    }
  }

  traj.times = evenly_spaced(t_begin, bin.end(), cfg.numerics.output_points);
  resample_populations(recs, cfg.M, traj);
  return traj;
}

}  // namespace

StepStats integrate_dopri5(const Rhs& f, double t_start, double t_end, Matrix& y, const StepControl& ctl,
                           const StepObserver& observer) {
  StepStats st;
  if (!(t_end > t_start)) return st;
  const double span = t_end - t_start;
  const double h_max = ctl.h_max > 0.0 ? std::min(ctl.h_max, span) : span;

  Matrix k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
  f(t_start, y, k1);
  ++st.evaluations;
  if (observer) observer(t_start, y, k1);

  // Initial step from the scaled norms of y and f.
  const double d0 = error_norm(y, y, y, ctl.atol, ctl.rtol);
  const double d1 = error_norm(k1, y, y, ctl.atol, ctl.rtol);
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
  h = std::clamp(h, ctl.min_step * 10.0, h_max);

  constexpr double safe = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  double fac_old = 1e-4;
  double t = t_start;
  bool last_rejected = false;

  while (t < t_end) {
    if (st.accepted + st.rejected >= ctl.max_steps) throw NumericalError("maximum number of steps exceeded");
    bool last = false;
    if (t + 1.01 * h >= t_end) {
      h = t_end - t;
      last = true;
    }
    if (h < ctl.min_step * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os.precision(17);
      os << "step size underflow at t = " << t;
      throw NumericalError(os.str());
    }

    ytmp = y + h * a21 * k1;
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double t_new = last ? t_end : t + h;
    f(t_new, ynew, k7);
    st.evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, ynew, ctl.atol, ctl.rtol);
    if (!std::isfinite(en)) {
      h *= fac_min;
      ++st.rejected;
      last_rejected = true;
      continue;
    }

    // PI step-size controller.
    const double fac11 = std::pow(std::max(en, 1e-300), expo1);
    if (en <= 1.0) {
      double fac = fac11 / std::pow(fac_old, beta);
      fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
      fac_old = std::max(en, 1e-4);
      t = t_new;
      y.swap(ynew);
      k1.swap(k7);
      ++st.accepted;
      if (observer) observer(t, y, k1);
      double h_new = std::min(h / fac, h_max);
      if (last_rejected) h_new = std::min(h_new, h);
      h = h_new;
      last_rejected = false;
    } else {
      h = h / std::min(1.0 / fac_min, fac11 / safe);
      ++st.rejected;
      last_rejected = true;
    }
  }
  return st;
}

cplx frame_displacement(const SystemConfig& cfg, const BinSpec& bin, double t) {
  if (t <= bin.t0) return 0.0;
  return cfg.alpha * std::sqrt(std::min(t, bin.end()) - bin.t0);
}

Matrix lab_frame(const Matrix& rho_tilde, const SystemConfig& cfg, const BinSpec& bin, double t,
                 std::span<const int> dims) {
  const cplx beta = frame_displacement(cfg, bin, t);
  const int dc = dims.back();
  const Matrix disp = displacement_operator(beta, dc - 1);
  long de = rho_tilde.rows() / dc;
  Matrix full = Matrix::Zero(rho_tilde.rows(), rho_tilde.cols());
  // (I x D) rho (I x D)^dag, block by block.
  for (long i = 0; i < de; ++i)
    for (long j = 0; j < de; ++j)
      full.block(i * dc, j * dc, dc, dc) = disp * rho_tilde.block(i * dc, j * dc, dc, dc) * disp.adjoint();
  return full;
}

std::vector<Matrix> emitter_states(const SystemConfig& cfg, std::span<const double> times) {
  cfg.validate();
  const int de = static_cast<int>(std::lround(std::pow(cfg.levels(), cfg.M)));
  BinSpec never;  // cavity closed; the bin is irrelevant for the emitter-only generator
  Generator gen(cfg, never, Frame::kLab, 0);
  Rhs f = [&gen](double t, const Matrix& y, Matrix& dy) { gen.apply(t, y, dy); };
  std::vector<Matrix> out;
  Matrix rho = ground_state(de);
  double t = 0.0;
  const double t_last = times.empty() ? 0.0 : times.back();
  const double h_max = std::max(t_last, 1.0 / cfg.kappa) / 50.0;
  for (double target : times) {
    if (target < t) throw ConfigError("emitter_states requires sorted times");
    integrate_dopri5(f, t, target, rho, control_for(cfg.numerics, h_max));
    t = target;
    out.push_back(rho);
  }
  return out;
}

Trajectory propagate(const SystemConfig& cfg, const BinSpec& bin) { return run(cfg, bin, Frame::kLab, nullptr); }

Trajectory propagate_displaced(const SystemConfig& cfg, const BinSpec& bin) {
  return run(cfg, bin, Frame::kDisplaced, nullptr);
}

Trajectory propagate_bin(const SystemConfig& cfg, const BinSpec& bin, const Matrix& rho_emitters_t0, Frame frame) {
  return run(cfg, bin, frame, &rho_emitters_t0);
}

}  // namespace cwl
