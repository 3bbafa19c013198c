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

#include "cwl/selftest.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "cwl/bethe.hpp"
#include "cwl/integrator.hpp"
#include "cwl/metrology.hpp"
#include "cwl/shortbin.hpp"
#include "cwl/sweep.hpp"
#include "cwl/wigner.hpp"

namespace cwl {

namespace {

class Recorder {
 public:
  explicit Recorder(const SelftestOptions& o) : opts_(o) {}

  template <typename Fn>
  void check(const std::string& suite, const std::string& name, Fn&& fn) {
    CheckResult r;
    r.suite = suite;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      std::ostringstream detail;
      r.pass = fn(detail);
      r.detail = detail.str();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (opts_.on_result) opts_.on_result(r);
    results_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  const SelftestOptions& opts_;
  std::vector<CheckResult> results_;
};

SystemConfig make_cfg(double alpha, int M, double Gamma = 0.0, double gamma_D = 0.0) {
  SystemConfig c;
  c.alpha = alpha;
  c.M = M;
  c.Gamma = Gamma;
  c.gamma_D = gamma_D;
  return c;
}

bool state_ok(const Trajectory& tr, std::ostream& d) {
  const Matrix& r = tr.rho_final.matrix();
  const double trace_err = std::abs(r.trace() - 1.0);
  const double herm = hermiticity_defect(r);
  const double mine = std::min(tr.diagnostics.min_sampled_eigenvalue, min_eigenvalue(tr.rho_v.matrix()));
  d << "trace_err=" << trace_err << " drift=" << tr.diagnostics.max_trace_drift << " herm=" << herm
    << " min_eig=" << mine;
  return trace_err < 1e-8 && tr.diagnostics.max_trace_drift < 1e-8 && herm < 1e-10 && mine > -1e-8;
}

}  // namespace

std::vector<CheckResult> run_selftest(const SelftestOptions& opts) {
  Recorder rec(opts);

  struct Case {
    const char* name;
    SystemConfig cfg;
    BinSpec bin;
  };
  std::vector<Case> cases = {
      {"M0", make_cfg(0.7, 0), {1.0, 2.0}},
      {"M1", make_cfg(0.9, 1), {0.5, 1.5}},
      {"M1_Gamma", make_cfg(0.5, 1, 1.0), {1.0, 2.0}},
      {"M1_gammaD", make_cfg(0.5, 1, 0.0, 1.0), {1.0, 2.0}},
      {"M2", make_cfg(0.9, 2), {0.5, 1.5}},
  };
  if (!opts.quick) {
    cases.push_back({"M2_noise", make_cfg(0.5, 2, 0.5, 0.5), {1.0, 2.0}});
    cases.push_back({"M3", make_cfg(0.9, 3), {0.5, 1.0}});
  }
  for (const auto& c : cases)
    rec.check("propagation", std::string("trace_hermiticity_positivity_") + c.name,
              [&](std::ostream& d) { return state_ok(propagate(c.cfg, c.bin), d); });

  rec.check("wigner", "coherent_normalization", [](std::ostream& d) {
    const Vector psi = coherent_state({1.0, 0.5}, 30).amplitudes();
    const WignerResult w = wigner_grid(Matrix(psi * psi.adjoint()), centered_grid({1.0, 0.5}, 5.0, 0.05));
    d << "norm=" << w.norm << " negativity=" << w.negativity;
    return std::abs(w.norm - 1.0) < 1e-3 && w.negativity < 1e-9;
  });
  rec.check("wigner", "fock1_negativity", [](std::ostream& d) {
    Matrix rho = Matrix::Zero(4, 4);
    rho(1, 1) = 1.0;
    const NegativityEstimate n = refined_negativity(rho, centered_grid(0.0, 4.0, 0.05));
    const double expected = 2.0 * std::exp(-0.5) - 1.0;
    d << "negativity=" << n.value << " expected=" << expected;
    return std::abs(n.value - expected) < 2e-3;
  });

  rec.check("frame", "displaced_frame_equivalence", [](std::ostream& d) {
    const SystemConfig cfg = make_cfg(0.9, 1);
    const BinSpec bin{0.5, 1.5};
    const Trajectory lab = propagate(cfg, bin);
    const Trajectory disp = propagate_displaced(cfg, bin);
    const Matrix back = displace(disp.rho_v.matrix(), frame_displacement(cfg, bin, bin.end()));
    const double dist = trace_distance(lab.rho_v.matrix(), back);
    d << "trace_distance=" << dist;
    return dist < 1e-5;
  });

  rec.check("scaling", "kappa_scaling_invariance", [](std::ostream& d) {
    const double s = 2.5;
    SystemConfig a = make_cfg(0.7, 1, 0.3, 0.0);
    BinSpec bin{0.8, 1.6};
    SystemConfig b = a;
    b.kappa = s;
    b.Gamma = s * a.Gamma;
    b.alpha = std::sqrt(s) * a.alpha;
    BinSpec bin_b{bin.t0 / s, bin.tau / s, bin.g_max * std::sqrt(s)};
    const double dist = trace_distance(propagate(a, bin).rho_v.matrix(), propagate(b, bin_b).rho_v.matrix());
    d << "trace_distance=" << dist;
    return dist < 1e-6;
  });

  rec.check("shortbin", "closed_form_vs_series", [](std::ostream& d) {
    const SystemConfig cfg = make_cfg(0.9, 2);
    const std::vector<double> t0 = {1.0};
    const Matrix rho_e = emitter_states(cfg, t0).front();
    const EmitterMoments mom = emitter_moments(rho_e, 2, 2);
    const int cutoff = shortbin_cutoff(cfg.alpha, 1e-3, 2);
    const Matrix closed = shortbin_matrix(mom, cfg.alpha, 1e-3, 1.0, cutoff);
    const Matrix series = shortbin_oracle(rho_e, 2, 2, cfg.alpha, 1e-3, 1.0, 30, cutoff);
    const double err = (closed - series).cwiseAbs().maxCoeff();
    d << "max_abs_diff=" << err;
    return err < 1e-10;
  });

  rec.check("bethe", "zero_energy_parity", [](std::ostream& d) {
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n) {
      cplx prod = 1.0;
      for (int M = 1; M <= 6; ++M) {
        prod *= transmission_phase(0.0, n, 1.0);
        worst = std::max(worst, std::abs(prod - std::pow(-1.0, M)));
      }
    }
    d << "max_deviation=" << worst;
    return worst < 1e-12;
  });

  rec.check("metrology", "coherent_shot_noise", [](std::ostream& d) {
    const std::vector<double> grid = default_phi_grid(800);
    double worst = 0.0;
    for (double Nb : {1.0, 10.0, 100.0, 1e4}) {
      const MZResult r = jz_sensitivity(coherent_moments(1.2), Nb, grid);
      worst = std::max(worst, std::abs(r.delta_phi / r.delta_phi_sn - 1.0));
    }
    d << "max_relative_deviation=" << worst;
    return worst < 1e-3;
  });
  rec.check("metrology", "estimator_above_quantum_bound", [](std::ostream& d) {
    const SystemConfig cfg = make_cfg(0.5, 1);
    const BinSpec bin{1.0, 2.0};
    const Matrix rv = propagate(cfg, bin).rho_v.matrix();
    const MomentSet mom = extract_moments(rv, false);
    const std::vector<double> grid = default_phi_grid(800);
    double worst = 1.0;
    for (double Nb : {0.0, 1.0, 4.0, 9.0}) {
      if (Nb == 0.0) continue;
      const MZResult r = jz_sensitivity(mom, Nb, grid);
      const CramerRaoResult c = crb(rv, Nb, r.phi_opt);
      worst = std::min(worst, (r.delta_phi - c.delta_phi_cr) / c.delta_phi_cr);
    }
    d << "min_relative_margin=" << worst;
    return worst >= -1e-6;
  });

  rec.check("sweep", "determinism", [](std::ostream& d) {
    SweepPlan plan;
    plan.axes = {{"alpha", {0.5, 0.9}}, {"t0_rabi", {0.0, 1.0}}, {"tau_rabi", {1.0, 2.0}}};
    const SystemConfig base = make_cfg(0.9, 1);
    auto table = [&](int threads) {
      plan.threads = threads;
      std::ostringstream os;
      write_sweep_csv(os, run_sweep(plan, base));
      return os.str();
    };
    const std::string a = table(1), b = table(1), c = table(3);
    d << "rows=" << plan.size();
    return a == b && a == c;
  });

  return rec.take();
}

}  // namespace cwl
