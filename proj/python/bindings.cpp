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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cwl/ansatz.hpp"
#include "cwl/bethe.hpp"
#include "cwl/integrator.hpp"
#include "cwl/metrology.hpp"
#include "cwl/selftest.hpp"
#include "cwl/shortbin.hpp"
#include "cwl/sweep.hpp"
#include "cwl/wigner.hpp"

namespace py = pybind11;
using namespace cwl;

namespace {

py::dict trajectory_dict(const Trajectory& tr) {
  py::dict d;
  d["times"] = tr.times;
  d["populations"] = tr.populations;
  d["rho_v"] = tr.rho_v.matrix();
  d["rho_emitters_t0"] = tr.rho_emitters_t0;
  const auto& g = tr.diagnostics;
  py::dict diag;
  diag["accepted_steps"] = g.accepted_steps;
  diag["rejected_steps"] = g.rejected_steps;
  diag["max_trace_drift"] = g.max_trace_drift;
  diag["min_sampled_eigenvalue"] = g.min_sampled_eigenvalue;
  diag["cavity_cutoff"] = g.cavity_cutoff;
  diag["top_level_population"] = g.top_level_population;
  d["diagnostics"] = diag;
  return d;
}

py::dict mz_dict(const MZResult& r) {
  py::dict d;
  d["phi_grid"] = r.phi_grid;
  d["mean_jz"] = r.mean_jz;
  d["var_jz"] = r.var_jz;
  d["N_a"] = r.N_a;
  d["N_b"] = r.N_b;
  d["phi_opt"] = r.phi_opt;
  d["delta_phi"] = r.delta_phi;
  d["delta_phi_sn"] = r.delta_phi_sn;
  d["improvement"] = r.improvement;
  d["squeezing_theta"] = r.squeezing_theta;
  return d;
}

Matrix single_mode(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw ConfigError("density matrix must be square");
  return DensityMatrix(rho, {static_cast<int>(rho.rows())}).matrix();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonclassical light from coherently driven emitter chains";
  m.attr("__version__") = CWL_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def(py::init([](cplx alpha, double kappa, double Gamma, double gamma_D, int M, int emitter_levels,
                       int cavity_cutoff) {
             SystemConfig c;
             c.alpha = alpha;
             c.kappa = kappa;
             c.Gamma = Gamma;
             c.gamma_D = gamma_D;
             c.M = M;
             c.emitter_levels = emitter_levels;
             c.cavity_cutoff = cavity_cutoff;
             c.validate();
             return c;
           }),
           py::arg("alpha") = cplx(0.9), py::arg("kappa") = 1.0, py::arg("Gamma") = 0.0, py::arg("gamma_D") = 0.0,
           py::arg("M") = 1, py::arg("emitter_levels") = 0, py::arg("cavity_cutoff") = 0)
      .def_readwrite("alpha", &SystemConfig::alpha)
      .def_readwrite("kappa", &SystemConfig::kappa)
      .def_readwrite("Gamma", &SystemConfig::Gamma)
      .def_readwrite("gamma_D", &SystemConfig::gamma_D)
      .def_readwrite("M", &SystemConfig::M)
      .def_readwrite("emitter_levels", &SystemConfig::emitter_levels)
      .def_readwrite("cavity_cutoff", &SystemConfig::cavity_cutoff)
      .def("validate", &SystemConfig::validate);

  py::class_<BinSpec>(m, "BinSpec")
      .def(py::init([](double t0, double tau, double g_max) { return BinSpec{t0, tau, g_max}; }), py::arg("t0") = 0.0,
           py::arg("tau") = 1.0, py::arg("g_max") = 1e3)
      .def_readwrite("t0", &BinSpec::t0)
      .def_readwrite("tau", &BinSpec::tau)
      .def_readwrite("g_max", &BinSpec::g_max);

  m.def("propagate", [](const SystemConfig& c, const BinSpec& b) { return trajectory_dict(propagate(c, b)); },
        py::arg("cfg"), py::arg("bin"));
  m.def("propagate_displaced",
        [](const SystemConfig& c, const BinSpec& b) {
          Trajectory tr = propagate_displaced(c, b);
          py::dict d = trajectory_dict(tr);
          d["rho_v_lab"] = displace(tr.rho_v.matrix(), frame_displacement(c, b, b.end()));
          return d;
        },
        py::arg("cfg"), py::arg("bin"));

  m.def("coherent_state", [](cplx beta, int cutoff) { return coherent_state(beta, cutoff).amplitudes(); },
        py::arg("beta"), py::arg("cutoff"));
  m.def("displace", &displace, py::arg("rho"), py::arg("beta"));
  m.def("trace_distance", &trace_distance);
  m.def("fidelity", py::overload_cast<const Matrix&, const Vector&>(&fidelity), py::arg("rho"), py::arg("psi"));
  m.def("fidelity", py::overload_cast<const Matrix&, const Matrix&>(&fidelity), py::arg("a"), py::arg("b"));

  m.def("wigner_point", &wigner_point, py::arg("rho"), py::arg("beta"));
  m.def("wigner",
        [](const Matrix& rho, cplx center, double half_width, double spacing) {
          const WignerResult w = wigner_grid(single_mode(rho), centered_grid(center, half_width, spacing));
          py::dict d;
          d["xs"] = w.xs;
          d["ps"] = w.ps;
          d["values"] = w.values;
          d["negativity"] = w.negativity;
          d["norm"] = w.norm;
          return d;
        },
        py::arg("rho"), py::arg("center") = cplx(0.0), py::arg("half_width") = 4.0, py::arg("spacing") = 0.05);
  m.def("negativity",
        [](const Matrix& rho, cplx center, double half_width, double spacing) {
          return refined_negativity(single_mode(rho), centered_grid(center, half_width, spacing)).value;
        },
        py::arg("rho"), py::arg("center") = cplx(0.0), py::arg("half_width") = 4.0, py::arg("spacing") = 0.05);

  m.def("emitter_states", [](const SystemConfig& c, std::vector<double> t) { return emitter_states(c, t); });
  m.def("shortbin_rho",
        [](const Matrix& rho_e, int M, int levels, cplx alpha, double tau, double kappa, int cutoff) {
          const ShortBinResult r = shortbin_rho(emitter_moments(rho_e, M, levels), alpha, tau, kappa, cutoff);
          return py::make_tuple(r.rho.matrix(), r.trace_deficit, r.warning);
        },
        py::arg("rho_emitters"), py::arg("M"), py::arg("levels"), py::arg("alpha"), py::arg("tau"),
        py::arg("kappa") = 1.0, py::arg("cutoff") = 0);
  m.def("shortbin_oracle", &shortbin_oracle, py::arg("rho_emitters"), py::arg("M"), py::arg("levels"),
        py::arg("alpha"), py::arg("tau"), py::arg("kappa") = 1.0, py::arg("k_max") = 30, py::arg("cutoff") = 0);

  m.def("fit_ansatz",
        [](const Matrix& rho_v, cplx alpha, double tau, int span, int components) {
          const AnsatzFit f = fit_displaced_mixture(DensityMatrix(rho_v, {static_cast<int>(rho_v.rows())}), alpha,
                                                    tau, span, components);
          py::dict d;
          d["weights"] = f.weights;
          d["coefficients"] = f.coefficients;
          d["fidelity"] = f.fidelity;
          d["overlap"] = f.overlap;
          d["state"] = ansatz_state(f, static_cast<int>(rho_v.rows()));
          return d;
        },
        py::arg("rho_v"), py::arg("alpha"), py::arg("tau"), py::arg("span") = 3, py::arg("components") = 3);

  m.def("transmission_phase", &transmission_phase, py::arg("E"), py::arg("n"), py::arg("kappa") = 1.0);

  m.def("jz_sensitivity",
        [](const Matrix& rho_v, double N_b, int phi_points, double shot_noise_N_a) {
          const std::vector<double> grid = default_phi_grid(phi_points);
          return mz_dict(jz_sensitivity(extract_moments(rho_v, false), N_b, grid, shot_noise_N_a));
        },
        py::arg("rho_v"), py::arg("N_b"), py::arg("phi_points") = 800, py::arg("shot_noise_N_a") = -1.0);
  m.def("crb",
        [](const Matrix& rho_v, double N_b, double phi, int cutoff_b) {
          const CramerRaoResult r = crb(rho_v, N_b, phi, cutoff_b);
          py::dict d;
          d["qfi"] = r.qfi;
          d["delta_phi_cr"] = r.delta_phi_cr;
          d["cutoff_b"] = r.cutoff_b;
          return d;
        },
        py::arg("rho_v"), py::arg("N_b"), py::arg("phi") = 0.0, py::arg("cutoff_b") = 0);
  m.def("squeezed_reference",
        [](double N_a_match, double N_b, int phi_points) {
          const std::vector<double> grid = default_phi_grid(phi_points);
          return mz_dict(squeezed_reference(N_a_match, N_b, grid));
        },
        py::arg("N_a_match"), py::arg("N_b"), py::arg("phi_points") = 800);

  m.def("run_sweep",
        [](const std::vector<std::pair<std::string, std::vector<double>>>& axes, const std::string& objective,
           const SystemConfig& base, const BinSpec& bin, double N_b, int threads) {
          SweepPlan plan;
          for (const auto& [n, v] : axes) plan.axes.push_back({n, v});
          plan.objective = parse_objective(objective);
          plan.N_b = N_b;
          plan.threads = threads;
          const SweepResult r = run_sweep(plan, base, bin);
          py::list rows;
          for (const auto& row : r.rows) {
            py::dict d;
            d["index"] = row.point.index;
            d["params"] = row.point.params;
            d["t0"] = row.point.bin.t0;
            d["tau"] = row.point.bin.tau;
            d["ok"] = row.ok;
            d["objective"] = row.objective;
            d["error"] = row.error;
            rows.append(d);
          }
          return rows;
        },
        py::arg("axes"), py::arg("objective") = "negativity", py::arg("base") = SystemConfig{},
        py::arg("bin") = BinSpec{}, py::arg("N_b") = 100.0, py::arg("threads") = 0);

  m.def("selftest",
        [](bool quick) {
          SelftestOptions o;
          o.quick = quick;
          py::list out;
          for (const auto& r : run_selftest(o)) out.append(py::make_tuple(r.suite + "/" + r.name, r.pass, r.detail));
          return out;
        },
        py::arg("quick") = true);
}
