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

// cwl: command-line driver for the emitter-chain light simulator.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <utility>

#include "CLI11.hpp"
#include "cwl/ansatz.hpp"
#include "cwl/integrator.hpp"
#include "cwl/metrology.hpp"
#include "cwl/selftest.hpp"
#include "cwl/serialize.hpp"
#include "cwl/shortbin.hpp"
#include "cwl/sweep.hpp"
#include "cwl/wigner.hpp"

namespace fs = std::filesystem;
using namespace cwl;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalError = 2 };

struct Common {
  std::string config_path;
  std::string out_dir = ".";
};

class Run {
 public:
  Run(const std::string& subcommand, const Common& common) : start_(std::chrono::steady_clock::now()) {
    out_ = common.out_dir;
    manifest_.tool_version = CWL_VERSION;
    manifest_.subcommand = subcommand;
    manifest_.config = nullptr;
    try {
      cfg_ = common.config_path.empty() ? RunConfig{} : load_config(common.config_path);
      manifest_.config = config_to_json(cfg_);
      fs::create_directories(out_);
    } catch (...) {
      stash();
      throw;
    }
  }

  // An unfinished run leaves its manifest for main() to complete with the error.
  ~Run() {
    if (!finished_) stash();
  }

  const RunConfig& cfg() const { return cfg_; }
  RunManifest& manifest() { return manifest_; }

  std::ofstream open(const std::string& name) {
    std::ofstream os(out_ / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (out_ / name).string());
    manifest_.outputs.push_back(name);
    return os;
  }

  void json(const std::string& name, const Json& doc) {
    write_json(out_ / name, doc);
    manifest_.outputs.push_back(name);
  }

  void matrix(const std::string& name, const Matrix& m) {
    write_matrix_json(out_ / name, m);
    manifest_.outputs.push_back(name);
  }

  const fs::path& dir() const { return out_; }

  void finish() {
    manifest_.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    manifest_.outputs.push_back("manifest.json");
    write_json(out_ / "manifest.json", manifest_to_json(manifest_));
    finished_ = true;
  }

  // Writes the manifest of a run that threw; no-op when every run finished.
  static void record_failure(const std::string& error, int exit_code) {
    if (!pending_) return;
    auto& [dir, m] = *pending_;
    m.results = {{"status", "failed"}, {"error", error}, {"exit_code", exit_code}};
    m.outputs.push_back("manifest.json");
    std::error_code ec;
    fs::create_directories(dir, ec);
    try {
      write_json(dir / "manifest.json", manifest_to_json(m));
    } catch (const std::exception& e) {
      std::cerr << "warning: " << e.what() << std::endl;
    }
    pending_.reset();
  }

 private:
  void stash() {
    manifest_.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    pending_.emplace(out_, manifest_);
  }

  static inline std::optional<std::pair<fs::path, RunManifest>> pending_;
  bool finished_ = false;
  std::chrono::steady_clock::time_point start_;
  RunConfig cfg_;
  fs::path out_;
  RunManifest manifest_;
};

cplx bin_amplitude(const RunConfig& c) { return std::sqrt(c.bin.tau) * c.system.alpha; }

double coherent_fidelity(const Matrix& rho, cplx beta) {
  return fidelity(rho, coherent_state(beta, static_cast<int>(rho.rows()) - 1).amplitudes());
}

int cmd_simulate(const Common& common, const std::string& frame) {
  Run run("simulate", common);
  const RunConfig& c = run.cfg();
  if (frame != "lab" && frame != "displaced") throw ConfigError("--frame must be lab or displaced");
  const Trajectory tr = frame == "lab" ? propagate(c.system, c.bin) : propagate_displaced(c.system, c.bin);
  Matrix rho_v = tr.rho_v.matrix();
  if (frame == "displaced") rho_v = displace(rho_v, frame_displacement(c.system, c.bin, c.bin.end()));
  {
    auto os = run.open("trajectory.csv");
    write_trajectory_csv(os, tr);
  }
  run.matrix("rho_v.json", rho_v);
  const Matrix n = Matrix(number_operator(static_cast<int>(rho_v.rows()) - 1));
  run.manifest().diagnostics = diagnostics_to_json(tr.diagnostics);
  run.manifest().results = {{"frame", frame},
                            {"mean_photon_number", std::real((rho_v * n).trace())},
                            {"fidelity_with_coherent", coherent_fidelity(rho_v, bin_amplitude(c))},
                            {"cavity_cutoff", tr.diagnostics.cavity_cutoff}};
  run.finish();
  return kOk;
}

int cmd_wigner(const Common& common, const std::string& rho_path) {
  Run run("wigner", common);
  const RunConfig& c = run.cfg();
  Matrix rho;
  if (rho_path.empty()) {
    const Trajectory tr = propagate(c.system, c.bin);
    run.manifest().diagnostics = diagnostics_to_json(tr.diagnostics);
    rho = tr.rho_v.matrix();
  } else {
    rho = read_matrix_json(rho_path);
  }
  const DensityMatrix checked(rho, {static_cast<int>(rho.rows())});
  const WignerGrid grid = c.grid.resolve(bin_amplitude(c));
  const WignerResult w = wigner_grid(checked, grid);
  {
    auto os = run.open("wigner.csv");
    write_wigner_csv(os, w);
  }
  Json res = {{"negativity_grid", w.negativity}, {"norm", w.norm}, {"spacing", grid.spacing}};
  if (c.grid.refine) {
    const NegativityEstimate est = refined_negativity(rho, grid);
    res["negativity"] = est.value;
    res["negativity_spacing"] = est.spacing;
    res["negativity_previous"] = est.previous;
  } else {
    res["negativity"] = w.negativity;
  }
  run.manifest().results = res;
  run.finish();
  return kOk;
}

int cmd_shortbin(const Common& common) {
  Run run("shortbin-check", common);
  const RunConfig& c = run.cfg();
  const std::vector<double> t0 = {c.bin.t0};
  const Matrix rho_e = emitter_states(c.system, t0).front();
  const int levels = c.system.levels();
  const EmitterMoments mom = emitter_moments(rho_e, c.system.M, levels);
  const int cutoff = resolved_cavity_cutoff(c.system, c.bin);
  const ShortBinResult sb = shortbin_rho(mom, c.system.alpha, c.bin.tau, c.system.kappa, cutoff);
  const Matrix oracle = shortbin_oracle(rho_e, c.system.M, levels, c.system.alpha, c.bin.tau, c.system.kappa, 30, cutoff);
  SystemConfig sc = c.system;
  sc.cavity_cutoff = cutoff;
  const Trajectory tr = propagate(sc, c.bin);
  const Json report = {{"kappa_tau", c.system.kappa * c.bin.tau},
                       {"cutoff", cutoff},
                       {"trace_deficit", sb.trace_deficit},
                       {"warning", sb.warning},
                       {"closed_form_vs_series_max_abs", (shortbin_matrix(mom, c.system.alpha, c.bin.tau, c.system.kappa, cutoff) - oracle).cwiseAbs().maxCoeff()},
                       {"closed_form_vs_series_trace_distance", trace_distance(sb.rho.matrix(), oracle / oracle.trace().real())},
                       {"integrator_vs_closed_form_trace_distance", trace_distance(tr.rho_v.matrix(), sb.rho.matrix())}};
  run.json("shortbin_report.json", report);
  run.matrix("rho_v_shortbin.json", sb.rho.matrix());
  run.manifest().diagnostics = diagnostics_to_json(tr.diagnostics);
  run.manifest().results = report;
  run.finish();
  return kOk;
}

int cmd_ansatz(const Common& common, int span, int components) {
  Run run("ansatz", common);
  const RunConfig& c = run.cfg();
  const Trajectory tr = propagate(c.system, c.bin);
  const AnsatzFit fit = fit_displaced_mixture(tr.rho_v, c.system.alpha, c.bin.tau, span, components);
  Json coeffs = Json::array();
  for (Eigen::Index i = 0; i < fit.coefficients.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < fit.coefficients.cols(); ++j)
      row.push_back({fit.coefficients(i, j).real(), fit.coefficients(i, j).imag()});
    coeffs.push_back(row);
  }
  const Json doc = {{"weights", fit.weights},
                    {"coefficients", coeffs},
                    {"fidelity", fit.fidelity},
                    {"overlap", fit.overlap},
                    {"displacement", {fit.displacement.real(), fit.displacement.imag()}},
                    {"span", fit.span}};
  run.json("ansatz.json", doc);
  run.manifest().diagnostics = diagnostics_to_json(tr.diagnostics);
  run.manifest().results = {{"fidelity", fit.fidelity}, {"overlap", fit.overlap}};
  run.finish();
  return kOk;
}

Json mz_to_json(const MZResult& r) {
  return {{"N_a", r.N_a},
          {"N_b", r.N_b},
          {"shot_noise_N_a", r.shot_noise_N_a},
          {"phi_opt", r.phi_opt},
          {"delta_phi", r.delta_phi},
          {"delta_phi_sn", r.delta_phi_sn},
          {"improvement", r.improvement},
          {"delta_phi_cr", std::isnan(r.delta_phi_cr) ? Json(nullptr) : Json(r.delta_phi_cr)},
          {"cr_improvement", std::isnan(r.cr_improvement) ? Json(nullptr) : Json(r.cr_improvement)},
          {"squeezing_theta", std::isnan(r.squeezing_theta) ? Json(nullptr) : Json(r.squeezing_theta)},
          {"convention", r.convention}};
}

int cmd_metrology(const Common& common) {
  Run run("metrology", common);
  const RunConfig& c = run.cfg();
  const MetrologyConfig& m = c.metrology;
  const ConvergedMoments cm = converged_moments(c.system, c.bin);
  const Matrix& rho_v = cm.trajectory.rho_v.matrix();
  const std::vector<double> grid = default_phi_grid(m.phi_points);
  const double sn_N_a = m.shot_noise == "no_emitter" ? std::norm(bin_amplitude(c)) : cm.moments.N_a;
  MZResult r = jz_sensitivity(cm.moments, m.N_b, grid, sn_N_a);

  Json crb_rows = Json::array();
  if (m.crb) {
    std::vector<double> nbs = m.crb_N_b.empty() ? std::vector<double>{m.N_b} : m.crb_N_b;
    for (double nb : nbs) {
      const MZResult jr = jz_sensitivity(cm.moments, nb, grid, sn_N_a);
      const CramerRaoResult cr = crb(rho_v, nb, jr.phi_opt, m.cutoff_b);
      const double improvement = jr.delta_phi_sn / cr.delta_phi_cr - 1.0;
      if (nb == m.N_b) {
        r.delta_phi_cr = cr.delta_phi_cr;
        r.cr_improvement = improvement;
      }
      crb_rows.push_back({{"N_b", nb},
                          {"qfi", cr.qfi},
                          {"delta_phi_cr", cr.delta_phi_cr},
                          {"cr_improvement", improvement},
                          {"jz_improvement", jr.improvement},
                          {"cutoff_b", cr.cutoff_b}});
    }
  }
  Json doc = mz_to_json(r);
  doc["cavity_cutoff"] = cm.cutoff;
  doc["moment_change"] = cm.change;
  doc["crb"] = crb_rows;
  if (m.squeezed) {
    const double coherent_part = std::norm(cm.moments.mu(0, 1));
    const MZResult total = squeezed_reference(cm.moments.N_a, m.N_b, grid);
    const MZResult added = squeezed_reference(std::max(0.0, cm.moments.N_a - coherent_part), m.N_b, grid);
    doc["squeezed_total_N_a"] = mz_to_json(total);
    doc["squeezed_incoherent_N_a"] = mz_to_json(added);
  }
  run.json("metrology.json", doc);
  {
    auto os = run.open("metrology.csv");
    CsvWriter csv(os);
    csv.header({"phi", "mean_Jz", "var_Jz"});
    for (std::size_t k = 0; k < r.phi_grid.size(); ++k) csv.row({r.phi_grid[k], r.mean_jz[k], r.var_jz[k]});
  }
  run.manifest().diagnostics = diagnostics_to_json(cm.trajectory.diagnostics);
  run.manifest().results = {{"improvement", r.improvement}, {"delta_phi", r.delta_phi}, {"N_a", r.N_a}};
  run.finish();
  return kOk;
}

int cmd_sweep(const Common& common) {
  Run run("sweep", common);
  const RunConfig& c = run.cfg();
  SweepPlan plan;
  for (const auto& [name, values] : c.sweep.axes) plan.axes.push_back({name, values});
  if (plan.axes.empty()) plan.axes = default_bin_axes();
  plan.objective = parse_objective(c.sweep.objective);
  plan.budget = c.sweep.budget;
  plan.wigner_half_width = c.grid.half_width;
  plan.wigner_spacing = c.grid.spacing;
  plan.N_b = c.metrology.N_b;
  plan.phi_points = c.metrology.phi_points;
  plan.cutoff_b = c.metrology.cutoff_b;
  plan.keep_states = c.sweep.artifacts;
  const SweepResult res = run_sweep(plan, c.system, c.bin);
  {
    auto os = run.open("sweep.csv");
    write_sweep_csv(os, res);
  }
  std::vector<std::string> artifacts;
  if (c.sweep.artifacts) {
    artifacts = write_sweep_artifacts(run.dir() / "artifacts", res);
    for (const auto& h : artifacts)
      if (!h.empty()) {
        run.manifest().outputs.push_back("artifacts/" + h + "/point.json");
        run.manifest().outputs.push_back("artifacts/" + h + "/rho_v.json");
      }
  }
  Json rows = Json::array();
  std::size_t failures = 0;
  for (std::size_t k = 0; k < res.rows.size(); ++k) {
    const SweepRow& row = res.rows[k];
    failures += !row.ok;
    Json params = Json::object();
    for (std::size_t a = 0; a < res.axis_names.size(); ++a) params[res.axis_names[a]] = row.point.params[a];
    Json j = {{"index", row.point.index},
              {"params", params},
              {"t0", row.point.bin.t0},
              {"tau", row.point.bin.tau},
              {"ok", row.ok},
              {"objective", row.ok ? Json(row.objective) : Json(nullptr)},
              {"N_a", row.ok ? Json(row.N_a) : Json(nullptr)},
              {"diagnostics", diagnostics_to_json(row.diagnostics)}};
    if (!row.ok) j["error"] = row.error;
    if (k < artifacts.size() && !artifacts[k].empty()) j["artifact"] = artifacts[k];
    rows.push_back(j);
  }
  run.json("sweep.json", {{"objective", objective_name(res.objective)}, {"axes", res.axis_names}, {"rows", rows}});
  Json best = nullptr;
  if (!res.rows.empty() && res.rows.front().ok) best = rows.front();
  run.manifest().results = {{"points", res.rows.size()}, {"failures", failures}, {"best", best}};
  run.finish();
  return kOk;
}

int cmd_selftest(const Common& common, bool quick) {
  Run run("selftest", common);
  SelftestOptions opts;
  opts.quick = quick;
  opts.on_result = [](const CheckResult& r) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.suite << "/" << r.name << "  " << r.detail << "  (" << r.seconds
              << " s)" << std::endl;
  };
  const std::vector<CheckResult> results = run_selftest(opts);
  bool all = true;
  Json rows = Json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    rows.push_back({{"suite", r.suite}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  run.json("selftest.json", rows);
  run.manifest().results = {{"all_passed", all}, {"checks", results.size()}};
  run.finish();
  std::cout << (all ? "selftest: all checks passed" : "selftest: failures present") << std::endl;
  return all ? kOk : kNumericalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonclassical light from coherently driven emitter chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CWL_VERSION));

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out_dir, "output directory");
  };

  std::string frame = "lab";
  auto* simulate = app.add_subcommand("simulate", "propagate one bin; trajectory CSV and rho_v");
  add_common(simulate);
  simulate->add_option("--frame", frame, "lab or displaced");

  std::string rho_path;
  auto* wigner = app.add_subcommand("wigner", "Wigner function of rho_v on a grid");
  add_common(wigner);
  wigner->add_option("--rho", rho_path, "read rho_v JSON instead of propagating")->check(CLI::ExistingFile);

  auto* shortbin = app.add_subcommand("shortbin-check", "short-bin closed form vs series vs integrator");
  add_common(shortbin);

  int span = 3, components = 3;
  auto* ansatz = app.add_subcommand("ansatz", "fit a displaced few-photon mixture to rho_v");
  add_common(ansatz);
  ansatz->add_option("--span", span, "Fock states per component")->check(CLI::Range(1, 50));
  ansatz->add_option("--components", components, "mixture components")->check(CLI::Range(1, 50));

  auto* metrology = app.add_subcommand("metrology", "Mach-Zehnder sensitivity with rho_v in port a");
  add_common(metrology);

  auto* sweep = app.add_subcommand("sweep", "grid search over system and bin parameters");
  add_common(sweep);

  bool quick = false;
  auto* selftest = app.add_subcommand("selftest", "run the invariant suites");
  add_common(selftest);
  selftest->add_flag("--quick", quick, "reduced configuration lists");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(common, frame);
    if (*wigner) return cmd_wigner(common, rho_path);
    if (*shortbin) return cmd_shortbin(common);
    if (*ansatz) return cmd_ansatz(common, span, components);
    if (*metrology) return cmd_metrology(common);
    if (*sweep) return cmd_sweep(common);
    if (*selftest) return cmd_selftest(common, quick);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    Run::record_failure(e.what(), kConfigError);
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    Run::record_failure(e.what(), kNumericalError);
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    Run::record_failure(e.what(), kNumericalError);
    return kNumericalError;
  }
  return kConfigError;
}
