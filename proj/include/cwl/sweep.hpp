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

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cwl/integrator.hpp"
#include "cwl/wigner.hpp"

namespace cwl {

enum class Objective { kNegativity, kJzImprovement, kCrbImprovement };

Objective parse_objective(const std::string& name);
std::string objective_name(Objective o);

/// Axis names: alpha, t0, tau, Gamma, gamma_D, M, and t0_rabi / tau_rabi
/// (bin times in units of the Rabi time 1/(sqrt(kappa)|alpha|) of each point).
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct SweepPlan {
  std::vector<SweepAxis> axes;
  Objective objective = Objective::kNegativity;
  long budget = 100000;
  // Negativity objective: grid centered on sqrt(tau) alpha.
  double wigner_half_width = 4.0;
  double wigner_spacing = 0.05;
  // Metrology objectives.
  double N_b = 100.0;
  int phi_points = 800;
  int cutoff_b = 0;
  // Extra cavity levels above the default cutoff for metrology objectives.
  int metrology_cutoff_margin = 8;
  // Keep rho_v in each row (for artifacts).
  bool keep_states = false;
  // 0: worker_count().
  int threads = 0;

  void validate() const;
  std::size_t size() const;
};

/// t0 in [0, 8] and tau in [0.5, 2.5] Rabi times, steps 0.25.
std::vector<SweepAxis> default_bin_axes();

struct SweepPoint {
  std::size_t index = 0;
  std::vector<double> params;  // aligned with plan.axes
  SystemConfig cfg;
  BinSpec bin;
};

/// Row-major expansion, last axis fastest. Throws ConfigError when the plan
/// exceeds its budget or yields invalid configurations.
std::vector<SweepPoint> expand_plan(const SweepPlan& plan, const SystemConfig& base, const BinSpec& base_bin);

struct SweepRow {
  SweepPoint point;
  bool ok = false;
  std::string error;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double N_a = std::numeric_limits<double>::quiet_NaN();
  PropagationDiagnostics diagnostics;
  std::optional<Matrix> rho_v;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  Objective objective = Objective::kNegativity;
  // Descending objective, failures last, ties by plan index.
  std::vector<SweepRow> rows;
};

/// Evaluates the objective on one propagated cavity state.
double evaluate_objective(const SweepPlan& plan, const SystemConfig& cfg, const BinSpec& bin, const Matrix& rho_v);

/// Evaluates every grid point once. Points sharing the emitter parameters
/// reuse one emitter-only propagation up to their t0 values.
SweepResult run_sweep(const SweepPlan& plan, const SystemConfig& base, const BinSpec& base_bin = {});

void write_sweep_csv(std::ostream& os, const SweepResult& r);

/// Writes rho_v.json and point.json for every successful row with a kept
/// state under dir/<hash>/, the hash taken over the point's configuration.
/// Returns the artifact directory names, relative to `dir`, in row order
/// (empty for skipped rows).
std::vector<std::string> write_sweep_artifacts(const std::filesystem::path& dir, const SweepResult& r);

}  // namespace cwl
