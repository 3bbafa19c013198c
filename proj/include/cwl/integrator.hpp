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

#include <functional>
#include <optional>
#include <vector>

#include "cwl/model.hpp"

namespace cwl {

struct PropagationDiagnostics {
  long accepted_steps = 0;
  long rejected_steps = 0;
  long rhs_evaluations = 0;
  double max_trace_drift = 0.0;
  double min_sampled_eigenvalue = 0.0;
  int cavity_cutoff = 0;
  // Population of the highest retained Fock level of rho_v.
  double top_level_population = 0.0;
  // Trace distance to a rerun with cutoff + 4; negative when not run.
  double cutoff_check_distance = -1.0;
};

struct Trajectory {
  Frame frame = Frame::kLab;
  // Uniform output grid on [0, t0 + tau].
  std::vector<double> times;
  // populations[i][k]: excited population of emitter i at times[k].
  std::vector<std::vector<double>> populations;
  // Emitter state at t0 (before the cavity opens).
  Matrix rho_emitters_t0;
  DensityMatrix rho_final;
  // Cavity state at t0 + tau, in the trajectory's frame.
  DensityMatrix rho_v;
  PropagationDiagnostics diagnostics;
};

/// Lab-frame propagation from all emitters in |G> and an empty cavity.
Trajectory propagate(const SystemConfig& cfg, const BinSpec& bin);

/// Propagation of the state with the coherent cavity amplitude
/// alpha sqrt(t - t0) factored out. rho_v in the result is the
/// non-displaced cavity state; see lab_frame().
Trajectory propagate_displaced(const SystemConfig& cfg, const BinSpec& bin);

/// Amplitude of the factored-out displacement: alpha sqrt(t - t0) inside
/// the bin, zero before it.
cplx frame_displacement(const SystemConfig& cfg, const BinSpec& bin, double t);

/// Maps a displaced-frame state at time t back to the lab frame.
Matrix lab_frame(const Matrix& rho_tilde, const SystemConfig& cfg, const BinSpec& bin, double t,
                 std::span<const int> dims);

/// Emitter-only states at each of the sorted times (cavity closed).
std::vector<Matrix> emitter_states(const SystemConfig& cfg, std::span<const double> times);

/// Bin propagation starting from a given emitter state at t0. Populations
/// are sampled inside the bin only.
Trajectory propagate_bin(const SystemConfig& cfg, const BinSpec& bin, const Matrix& rho_emitters_t0,
                         Frame frame = Frame::kLab);

// Generic adaptive Dormand-Prince 5(4) integrator on matrix-valued states.
struct StepControl {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_max = 0.0;  // 0: unbounded
  double min_step = 1e-15;
  long max_steps = 20'000'000;
};

using Rhs = std::function<void(double, const Matrix&, Matrix&)>;
// Called at the start point and after each accepted step with (t, y, dy/dt).
using StepObserver = std::function<void(double, const Matrix&, const Matrix&)>;

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

/// Integrates y from t_start to t_end in place, landing exactly on t_end.
StepStats integrate_dopri5(const Rhs& f, double t_start, double t_end, Matrix& y, const StepControl& ctl,
                           const StepObserver& observer = {});

}  // namespace cwl
