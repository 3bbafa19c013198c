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
#include <iosfwd>
#include <string>
#include <vector>

#include "cwl/integrator.hpp"
#include "cwl/wigner.hpp"
#include "json.hpp"

namespace cwl {

using Json = nlohmann::json;

/// Wigner sampling for the `wigner` subcommand and negativity objectives.
struct GridConfig {
  // Centered on sqrt(tau) alpha when true; explicit bounds otherwise.
  bool auto_center = true;
  double half_width = 4.0;
  WignerGrid explicit_grid;
  double spacing = 0.05;
  bool refine = true;

  void validate() const;
  WignerGrid resolve(cplx center) const;
};

struct MetrologyConfig {
  double N_b = 100.0;
  int phi_points = 800;
  // "no_emitter": shot noise from tau|alpha|^2; "state": from <n> of rho_v.
  std::string shot_noise = "no_emitter";
  bool squeezed = true;
  bool crb = false;
  std::vector<double> crb_N_b;
  int cutoff_b = 0;

  void validate() const;
};

struct SweepConfig {
  // Axis name -> values, in the order given.
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  std::string objective = "negativity";
  long budget = 100000;
  bool artifacts = false;

  void validate() const;
};

struct RunConfig {
  SystemConfig system;
  BinSpec bin;
  GridConfig grid;
  MetrologyConfig metrology;
  SweepConfig sweep;

  void validate() const;
};

/// Parses and validates a configuration document; missing keys take their
/// defaults, unknown keys are rejected. Throws ConfigError.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::filesystem::path& path);
Json config_to_json(const RunConfig& cfg);

Json diagnostics_to_json(const PropagationDiagnostics& d);

/// {"format": "cwl-density-matrix", "rows": n, "cols": n, "order": "row-major",
///  "data": [[re, im], ...]}.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& doc);
void write_matrix_json(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_json(const std::filesystem::path& path);

/// %.17g.
std::string format_double(double v);

/// Minimal CSV writer: comma separated, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
};

/// Columns t, P_1 .. P_M.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  Json config;
  double wall_time_s = 0.0;
  Json diagnostics = Json::object();
  std::vector<std::string> outputs;
  Json results = Json::object();
};

Json manifest_to_json(const RunManifest& m);
void write_json(const std::filesystem::path& path, const Json& doc);

/// 64-bit FNV-1a, hex encoded.
std::string content_hash(const std::string& bytes);

}  // namespace cwl
