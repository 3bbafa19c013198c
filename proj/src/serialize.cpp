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

#include "cwl/serialize.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cwl {

namespace {

void reject_unknown(const Json& obj, const std::string& section, const std::set<std::string>& known) {
  if (!obj.is_object()) throw ConfigError("section '" + section + "' must be an object");
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
}

template <typename T>
void read(const Json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

cplx read_complex(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError("complex values are a number or [re, im]");
}

Json complex_to_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

}  // namespace

void GridConfig::validate() const {
  if (!(half_width > 0.0)) throw ConfigError("grid.half_width must be positive");
  if (!(spacing > 0.0) || spacing > 0.1) throw ConfigError("grid.spacing must be in (0, 0.1]");
  if (!auto_center) explicit_grid.validate();
}

WignerGrid GridConfig::resolve(cplx center) const {
  if (!auto_center) {
    WignerGrid g = explicit_grid;
    g.spacing = spacing;
    return g;
  }
  return centered_grid(center, half_width, spacing);
}

void MetrologyConfig::validate() const {
  if (!(N_b >= 0.0)) throw ConfigError("metrology.N_b must be nonnegative");
  if (phi_points < 400) throw ConfigError("metrology.phi_points must be at least 400");
  if (shot_noise != "no_emitter" && shot_noise != "state")
    throw ConfigError("metrology.shot_noise must be 'no_emitter' or 'state'");
  for (double n : crb_N_b)
    if (!(n >= 0.0)) throw ConfigError("metrology.crb_N_b entries must be nonnegative");
  if (cutoff_b < 0) throw ConfigError("metrology.cutoff_b must be nonnegative");
}

void SweepConfig::validate() const {
  static const std::set<std::string> names = {"alpha", "t0", "tau", "t0_rabi", "tau_rabi", "Gamma", "gamma_D", "M"};
  std::set<std::string> seen;
  for (const auto& [name, values] : axes) {
    if (!names.count(name)) throw ConfigError("unknown sweep axis '" + name + "'");
    if (!seen.insert(name).second) throw ConfigError("duplicate sweep axis '" + name + "'");
    if (values.empty()) throw ConfigError("sweep axis '" + name + "' is empty");
  }
  if (objective != "negativity" && objective != "jz_improvement" && objective != "crb_improvement")
    throw ConfigError("sweep.objective must be negativity, jz_improvement or crb_improvement");
  if (budget < 1) throw ConfigError("sweep.budget must be positive");
}

void RunConfig::validate() const {
  system.validate();
  bin.validate();
  grid.validate();
  metrology.validate();
  sweep.validate();
}

RunConfig parse_config(const Json& doc) {
  RunConfig cfg;
  reject_unknown(doc, "<root>", {"system", "bin", "grid", "metrology", "sweep"});

  if (doc.contains("system")) {
    const Json& s = doc["system"];
    reject_unknown(s, "system", {"alpha", "kappa", "Gamma", "gamma_D", "M", "emitter_levels", "cavity_cutoff", "numerics"});
    if (s.contains("alpha")) cfg.system.alpha = read_complex(s["alpha"]);
    read(s, "kappa", cfg.system.kappa);
    read(s, "Gamma", cfg.system.Gamma);
    read(s, "gamma_D", cfg.system.gamma_D);
    read(s, "M", cfg.system.M);
    read(s, "emitter_levels", cfg.system.emitter_levels);
    read(s, "cavity_cutoff", cfg.system.cavity_cutoff);
    if (s.contains("numerics")) {
      const Json& n = s["numerics"];
      Numerics& num = cfg.system.numerics;
      reject_unknown(n, "system.numerics",
                     {"rtol", "atol", "max_step_bin_fraction", "min_step", "max_steps", "max_dim", "output_points",
                      "check_cutoff", "cutoff_tol", "positivity_samples"});
      read(n, "rtol", num.rtol);
      read(n, "atol", num.atol);
      read(n, "max_step_bin_fraction", num.max_step_bin_fraction);
      read(n, "min_step", num.min_step);
      read(n, "max_steps", num.max_steps);
      read(n, "max_dim", num.max_dim);
      read(n, "output_points", num.output_points);
      read(n, "check_cutoff", num.check_cutoff);
      read(n, "cutoff_tol", num.cutoff_tol);
      read(n, "positivity_samples", num.positivity_samples);
    }
  }
  if (doc.contains("bin")) {
    const Json& b = doc["bin"];
    reject_unknown(b, "bin", {"t0", "tau", "g_max"});
    read(b, "t0", cfg.bin.t0);
    read(b, "tau", cfg.bin.tau);
    read(b, "g_max", cfg.bin.g_max);
  }
  if (doc.contains("grid")) {
    const Json& g = doc["grid"];
    reject_unknown(g, "grid", {"auto_center", "half_width", "spacing", "refine", "x_min", "x_max", "p_min", "p_max"});
    read(g, "auto_center", cfg.grid.auto_center);
    read(g, "half_width", cfg.grid.half_width);
    read(g, "spacing", cfg.grid.spacing);
    read(g, "refine", cfg.grid.refine);
    read(g, "x_min", cfg.grid.explicit_grid.x_min);
    read(g, "x_max", cfg.grid.explicit_grid.x_max);
    read(g, "p_min", cfg.grid.explicit_grid.p_min);
    read(g, "p_max", cfg.grid.explicit_grid.p_max);
    cfg.grid.explicit_grid.spacing = cfg.grid.spacing;
  }
  if (doc.contains("metrology")) {
    const Json& m = doc["metrology"];
    reject_unknown(m, "metrology", {"N_b", "phi_points", "shot_noise", "squeezed", "crb", "crb_N_b", "cutoff_b"});
    read(m, "N_b", cfg.metrology.N_b);
    read(m, "phi_points", cfg.metrology.phi_points);
    read(m, "shot_noise", cfg.metrology.shot_noise);
    read(m, "squeezed", cfg.metrology.squeezed);
    read(m, "crb", cfg.metrology.crb);
    read(m, "crb_N_b", cfg.metrology.crb_N_b);
    read(m, "cutoff_b", cfg.metrology.cutoff_b);
  }
  if (doc.contains("sweep")) {
    const Json& w = doc["sweep"];
    reject_unknown(w, "sweep", {"axes", "objective", "budget", "artifacts"});
    read(w, "objective", cfg.sweep.objective);
    read(w, "budget", cfg.sweep.budget);
    read(w, "artifacts", cfg.sweep.artifacts);
    if (w.contains("axes")) {
      // Array of {"name": ..., "values": [...]} keeps the axis order explicit.
      const Json& axes = w["axes"];
      if (!axes.is_array()) throw ConfigError("sweep.axes must be an array");
      for (const Json& ax : axes) {
        reject_unknown(ax, "sweep.axes[]", {"name", "values"});
        std::string name;
        std::vector<double> values;
        read(ax, "name", name);
        read(ax, "values", values);
        cfg.sweep.axes.emplace_back(name, values);
      }
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  return parse_config(doc);
}

Json config_to_json(const RunConfig& cfg) {
  const Numerics& n = cfg.system.numerics;
  Json doc;
  doc["system"] = {{"alpha", complex_to_json(cfg.system.alpha)},
                   {"kappa", cfg.system.kappa},
                   {"Gamma", cfg.system.Gamma},
                   {"gamma_D", cfg.system.gamma_D},
                   {"M", cfg.system.M},
                   {"emitter_levels", cfg.system.emitter_levels},
                   {"cavity_cutoff", cfg.system.cavity_cutoff},
                   {"numerics",
                    {{"rtol", n.rtol},
                     {"atol", n.atol},
                     {"max_step_bin_fraction", n.max_step_bin_fraction},
                     {"min_step", n.min_step},
                     {"max_steps", n.max_steps},
                     {"max_dim", n.max_dim},
                     {"output_points", n.output_points},
                     {"check_cutoff", n.check_cutoff},
                     {"cutoff_tol", n.cutoff_tol},
                     {"positivity_samples", n.positivity_samples}}}};
  doc["bin"] = {{"t0", cfg.bin.t0}, {"tau", cfg.bin.tau}, {"g_max", cfg.bin.g_max}};
  doc["grid"] = {{"auto_center", cfg.grid.auto_center}, {"half_width", cfg.grid.half_width},
                 {"spacing", cfg.grid.spacing},         {"refine", cfg.grid.refine},
                 {"x_min", cfg.grid.explicit_grid.x_min}, {"x_max", cfg.grid.explicit_grid.x_max},
                 {"p_min", cfg.grid.explicit_grid.p_min}, {"p_max", cfg.grid.explicit_grid.p_max}};
  doc["metrology"] = {{"N_b", cfg.metrology.N_b},       {"phi_points", cfg.metrology.phi_points},
                      {"shot_noise", cfg.metrology.shot_noise}, {"squeezed", cfg.metrology.squeezed},
                      {"crb", cfg.metrology.crb},       {"crb_N_b", cfg.metrology.crb_N_b},
                      {"cutoff_b", cfg.metrology.cutoff_b}};
  Json axes = Json::array();
  for (const auto& [name, values] : cfg.sweep.axes) axes.push_back({{"name", name}, {"values", values}});
  doc["sweep"] = {{"axes", axes},
                  {"objective", cfg.sweep.objective},
                  {"budget", cfg.sweep.budget},
                  {"artifacts", cfg.sweep.artifacts}};
  return doc;
}

Json diagnostics_to_json(const PropagationDiagnostics& d) {
  return {{"accepted_steps", d.accepted_steps},
          {"rejected_steps", d.rejected_steps},
          {"rhs_evaluations", d.rhs_evaluations},
          {"max_trace_drift", d.max_trace_drift},
          {"min_sampled_eigenvalue", d.min_sampled_eigenvalue},
          {"cavity_cutoff", d.cavity_cutoff},
          {"top_level_population", d.top_level_population},
          {"cutoff_check_distance", d.cutoff_check_distance}};
}

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"format", "cwl-density-matrix"}, {"rows", m.rows()}, {"cols", m.cols()}, {"order", "row-major"},
          {"data", data}};
}

Matrix matrix_from_json(const Json& doc) {
  try {
    if (doc.at("format") != "cwl-density-matrix" || doc.at("order") != "row-major")
      throw ConfigError("not a row-major cwl density matrix");
    const long rows = doc.at("rows").get<long>(), cols = doc.at("cols").get<long>();
    const Json& data = doc.at("data");
    if (rows < 0 || cols < 0 || static_cast<long>(data.size()) != rows * cols)
      throw ConfigError("density matrix data does not match its dimension header");
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i)
      for (long j = 0; j < cols; ++j) {
        const Json& z = data[i * cols + j];
        m(i, j) = {z.at(0).get<double>(), z.at(1).get<double>()};
      }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed density matrix JSON: ") + e.what());
  }
}

void write_matrix_json(const std::filesystem::path& path, const Matrix& m) { write_json(path, matrix_to_json(m)); }

Matrix read_matrix_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return matrix_from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_double(values[i]);
  os_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << fields[i];
  os_ << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  CsvWriter csv(os);
  std::vector<std::string> names = {"t"};
  for (std::size_t i = 0; i < tr.populations.size(); ++i) names.push_back("P_" + std::to_string(i + 1));
  csv.header(names);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    std::vector<double> row = {tr.times[k]};
    for (const auto& p : tr.populations) row.push_back(p[k]);
    csv.row(row);
  }
}

Json manifest_to_json(const RunManifest& m) {
  return {{"tool_version", m.tool_version}, {"subcommand", m.subcommand}, {"config", m.config},
          {"wall_time_s", m.wall_time_s},   {"diagnostics", m.diagnostics}, {"outputs", m.outputs},
          {"results", m.results}};
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace cwl
