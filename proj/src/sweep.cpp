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

#include "cwl/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "cwl/metrology.hpp"
#include "cwl/parallel.hpp"
#include "cwl/serialize.hpp"

namespace cwl {

Objective parse_objective(const std::string& name) {
  if (name == "negativity") return Objective::kNegativity;
  if (name == "jz_improvement") return Objective::kJzImprovement;
  if (name == "crb_improvement") return Objective::kCrbImprovement;
  throw ConfigError("unknown objective '" + name + "'");
}

std::string objective_name(Objective o) {
  switch (o) {
    case Objective::kNegativity:
      return "negativity";
    case Objective::kJzImprovement:
      return "jz_improvement";
    case Objective::kCrbImprovement:
      return "crb_improvement";
  }
  return "unknown";
}

void SweepPlan::validate() const {
  static const char* names[] = {"alpha", "t0", "tau", "t0_rabi", "tau_rabi", "Gamma", "gamma_D", "M"};
  std::vector<std::string> seen;
  for (const auto& ax : axes) {
    if (std::find(std::begin(names), std::end(names), ax.name) == std::end(names))
      throw ConfigError("unknown sweep axis '" + ax.name + "'");
    if (std::find(seen.begin(), seen.end(), ax.name) != seen.end())
      throw ConfigError("duplicate sweep axis '" + ax.name + "'");
    seen.push_back(ax.name);
    if (ax.values.empty()) throw ConfigError("sweep axis '" + ax.name + "' is empty");
    for (double v : ax.values)
      if (!std::isfinite(v)) throw ConfigError("sweep axis '" + ax.name + "' has a non-finite value");
  }
  auto has = [&](const char* n) { return std::find(seen.begin(), seen.end(), n) != seen.end(); };
  if (has("t0") && has("t0_rabi")) throw ConfigError("sweep axes t0 and t0_rabi are exclusive");
  if (has("tau") && has("tau_rabi")) throw ConfigError("sweep axes tau and tau_rabi are exclusive");
  if (budget < 1) throw ConfigError("sweep budget must be positive");
  if (static_cast<long double>(size()) > budget) throw ConfigError("sweep exceeds its budget");
  if (!(wigner_half_width > 0.0) || !(wigner_spacing > 0.0) || wigner_spacing > 0.1)
    throw ConfigError("invalid Wigner sampling for the sweep");
  if (!(N_b >= 0.0) || phi_points < 400) throw ConfigError("invalid metrology settings for the sweep");
}

std::size_t SweepPlan::size() const {
  std::size_t n = 1;
  for (const auto& ax : axes) n *= ax.values.size();
  return n;
}

std::vector<SweepAxis> default_bin_axes() {
  SweepAxis t0{"t0_rabi", {}}, tau{"tau_rabi", {}};
  for (int k = 0; k <= 32; ++k) t0.values.push_back(0.25 * k);
  for (int k = 2; k <= 10; ++k) tau.values.push_back(0.25 * k);
  return {t0, tau};
}

std::vector<SweepPoint> expand_plan(const SweepPlan& plan, const SystemConfig& base, const BinSpec& base_bin) {
  plan.validate();
  const std::size_t n = plan.size();
  std::vector<SweepPoint> points(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    SweepPoint& p = points[idx];
    p.index = idx;
    p.cfg = base;
    p.bin = base_bin;
    p.params.resize(plan.axes.size());
    std::size_t rem = idx;
    for (std::size_t a = plan.axes.size(); a-- > 0;) {
      const auto& vals = plan.axes[a].values;
      p.params[a] = vals[rem % vals.size()];
      rem /= vals.size();
    }
    std::optional<double> t0_rabi, tau_rabi;
    for (std::size_t a = 0; a < plan.axes.size(); ++a) {
      const std::string& name = plan.axes[a].name;
      const double v = p.params[a];
      if (name == "alpha")
        p.cfg.alpha = v;
      else if (name == "t0")
        p.bin.t0 = v;
      else if (name == "tau")
        p.bin.tau = v;
      else if (name == "t0_rabi")
        t0_rabi = v;
      else if (name == "tau_rabi")
        tau_rabi = v;
      else if (name == "Gamma")
        p.cfg.Gamma = v;
      else if (name == "gamma_D")
        p.cfg.gamma_D = v;
      else if (name == "M") {
        if (v != std::round(v)) throw ConfigError("sweep axis M needs integer values");
        p.cfg.M = static_cast<int>(v);
      }
    }
    if (t0_rabi || tau_rabi) {
      const double rate = std::sqrt(p.cfg.kappa) * std::abs(p.cfg.alpha);
      if (!(rate > 0.0)) throw ConfigError("Rabi-time bin axes need a nonzero drive");
      if (t0_rabi) p.bin.t0 = *t0_rabi / rate;
      if (tau_rabi) p.bin.tau = *tau_rabi / rate;
    }
    p.cfg.validate();
    p.bin.validate();
    if (plan.objective != Objective::kNegativity && p.cfg.cavity_cutoff == 0)
      p.cfg.cavity_cutoff = default_cavity_cutoff(p.cfg, p.bin) + plan.metrology_cutoff_margin;
  }
  return points;
}

double evaluate_objective(const SweepPlan& plan, const SystemConfig& cfg, const BinSpec& bin, const Matrix& rho_v) {
  const cplx center = std::sqrt(bin.tau) * cfg.alpha;
  switch (plan.objective) {
    case Objective::kNegativity: {
      const WignerResult w = wigner_grid(rho_v, centered_grid(center, plan.wigner_half_width, plan.wigner_spacing));
      return w.negativity;
    }
    case Objective::kJzImprovement: {
      const MomentSet mom = extract_moments(rho_v, false);
      const std::vector<double> grid = default_phi_grid(plan.phi_points);
      return jz_sensitivity(mom, plan.N_b, grid, std::norm(center)).improvement;
    }
    case Objective::kCrbImprovement: {
      const CramerRaoResult c = crb(rho_v, plan.N_b, 0.0, plan.cutoff_b);
      const double sn = 1.0 / std::sqrt(std::norm(center) + plan.N_b);
      return sn / c.delta_phi_cr - 1.0;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

// Points that differ only in their bin share the emitter-only evolution.
using GroupKey = std::tuple<double, double, double, double, double, int, int>;

GroupKey group_key(const SystemConfig& c) {
  return {c.alpha.real(), c.alpha.imag(), c.kappa, c.Gamma, c.gamma_D, c.M, c.levels()};
}

}  // namespace

SweepResult run_sweep(const SweepPlan& plan, const SystemConfig& base, const BinSpec& base_bin) {
  const std::vector<SweepPoint> points = expand_plan(plan, base, base_bin);
  const int threads = plan.threads > 0 ? plan.threads : worker_count();

  std::map<GroupKey, std::size_t> group_of;
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& p : points) {
    auto [it, inserted] = group_of.emplace(group_key(p.cfg), groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(p.index);
  }

  struct GroupStates {
    std::vector<double> t0s;
    std::vector<Matrix> states;
    std::string error;
  };
  std::vector<GroupStates> gs(groups.size());
  parallel_for(
      groups.size(),
      [&](std::size_t g) {
        auto& st = gs[g];
        for (std::size_t idx : groups[g]) st.t0s.push_back(points[idx].bin.t0);
        std::sort(st.t0s.begin(), st.t0s.end());
        st.t0s.erase(std::unique(st.t0s.begin(), st.t0s.end()), st.t0s.end());
        try {
          st.states = emitter_states(points[groups[g].front()].cfg, st.t0s);
        } catch (const std::exception& e) {
          st.error = e.what();
        }
      },
      threads);

  std::vector<std::size_t> group_index(points.size());
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t idx : groups[g]) group_index[idx] = g;

  std::vector<SweepRow> rows(points.size());
  parallel_for(
      points.size(),
      [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.point = points[i];
        const GroupStates& st = gs[group_index[i]];
        try {
          if (!st.error.empty()) throw NumericalError(st.error);
          const auto pos = std::lower_bound(st.t0s.begin(), st.t0s.end(), row.point.bin.t0) - st.t0s.begin();
          const Trajectory tr = propagate_bin(row.point.cfg, row.point.bin, st.states[pos]);
          row.diagnostics = tr.diagnostics;
          const Matrix& rv = tr.rho_v.matrix();
          row.N_a = std::real((rv * Matrix(number_operator(static_cast<int>(rv.rows()) - 1))).trace());
          row.objective = evaluate_objective(plan, row.point.cfg, row.point.bin, rv);
          if (!std::isfinite(row.objective)) throw NumericalError("objective is not finite");
          if (plan.keep_states) row.rho_v = rv;
          row.ok = true;
        } catch (const std::exception& e) {
          row.ok = false;
          row.error = e.what();
          row.objective = std::numeric_limits<double>::quiet_NaN();
        }
      },
      threads);

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.ok != b.ok) return a.ok;
    if (a.ok && a.objective != b.objective) return a.objective > b.objective;
    return a.point.index < b.point.index;
  });

  SweepResult res;
  for (const auto& ax : plan.axes) res.axis_names.push_back(ax.name);
  res.objective = plan.objective;
  res.rows = std::move(rows);
  return res;
}

namespace {

std::string csv_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  CsvWriter csv(os);
  std::vector<std::string> head = {"rank", "index"};
  head.insert(head.end(), r.axis_names.begin(), r.axis_names.end());
  for (const char* h : {"t0", "tau", "objective", "N_a", "ok", "accepted_steps", "rejected_steps",
                        "max_trace_drift", "min_sampled_eigenvalue", "cavity_cutoff", "top_level_population", "error"})
    head.emplace_back(h);
  csv.header(head);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const SweepRow& row = r.rows[k];
    std::vector<std::string> f = {std::to_string(k), std::to_string(row.point.index)};
    for (double v : row.point.params) f.push_back(format_double(v));
    const auto& d = row.diagnostics;
    f.push_back(format_double(row.point.bin.t0));
    f.push_back(format_double(row.point.bin.tau));
    f.push_back(format_double(row.objective));
    f.push_back(format_double(row.N_a));
    f.push_back(row.ok ? "1" : "0");
    f.push_back(std::to_string(d.accepted_steps));
    f.push_back(std::to_string(d.rejected_steps));
    f.push_back(format_double(d.max_trace_drift));
    f.push_back(format_double(d.min_sampled_eigenvalue));
    f.push_back(std::to_string(d.cavity_cutoff));
    f.push_back(format_double(d.top_level_population));
    f.push_back(csv_field(row.error));
    csv.row(f);
  }
}

std::vector<std::string> write_sweep_artifacts(const std::filesystem::path& dir, const SweepResult& r) {
  std::vector<std::string> out;
  for (const SweepRow& row : r.rows) {
    if (!row.ok || !row.rho_v) {
      out.emplace_back();
      continue;
    }
    RunConfig rc;
    rc.system = row.point.cfg;
    rc.bin = row.point.bin;
    Json point = {{"system", config_to_json(rc)["system"]},
                  {"bin", config_to_json(rc)["bin"]},
                  {"objective", objective_name(r.objective)}};
    const std::string hash = content_hash(point.dump());
    const std::filesystem::path sub = dir / hash;
    std::filesystem::create_directories(sub);
    point["value"] = row.objective;
    point["diagnostics"] = diagnostics_to_json(row.diagnostics);
    write_json(sub / "point.json", point);
    write_matrix_json(sub / "rho_v.json", *row.rho_v);
    out.push_back(hash);
  }
  return out;
}

}  // namespace cwl
