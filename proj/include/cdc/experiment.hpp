/*
 * Copyright 2026 The cdcache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file experiment.hpp
 * @brief Scenario presets, parameter sweeps and random-activity averages,
 * written as CSV.
 *
 * CSV columns: sweep_var, sweep_value, scheme, exact_load, smoothed_load,
 * sim_mean, sim_stderr, converse, wall_time, status. Missing values are "NA";
 * wall_time is "NA" unless timing is requested, so repeated runs are byte
 * identical. Every scheme row carries the converse bound of its sweep point;
 * one extra row per point has scheme "converse".
 */

#ifndef CDC_EXPERIMENT_HPP
#define CDC_EXPERIMENT_HPP

#include "cdc/load_eval.hpp"
#include "cdc/model.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cdc {

enum class SweepVar { none, n_files, n_tiers, file_step, cache_step, cache_scale, gamma };

const char* to_string(SweepVar v);
/// Accepts "none", "N", "T", "dV", "dM", "M0", "gamma"; throws ConfigError otherwise.
SweepVar parse_sweep_var(const std::string& name);
const char* to_string(LoadKind kind);
/// Accepts "worst-case" and "average".
LoadKind parse_load_kind(const std::string& name);

struct SweepSpec {
  std::string name;  // preset name or "inline"
  LoadKind kind = LoadKind::worst_case;
  ArithmeticScenario scenario;

  SweepVar var = SweepVar::none;
  std::vector<double> values;
  // Couplings applied at every sweep point:
  //   dV sweep: V1 = v1_base + v1_per_dv * dV   (when v1_per_dv != 0)
  //   dM sweep: M1 = m1_base + m1_per_dm * dM   (when m1_per_dm != 0)
  //   M0 sweep: M1 = m1_per_m0 * M0, dM = dm_per_m0 * M0
  double v1_base = 0.0;
  double v1_per_dv = 0.0;
  double m1_base = 0.0;
  double m1_per_dm = 0.0;
  double m1_per_m0 = 1.0;
  double dm_per_m0 = 0.0;

  // Schemes: "sca", "smooth" and the baseline ids.
  std::vector<std::string> schemes;
  bool converse = true;
  double c = 1.0;
  int starts = 8;
  std::uint64_t seed = 1;
  long trials = 0;  // Monte Carlo trials per row; 0 disables simulation
  long scale = 1000;
  bool timing = false;
  bool unlimited_budget = false;  // lifts the enumeration budget (large presets)

  // Random activity: each user is active with this probability and the design
  // layout is K_t = ceil(assumed_fraction * L_t).
  double activity_prob = 1.0;
  double assumed_fraction = 1.0;
  long activity_samples = 2000;     // realizations drawn when enumeration is too large
  double activity_enumeration_cap = 1e4;
};

/// Desk-scale presets: fig2a fig2b fig3a fig3b fig4a fig4b fig5a fig5b fig6 fig7a fig7b fig8a fig8b.
std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name. `large` selects the paper-size parameters.
SweepSpec preset(const std::string& name, bool large = false);

/// Reads a JSON config. A "preset" key selects the base spec; other keys override it.
SweepSpec load_config(const std::string& path);
SweepSpec parse_config(const std::string& json_text);

/// Scenario at one sweep point (the base scenario when var is none).
ArithmeticScenario scenario_at(const SweepSpec& spec, double value);

struct CsvRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string scheme;
  std::optional<double> exact_load;
  std::optional<double> smoothed_load;
  std::optional<double> sim_mean;
  std::optional<double> sim_stderr;
  std::optional<double> converse;
  std::optional<double> wall_time;
  std::string status = "ok";
};

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);

/// One row per (sweep point, scheme) plus a converse row per point.
std::vector<CsvRow> run_sweep(const SweepSpec& spec);

/**
 * Averages of each scheme's load and the converse bound over the random active
 * set. Schemes are designed for the assumed layout. Active sets are enumerated
 * exactly when there are at most activity_enumeration_cap of them, otherwise
 * activity_samples are drawn. An empty active set counts as load 0.
 * exact_load holds the averaged load; sim_stderr holds the standard error of a
 * sampled average (NA when enumerated); smoothed_load and sim_mean are NA.
 */
std::vector<CsvRow> run_random_activity(const SweepSpec& spec);

/// Scheme q for one instance and layout (solvers use spec.c, spec.starts, spec.seed).
CachingParameter design_scheme(const std::string& scheme, LoadKind kind,
                               const SystemInstance& instance, const TierLayout& layout,
                               const SweepSpec& spec);

}  // namespace cdc

#endif  // CDC_EXPERIMENT_HPP
