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

#include "cdc/experiment.hpp"

#include "cdc/baselines.hpp"
#include "cdc/converse.hpp"
#include "cdc/sca.hpp"
#include "cdc/simulator.hpp"
#include "cdc/smooth_opt.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace cdc {

namespace {

using nlohmann::json;

EvalOptions eval_options(const SweepSpec& spec) {
  EvalOptions opts;
  if (spec.unlimited_budget) opts.budget = std::numeric_limits<double>::infinity();
  return opts;
}

TierLayout design_layout(const SweepSpec& spec, const SystemInstance& instance) {
  if (spec.assumed_fraction >= 1.0) return full_layout(instance);
  return expected_active_layout(spec.assumed_fraction, instance.user_counts());
}

std::vector<std::string> default_schemes(bool with_sca) {
  std::vector<std::string> out;
  if (with_sca) out.emplace_back("sca");
  out.emplace_back("smooth");
  out.emplace_back("uniform-alidec");
  out.emplace_back("tier-uniform");
  out.emplace_back("file-uniform");
  return out;
}

ArithmeticScenario arith(int n, double v1, double dv, int t, double m1, double dm,
                         double gamma = 0.0, std::vector<int> users = {}) {
  ArithmeticScenario s;
  s.n_files = n;
  s.first_file_size = v1;
  s.file_size_step = dv;
  s.n_tiers = t;
  s.first_cache_size = m1;
  s.cache_size_step = dm;
  s.zipf_gamma = gamma;
  s.tier_user_counts = std::move(users);
  return s;
}

std::vector<double> range(double first, double step, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = first + i * step;
  return v;
}

int as_int(double value, const char* what) {
  const double r = std::nearbyint(value);
  if (std::abs(r - value) > 1e-9 || r < 1)
    throw ConfigError(std::string(what) + " must be a positive integer");
  return static_cast<int>(r);
}

std::string format_value(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return "NA";
  std::ostringstream os;
  os.precision(10);
  os << *v;
  return os.str();
}

std::string format_sweep(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

template <typename F>
std::optional<double> try_value(F&& f, std::string& status) {
  try {
    return f();
  } catch (const BudgetError&) {
    status = "budget";
  }
  return std::nullopt;
}

// Rows of one sweep point.
std::vector<CsvRow> sweep_point(const SweepSpec& spec, double value, int index) {
  std::vector<CsvRow> rows;
  const std::string var = to_string(spec.var);
  auto blank = [&](const std::string& scheme, const std::string& status) {
    CsvRow r;
    r.sweep_var = var;
    r.sweep_value = value;
    r.scheme = scheme;
    r.status = status;
    return r;
  };

  std::optional<SystemInstance> instance;
  std::optional<TierLayout> layout;
  try {
    instance.emplace(build_arithmetic_scenario(scenario_at(spec, value)));
    layout.emplace(design_layout(spec, *instance));
  } catch (const ConfigError&) {
    for (const auto& s : spec.schemes) rows.push_back(blank(s, "invalid"));
    if (spec.converse) rows.push_back(blank("converse", "invalid"));
    return rows;
  }
  const EvalOptions eval = eval_options(spec);

  std::optional<double> bound;
  std::string bound_status = "ok";
  if (spec.converse) {
    bound = try_value(
        [&] {
          return spec.kind == LoadKind::worst_case ? converse_worst_case(*instance, *layout).value
                                                   : converse_average(*instance, *layout).value;
        },
        bound_status);
  }

  for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
    const std::string& scheme = spec.schemes[s];
    CsvRow row = blank(scheme, "ok");
    const Timer timer;
    try {
      const CachingParameter q = design_scheme(scheme, spec.kind, *instance, *layout, spec);
      row.exact_load =
          try_value([&] { return exact_load(spec.kind, *instance, *layout, q, eval); }, row.status);
      row.smoothed_load = try_value(
          [&] { return smoothed_load(spec.kind, *instance, *layout, q, spec.c, eval); },
          row.status);
      if (spec.trials > 0 && layout->total() <= kMaxSimUsers) {
        const std::uint64_t seed = spec.seed + 1000003ULL * static_cast<std::uint64_t>(index) + s;
        std::optional<MonteCarloResult> mc;
        if (spec.kind == LoadKind::worst_case) {
          const WorstDemand w = worst_case_demand(*instance, *layout, q, eval);
          mc = monte_carlo(*instance, *layout, q, spec.scale, spec.trials, seed, DemandMode::fixed,
                           w.demand);
        } else {
          mc = monte_carlo(*instance, *layout, q, spec.scale, spec.trials, seed,
                           DemandMode::popularity);
        }
        if (mc) {
          row.sim_mean = mc->mean;
          row.sim_stderr = mc->std_error;
        }
      }
    } catch (const BudgetError&) {
      row.status = "budget";
    } catch (const std::exception&) {
      row.status = "failed";
    }
    row.converse = bound;
    if (spec.timing) row.wall_time = timer.seconds();
    rows.push_back(std::move(row));
  }
  if (spec.converse) {
    CsvRow row = blank("converse", bound_status);
    row.converse = bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

// Per-tier active counts with their probabilities, or sampled counts with weight 1/samples.
struct Realization {
  std::vector<int> active;
  double weight;
};

std::vector<Realization> activity_realizations(const SweepSpec& spec,
                                               const SystemInstance& instance, bool& sampled) {
  const int n_tiers = instance.n_tiers();
  const double p = spec.activity_prob;
  double count = 1.0;
  for (int t = 0; t < n_tiers; ++t) count *= instance.user_count(t) + 1.0;
  std::vector<Realization> out;
  sampled = count > spec.activity_enumeration_cap;
  if (!sampled) {
    std::vector<int> a(n_tiers, 0);
    while (true) {
      double w = 1.0;
      for (int t = 0; t < n_tiers; ++t) {
        const int l = instance.user_count(t);
        // std::pow(0, 0) is 1.
        w *= std::tgamma(l + 1.0) / (std::tgamma(a[t] + 1.0) * std::tgamma(l - a[t] + 1.0)) *
             std::pow(p, a[t]) * std::pow(1.0 - p, l - a[t]);
      }
      out.push_back({a, w});
      int t = 0;
      while (t < n_tiers && a[t] == instance.user_count(t)) a[t++] = 0;
      if (t == n_tiers) break;
      ++a[t];
    }
    return out;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    0x41u};
  std::mt19937_64 rng(seq);
  for (long i = 0; i < spec.activity_samples; ++i) {
    std::vector<int> a(n_tiers, 0);
    for (int t = 0; t < n_tiers; ++t) {
      for (int u = 0; u < instance.user_count(t); ++u) {
        if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) ++a[t];
      }
    }
    out.push_back({std::move(a), 1.0 / static_cast<double>(spec.activity_samples)});
  }
  return out;
}

std::vector<CsvRow> activity_point(const SweepSpec& spec, double value) {
  std::vector<CsvRow> rows;
  const std::string var = to_string(spec.var);
  auto blank = [&](const std::string& scheme, const std::string& status) {
    CsvRow r;
    r.sweep_var = var;
    r.sweep_value = value;
    r.scheme = scheme;
    r.status = status;
    return r;
  };
  std::optional<SystemInstance> instance;
  std::optional<TierLayout> layout;
  try {
    instance.emplace(build_arithmetic_scenario(scenario_at(spec, value)));
    layout.emplace(design_layout(spec, *instance));
  } catch (const ConfigError&) {
    for (const auto& s : spec.schemes) rows.push_back(blank(s, "invalid"));
    if (spec.converse) rows.push_back(blank("converse", "invalid"));
    return rows;
  }
  const EvalOptions eval = eval_options(spec);
  bool sampled = false;
  const std::vector<Realization> draws = activity_realizations(spec, *instance, sampled);

  // Weighted mean and, for sampled draws, the standard error of f over realizations.
  auto average = [&](auto&& f, std::optional<double>& stderr_out) {
    double mean = 0.0;
    double sq = 0.0;
    for (const Realization& r : draws) {
      int total = 0;
      for (int a : r.active) total += a;
      const double v = total == 0 ? 0.0 : f(TierLayout(r.active));
      mean += r.weight * v;
      sq += r.weight * v * v;
    }
    if (sampled && draws.size() > 1) {
      const double n = static_cast<double>(draws.size());
      stderr_out = std::sqrt(std::max(0.0, sq - mean * mean) * n / (n - 1.0) / n);
    }
    return mean;
  };

  std::optional<double> bound;
  std::optional<double> bound_se;
  std::string bound_status = "ok";
  if (spec.converse) {
    bound = try_value(
        [&] {
          return average(
              [&](const TierLayout& a) {
                return spec.kind == LoadKind::worst_case ? converse_worst_case(*instance, a).value
                                                         : converse_average(*instance, a).value;
              },
              bound_se);
        },
        bound_status);
  }
  for (const std::string& scheme : spec.schemes) {
    CsvRow row = blank(scheme, "ok");
    const Timer timer;
    try {
      const CachingParameter q = design_scheme(scheme, spec.kind, *instance, *layout, spec);
      row.exact_load = try_value(
          [&] {
            return average(
                [&](const TierLayout& a) { return exact_load(spec.kind, *instance, a, q, eval); },
                row.sim_stderr);
          },
          row.status);
    } catch (const BudgetError&) {
      row.status = "budget";
    } catch (const std::exception&) {
      row.status = "failed";
    }
    row.converse = bound;
    if (spec.timing) row.wall_time = timer.seconds();
    rows.push_back(std::move(row));
  }
  if (spec.converse) {
    CsvRow row = blank("converse", bound_status);
    row.converse = bound;
    row.sim_stderr = bound_se;
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename PointFn>
std::vector<CsvRow> run_points(const SweepSpec& spec, PointFn&& point) {
  if (spec.schemes.empty()) throw ConfigError("at least one scheme is required");
  std::vector<double> values = spec.values;
  if (spec.var == SweepVar::none) values = {0.0};
  if (values.empty()) throw ConfigError("the sweep range is empty");
  const long n = static_cast<long>(values.size());
  std::vector<std::vector<CsvRow>> per_point(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      per_point[i] = point(spec, values[i], static_cast<int>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<CsvRow> rows;
  for (auto& p : per_point) std::move(p.begin(), p.end(), std::back_inserter(rows));
  return rows;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end())
      throw ConfigError("unknown config key '" + key + "' in " + where);
  }
}

}  // namespace

const char* to_string(SweepVar v) {
  switch (v) {
    case SweepVar::none: return "none";
    case SweepVar::n_files: return "N";
    case SweepVar::n_tiers: return "T";
    case SweepVar::file_step: return "dV";
    case SweepVar::cache_step: return "dM";
    case SweepVar::cache_scale: return "M0";
    case SweepVar::gamma: return "gamma";
  }
  return "none";
}

SweepVar parse_sweep_var(const std::string& name) {
  for (SweepVar v : {SweepVar::none, SweepVar::n_files, SweepVar::n_tiers, SweepVar::file_step,
                     SweepVar::cache_step, SweepVar::cache_scale, SweepVar::gamma}) {
    if (name == to_string(v)) return v;
  }
  throw ConfigError("unknown sweep variable '" + name + "'");
}

const char* to_string(LoadKind kind) {
  return kind == LoadKind::worst_case ? "worst-case" : "average";
}

LoadKind parse_load_kind(const std::string& name) {
  if (name == "worst-case") return LoadKind::worst_case;
  if (name == "average") return LoadKind::average;
  throw ConfigError("unknown load kind '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a",
          "fig5b", "fig6",  "fig7a", "fig7b", "fig8a", "fig8b"};
}

SweepSpec preset(const std::string& name, bool large) {
  SweepSpec s;
  s.name = name;
  s.schemes = default_schemes(false);
  // Desk presets keep the caption's structure with N <= 6 and cache sizes scaled
  // by the ratio of library sizes.
  if (name == "fig2a") {
    s.scenario = arith(4, 10, -1, 4, 5.5, 5.5);
    s.var = SweepVar::n_files;
    // N = 2 would leave the largest cache above the library size.
    s.values = large ? range(3, 1, 8) : range(3, 1, 4);
  } else if (name == "fig2b") {
    s.scenario = arith(4, 13, -4, 4, 5, 1);
    s.var = SweepVar::n_tiers;
    s.values = range(1, 1, 4);
    s.schemes = default_schemes(!large);
  } else if (name == "fig3a") {
    const double r = large ? 1.0 : 15.0 / 1275.0;
    s.scenario = large ? arith(50, 1, 1, 4, 0, 0) : arith(5, 1, 1, 4, 0, 0);
    s.var = SweepVar::cache_scale;
    s.m1_per_m0 = 80 * r;
    s.dm_per_m0 = 160 * r;
    s.values = range(0.25, 0.25, 8);
  } else if (name == "fig3b" || name == "fig7b") {
    const bool avg = name == "fig7b";
    const double r = large ? 1.0 : 21.0 / 55.0;
    s.scenario = large ? arith(10, 10, -1, 2, 0, 0, avg ? 1.5 : 0.0, {4, 2})
                       : arith(6, 6, -1, 2, 0, 0, avg ? 1.5 : 0.0, {4, 2});
    s.kind = avg ? LoadKind::average : LoadKind::worst_case;
    s.var = SweepVar::cache_scale;
    s.m1_per_m0 = 5 * r;
    s.dm_per_m0 = 15 * r;
    s.values = range(0.25, 0.25, 10);
    s.activity_prob = 0.5;
    s.assumed_fraction = 0.5;
  } else if (name == "fig4a" || name == "fig8a") {
    const bool avg = name == "fig8a";
    s.kind = avg ? LoadKind::average : LoadKind::worst_case;
    s.var = SweepVar::file_step;
    if (large) {
      s.scenario = arith(50, 25.5, 0, 4, 140, 120, avg ? 1.2 : 0.0);
      s.v1_base = 25.5;
      s.v1_per_dv = -24.5;
      s.values = range(0, 0.2, 6);
    } else {
      // Mean file size 5 held fixed: V1 = 5 - 2 dV.
      s.scenario = arith(5, 5, 0, 4, 140 * 25.0 / 1275.0, 120 * 25.0 / 1275.0, avg ? 1.2 : 0.0);
      s.v1_base = 5;
      s.v1_per_dv = -2;
      s.values = range(0, 0.4, 6);
    }
  } else if (name == "fig4b" || name == "fig8b") {
    const bool avg = name == "fig8b";
    s.kind = avg ? LoadKind::average : LoadKind::worst_case;
    s.var = SweepVar::cache_step;
    const double gamma = avg ? 1.2 : 0.0;
    if (large) {
      s.scenario = avg ? arith(50, 50, -1, 4, 318.75, 0, gamma) : arith(50, 1, 1, 4, 318.75, 0);
      s.m1_base = 318.75;
      s.values = range(0, 20, 11);
    } else {
      // Mean cache size a quarter of the library: M1 = 3.75 - 1.5 dM.
      s.scenario = avg ? arith(5, 5, -1, 4, 3.75, 0, gamma) : arith(5, 1, 1, 4, 3.75, 0);
      s.m1_base = 3.75;
      s.values = range(0, 0.4, 6);
    }
    s.m1_per_dm = -1.5;
  } else if (name == "fig5a") {
    s.kind = LoadKind::average;
    s.scenario = arith(4, 20, -1, 4, 5.5, 5.5, 1.2);
    s.var = SweepVar::n_files;
    s.values = large ? range(2, 1, 19) : range(2, 1, 5);
  } else if (name == "fig5b") {
    s.kind = LoadKind::average;
    s.scenario = arith(4, 23, -4, 4, 5, 1, 1.2);
    s.var = SweepVar::n_tiers;
    s.values = range(1, 1, 4);
    s.schemes = default_schemes(!large);
  } else if (name == "fig6") {
    s.kind = LoadKind::average;
    s.scenario = large ? arith(50, 50, -1, 4, 450, 90, 1.0)
                       : arith(5, 5, -1, 4, 450 * 15.0 / 1275.0, 90 * 15.0 / 1275.0, 1.0);
    s.var = SweepVar::gamma;
    s.values = range(0, 0.4, 6);
  } else if (name == "fig7a") {
    const double r = large ? 1.0 : 15.0 / 1275.0;
    s.kind = LoadKind::average;
    s.scenario = large ? arith(50, 50, -1, 4, 0, 0, 1.0) : arith(5, 5, -1, 4, 0, 0, 1.0);
    s.var = SweepVar::cache_scale;
    s.m1_per_m0 = 50 * r;
    s.dm_per_m0 = 10 * r;
    s.values = {1, 2, 4, 6, 8, 10, 12};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  if (large) {
    s.unlimited_budget = true;
    std::erase(s.schemes, std::string("sca"));
  }
  return s;
}

ArithmeticScenario scenario_at(const SweepSpec& spec, double value) {
  ArithmeticScenario s = spec.scenario;
  switch (spec.var) {
    case SweepVar::none: break;
    case SweepVar::n_files: s.n_files = as_int(value, "N"); break;
    case SweepVar::n_tiers: s.n_tiers = as_int(value, "T"); break;
    case SweepVar::file_step:
      s.file_size_step = value;
      if (spec.v1_per_dv != 0.0) s.first_file_size = spec.v1_base + spec.v1_per_dv * value;
      break;
    case SweepVar::cache_step:
      s.cache_size_step = value;
      if (spec.m1_per_dm != 0.0) s.first_cache_size = spec.m1_base + spec.m1_per_dm * value;
      break;
    case SweepVar::cache_scale:
      s.first_cache_size = spec.m1_per_m0 * value;
      s.cache_size_step = spec.dm_per_m0 * value;
      break;
    case SweepVar::gamma: s.zipf_gamma = value; break;
  }
  return s;
}

CachingParameter design_scheme(const std::string& scheme, LoadKind kind,
                               const SystemInstance& instance, const TierLayout& layout,
                               const SweepSpec& spec) {
  if (scheme == "smooth") {
    ProjectedGradConfig cfg;
    cfg.c = spec.c;
    cfg.starts = spec.starts;
    cfg.seed = spec.seed;
    cfg.checkpoint_every = std::numeric_limits<int>::max();  // no exact loads in the trace
    cfg.eval = eval_options(spec);
    return minimize_smoothed(kind, instance, layout, cfg).q;
  }
  if (scheme == "sca") {
    const std::vector<CachingParameter> starts = default_sca_starts(instance);
    return solve_sca_multistart(kind, instance, layout, starts).q;
  }
  return baseline_by_id(scheme, instance);
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << "sweep_var,sweep_value,scheme,exact_load,smoothed_load,sim_mean,sim_stderr,converse,"
        "wall_time,status\n";
  for (const CsvRow& r : rows) {
    os << r.sweep_var << ',' << format_sweep(r.sweep_value) << ',' << r.scheme << ','
       << format_value(r.exact_load) << ',' << format_value(r.smoothed_load) << ','
       << format_value(r.sim_mean) << ',' << format_value(r.sim_stderr) << ','
       << format_value(r.converse) << ',' << format_value(r.wall_time) << ',' << r.status << '\n';
  }
}

std::vector<CsvRow> run_sweep(const SweepSpec& spec) { return run_points(spec, sweep_point); }

std::vector<CsvRow> run_random_activity(const SweepSpec& spec) {
  if (!(spec.activity_prob >= 0.0 && spec.activity_prob <= 1.0))
    throw ConfigError("activity probability outside [0, 1]");
  if (spec.activity_samples < 2) throw ConfigError("activity sampling needs at least 2 samples");
  return run_points(spec, [](const SweepSpec& s, double v, int) { return activity_point(s, v); });
}

SweepSpec parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"preset", "large", "kind", "scenario", "sweep", "schemes", "converse", "c", "starts",
              "seed", "trials", "scale", "timing", "activity"},
             "config");
  SweepSpec s;
  s.name = "inline";
  s.schemes = default_schemes(false);
  if (j.contains("preset")) {
    bool large = false;
    read(j, "large", large);
    std::string name;
    read(j, "preset", name);
    s = preset(name, large);
  }
  if (j.contains("kind")) {
    std::string kind;
    read(j, "kind", kind);
    s.kind = parse_load_kind(kind);
  }
  if (j.contains("scenario")) {
    const json& sc = j.at("scenario");
    check_keys(sc, {"N", "V1", "dV", "M1", "dM", "T", "gamma", "tier_users"}, "scenario");
    read(sc, "N", s.scenario.n_files);
    read(sc, "V1", s.scenario.first_file_size);
    read(sc, "dV", s.scenario.file_size_step);
    read(sc, "M1", s.scenario.first_cache_size);
    read(sc, "dM", s.scenario.cache_size_step);
    read(sc, "T", s.scenario.n_tiers);
    read(sc, "gamma", s.scenario.zipf_gamma);
    read(sc, "tier_users", s.scenario.tier_user_counts);
  }
  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    check_keys(sw,
               {"var", "values", "v1_base", "v1_per_dv", "m1_base", "m1_per_dm", "m1_per_m0",
                "dm_per_m0"},
               "sweep");
    if (sw.contains("var")) {
      std::string var;
      read(sw, "var", var);
      s.var = parse_sweep_var(var);
    }
    read(sw, "values", s.values);
    read(sw, "v1_base", s.v1_base);
    read(sw, "v1_per_dv", s.v1_per_dv);
    read(sw, "m1_base", s.m1_base);
    read(sw, "m1_per_dm", s.m1_per_dm);
    read(sw, "m1_per_m0", s.m1_per_m0);
    read(sw, "dm_per_m0", s.dm_per_m0);
  }
  read(j, "schemes", s.schemes);
  read(j, "converse", s.converse);
  read(j, "c", s.c);
  read(j, "starts", s.starts);
  read(j, "seed", s.seed);
  read(j, "trials", s.trials);
  read(j, "scale", s.scale);
  read(j, "timing", s.timing);
  if (j.contains("activity")) {
    const json& a = j.at("activity");
    check_keys(a, {"prob", "assumed_fraction", "samples", "enumeration_cap"}, "activity");
    read(a, "prob", s.activity_prob);
    read(a, "assumed_fraction", s.assumed_fraction);
    read(a, "samples", s.activity_samples);
    read(a, "enumeration_cap", s.activity_enumeration_cap);
  }
  if (s.schemes.empty()) throw ConfigError("at least one scheme is required");
  if (!(s.c >= 1.0)) throw ConfigError("c must be at least 1");
  if (s.starts < 1) throw ConfigError("starts must be positive");
  if (s.trials < 0) throw ConfigError("trials must be nonnegative");
  if (s.var != SweepVar::none && s.values.empty()) throw ConfigError("the sweep range is empty");
  return s;
}

SweepSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace cdc
