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

// Command line front end: evaluate, optimize, bound, simulate and sweep.
// Exit codes: 0 success, 2 configuration error, 3 evaluation budget exceeded.

#include "cdc/baselines.hpp"
#include "cdc/converse.hpp"
#include "cdc/experiment.hpp"
#include "cdc/sca.hpp"
#include "cdc/smooth_opt.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
  std::string config;
  std::string preset;
  std::string kind;
  std::string schemes;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> c;
  std::optional<int> starts;
  std::optional<long> trials;
  std::optional<long> scale;
  std::optional<double> at;
  bool large = false;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--preset", f.preset, "scenario preset (fig2a ... fig8b)");
  cmd->add_option("--kind", f.kind, "worst-case or average");
  cmd->add_option("--schemes", f.schemes, "comma-separated scheme ids");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--c", f.c, "smoothing parameter (>= 1)");
  cmd->add_option("--starts", f.starts, "projected-gradient starts");
  cmd->add_option("--trials", f.trials, "Monte Carlo trials");
  cmd->add_option("--scale", f.scale, "simulator data units per unit size");
  cmd->add_option("--at", f.at, "sweep value for single-point commands");
  cmd->add_option("--out", f.out, "output CSV (default stdout)");
  cmd->add_flag("--large", f.large, "paper-size preset parameters");
  cmd->add_flag("--timing", f.timing, "fill the wall_time column");
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

cdc::SweepSpec build_spec(const CommonFlags& f) {
  cdc::SweepSpec spec;
  if (!f.config.empty()) {
    spec = cdc::load_config(f.config);
  } else if (!f.preset.empty()) {
    spec = cdc::preset(f.preset, f.large);
  } else {
    throw cdc::ConfigError("either --config or --preset is required");
  }
  if (!f.kind.empty()) spec.kind = cdc::parse_load_kind(f.kind);
  if (!f.schemes.empty()) spec.schemes = split(f.schemes);
  if (f.seed) spec.seed = *f.seed;
  if (f.c) spec.c = *f.c;
  if (f.starts) spec.starts = *f.starts;
  if (f.trials) spec.trials = *f.trials;
  if (f.scale) spec.scale = *f.scale;
  if (f.timing) spec.timing = true;
  if (!(spec.c >= 1.0)) throw cdc::ConfigError("c must be at least 1");
  return spec;
}

// The spec collapsed to one sweep point: --at, else the first sweep value.
cdc::SweepSpec single_point(cdc::SweepSpec spec, const CommonFlags& f) {
  if (spec.var == cdc::SweepVar::none) return spec;
  const double v = f.at ? *f.at : spec.values.front();
  spec.values = {v};
  return spec;
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw cdc::ConfigError("cannot write '" + path + "'");
    os = &file;
  }
};

void write_q(std::ostream& os, const cdc::CachingParameter& q) {
  os << "tier,file,q\n";
  os.precision(17);
  for (int t = 0; t < q.n_tiers(); ++t)
    for (int n = 0; n < q.n_files(); ++n) os << t << ',' << n << ',' << q(t, n) << '\n';
}

cdc::SystemInstance point_instance(const cdc::SweepSpec& spec) {
  return cdc::build_arithmetic_scenario(cdc::scenario_at(spec, spec.values.empty() ? 0.0 : spec.values.front()));
}

cdc::TierLayout point_layout(const cdc::SweepSpec& spec, const cdc::SystemInstance& instance) {
  if (spec.assumed_fraction >= 1.0) return cdc::full_layout(instance);
  return cdc::expected_active_layout(spec.assumed_fraction, instance.user_counts());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized coded caching with arbitrary file and cache sizes"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string trace_path;
  double prob = -1.0;
  auto* evaluate = app.add_subcommand("evaluate", "exact and smoothed loads of the schemes");
  auto* sca = app.add_subcommand("optimize-sca", "stationary point by successive convex approximation");
  auto* smooth = app.add_subcommand("optimize-smooth", "projected gradient on the smoothed load");
  auto* converse = app.add_subcommand("converse", "converse bounds");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo delivery of the schemes");
  auto* sweep = app.add_subcommand("sweep", "sweep a scenario parameter");
  auto* activity = app.add_subcommand("random-activity", "average over random active users");
  for (auto* cmd : {evaluate, sca, smooth, converse, simulate, sweep, activity}) add_common(cmd, f);
  sca->add_option("--trace", trace_path, "objective trace CSV");
  smooth->add_option("--trace", trace_path, "iteration trace CSV");
  activity->add_option("--prob", prob, "activity probability of every user");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cdc::SweepSpec spec = build_spec(f);
    Output out(f.out);

    if (*sweep) {
      cdc::write_csv(*out.os, cdc::run_sweep(spec));
    } else if (*activity) {
      if (prob >= 0.0) spec.activity_prob = prob;
      cdc::write_csv(*out.os, cdc::run_random_activity(spec));
    } else if (*evaluate) {
      if (f.schemes.empty() && f.config.empty()) {
        spec.schemes.clear();
        for (const char* id : {"uniform-alidec", "tier-uniform", "file-uniform"}) spec.schemes.emplace_back(id);
      }
      spec.trials = 0;
      cdc::write_csv(*out.os, cdc::run_sweep(single_point(spec, f)));
    } else if (*simulate) {
      if (!f.trials && spec.trials == 0) spec.trials = 200;
      cdc::write_csv(*out.os, cdc::run_sweep(single_point(spec, f)));
    } else if (*converse) {
      const cdc::SweepSpec point = single_point(spec, f);
      const cdc::SystemInstance instance = point_instance(point);
      const cdc::TierLayout layout = point_layout(point, instance);
      *out.os << "bound,value\n";
      out.os->precision(10);
      *out.os << "worst-case," << cdc::converse_worst_case(instance, layout).value << '\n';
      *out.os << "average," << cdc::converse_average(instance, layout).value << '\n';
    } else if (*sca) {
      const cdc::SweepSpec point = single_point(spec, f);
      const cdc::SystemInstance instance = point_instance(point);
      const cdc::TierLayout layout = point_layout(point, instance);
      const cdc::ScaResult r =
          cdc::solve_sca_multistart(point.kind, instance, layout, cdc::default_sca_starts(instance));
      write_q(*out.os, r.q);
      if (!trace_path.empty()) {
        std::ofstream trace(trace_path);
        if (!trace) throw cdc::ConfigError("cannot write '" + trace_path + "'");
        cdc::write_trace_csv(trace, r.report);
      }
      std::cerr.precision(10);
      std::cerr << "exact_load=" << r.exact_load << " status=" << cdc::to_string(r.report.status)
                << " iterations=" << r.report.iterations << '\n';
    } else if (*smooth) {
      const cdc::SweepSpec point = single_point(spec, f);
      const cdc::SystemInstance instance = point_instance(point);
      const cdc::TierLayout layout = point_layout(point, instance);
      cdc::ProjectedGradConfig cfg;
      cfg.c = point.c;
      cfg.starts = point.starts;
      cfg.seed = point.seed;
      const cdc::SmoothResult r = cdc::minimize_smoothed(point.kind, instance, layout, cfg);
      write_q(*out.os, r.q);
      if (!trace_path.empty()) {
        std::ofstream trace(trace_path);
        if (!trace) throw cdc::ConfigError("cannot write '" + trace_path + "'");
        cdc::write_smooth_trace_csv(trace, r);
      }
      std::cerr.precision(10);
      std::cerr << "exact_load=" << r.exact_load << " smoothed=" << r.smoothed
                << " best_start=" << r.best_start << '\n';
    }
  } catch (const cdc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cdc::BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
