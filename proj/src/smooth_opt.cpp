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

#include "cdc/smooth_opt.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

namespace cdc {

namespace {

double tier_usage(const Eigen::MatrixXd& q_hat, int t, double lambda,
                  std::span<const double> sizes) {
  double used = 0.0;
  for (int n = 0; n < q_hat.cols(); ++n)
    used += sizes[n] * std::clamp(q_hat(t, n) - lambda * sizes[n], 0.0, 1.0);
  return used;
}

double exact_or_nan(LoadKind kind, const SystemInstance& instance, const TierLayout& layout,
                    const CachingParameter& q, const EvalOptions& eval) {
  try {
    return exact_load(kind, instance, layout, q, eval);
  } catch (const BudgetError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

struct StartOutcome {
  CachingParameter q{1, 1};
  double value = 0.0;
  std::vector<SmoothTraceRow> trace;
};

StartOutcome run_start(LoadKind kind, const SystemInstance& instance, const TierLayout& layout,
                       const ProjectedGradConfig& cfg, int index) {
  StartOutcome out;
  CachingParameter q = random_feasible_start(instance, cfg.seed, index);
  SmoothedEvaluation ev =
      smoothed_value_and_gradient(kind, instance, layout, q, cfg.c, cfg.eval);
  out.trace.push_back({index, 0, ev.value, exact_or_nan(kind, instance, layout, q, cfg.eval)});
  int it = 1;
  for (; it <= cfg.max_iter; ++it) {
    double step = cfg.initial_step;
    bool accepted = false;
    CachingParameter next = q;
    double next_value = ev.value;
    while (step > 1e-14) {
      next = project_feasible(q.matrix() - step * ev.gradient, instance);
      next_value = smoothed_load(kind, instance, layout, next, cfg.c, cfg.eval);
      const double predicted = (ev.gradient.array() * (next.matrix() - q.matrix()).array()).sum();
      if (next_value <= ev.value + cfg.armijo * predicted) {
        accepted = true;
        break;
      }
      step *= cfg.shrink;
    }
    if (!accepted) break;
    const double move = (next.matrix() - q.matrix()).cwiseAbs().maxCoeff();
    q = std::move(next);
    ev = smoothed_value_and_gradient(kind, instance, layout, q, cfg.c, cfg.eval);
    const bool done = move <= cfg.tol || it == cfg.max_iter;
    const bool checkpoint = done || it % cfg.checkpoint_every == 0;
    out.trace.push_back({index, it, ev.value,
                         checkpoint ? exact_or_nan(kind, instance, layout, q, cfg.eval)
                                    : std::numeric_limits<double>::quiet_NaN()});
    if (done) break;
  }
  if (std::isnan(out.trace.back().exact))
    out.trace.back().exact = exact_or_nan(kind, instance, layout, q, cfg.eval);
  out.q = std::move(q);
  out.value = ev.value;
  return out;
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

CachingParameter project_feasible(const Eigen::MatrixXd& q_hat, const SystemInstance& instance) {
  if (q_hat.rows() != instance.n_tiers() || q_hat.cols() != instance.n_files())
    throw ConfigError("caching parameter shape does not match the instance");
  const auto sizes = instance.file_sizes();
  Eigen::MatrixXd q = q_hat.cwiseMax(0.0).cwiseMin(1.0);
  for (int t = 0; t < instance.n_tiers(); ++t) {
    const double cap = instance.cache_size(t);
    if (tier_usage(q_hat, t, 0.0, sizes) <= cap) continue;
    double lo = 0.0;
    double hi = 0.0;
    for (int n = 0; n < instance.n_files(); ++n) hi = std::max(hi, q_hat(t, n) / sizes[n]);
    for (int iter = 0; iter < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (tier_usage(q_hat, t, mid, sizes) > cap) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    for (int n = 0; n < instance.n_files(); ++n)
      q(t, n) = std::clamp(q_hat(t, n) - hi * sizes[n], 0.0, 1.0);
  }
  return CachingParameter(std::move(q));
}

CachingParameter random_feasible_start(const SystemInstance& instance, std::uint64_t seed,
                                       int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  Eigen::MatrixXd draw(instance.n_tiers(), instance.n_files());
  // Row-major fill with the top 53 bits of each draw, so starts are the same on every platform.
  for (int t = 0; t < draw.rows(); ++t)
    for (int n = 0; n < draw.cols(); ++n) draw(t, n) = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return project_feasible(draw, instance);
}

SmoothResult minimize_smoothed(LoadKind kind, const SystemInstance& instance,
                               const TierLayout& layout, const ProjectedGradConfig& config) {
  if (!(config.c >= 1.0)) throw ConfigError("smoothing parameter c must be >= 1");
  if (config.starts < 1) throw ConfigError("at least one start is required");
  if (!(config.initial_step > 0.0) || !(config.shrink > 0.0 && config.shrink < 1.0) ||
      !(config.armijo > 0.0 && config.armijo < 1.0) || config.max_iter < 1 ||
      config.checkpoint_every < 1)
    throw ConfigError("invalid projected-gradient parameters");
  check_evaluation_budget(layout, instance.n_files(), config.eval.budget);

  std::vector<StartOutcome> runs(config.starts);
  std::vector<std::exception_ptr> errors(config.starts);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < config.starts; ++s) {
    try {
      runs[s] = run_start(kind, instance, layout, config, s);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  int best = 0;
  for (int s = 1; s < config.starts; ++s) {
    if (runs[s].value < runs[best].value) best = s;
  }
  SmoothResult result{runs[best].q, runs[best].value, runs[best].trace.back().exact, best, {}, {}};
  for (auto& r : runs) {
    result.start_values.push_back(r.value);
    result.trace.insert(result.trace.end(), r.trace.begin(), r.trace.end());
  }
  return result;
}

double increment_bound(int k, int n_files, double c, LoadKind kind) {
  if (k < 1 || n_files < 1) throw ConfigError("increment bound needs K >= 1 and N >= 1");
  if (!(c >= 1.0)) throw ConfigError("smoothing parameter c must be >= 1");
  double sum = 0.0;
  for (int i = 2; i <= k; ++i) sum += std::exp(log_binomial(k, i) + std::log(std::log(i)));
  if (kind == LoadKind::worst_case) sum += k * std::log(static_cast<double>(n_files));
  return sum / c;
}

double increment_bound_closed_form(int k, int n_files, double c, LoadKind kind) {
  if (k < 1 || n_files < 1) throw ConfigError("increment bound needs K >= 1 and N >= 1");
  const double two_k = std::ldexp(1.0, k);
  double v = std::min((k / 2.0 - 1.0) * two_k + 1.0, (two_k - 1.0) * std::log(k));
  if (kind == LoadKind::worst_case) v += k * std::log(static_cast<double>(n_files));
  return v / c;
}

void write_smooth_trace_csv(std::ostream& os, const SmoothResult& result) {
  os << "start,iteration,smoothed,exact\n";
  const auto old_precision = os.precision(17);
  for (const auto& r : result.trace) {
    os << r.start << ',' << r.iteration << ',' << r.smoothed << ',';
    if (!std::isnan(r.exact)) os << r.exact;
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace cdc
