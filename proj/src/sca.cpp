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

#include "cdc/sca.hpp"

#include "cdc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

namespace cdc {

const char* to_string(ScaStatus status) {
  switch (status) {
    case ScaStatus::converged: return "converged";
    case ScaStatus::iteration_cap: return "iteration-cap";
    case ScaStatus::solver_failure: return "solver-failure";
  }
  return "unknown";
}

AuxiliaryProblem::AuxiliaryProblem(LoadKind kind, const SystemInstance& instance,
                                   const TierLayout& layout, double max_terms)
    : kind_(kind), instance_(instance), layout_(layout) {
  if (layout.n_tiers() != instance.n_tiers())
    throw ConfigError("layout and instance disagree on the number of tiers");
  const int n_files = instance.n_files();
  const int n_tiers = instance.n_tiers();
  const int k = layout.total();
  if (k > 20) throw BudgetError("auxiliary problem supports at most 20 users");
  const double n_terms = demand_class_count(layout, n_files) * k * std::ldexp(1.0, k - 1);
  if (n_terms > max_terms) {
    std::ostringstream os;
    os << "auxiliary GP would need " << n_terms << " subset-term constraints (cap " << max_terms
       << ")";
    throw BudgetError(os.str());
  }
  classes_ = enumerate_demand_classes(instance, layout);

  const double floor_cache = 10.0 * kScaFloor * instance.total_file_size();
  variable_tier_.assign(n_tiers, 0);
  frozen_tier_.assign(n_tiers, 0);
  q_var_.assign(n_tiers * n_files, -1);
  x_var_.assign(n_tiers * n_files, -1);
  for (int t = 0; t < n_tiers; ++t) {
    if (layout.count(t) == 0) continue;
    if (instance.cache_size(t) <= floor_cache) {
      frozen_tier_[t] = 1;
      continue;
    }
    variable_tier_[t] = 1;
    for (int n = 0; n < n_files; ++n) {
      q_var_[t * n_files + n] = base_.add_variable("q" + std::to_string(t) + "_" + std::to_string(n));
      x_var_[t * n_files + n] = base_.add_variable("x" + std::to_string(t) + "_" + std::to_string(n));
    }
  }

  // Memory, box and floor constraints.
  for (int t = 0; t < n_tiers; ++t) {
    if (!variable_tier_[t]) continue;
    gp::Posynomial mem;
    for (int n = 0; n < n_files; ++n) {
      const int qv = q_var_[t * n_files + n];
      const int xv = x_var_[t * n_files + n];
      mem += gp::Monomial(instance.file_size(n) / instance.cache_size(t), {{qv, 1.0}});
      base_.add_constraint(gp::variable(qv));
      base_.add_constraint(gp::Monomial(kScaFloor, {{qv, -1.0}}));
      base_.add_constraint(gp::variable(xv));
      base_.add_constraint(gp::Monomial(kScaFloor, {{xv, -1.0}}));
    }
    base_.add_constraint(mem);
  }

  // Subset-term constraints, one w per (class, subset) with a nonzero term.
  const double max_v = instance.max_file_size();
  const std::uint64_t n_masks = std::uint64_t{1} << k;
  std::vector<std::vector<int>> class_w(classes_.size());
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    class_w_begin_.push_back(w_entries_.size());
    const double weight = classes_[c].multiplicity * classes_[c].probability;
    if (kind == LoadKind::average && weight == 0.0) continue;
    const DemandVector& d = classes_[c].representative;
    for (std::uint64_t mask = 1; mask < n_masks; ++mask) {
      std::vector<gp::Monomial> terms;
      for (int j = 0; j < k; ++j) {
        if (!((mask >> j) & 1U)) continue;
        bool zero = false;
        gp::Monomial m = subset_monomial(d, mask, j, zero);
        if (!zero) terms.push_back(std::move(m));
      }
      if (terms.empty()) continue;
      const int wv = base_.add_variable("w" + std::to_string(c) + "_" + std::to_string(mask));
      for (const auto& m : terms) base_.add_constraint(m * gp::variable(wv, -1.0));
      base_.add_constraint(gp::Monomial(1.0 / max_v, {{wv, 1.0}}));
      w_entries_.push_back({c, mask});
      w_var_.push_back(wv);
      w_terms_.push_back(std::move(terms));
    }
  }
  class_w_begin_.push_back(w_entries_.size());

  gp::Posynomial objective;
  if (kind == LoadKind::worst_case) {
    u_var_ = base_.add_variable("u");
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      if (class_w_begin_[c] == class_w_begin_[c + 1]) continue;
      gp::Posynomial sum;
      for (std::size_t e = class_w_begin_[c]; e < class_w_begin_[c + 1]; ++e)
        sum += gp::Monomial(1.0, {{w_var_[e], 1.0}, {u_var_, -1.0}});
      base_.add_constraint(sum);
    }
    base_.add_constraint(
        gp::Monomial(1.0 / ((std::ldexp(1.0, k) - 1.0) * max_v), {{u_var_, 1.0}}));
    objective = gp::variable(u_var_);
  } else {
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      const double weight = classes_[c].multiplicity * classes_[c].probability;
      for (std::size_t e = class_w_begin_[c]; e < class_w_begin_[c + 1]; ++e)
        objective += gp::Monomial(weight, {{w_var_[e], 1.0}});
    }
  }
  base_.set_objective(objective);
  n_vars_ = base_.n_variables();
}

gp::Monomial AuxiliaryProblem::subset_monomial(const DemandVector& d, std::uint64_t mask, int j,
                                               bool& zero) const {
  const int n_files = instance_.n_files();
  const int n = d[j];
  const int tj = layout_.tier_of(j);
  std::vector<std::pair<int, double>> exps;
  zero = false;
  for (int t = 0; t < layout_.n_tiers(); ++t) {
    if (layout_.count(t) == 0) continue;
    int alpha = 0;
    for (int u = layout_.begin(t); u < layout_.end(t); ++u) alpha += (mask >> u) & 1U;
    if (t == tj) --alpha;
    const int beta = layout_.count(t) - alpha;
    if (frozen_tier_[t]) {
      if (alpha > 0) zero = true;
      continue;
    }
    if (alpha > 0) exps.emplace_back(q_var_[t * n_files + n], alpha);
    if (beta > 0) exps.emplace_back(x_var_[t * n_files + n], beta);
  }
  return gp::Monomial(instance_.file_size(n), std::move(exps));
}

LiftedPoint AuxiliaryProblem::lift(const CachingParameter& q) const {
  if (!check_feasible(instance_, q)) throw ConfigError("cannot lift an infeasible caching parameter");
  const int n_files = instance_.n_files();
  LiftedPoint p;
  p.q = q.matrix().cwiseMax(0.0).cwiseMin(1.0);
  p.x = Eigen::MatrixXd::Ones(q.n_tiers(), n_files);
  for (int t = 0; t < q.n_tiers(); ++t) {
    for (int n = 0; n < n_files; ++n) {
      if (frozen_tier_[t]) {
        p.q(t, n) = 0.0;
        continue;
      }
      if (!variable_tier_[t]) continue;
      const double qq = p.q(t, n);
      p.x(t, n) = std::max(1.0 - qq, kScaFloor);
      p.q(t, n) = std::max(qq, kScaFloor);
    }
  }
  std::vector<double> z(n_vars_, 1.0);
  for (int t = 0; t < q.n_tiers(); ++t) {
    for (int n = 0; n < n_files; ++n) {
      if (q_var_[t * n_files + n] < 0) continue;
      z[q_var_[t * n_files + n]] = p.q(t, n);
      z[x_var_[t * n_files + n]] = p.x(t, n);
    }
  }
  p.w.resize(w_var_.size());
  for (std::size_t e = 0; e < w_var_.size(); ++e) {
    double best = 0.0;
    for (const auto& m : w_terms_[e]) best = std::max(best, m.evaluate(z));
    p.w[e] = best;
    z[w_var_[e]] = best;
  }
  if (kind_ == LoadKind::worst_case) {
    for (std::size_t c = 0; c + 1 < class_w_begin_.size(); ++c) {
      double sum = 0.0;
      for (std::size_t e = class_w_begin_[c]; e < class_w_begin_[c + 1]; ++e) sum += p.w[e];
      p.u = std::max(p.u, sum);
    }
    z[u_var_] = p.u;
  }
  p.objective = objective(z);
  return p;
}

std::vector<double> AuxiliaryProblem::to_vector(const LiftedPoint& p) const {
  const int n_files = instance_.n_files();
  std::vector<double> z(n_vars_, 1.0);
  for (int t = 0; t < instance_.n_tiers(); ++t) {
    for (int n = 0; n < n_files; ++n) {
      if (q_var_[t * n_files + n] < 0) continue;
      z[q_var_[t * n_files + n]] = p.q(t, n);
      z[x_var_[t * n_files + n]] = p.x(t, n);
    }
  }
  for (std::size_t e = 0; e < w_var_.size(); ++e) z[w_var_[e]] = p.w[e];
  if (u_var_ >= 0) z[u_var_] = p.u;
  return z;
}

double AuxiliaryProblem::objective(std::span<const double> z) const {
  return base_.objective().evaluate(z);
}

double AuxiliaryProblem::max_violation(std::span<const double> z) const {
  double worst = base_.max_violation(z);
  for (std::size_t i = 0; i < q_var_.size(); ++i) {
    if (q_var_[i] < 0) continue;
    worst = std::max(worst, 1.0 / (z[q_var_[i]] + z[x_var_[i]]) - 1.0);
  }
  return worst;
}

gp::GpModel AuxiliaryProblem::condensed_model(std::span<const double> anchor) const {
  gp::GpModel model = base_;
  const gp::Posynomial one = gp::Monomial(1.0, {});
  for (std::size_t i = 0; i < q_var_.size(); ++i) {
    if (q_var_[i] < 0) continue;
    gp::Posynomial sum = gp::variable(q_var_[i]);
    sum += gp::variable(x_var_[i]);
    model.add_constraint(gp::condense_ratio(one, sum, anchor));
  }
  return model;
}

CachingParameter AuxiliaryProblem::extract_q(std::span<const double> z,
                                             const CachingParameter& base) const {
  CachingParameter q = base;
  const int n_files = instance_.n_files();
  for (int t = 0; t < instance_.n_tiers(); ++t) {
    for (int n = 0; n < n_files; ++n) {
      if (frozen_tier_[t]) q(t, n) = 0.0;
      const int v = q_var_[t * n_files + n];
      if (v >= 0) q(t, n) = std::clamp(z[v], 0.0, 1.0);
    }
  }
  return q;
}

ScaResult solve_sca(LoadKind kind, const SystemInstance& instance, const TierLayout& layout,
                    const CachingParameter& init, const ScaOptions& options) {
  const AuxiliaryProblem aux(kind, instance, layout, options.max_terms);
  const LiftedPoint start = aux.lift(init);
  std::vector<double> z = aux.to_vector(start);

  ScaResult result{init, 0.0, {}};
  ScaReport& report = result.report;
  report.trace.push_back(start.objective);
  report.status = ScaStatus::iteration_cap;
  const double abs_tol = 1e-12 * instance.total_file_size();
  for (int it = 1; it <= options.max_iter; ++it) {
    const gp::GpModel model = aux.condensed_model(z);
    const gp::GpResult r = gp::solve_gp(model, z, options.gp);
    // A capped inner solve still gives a usable iterate when it is feasible
    // and does not increase the objective.
    const bool usable = r.status == gp::GpStatus::iteration_cap &&
                        aux.max_violation(r.point) <= 1e-9 &&
                        r.objective <= report.trace.back();
    if (r.status != gp::GpStatus::optimal && !usable) {
      report.status = ScaStatus::solver_failure;
      report.message = std::string("inner GP ended with status ") + gp::to_string(r.status) +
                       " at iteration " + std::to_string(it);
      break;
    }
    const double prev = report.trace.back();
    z = r.point;
    report.trace.push_back(r.objective);
    report.iterations = it;
    report.kkt_residual = r.kkt_residual;
    if (prev - r.objective <= options.tol * prev + abs_tol) {
      report.status = ScaStatus::converged;
      break;
    }
  }
  CachingParameter base(init.matrix().cwiseMax(0.0).cwiseMin(1.0));
  result.q = aux.extract_q(z, base);
  result.exact_load = exact_load(kind, instance, layout, result.q);
  return result;
}

ScaResult solve_sca_worst_case(const SystemInstance& instance, const TierLayout& layout,
                               const CachingParameter& init, const ScaOptions& options) {
  return solve_sca(LoadKind::worst_case, instance, layout, init, options);
}

ScaResult solve_sca_average(const SystemInstance& instance, const TierLayout& layout,
                            const CachingParameter& init, const ScaOptions& options) {
  return solve_sca(LoadKind::average, instance, layout, init, options);
}

ScaResult solve_sca_multistart(LoadKind kind, const SystemInstance& instance,
                               const TierLayout& layout, std::span<const CachingParameter> starts,
                               const ScaOptions& options) {
  if (starts.empty()) throw ConfigError("SCA needs at least one start");
  std::vector<ScaResult> results(starts.size(), ScaResult{starts[0], 0.0, {}});
  std::vector<std::exception_ptr> errors(starts.size());
  const long n = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      results[i] = solve_sca(kind, instance, layout, starts[i], options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].exact_load < results[best].exact_load) best = i;
  }
  return std::move(results[best]);
}

std::vector<CachingParameter> default_sca_starts(const SystemInstance& instance) {
  std::vector<CachingParameter> starts{tier_uniform_max_file(instance)};
  for (const auto& s : baseline_schemes(instance)) {
    const bool seen = std::any_of(starts.begin(), starts.end(), [&](const CachingParameter& q) {
      return q.matrix() == s.q.matrix();
    });
    if (!seen) starts.push_back(s.q);
  }
  return starts;
}

void write_trace_csv(std::ostream& os, const ScaReport& report) {
  os << "iteration,objective\n";
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < report.trace.size(); ++i) os << i << ',' << report.trace[i] << '\n';
  os.precision(old_precision);
}

}  // namespace cdc
