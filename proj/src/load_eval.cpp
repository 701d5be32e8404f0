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

#include "cdc/load_eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace cdc {

namespace {

constexpr std::size_t kBlockSize = 64;

void require_shapes(const SystemInstance& instance, const TierLayout& layout,
                    const CachingParameter& q) {
  if (layout.n_tiers() != instance.n_tiers())
    throw ConfigError("layout and instance disagree on the number of tiers");
  if (q.n_tiers() != instance.n_tiers() || q.n_files() != instance.n_files())
    throw ConfigError("caching parameter shape does not match the instance");
}

void require_smoothing(double c) {
  if (!(c >= 1.0) || !std::isfinite(c)) throw ConfigError("smoothing parameter c must be >= 1");
}

// Evaluates the subset sum of one demand vector. Per-tier factors
// q^a (1-q)^(K_t-a) and their q-derivatives are tabulated once per q.
class ClassKernel {
 public:
  ClassKernel(const SystemInstance& instance, const TierLayout& layout,
              const CachingParameter& q)
      : layout_(layout),
        n_files_(instance.n_files()),
        n_tiers_(instance.n_tiers()),
        k_(layout.total()),
        sizes_(instance.file_sizes().begin(), instance.file_sizes().end()),
        counts_(subset_tier_counts(layout)) {
    for (int t = 0; t < n_tiers_; ++t) {
      if (layout.count(t) > 0) active_.push_back(t);
    }
    stride_ = k_ + 1;
    factor_.assign(active_.size() * n_files_ * stride_, 0.0);
    deriv_.assign(factor_.size(), 0.0);
    for (std::size_t a = 0; a < active_.size(); ++a) {
      const int t = active_[a];
      const int kt = layout.count(t);
      for (int n = 0; n < n_files_; ++n) {
        const double qq = q(t, n);
        const double xx = 1.0 - qq;
        for (int alpha = 0; alpha <= kt; ++alpha) {
          const int beta = kt - alpha;
          const std::size_t at = index(a, n, alpha);
          factor_[at] = std::pow(qq, alpha) * std::pow(xx, beta);
          double d = 0.0;
          if (alpha > 0) d += alpha * std::pow(qq, alpha - 1) * std::pow(xx, beta);
          if (beta > 0) d -= beta * std::pow(qq, alpha) * std::pow(xx, beta - 1);
          deriv_[at] = d;
        }
      }
    }
  }

  int users() const { return k_; }

  // Exact subset sum (max inside each subset).
  double exact(const DemandVector& d) const {
    double total = 0.0;
    const std::uint64_t n_masks = std::uint64_t{1} << k_;
    for (std::uint64_t mask = 1; mask < n_masks; ++mask) {
      double best = 0.0;
      for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
        best = std::max(best, term(d, mask, std::countr_zero(rest)));
      }
      total += best;
    }
    return total;
  }

  // Smoothed subset sum; when `grad` is set, adds `scale` times its q-gradient.
  double smoothed(const DemandVector& d, double c, Eigen::MatrixXd* grad, double scale) const {
    double total = 0.0;
    std::vector<double> terms(k_);
    std::vector<int> members(k_);
    const std::uint64_t n_masks = std::uint64_t{1} << k_;
    for (std::uint64_t mask = 1; mask < n_masks; ++mask) {
      int m = 0;
      double top = -std::numeric_limits<double>::infinity();
      for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        members[m] = j;
        terms[m] = term(d, mask, j);
        top = std::max(top, terms[m]);
        ++m;
      }
      double sum = 0.0;
      for (int i = 0; i < m; ++i) sum += std::exp(c * (terms[i] - top));
      total += top + std::log(sum) / c;
      if (grad == nullptr) continue;
      for (int i = 0; i < m; ++i) {
        const double w = std::exp(c * (terms[i] - top)) / sum;
        if (w > 0.0) add_term_gradient(d, mask, members[i], scale * w, *grad);
      }
    }
    return total;
  }

 private:
  std::size_t index(std::size_t a, int n, int alpha) const {
    return (a * n_files_ + n) * stride_ + alpha;
  }

  int alpha(std::uint64_t mask, int t, int tier_j) const {
    return counts_[mask * n_tiers_ + t] - (t == tier_j ? 1 : 0);
  }

  double term(const DemandVector& d, std::uint64_t mask, int j) const {
    const int n = d[j];
    const int tj = layout_.tier_of(j);
    double prod = sizes_[n];
    for (std::size_t a = 0; a < active_.size(); ++a) {
      prod *= factor_[index(a, n, alpha(mask, active_[a], tj))];
    }
    return prod;
  }

  void add_term_gradient(const DemandVector& d, std::uint64_t mask, int j, double weight,
                         Eigen::MatrixXd& grad) const {
    const int n = d[j];
    const int tj = layout_.tier_of(j);
    const std::size_t na = active_.size();
    // prefix[a] = product of factors of active tiers before a.
    double prefix[64];
    double suffix[65];
    prefix[0] = 1.0;
    for (std::size_t a = 0; a + 1 < na; ++a)
      prefix[a + 1] = prefix[a] * factor_[index(a, n, alpha(mask, active_[a], tj))];
    suffix[na] = 1.0;
    for (std::size_t a = na; a-- > 0;)
      suffix[a] = suffix[a + 1] * factor_[index(a, n, alpha(mask, active_[a], tj))];
    for (std::size_t a = 0; a < na; ++a) {
      const double dfa = deriv_[index(a, n, alpha(mask, active_[a], tj))];
      grad(active_[a], n) += weight * sizes_[n] * dfa * prefix[a] * suffix[a + 1];
    }
  }

  const TierLayout& layout_;
  int n_files_;
  int n_tiers_;
  int k_;
  std::vector<double> sizes_;
  std::vector<int> counts_;
  std::vector<int> active_;
  int stride_ = 1;
  std::vector<double> factor_;
  std::vector<double> deriv_;
};

// Pairwise combination in index order; the result is independent of threading.
template <typename T, typename Combine>
T pairwise_reduce(std::vector<T>& parts, Combine combine) {
  std::size_t width = 1;
  while (width < parts.size()) {
    for (std::size_t i = 0; i + width < parts.size(); i += 2 * width) {
      combine(parts[i], parts[i + width]);
    }
    width *= 2;
  }
  return parts.front();
}

struct WorstBlock {
  double load = -1.0;
  std::size_t index = 0;
};

struct SumBlock {
  double value = 0.0;
  Eigen::MatrixXd grad;
};

// Online log-sum-exp over classes: value = shift + log(sum)/c.
struct SoftMaxBlock {
  double shift = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  Eigen::MatrixXd grad;

  void add(double x, double weight, const Eigen::MatrixXd* dx, double c) {
    if (weight <= 0.0) return;
    if (x > shift) {
      const double r = std::isinf(shift) ? 0.0 : std::exp(c * (shift - x));
      sum *= r;
      if (grad.size() > 0) grad *= r;
      shift = x;
    }
    const double e = weight * std::exp(c * (x - shift));
    sum += e;
    if (dx != nullptr) grad += e * (*dx);
  }
};

std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

WorstBlock run_worst_exact(const ClassKernel& kernel, const std::vector<DemandClass>& classes) {
  std::vector<WorstBlock> blocks(block_count(classes.size()));
  const long nb = static_cast<long>(blocks.size());
#pragma omp parallel for schedule(dynamic)
  for (long b = 0; b < nb; ++b) {
    WorstBlock best;
    const std::size_t hi = std::min(classes.size(), (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < hi; ++i) {
      const double x = kernel.exact(classes[i].representative);
      if (x > best.load) best = {x, i};
    }
    blocks[b] = best;
  }
  WorstBlock best = blocks.front();
  for (const auto& blk : blocks) {
    if (blk.load > best.load) best = blk;
  }
  return best;
}

SumBlock run_average(const ClassKernel& kernel, const std::vector<DemandClass>& classes,
                     const SystemInstance& instance, bool smoothed, double c, bool want_grad) {
  std::vector<SumBlock> blocks(block_count(classes.size()));
  const long nb = static_cast<long>(blocks.size());
#pragma omp parallel for schedule(dynamic)
  for (long b = 0; b < nb; ++b) {
    SumBlock acc;
    if (want_grad) acc.grad = Eigen::MatrixXd::Zero(instance.n_tiers(), instance.n_files());
    const std::size_t hi = std::min(classes.size(), (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < hi; ++i) {
      const double w = classes[i].multiplicity * classes[i].probability;
      if (w == 0.0) continue;
      const auto& d = classes[i].representative;
      const double x = smoothed ? kernel.smoothed(d, c, want_grad ? &acc.grad : nullptr, w)
                                : kernel.exact(d);
      acc.value += w * x;
    }
    blocks[b] = std::move(acc);
  }
  return pairwise_reduce(blocks, [want_grad](SumBlock& lhs, const SumBlock& rhs) {
    lhs.value += rhs.value;
    if (want_grad) lhs.grad += rhs.grad;
  });
}

SoftMaxBlock run_worst_smoothed(const ClassKernel& kernel,
                                const std::vector<DemandClass>& classes,
                                const SystemInstance& instance, double c, bool want_grad) {
  std::vector<SoftMaxBlock> blocks(block_count(classes.size()));
  const long nb = static_cast<long>(blocks.size());
#pragma omp parallel for schedule(dynamic)
  for (long b = 0; b < nb; ++b) {
    SoftMaxBlock acc;
    Eigen::MatrixXd dx;
    if (want_grad) {
      acc.grad = Eigen::MatrixXd::Zero(instance.n_tiers(), instance.n_files());
      dx = acc.grad;
    }
    const std::size_t hi = std::min(classes.size(), (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < hi; ++i) {
      if (want_grad) dx.setZero();
      const double x =
          kernel.smoothed(classes[i].representative, c, want_grad ? &dx : nullptr, 1.0);
      acc.add(x, classes[i].multiplicity, want_grad ? &dx : nullptr, c);
    }
    blocks[b] = std::move(acc);
  }
  SoftMaxBlock total = blocks.front();
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    const SoftMaxBlock& blk = blocks[b];
    if (blk.sum <= 0.0) continue;
    if (blk.shift > total.shift) {
      const double r = std::exp(c * (total.shift - blk.shift));
      total.sum *= r;
      if (want_grad) total.grad *= r;
      total.shift = blk.shift;
    }
    const double r = std::exp(c * (blk.shift - total.shift));
    total.sum += r * blk.sum;
    if (want_grad) total.grad += r * blk.grad;
  }
  return total;
}

struct Prepared {
  std::vector<DemandClass> classes;
};

Prepared prepare(const SystemInstance& instance, const TierLayout& layout,
                 const CachingParameter& q, const EvalOptions& opts) {
  require_shapes(instance, layout, q);
  check_evaluation_budget(layout, instance.n_files(), opts.budget);
  return {enumerate_demand_classes(instance, layout)};
}

}  // namespace

double log_sum_exp(std::span<const double> x, double c) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : x) top = std::max(top, v);
  double sum = 0.0;
  for (double v : x) sum += std::exp(c * (v - top));
  return top + std::log(sum) / c;
}

double subset_term(const SystemInstance& instance, const TierLayout& layout,
                   const CachingParameter& q, const DemandVector& demand, std::uint64_t subset,
                   int j) {
  require_shapes(instance, layout, q);
  const int n = demand.at(j);
  double prod = instance.file_size(n);
  const std::uint64_t others = subset & ~(std::uint64_t{1} << j);
  for (int u = 0; u < layout.total(); ++u) {
    const double qq = q(layout.tier_of(u), n);
    prod *= ((others >> u) & 1U) ? qq : (1.0 - qq);
  }
  return prod;
}

double demand_load(const SystemInstance& instance, const TierLayout& layout,
                   const CachingParameter& q, const DemandVector& demand) {
  require_shapes(instance, layout, q);
  if (static_cast<int>(demand.size()) != layout.total())
    throw ConfigError("demand vector length must equal the number of users");
  return ClassKernel(instance, layout, q).exact(demand);
}

WorstDemand worst_case_demand(const SystemInstance& instance, const TierLayout& layout,
                              const CachingParameter& q, const EvalOptions& opts) {
  const Prepared p = prepare(instance, layout, q, opts);
  const ClassKernel kernel(instance, layout, q);
  const WorstBlock best = run_worst_exact(kernel, p.classes);
  return {p.classes[best.index].representative, best.load};
}

double worst_case_load(const SystemInstance& instance, const TierLayout& layout,
                       const CachingParameter& q, const EvalOptions& opts) {
  return worst_case_demand(instance, layout, q, opts).load;
}

double average_load(const SystemInstance& instance, const TierLayout& layout,
                    const CachingParameter& q, const EvalOptions& opts) {
  const Prepared p = prepare(instance, layout, q, opts);
  const ClassKernel kernel(instance, layout, q);
  return run_average(kernel, p.classes, instance, false, 1.0, false).value;
}

double exact_load(LoadKind kind, const SystemInstance& instance, const TierLayout& layout,
                  const CachingParameter& q, const EvalOptions& opts) {
  return kind == LoadKind::worst_case ? worst_case_load(instance, layout, q, opts)
                                      : average_load(instance, layout, q, opts);
}

SmoothedEvaluation smoothed_value_and_gradient(LoadKind kind, const SystemInstance& instance,
                                               const TierLayout& layout,
                                               const CachingParameter& q, double c,
                                               const EvalOptions& opts) {
  require_smoothing(c);
  const Prepared p = prepare(instance, layout, q, opts);
  const ClassKernel kernel(instance, layout, q);
  SmoothedEvaluation out;
  if (kind == LoadKind::average) {
    SumBlock r = run_average(kernel, p.classes, instance, true, c, true);
    out.value = r.value;
    out.gradient = std::move(r.grad);
  } else {
    SoftMaxBlock r = run_worst_smoothed(kernel, p.classes, instance, c, true);
    out.value = r.shift + std::log(r.sum) / c;
    out.gradient = r.grad / r.sum;
  }
  return out;
}

double smoothed_worst_case(const SystemInstance& instance, const TierLayout& layout,
                           const CachingParameter& q, double c, const EvalOptions& opts) {
  require_smoothing(c);
  const Prepared p = prepare(instance, layout, q, opts);
  const ClassKernel kernel(instance, layout, q);
  const SoftMaxBlock r = run_worst_smoothed(kernel, p.classes, instance, c, false);
  return r.shift + std::log(r.sum) / c;
}

double smoothed_average(const SystemInstance& instance, const TierLayout& layout,
                        const CachingParameter& q, double c, const EvalOptions& opts) {
  require_smoothing(c);
  const Prepared p = prepare(instance, layout, q, opts);
  const ClassKernel kernel(instance, layout, q);
  return run_average(kernel, p.classes, instance, true, c, false).value;
}

double smoothed_load(LoadKind kind, const SystemInstance& instance, const TierLayout& layout,
                     const CachingParameter& q, double c, const EvalOptions& opts) {
  return kind == LoadKind::worst_case ? smoothed_worst_case(instance, layout, q, c, opts)
                                      : smoothed_average(instance, layout, q, c, opts);
}

Eigen::MatrixXd smoothed_gradient(LoadKind kind, const SystemInstance& instance,
                                  const TierLayout& layout, const CachingParameter& q, double c,
                                  const EvalOptions& opts) {
  return smoothed_value_and_gradient(kind, instance, layout, q, c, opts).gradient;
}

}  // namespace cdc
