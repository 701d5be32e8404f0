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

#include "cdc/gp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

namespace cdc::gp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

void normalize(std::vector<std::pair<int, double>>& exps) {
  std::sort(exps.begin(), exps.end());
  std::vector<std::pair<int, double>> out;
  for (const auto& [v, a] : exps) {
    if (!out.empty() && out.back().first == v) {
      out.back().second += a;
    } else {
      out.emplace_back(v, a);
    }
  }
  std::erase_if(out, [](const auto& e) { return e.second == 0.0; });
  exps = std::move(out);
}

}  // namespace

Monomial::Monomial(double coeff, std::vector<std::pair<int, double>> exps)
    : coefficient(coeff), exponents(std::move(exps)) {
  if (!(coefficient > 0.0) || !std::isfinite(coefficient))
    throw std::invalid_argument("monomial coefficient must be positive and finite");
  normalize(exponents);
}

double Monomial::evaluate(std::span<const double> z) const {
  double v = coefficient;
  for (const auto& [var, a] : exponents) v *= std::pow(z[var], a);
  return v;
}

Monomial& Monomial::operator*=(const Monomial& other) {
  coefficient *= other.coefficient;
  exponents.insert(exponents.end(), other.exponents.begin(), other.exponents.end());
  normalize(exponents);
  return *this;
}

Monomial operator*(Monomial a, const Monomial& b) { return a *= b; }

Monomial inverse(const Monomial& m) {
  Monomial r = m;
  r.coefficient = 1.0 / m.coefficient;
  for (auto& e : r.exponents) e.second = -e.second;
  return r;
}

Monomial variable(int v, double exponent) { return Monomial(1.0, {{v, exponent}}); }

double Posynomial::evaluate(std::span<const double> z) const {
  double s = 0.0;
  for (const auto& m : terms) s += m.evaluate(z);
  return s;
}

Posynomial& Posynomial::operator+=(const Monomial& m) {
  terms.push_back(m);
  return *this;
}

Posynomial& Posynomial::operator+=(const Posynomial& p) {
  terms.insert(terms.end(), p.terms.begin(), p.terms.end());
  return *this;
}

Posynomial operator/(const Posynomial& p, const Monomial& m) {
  const Monomial inv = inverse(m);
  Posynomial out;
  out.terms.reserve(p.terms.size());
  for (const auto& t : p.terms) out.terms.push_back(t * inv);
  return out;
}

int GpModel::add_variable(std::string name) {
  if (name.empty()) name = "z" + std::to_string(names_.size());
  names_.push_back(std::move(name));
  return n_variables() - 1;
}

namespace {

void check_variables(const Posynomial& p, int n) {
  if (p.terms.empty()) throw std::invalid_argument("posynomial needs at least one term");
  for (const auto& m : p.terms) {
    for (const auto& [v, a] : m.exponents) {
      if (v < 0 || v >= n) throw std::invalid_argument("posynomial references an undeclared variable");
    }
  }
}

}  // namespace

void GpModel::set_objective(Posynomial objective) {
  check_variables(objective, n_variables());
  objective_ = std::move(objective);
}

void GpModel::add_constraint(Posynomial p) {
  check_variables(p, n_variables());
  constraints_.push_back(std::move(p));
}

double GpModel::max_violation(std::span<const double> z) const {
  double worst = -kInf;
  for (const auto& c : constraints_) worst = std::max(worst, c.evaluate(z) - 1.0);
  return worst;
}

void dump(std::ostream& os, const GpModel& model) {
  auto write = [&](const char* tag, const Posynomial& p) {
    for (const auto& m : p.terms) {
      os << tag << ' ' << m.coefficient;
      for (const auto& [v, a] : m.exponents) os << ' ' << model.name(v) << '^' << a;
      os << '\n';
    }
  };
  os << "variables " << model.n_variables() << '\n';
  write("min", model.objective());
  for (std::size_t i = 0; i < model.constraints().size(); ++i) {
    os << "s.t. #" << i << " <= 1\n";
    write("  +", model.constraints()[i]);
  }
}

const char* to_string(GpStatus status) {
  switch (status) {
    case GpStatus::optimal: return "optimal";
    case GpStatus::infeasible: return "infeasible";
    case GpStatus::iteration_cap: return "iteration-cap";
    case GpStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

std::vector<double> condensation_weights(const Posynomial& p, std::span<const double> anchor) {
  std::vector<double> w(p.terms.size());
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = p.terms[k].evaluate(anchor);
    total += w[k];
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::invalid_argument("cannot condense a posynomial that vanishes at the anchor");
  for (double& v : w) v /= total;
  return w;
}

Monomial condense(const Posynomial& p, std::span<const double> anchor) {
  const std::vector<double> w = condensation_weights(p, anchor);
  double log_coeff = 0.0;
  std::vector<std::pair<int, double>> exps;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] == 0.0) continue;
    const Monomial& m = p.terms[k];
    log_coeff += w[k] * (std::log(m.coefficient) - std::log(w[k]));
    for (const auto& [v, a] : m.exponents) exps.emplace_back(v, w[k] * a);
  }
  return Monomial(std::exp(log_coeff), std::move(exps));
}

Posynomial condense_ratio(const Posynomial& numerator, const Posynomial& denominator,
                          std::span<const double> anchor) {
  return numerator / condense(denominator, anchor);
}

namespace {

using Vec = Eigen::VectorXd;

// A posynomial in log variables: sum_k exp(logc_k + a_k . y), with exponents
// stored against a local support list.
struct LogPosynomial {
  std::vector<int> support;
  std::vector<double> logc;
  std::vector<std::vector<std::pair<int, double>>> exps;  // local index, exponent

  explicit LogPosynomial(const Posynomial& p) {
    std::map<int, int> local;
    for (const auto& m : p.terms)
      for (const auto& e : m.exponents) local.emplace(e.first, 0);
    for (auto& [v, idx] : local) {
      idx = static_cast<int>(support.size());
      support.push_back(v);
    }
    for (const auto& m : p.terms) {
      logc.push_back(std::log(m.coefficient));
      auto& row = exps.emplace_back();
      for (const auto& [v, a] : m.exponents) row.emplace_back(local.at(v), a);
    }
  }

  double exponent(std::size_t k, const Vec& y) const {
    double e = logc[k];
    for (const auto& [l, a] : exps[k]) e += a * y[support[l]];
    return e;
  }

  // log of the posynomial value.
  double log_value(const Vec& y) const {
    double top = -kInf;
    for (std::size_t k = 0; k < logc.size(); ++k) top = std::max(top, exponent(k, y));
    double s = 0.0;
    for (std::size_t k = 0; k < logc.size(); ++k) s += std::exp(exponent(k, y) - top);
    return top + std::log(s);
  }
};

struct Problem {
  int n = 0;
  std::vector<LogPosynomial> objective;  // one entry per objective term
  std::vector<LogPosynomial> constraints;

  double f0(const Vec& y) const {
    double s = 0.0;
    for (const auto& term : objective) s += std::exp(term.exponent(0, y));
    return s;
  }

  // Barrier value t f0 - sum log(-F_i); +inf outside the strict interior.
  double barrier(const Vec& y, double t) const {
    double phi = t * f0(y);
    for (const auto& c : constraints) {
      const double f = c.log_value(y);
      if (!(f < 0.0)) return kInf;
      phi -= std::log(-f);
    }
    return std::isfinite(phi) ? phi : kInf;
  }
};

// Gradient and lower-triangle Hessian of the barrier, assembled in a fixed
// triplet order so the sparsity pattern is the same on every call.
void assemble(const Problem& pb, const Vec& y, double t, Vec& grad,
              std::vector<Eigen::Triplet<double>>& trip) {
  grad.setZero(pb.n);
  trip.clear();
  for (int i = 0; i < pb.n; ++i) trip.emplace_back(i, i, 0.0);

  for (const auto& term : pb.objective) {
    const double v = t * std::exp(term.exponent(0, y));
    const auto& row = term.exps[0];
    for (const auto& [la, a] : row) {
      const int i = term.support[la];
      grad[i] += v * a;
      for (const auto& [lb, b] : row) {
        const int j = term.support[lb];
        if (i >= j) trip.emplace_back(i, j, v * a * b);
      }
    }
  }

  std::vector<double> e;
  std::vector<double> g;
  std::vector<double> h;
  for (const auto& c : pb.constraints) {
    const std::size_t s = c.support.size();
    const std::size_t nk = c.logc.size();
    e.resize(nk);
    double top = -kInf;
    for (std::size_t k = 0; k < nk; ++k) {
      e[k] = c.exponent(k, y);
      top = std::max(top, e[k]);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < nk; ++k) {
      e[k] = std::exp(e[k] - top);
      sum += e[k];
    }
    const double f = top + std::log(sum);
    g.assign(s, 0.0);
    h.assign(s * s, 0.0);
    for (std::size_t k = 0; k < nk; ++k) {
      const double pi = e[k] / sum;
      for (const auto& [la, a] : c.exps[k]) {
        g[la] += pi * a;
        for (const auto& [lb, b] : c.exps[k]) h[la * s + lb] += pi * a * b;
      }
    }
    const double inv = -1.0 / f;  // 1 / (-F) > 0
    const double gg = inv * inv - inv;
    for (std::size_t a = 0; a < s; ++a) {
      const int i = c.support[a];
      grad[i] += inv * g[a];
      for (std::size_t b = 0; b < s; ++b) {
        const int j = c.support[b];
        if (i >= j) trip.emplace_back(i, j, gg * g[a] * g[b] + inv * h[a * s + b]);
      }
    }
  }
}

struct BarrierOutcome {
  Vec y;
  double t = 1.0;
  GpStatus status = GpStatus::numerical_failure;
  int newton_steps = 0;
  bool stopped_early = false;
};

using StopRule = std::function<bool(const Vec&)>;

// Scale for the stationarity test: the largest log-domain objective partial, at least 1.
double objective_scale(const Problem& pb, const Vec& y) {
  Vec g = Vec::Zero(pb.n);
  for (const auto& term : pb.objective) {
    const double v = std::exp(term.exponent(0, y));
    for (const auto& [l, a] : term.exps[0]) g[term.support[l]] += v * a;
  }
  return std::max(1.0, g.cwiseAbs().maxCoeff());
}

constexpr int kRoundSteps = 200;  // Newton steps per centering round

BarrierOutcome run_barrier(const Problem& pb, Vec y, const GpOptions& opt, int step_budget,
                           const StopRule& stop_early) {
  using SpMat = Eigen::SparseMatrix<double>;
  BarrierOutcome out;
  const double m = static_cast<double>(pb.constraints.size());
  double t = 1.0;
  if (m > 0) t = m / std::max(std::abs(pb.f0(y)), 1e-8);

  SpMat hess(pb.n, pb.n);
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  bool analyzed = false;
  std::vector<Eigen::Triplet<double>> trip;
  Vec grad(pb.n);
  int steps = 0;

  while (true) {
    // Centering by damped Newton.
    bool centered = false;
    double prev_lambda2 = kInf;
    int round_steps = 0;
    bool capped = false;
    while (steps < step_budget) {
      assemble(pb, y, t, grad, trip);
      hess.setFromTriplets(trip.begin(), trip.end());
      if (!analyzed) {
        ldlt.analyzePattern(hess);
        analyzed = true;
      }
      Vec dy;
      double shift = 0.0;
      const double diag_scale = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      for (int attempt = 0; attempt < 12; ++attempt) {
        if (shift > 0.0) {
          SpMat shifted = hess;
          for (int i = 0; i < pb.n; ++i) shifted.coeffRef(i, i) += shift;
          ldlt.factorize(shifted);
        } else {
          ldlt.factorize(hess);
        }
        if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
          dy = ldlt.solve(-grad);
          if (dy.allFinite()) break;
        }
        dy.resize(0);
        shift = shift == 0.0 ? 1e-12 * diag_scale : shift * 10.0;
      }
      double lambda2 = dy.size() > 0 ? -grad.dot(dy) : 0.0;
      if (dy.size() == 0 || !(lambda2 > 0.0)) {
        // Steepest descent on the barrier when Newton gives no descent direction.
        dy = -grad;
        lambda2 = grad.squaredNorm();
      }
      if (lambda2 / 2.0 <= 1e-10 &&
          grad.cwiseAbs().maxCoeff() <= 0.1 * opt.tol * t * objective_scale(pb, y)) {
        centered = true;
        break;
      }
      if (round_steps >= kRoundSteps) {
        // Ill-conditioned late rounds: accept a nearly centered point.
        centered = lambda2 < 1e-4;
        capped = true;
        break;
      }
      const double phi = pb.barrier(y, t);
      // Near the center the predicted decrease falls below the rounding error
      // of phi, so the Armijo test cannot be evaluated there.
      const bool unresolved = lambda2 < 1e-6 || lambda2 <= 100.0 * kEps * std::max(1.0, std::abs(phi));
      ++steps;
      ++round_steps;
      double s = 1.0;
      Vec trial;
      bool accepted = false;
      bool stalled = false;
      while (s > 1e-16) {
        trial = y + s * dy;
        const double phi_new = pb.barrier(trial, t);
        if (unresolved && lambda2 >= prev_lambda2) {
          // Newton stopped contracting: centered to working precision.
          stalled = true;
          break;
        }
        // Full feasible steps are taken without the Armijo test when unresolved.
        if (std::isfinite(phi_new) && (unresolved || phi_new <= phi - 0.25 * s * lambda2)) {
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      if (!accepted) {
        centered = stalled || unresolved;
        break;
      }
      if (trial == y) {
        // The step is below the resolution of y: centered to working precision.
        centered = true;
        break;
      }
      y = std::move(trial);
      prev_lambda2 = lambda2;
      if (stop_early && stop_early(y)) {
        out.stopped_early = true;
        out.y = std::move(y);
        out.t = t;
        out.status = GpStatus::optimal;
        out.newton_steps = steps;
        return out;
      }
    }
    out.newton_steps = steps;
    if (!centered) {
      out.status = capped || steps >= step_budget ? GpStatus::iteration_cap : GpStatus::numerical_failure;
      break;
    }
    if (m == 0 || m / t < opt.tol) {
      out.status = GpStatus::optimal;
      break;
    }
    t *= opt.mu;
  }
  out.y = std::move(y);
  out.t = t;
  return out;
}

double kkt_residual(const Problem& pb, const Vec& y, double t) {
  Vec grad(pb.n);
  std::vector<Eigen::Triplet<double>> trip;
  assemble(pb, y, t, grad, trip);
  const double m = static_cast<double>(pb.constraints.size());
  return std::max(grad.cwiseAbs().maxCoeff() / (t * objective_scale(pb, y)), m / t);
}

Problem compile(const GpModel& model) {
  Problem pb;
  pb.n = model.n_variables();
  for (const auto& term : model.objective().terms) pb.objective.emplace_back(Posynomial(term));
  for (const auto& c : model.constraints()) pb.constraints.emplace_back(c);
  return pb;
}

double max_log_constraint(const Problem& pb, const Vec& y) {
  double worst = -kInf;
  for (const auto& c : pb.constraints) worst = std::max(worst, c.log_value(y));
  return worst;
}

}  // namespace

GpResult solve_gp(const GpModel& model, std::span<const double> start, const GpOptions& options) {
  if (static_cast<int>(start.size()) != model.n_variables())
    throw std::invalid_argument("start point has the wrong dimension");
  if (model.objective().terms.empty()) throw std::invalid_argument("GP objective is not set");

  const Problem pb = compile(model);
  Vec y(pb.n);
  for (int i = 0; i < pb.n; ++i) {
    if (!(start[i] > 0.0)) throw std::invalid_argument("GP start point must be strictly positive");
    y[i] = std::log(std::max(start[i], options.feasibility_margin));
  }

  GpResult result;
  int budget = options.max_newton;

  if (!pb.constraints.empty() && !(max_log_constraint(pb, y) < 0.0)) {
    // Phase I: minimize z_s subject to f_i(z) / z_s <= 1, started strictly inside.
    Problem ph;
    ph.n = pb.n + 1;
    const int s_var = pb.n;
    ph.objective.emplace_back(Posynomial(variable(s_var)));
    for (const auto& c : model.constraints()) ph.constraints.emplace_back(c / variable(s_var));
    Vec y1(ph.n);
    y1.head(pb.n) = y;
    y1[s_var] = max_log_constraint(pb, y) + 1.0;
    GpOptions phase_opt = options;
    phase_opt.tol = std::max(options.tol, 1e-10);
    const BarrierOutcome p1 = run_barrier(ph, y1, phase_opt, budget, [s_var](const Vec& v) {
      return v[s_var] < -1e-3;
    });
    budget -= p1.newton_steps;
    result.newton_steps += p1.newton_steps;
    y = p1.y.head(pb.n);
    if (!(max_log_constraint(pb, y) < 0.0)) {
      result.status = GpStatus::infeasible;
      result.point.resize(pb.n);
      for (int i = 0; i < pb.n; ++i) result.point[i] = std::exp(y[i]);
      result.objective = pb.f0(y);
      return result;
    }
  }

  const BarrierOutcome main = run_barrier(pb, y, options, budget, {});
  result.newton_steps += main.newton_steps;
  result.status = main.status;
  result.kkt_residual = kkt_residual(pb, main.y, pb.constraints.empty() ? 1.0 : main.t);
  result.point.resize(pb.n);
  for (int i = 0; i < pb.n; ++i) result.point[i] = std::exp(main.y[i]);
  result.objective = pb.f0(main.y);
  return result;
}

}  // namespace cdc::gp
