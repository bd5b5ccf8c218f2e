// Copyright 2026 The goldvi Authors
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

// Residuals, the merit function Psi, ergodic-rate monitoring and the
// per-iteration descent certificate of the variable-momentum golden ratio
// methods.

#ifndef GOLDVI_ANALYSIS_HPP_
#define GOLDVI_ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "goldvi/core.hpp"
#include "goldvi/prox.hpp"

namespace goldvi {

// ---------------------------------------------------------------------------
// Natural residual J(x) = || x - prox_g(x - F(x)) || with unit prox parameter.

template <typename Scalar>
Scalar residual_given(const VIProblem<Scalar>& problem,
                      const VectorX<Scalar>& x, const VectorX<Scalar>& Fx) {
  return (x - problem.prox(x - Fx, Scalar(1))).norm();
}

// Counted: one operator and one prox evaluation.
template <typename Scalar>
Scalar residual(const VIProblem<Scalar>& problem, const VectorX<Scalar>& x,
                EvalCounter& counter) {
  const VectorX<Scalar> Fx = evaluate_operator(problem, x, counter);
  const VectorX<Scalar> p = evaluate_prox<Scalar>(problem, x - Fx, 1, counter);
  return (x - p).norm();
}

// Uncounted variant used for monitoring.
template <typename Scalar>
Scalar residual(const VIProblem<Scalar>& problem, const VectorX<Scalar>& x) {
  check_dimension(problem, x);
  return residual_given(problem, x, problem.op(x));
}

// Smallest <F(u) - F(v), u - v> / ||u - v||^2 over `pairs` random pairs of
// dom g near `center`. Nonnegative for monotone F. Uncounted.
template <typename Scalar>
Scalar sampled_monotonicity(const VIProblem<Scalar>& problem,
                            const VectorX<Scalar>& center, Scalar spread,
                            int pairs, Rng& rng) {
  Scalar worst = std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < pairs; ++i) {
    const VectorX<Scalar> u = project_domain(
        problem, VectorX<Scalar>(center + spread * rng.normal_vector<Scalar>(problem.dim)));
    const VectorX<Scalar> v = project_domain(
        problem, VectorX<Scalar>(center + spread * rng.normal_vector<Scalar>(problem.dim)));
    const Scalar d2 = (u - v).squaredNorm();
    if (d2 == 0) continue;
    worst = std::min(worst, (problem.op(u) - problem.op(v)).dot(u - v) / d2);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Psi(x, y) = <F(x), y - x> + g(y) - g(x).

template <typename Scalar>
Scalar regularizer_value(const VIProblem<Scalar>& problem,
                         const VectorX<Scalar>& x) {
  const Scalar gx = problem.regularizer(x);
  if (!std::isfinite(gx)) {
    throw DomainError("merit function evaluated outside dom g");
  }
  return gx;
}

template <typename Scalar>
Scalar merit_psi_given(const VIProblem<Scalar>& problem,
                       const VectorX<Scalar>& x, const VectorX<Scalar>& Fx,
                       Scalar gx, const VectorX<Scalar>& y) {
  return Fx.dot(y - x) + regularizer_value(problem, y) - gx;
}

template <typename Scalar>
Scalar merit_psi(const VIProblem<Scalar>& problem, const VectorX<Scalar>& x,
                 const VectorX<Scalar>& y) {
  check_dimension(problem, x);
  check_dimension(problem, y);
  const Scalar gx = regularizer_value(problem, x);
  return merit_psi_given(problem, x, VectorX<Scalar>(problem.op(x)), gx, y);
}

// A point x at which Psi(x, .) is evaluated repeatedly; F(x) and g(x) are
// computed once.
template <typename Scalar = double>
struct Probe {
  VectorX<Scalar> x;
  VectorX<Scalar> Fx;
  Scalar gx = 0;

  static Probe at(const VIProblem<Scalar>& problem, VectorX<Scalar> point) {
    check_dimension(problem, point);
    Probe p;
    p.Fx = problem.op(point);
    p.gx = regularizer_value(problem, point);
    p.x = std::move(point);
    return p;
  }

  Scalar psi(const VIProblem<Scalar>& problem, const VectorX<Scalar>& y) const {
    return merit_psi_given(problem, x, Fx, gx, y);
  }
};

// `count` probes: the reference point first (if any), then projections onto
// dom g of center + spread * N(0, I).
template <typename Scalar>
std::vector<Probe<Scalar>> make_probe_set(
    const VIProblem<Scalar>& problem, const VectorX<Scalar>& center,
    Scalar spread, int count, Rng& rng,
    const std::optional<VectorX<Scalar>>& reference = std::nullopt) {
  std::vector<Probe<Scalar>> probes;
  probes.reserve(std::max(count, 0));
  if (reference && count > 0) {
    probes.push_back(Probe<Scalar>::at(problem, *reference));
  }
  while (static_cast<int>(probes.size()) < count) {
    VectorX<Scalar> z =
        center + spread * rng.normal_vector<Scalar>(problem.dim);
    probes.push_back(Probe<Scalar>::at(problem, project_domain(problem, z)));
  }
  return probes;
}

// ---------------------------------------------------------------------------
// Descent certificate.
//
// One accepted iteration k of a golden-ratio scheme
//   xbar^k  = ((phi_k - 1) x^k + xbar^{k-1}) / phi_k
//   x^{k+1} = prox_{lambda_k g}(xbar^k - lambda_k F(x^k))
// satisfies, for every x,
//   c ||xbar^{k+1} - x||^2 + theta_k/2 ||x^{k+1} - x^k||^2 + 2 lambda_k Psi(x, x^k)
//     <= c ||xbar^k - x||^2 + theta_{k-1}/2 ||x^k - x^{k-1}||^2
//        - a ||x^k - xbar^k||^2 + (a - 1 - 1/phi_{k+1}) ||x^{k+1} - xbar^k||^2
//        - (a - theta_k) ||x^{k+1} - x^k||^2
// with c = phi_{k+1}/(phi_{k+1} - 1), a = phi_k lambda_k / lambda_{k-1} and
// xbar^{k+1} formed from phi_{k+1}. The bound holds for any phi_{k+1} > 1.
//
// phi = +inf encodes an anchor reset (xbar^k = x^k). For phi_{k+1} that is
// the limit c = 1, xbar^{k+1} = x^{k+1}. For phi_k the three a-weighted terms
// are replaced by 2 (lambda_k/lambda_{k-1}) <x^k - xbar^{k-1}, x^{k+1} - x^k>,
// the quantity they equal whenever xbar^k is a finite phi_k combination.
template <typename Scalar = double>
struct DescentWindow {
  VectorX<Scalar> x_prev;      // x^{k-1}
  VectorX<Scalar> x;           // x^k
  VectorX<Scalar> x_next;      // x^{k+1}
  VectorX<Scalar> x_bar_prev;  // xbar^{k-1}
  VectorX<Scalar> x_bar;       // xbar^k
  Scalar lambda_prev = 1;      // lambda_{k-1}
  Scalar lambda = 1;           // lambda_k
  Scalar theta_prev = 1;       // theta_{k-1}
  Scalar theta = 1;            // theta_k
  Scalar phi = 1.5;            // phi_k
  Scalar phi_next = 1.5;       // phi_{k+1}

  VectorX<Scalar> x_bar_next() const {
    if (std::isinf(phi_next)) return x_next;
    return ((phi_next - 1) * x_next + x_bar) / phi_next;
  }
};

template <typename Scalar>
void validate_window(const DescentWindow<Scalar>& w) {
  if (!(w.phi > 1) || !(w.phi_next > 1)) {
    throw InvalidInputError("descent certificate: phi must exceed 1");
  }
  if (!(w.lambda > 0) || !(w.lambda_prev > 0)) {
    throw InvalidInputError("descent certificate: stepsizes must be positive");
  }
}

// The three rightmost terms (the quantity whose running sum is D).
template <typename Scalar>
Scalar descent_tail(const DescentWindow<Scalar>& w) {
  validate_window(w);
  const Scalar ratio = w.lambda / w.lambda_prev;
  const Scalar inv_next = std::isinf(w.phi_next) ? Scalar(0) : 1 / w.phi_next;
  const Scalar step_sq = (w.x_next - w.x).squaredNorm();
  const Scalar jump_sq = (w.x_next - w.x_bar).squaredNorm();
  if (std::isinf(w.phi)) {
    const Scalar anchor =
        2 * ratio * (w.x - w.x_bar_prev).dot(w.x_next - w.x);
    return anchor - (1 + inv_next) * jump_sq + w.theta * step_sq;
  }
  const Scalar a = ratio * w.phi;
  return -a * (w.x - w.x_bar).squaredNorm() + (a - 1 - inv_next) * jump_sq -
         (a - w.theta) * step_sq;
}

template <typename Scalar>
struct DescentSides {
  Scalar lhs = 0;
  Scalar rhs = 0;
  Scalar slack() const { return rhs - lhs; }
};

template <typename Scalar>
DescentSides<Scalar> descent_sides(const VIProblem<Scalar>& problem,
                                   const DescentWindow<Scalar>& w,
                                   const Probe<Scalar>& probe) {
  validate_window(w);
  const Scalar c =
      std::isinf(w.phi_next) ? Scalar(1) : w.phi_next / (w.phi_next - 1);
  const auto& p = probe.x;
  DescentSides<Scalar> s;
  s.lhs = c * (w.x_bar_next() - p).squaredNorm() +
          w.theta / 2 * (w.x_next - w.x).squaredNorm() +
          2 * w.lambda * probe.psi(problem, w.x);
  s.rhs = c * (w.x_bar - p).squaredNorm() +
          w.theta_prev / 2 * (w.x - w.x_prev).squaredNorm() +
          descent_tail(w);
  return s;
}

// RHS - LHS at the probe; >= 0 means the inequality holds.
template <typename Scalar>
Scalar check_descent_inequality(const VIProblem<Scalar>& problem,
                                const DescentWindow<Scalar>& w,
                                const Probe<Scalar>& probe) {
  return descent_sides(problem, w, probe).slack();
}

template <typename Scalar>
Scalar check_descent_inequality(const VIProblem<Scalar>& problem,
                                const DescentWindow<Scalar>& w,
                                const VectorX<Scalar>& probe_x) {
  return check_descent_inequality(problem, w, Probe<Scalar>::at(problem, probe_x));
}

// Accumulates certificate data over the accepted iterations of one run.
template <typename Scalar = double>
struct CertificateReport {
  std::int64_t iterations = 0;
  // min over iterations and probes of slack / (1 + ||probe||^2)
  Scalar min_scaled_slack = std::numeric_limits<Scalar>::infinity();
  Scalar min_slack = std::numeric_limits<Scalar>::infinity();
  std::int64_t worst_iteration = -1;
  std::int64_t violations = 0;
  // Sum of per-iteration slacks at probe 0 (the reference when available).
  Scalar cumulative_slack = 0;
  // Sum of the three rightmost terms; the constant D.
  Scalar D_estimate = 0;
  // max over probes of the right side of the summed bound:
  //   c_2 ||xbar^1 - x||^2 + theta_0/2 ||x^1 - x^0||^2 + D
  Scalar M_estimate = 0;
  // Summed bound evaluated directly at probe 0 (right side minus left side).
  Scalar summed_bound_slack = 0;
  std::vector<Scalar> per_iteration_min_scaled;
};

template <typename Scalar = double>
class CertificateAuditor {
 public:
  CertificateAuditor(const VIProblem<Scalar>& problem,
                     std::vector<Probe<Scalar>> probes, Scalar tolerance)
      : problem_(&problem), probes_(std::move(probes)), tolerance_(tolerance) {
    if (probes_.empty()) throw InvalidInputError("certificate: no probes");
    initial_.assign(probes_.size(), 0);
    psi_sum_.assign(probes_.size(), 0);
  }

  void observe(const DescentWindow<Scalar>& w) {
    const std::int64_t k = report_.iterations++;
    Scalar worst = std::numeric_limits<Scalar>::infinity();
    for (std::size_t j = 0; j < probes_.size(); ++j) {
      const auto& probe = probes_[j];
      const DescentSides<Scalar> sides = descent_sides(*problem_, w, probe);
      const Scalar slack = sides.slack();
      const Scalar scale = 1 + probe.x.squaredNorm();
      const Scalar scaled = slack / scale;
      if (!std::isfinite(slack)) {
        throw NumericError("certificate: non-finite slack");
      }
      if (slack < -tolerance_ * scale) ++report_.violations;
      if (scaled < report_.min_scaled_slack) {
        report_.min_scaled_slack = scaled;
        report_.worst_iteration = k;
      }
      report_.min_slack = std::min(report_.min_slack, slack);
      worst = std::min(worst, scaled);
      if (j == 0) report_.cumulative_slack += slack;

      const Scalar c =
          std::isinf(w.phi_next) ? Scalar(1) : w.phi_next / (w.phi_next - 1);
      if (k == 0) {
        initial_[j] = c * (w.x_bar - probe.x).squaredNorm() +
                      w.theta_prev / 2 * (w.x - w.x_prev).squaredNorm();
      }
      psi_sum_[j] += 2 * w.lambda * probe.psi(*problem_, w.x);
      if (j == 0) {
        terminal0_ = c * (w.x_bar_next() - probe.x).squaredNorm() +
                     w.theta / 2 * (w.x_next - w.x).squaredNorm();
      }
    }
    report_.per_iteration_min_scaled.push_back(worst);
    report_.D_estimate += descent_tail(w);
  }

  bool passed() const { return report_.violations == 0; }

  CertificateReport<Scalar> report() const {
    CertificateReport<Scalar> r = report_;
    if (r.iterations > 0) {
      r.M_estimate = -std::numeric_limits<Scalar>::infinity();
      for (Scalar v : initial_) r.M_estimate = std::max(r.M_estimate, v + r.D_estimate);
      r.summed_bound_slack =
          initial_[0] + r.D_estimate - terminal0_ - psi_sum_[0];
    }
    return r;
  }

  const std::vector<Probe<Scalar>>& probes() const { return probes_; }

 private:
  const VIProblem<Scalar>* problem_;
  std::vector<Probe<Scalar>> probes_;
  Scalar tolerance_;
  CertificateReport<Scalar> report_;
  std::vector<Scalar> initial_;
  std::vector<Scalar> psi_sum_;
  Scalar terminal0_ = 0;
};

// ---------------------------------------------------------------------------
// Ergodic sequence X_k = sum lambda_i x^i / sum lambda_i.

template <typename Scalar = double>
struct ErgodicAccumulator {
  VectorX<Scalar> weighted_sum;
  Scalar weight_total = 0;

  bool empty() const { return weight_total == 0; }
  VectorX<Scalar> point() const {
    if (empty()) throw InvalidInputError("ergodic point of empty accumulator");
    return weighted_sum / weight_total;
  }
};

template <typename Scalar>
ErgodicAccumulator<Scalar> ergodic_update(ErgodicAccumulator<Scalar> acc,
                                          const VectorX<Scalar>& x,
                                          Scalar lambda) {
  if (!(lambda > 0)) throw InvalidInputError("ergodic_update: lambda <= 0");
  if (acc.empty()) {
    acc.weighted_sum = lambda * x;
  } else {
    if (acc.weighted_sum.size() != x.size()) {
      throw InvalidInputError("ergodic_update: dimension mismatch");
    }
    acc.weighted_sum += lambda * x;
  }
  acc.weight_total += lambda;
  return acc;
}

// ---------------------------------------------------------------------------
// e_r(y) = max_{x in U} Psi(x, y), U = dom g intersected with B(center, r).
// Estimated from below by sampling U.

template <typename Scalar = double>
class LocalizedSampleSet {
 public:
  // Draws n_samples points uniformly in the ball, projects each onto dom g and
  // keeps those still inside the ball. The first m draws of a seed are the
  // same for every n_samples >= m, so sample sets are nested.
  static LocalizedSampleSet draw(const VIProblem<Scalar>& problem,
                                 const VectorX<Scalar>& center, Scalar radius,
                                 int n_samples, Rng& rng) {
    if (!(radius > 0)) throw InvalidInputError("e_r: radius must be > 0");
    if (!std::isfinite(problem.regularizer(center))) {
      throw DomainError("e_r: center must lie in dom g");
    }
    LocalizedSampleSet set;
    const Index n = problem.dim;
    for (int s = 0; s < n_samples; ++s) {
      VectorX<Scalar> dir = rng.normal_vector<Scalar>(n);
      const Scalar norm = dir.norm();
      if (norm == 0) continue;
      const Scalar r =
          radius * static_cast<Scalar>(std::pow(rng.uniform(), 1.0 / double(n)));
      VectorX<Scalar> p = project_domain(problem, VectorX<Scalar>(center + (r / norm) * dir));
      if ((p - center).norm() <= radius * (1 + Scalar(1e-12))) {
        set.probes_.push_back(Probe<Scalar>::at(problem, std::move(p)));
      }
    }
    if (set.probes_.empty()) throw SamplingError("e_r: no sample accepted");
    return set;
  }

  static LocalizedSampleSet from_points(const VIProblem<Scalar>& problem,
                                        const std::vector<VectorX<Scalar>>& pts) {
    LocalizedSampleSet set;
    for (const auto& p : pts) set.probes_.push_back(Probe<Scalar>::at(problem, p));
    if (set.probes_.empty()) throw SamplingError("e_r: no sample accepted");
    return set;
  }

  // Raw sampled maximum (may be negative when y is outside U).
  Scalar max_psi(const VIProblem<Scalar>& problem,
                 const VectorX<Scalar>& y) const {
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (const auto& p : probes_) best = std::max(best, p.psi(problem, y));
    return best;
  }

  std::size_t size() const { return probes_.size(); }

 private:
  std::vector<Probe<Scalar>> probes_;
};

template <typename Scalar>
Scalar estimate_e_r(const VIProblem<Scalar>& problem, const VectorX<Scalar>& y,
                    const VectorX<Scalar>& center, Scalar radius, int n_samples,
                    Rng& rng) {
  const auto set =
      LocalizedSampleSet<Scalar>::draw(problem, center, radius, n_samples, rng);
  return std::max(Scalar(0), set.max_psi(problem, y));
}

struct ErgodicAuditPoint {
  std::int64_t k = 0;
  double value = 0;  // e_r(X_k) * sum_{i<=k} lambda_i
};

// Ergodic rate audit: for each prefix k of the (x^i, lambda_i) trajectory,
// the sampled e_r(X_k) times the accumulated stepsize. Bounded sequences are
// consistent with an O(1/k) ergodic rate.
template <typename Scalar>
std::vector<ErgodicAuditPoint> ergodic_rate_audit(
    const VIProblem<Scalar>& problem,
    std::span<const VectorX<Scalar>> iterates, std::span<const Scalar> lambdas,
    const VectorX<Scalar>& center, Scalar radius, int n_samples,
    std::uint64_t seed) {
  if (iterates.size() != lambdas.size()) {
    throw InvalidInputError("ergodic audit: iterate/stepsize length mismatch");
  }
  Rng rng(seed);
  const auto samples =
      LocalizedSampleSet<Scalar>::draw(problem, center, radius, n_samples, rng);
  std::vector<ErgodicAuditPoint> out;
  out.reserve(iterates.size());
  ErgodicAccumulator<Scalar> acc;
  for (std::size_t i = 0; i < iterates.size(); ++i) {
    acc = ergodic_update(std::move(acc), iterates[i], lambdas[i]);
    const Scalar er = std::max(Scalar(0), samples.max_psi(problem, acc.point()));
    out.push_back({static_cast<std::int64_t>(i + 1),
                   static_cast<double>(er * acc.weight_total)});
  }
  return out;
}

}  // namespace goldvi

#endif  // GOLDVI_ANALYSIS_HPP_
