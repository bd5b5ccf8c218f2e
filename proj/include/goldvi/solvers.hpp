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

// First-order methods for monotone variational inequalities.
//
// Baselines with a fixed stepsize: projected gradient (PGD), extragradient
// (EG), projected reflected gradient (PrjRef) and the golden ratio algorithm
// (GRAAL). Adaptive methods: aGRAAL and the two switching schemes, which vary
// the anchor ratio phi between a small value in (1, golden ratio] and a large
// one.
//
// Every step function takes a mutable state, the problem and an EvalCounter,
// and reports the stepsize and momentum parameter it used.

#ifndef GOLDVI_SOLVERS_HPP_
#define GOLDVI_SOLVERS_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "goldvi/analysis.hpp"
#include "goldvi/core.hpp"
#include "goldvi/prox.hpp"

namespace goldvi {

enum class Method {
  kPgd,
  kExtragradient,
  kProjectedReflected,
  kGraal,
  kAgraal,
  kAlg1,
  kAlg2,
};

inline constexpr Method kAllMethods[] = {
    Method::kPgd,   Method::kExtragradient, Method::kProjectedReflected,
    Method::kGraal, Method::kAgraal,        Method::kAlg1,
    Method::kAlg2};

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::kPgd: return "pgd";
    case Method::kExtragradient: return "eg";
    case Method::kProjectedReflected: return "prjref";
    case Method::kGraal: return "graal";
    case Method::kAgraal: return "agraal";
    case Method::kAlg1: return "alg1";
    case Method::kAlg2: return "alg2";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

inline std::string method_names_joined() {
  std::string out;
  for (Method m : kAllMethods) {
    if (!out.empty()) out += ", ";
    out += method_name(m);
  }
  return out;
}

// How the residual-switching method decides to keep the anchor.
//   kNearMin: momentum iff (J_k > J_{k-1} and flg) or min J_i < J_k + 1/kbar
//   kStall:   momentum iff (J_k > J_{k-1} and flg) or
//             (not flg and J_k >= min J_i + 1/kbar)
enum class Alg1Rule { kNearMin, kStall };

template <typename Scalar = double>
struct SolverOptions {
  Scalar lambda0 = 1;
  Scalar lambda_bar = 1;
  // Anchor ratio of aGRAAL and of the residual-switching method.
  Scalar phi = 1.5;
  // Small and large ratios of the summation-switching method.
  Scalar alpha = 1.5;
  Scalar phi_bar = 10;
  // GRAAL weight beta in (0, (sqrt(5) - 1)/2].
  Scalar graal_beta = 1 / golden_ratio<Scalar>();
  // Overrides the stepsize of the fixed-step baselines.
  std::optional<Scalar> fixed_stepsize;
  Alg1Rule alg1_rule = Alg1Rule::kNearMin;
  // Always take the large-phi branch of the summation test (no rollbacks).
  bool alg2_force_accept = false;
  // Fill StepReport::window for the certificate.
  bool capture_window = false;
};

template <typename Scalar = double>
struct StepReport {
  bool accepted = true;
  Scalar lambda = 0;
  // Anchor ratio used for this step; +inf for an anchor reset, 0 when the
  // method has none.
  Scalar phi = 0;
  int flg = 0;
  std::optional<DescentWindow<Scalar>> window;
};

namespace internal {

template <typename Scalar>
void require_finite(const VectorX<Scalar>& x, const char* method) {
  if (!x.allFinite()) {
    throw DivergenceError(std::string(method) + ": non-finite values");
  }
}

}  // namespace internal

// ---------------------------------------------------------------------------
// Fixed-step baselines and aGRAAL.

template <typename Scalar = double>
struct BaselineState {
  VectorX<Scalar> x;
  VectorX<Scalar> x_prev;  // PrjRef reflection, aGRAAL stepsize
  VectorX<Scalar> y_bar;   // GRAAL / aGRAAL anchor
  VectorX<Scalar> F_prev;  // aGRAAL: F(x^{k-1})
  Scalar lambda = 0;       // fixed stepsize, or aGRAAL lambda_{k-1}
  Scalar lambda_prev = 0;  // aGRAAL lambda_{k-2}
  Scalar lambda_bar = 1;
  Scalar beta = 0;  // GRAAL weight; aGRAAL uses 1/phi
  Scalar phi = 0;
};

template <typename Scalar>
BaselineState<Scalar> make_fixed_step_state(const VectorX<Scalar>& x0,
                                            Scalar lambda,
                                            Scalar beta = Scalar(0)) {
  if (!(lambda > 0)) throw InvalidInputError("stepsize must be positive");
  BaselineState<Scalar> s;
  s.x = x0;
  s.x_prev = x0;
  s.y_bar = x0;
  s.lambda = lambda;
  s.beta = beta;
  return s;
}

// x+ = prox(x - lambda F(x))
template <typename Scalar>
StepReport<Scalar> pgd_step(BaselineState<Scalar>& s,
                            const VIProblem<Scalar>& problem,
                            EvalCounter& counter) {
  const VectorX<Scalar> Fx = evaluate_operator(problem, s.x, counter);
  VectorX<Scalar> next =
      evaluate_prox(problem, VectorX<Scalar>(s.x - s.lambda * Fx), s.lambda, counter);
  internal::require_finite(next, "pgd");
  s.x_prev = std::move(s.x);
  s.x = std::move(next);
  return {true, s.lambda, 0, 0, std::nullopt};
}

// y = prox(x - lambda F(x)), x+ = prox(x - lambda F(y))
template <typename Scalar>
StepReport<Scalar> extragradient_step(BaselineState<Scalar>& s,
                                      const VIProblem<Scalar>& problem,
                                      EvalCounter& counter) {
  const VectorX<Scalar> Fx = evaluate_operator(problem, s.x, counter);
  const VectorX<Scalar> y =
      evaluate_prox(problem, VectorX<Scalar>(s.x - s.lambda * Fx), s.lambda, counter);
  const VectorX<Scalar> Fy = evaluate_operator(problem, y, counter);
  VectorX<Scalar> next =
      evaluate_prox(problem, VectorX<Scalar>(s.x - s.lambda * Fy), s.lambda, counter);
  internal::require_finite(next, "eg");
  s.x_prev = std::move(s.x);
  s.x = std::move(next);
  return {true, s.lambda, 0, 0, std::nullopt};
}

// x+ = prox(x - lambda F(2x - x_prev))
template <typename Scalar>
StepReport<Scalar> projected_reflected_step(BaselineState<Scalar>& s,
                                            const VIProblem<Scalar>& problem,
                                            EvalCounter& counter) {
  const VectorX<Scalar> reflected = 2 * s.x - s.x_prev;
  const VectorX<Scalar> Fr = evaluate_operator(problem, reflected, counter);
  VectorX<Scalar> next =
      evaluate_prox(problem, VectorX<Scalar>(s.x - s.lambda * Fr), s.lambda, counter);
  internal::require_finite(next, "prjref");
  s.x_prev = std::move(s.x);
  s.x = std::move(next);
  return {true, s.lambda, 0, 0, std::nullopt};
}

// y = (1 - beta) x + beta y_prev, x+ = prox(y - lambda F(x))
template <typename Scalar>
StepReport<Scalar> graal_step(BaselineState<Scalar>& s,
                              const VIProblem<Scalar>& problem,
                              EvalCounter& counter) {
  const VectorX<Scalar> Fx = evaluate_operator(problem, s.x, counter);
  s.y_bar = (1 - s.beta) * s.x + s.beta * s.y_bar;
  VectorX<Scalar> next = evaluate_prox(
      problem, VectorX<Scalar>(s.y_bar - s.lambda * Fx), s.lambda, counter);
  internal::require_finite(next, "graal");
  s.x_prev = std::move(s.x);
  s.x = std::move(next);
  return {true, s.lambda, s.beta > 0 ? 1 / s.beta : Scalar(0), 0, std::nullopt};
}

// x^1 = prox(x^0 - lambda0 F(x^0)); shared by the adaptive methods.
template <typename Scalar>
struct WarmStart {
  VectorX<Scalar> x0, x1, F0;
};

template <typename Scalar>
WarmStart<Scalar> warm_start(const VIProblem<Scalar>& problem,
                             const VectorX<Scalar>& x0, Scalar lambda0,
                             EvalCounter& counter) {
  WarmStart<Scalar> w;
  w.x0 = x0;
  w.F0 = evaluate_operator(problem, x0, counter);
  internal::require_finite(w.F0, "warm start");
  w.x1 = evaluate_prox(problem, VectorX<Scalar>(x0 - lambda0 * w.F0), lambda0,
                       counter);
  internal::require_finite(w.x1, "warm start");
  return w;
}

template <typename Scalar>
BaselineState<Scalar> make_agraal_state(const VIProblem<Scalar>& problem,
                                        const VectorX<Scalar>& x0,
                                        const SolverOptions<Scalar>& opt,
                                        EvalCounter& counter) {
  if (!(opt.phi > 1)) throw InvalidInputError("agraal: phi must exceed 1");
  const Scalar lambda0 = std::min(opt.lambda0, opt.lambda_bar);
  WarmStart<Scalar> w = warm_start(problem, x0, lambda0, counter);
  BaselineState<Scalar> s;
  s.x = std::move(w.x1);
  s.x_prev = std::move(w.x0);
  s.F_prev = std::move(w.F0);
  s.y_bar = s.x_prev;
  s.phi = opt.phi;
  s.beta = 1 / opt.phi;
  s.lambda = lambda0;
  // theta_0 = phi lambda_0 / lambda_{-1} = 1
  s.lambda_prev = opt.phi * lambda0;
  s.lambda_bar = opt.lambda_bar;
  return s;
}

// lambda_k = min{(beta + beta^2) lambda_{k-1},
//                ||dx||^2 / (4 beta^2 lambda_{k-2} ||dF||^2), lambda_bar}
// ybar = ((phi - 1) x + ybar)/phi, x+ = prox(ybar - lambda_k F(x))
template <typename Scalar>
StepReport<Scalar> agraal_step(BaselineState<Scalar>& s,
                               const VIProblem<Scalar>& problem,
                               EvalCounter& counter) {
  VectorX<Scalar> Fx = evaluate_operator(problem, s.x, counter);
  internal::require_finite(Fx, "agraal");
  const Scalar beta = s.beta;
  const Scalar dx2 = (s.x - s.x_prev).squaredNorm();
  const Scalar dF2 = (Fx - s.F_prev).squaredNorm();
  if (!std::isfinite(dx2) || !std::isfinite(dF2)) {
    throw NumericError("agraal: non-finite stepsize input");
  }
  Scalar lambda = std::min((beta + beta * beta) * s.lambda, s.lambda_bar);
  if (dF2 > 0) {
    lambda = std::min(lambda, dx2 / (4 * beta * beta * s.lambda_prev * dF2));
  }
  s.y_bar = ((s.phi - 1) * s.x + s.y_bar) / s.phi;
  VectorX<Scalar> next = evaluate_prox(
      problem, VectorX<Scalar>(s.y_bar - lambda * Fx), lambda, counter);
  internal::require_finite(next, "agraal");
  s.x_prev = std::move(s.x);
  s.F_prev = std::move(Fx);
  s.x = std::move(next);
  s.lambda_prev = s.lambda;
  s.lambda = lambda;
  return {true, lambda, s.phi, 0, std::nullopt};
}

// Largest ||F(u) - F(v)|| / ||u - v|| over `pairs` random feasible pairs near
// `center`. Evaluations are not counted.
template <typename Scalar>
Scalar estimate_lipschitz(const VIProblem<Scalar>& problem,
                          const VectorX<Scalar>& center, int pairs, Rng& rng) {
  const Scalar spread = 1 + center.template lpNorm<Eigen::Infinity>();
  Scalar best = 0;
  for (int i = 0; i < pairs; ++i) {
    const VectorX<Scalar> u = project_domain(
        problem, VectorX<Scalar>(center + spread * rng.normal_vector<Scalar>(problem.dim)));
    const VectorX<Scalar> v = project_domain(
        problem, VectorX<Scalar>(center + spread * rng.normal_vector<Scalar>(problem.dim)));
    const Scalar d = (u - v).norm();
    if (d == 0) continue;
    const Scalar ratio = (problem.op(u) - problem.op(v)).norm() / d;
    if (std::isfinite(ratio)) best = std::max(best, ratio);
  }
  if (!(best > 0)) throw NumericError("could not estimate a Lipschitz constant");
  return best;
}

// Fixed stepsize for a baseline method. With a known L:
//   PGD mu/L^2 (0.9/L without mu), EG 0.9/L, PrjRef 0.9(sqrt 2 - 1)/L,
//   GRAAL 0.9/(2 beta L).
// Without L, L is replaced by twice the sampled estimate.
template <typename Scalar>
Scalar baseline_stepsize(const VIProblem<Scalar>& problem, Method method,
                         const VectorX<Scalar>& x0,
                         const SolverOptions<Scalar>& opt, Rng& rng) {
  if (opt.fixed_stepsize) return *opt.fixed_stepsize;
  Scalar L;
  if (problem.lipschitz) {
    L = *problem.lipschitz;
  } else {
    L = 2 * estimate_lipschitz(problem, x0, 100, rng);
  }
  switch (method) {
    case Method::kPgd:
      if (problem.strong_monotonicity && problem.lipschitz) {
        return *problem.strong_monotonicity / (L * L);
      }
      return Scalar(0.9) / L;
    case Method::kExtragradient:
      return Scalar(0.9) / L;
    case Method::kProjectedReflected:
      return Scalar(0.9) * (std::sqrt(Scalar(2)) - 1) / L;
    case Method::kGraal:
      return Scalar(0.9) / (2 * opt.graal_beta * L);
    default:
      throw InvalidInputError("baseline_stepsize: not a fixed-step method");
  }
}

// ---------------------------------------------------------------------------
// Residual-switching method.

template <typename Scalar = double>
struct Alg1State {
  VectorX<Scalar> x;       // x^k
  VectorX<Scalar> x_prev;  // x^{k-1}
  VectorX<Scalar> F_prev;  // F(x^{k-1})
  VectorX<Scalar> x_bar;   // xbar^{k-1}
  StepSizeState<Scalar> step;
  Scalar phi = 1.5;
  int flg = 0;
  std::int64_t k_bar = 1;
  Scalar J_prev = 0;  // J_{k-1}
  Scalar J_min = 0;   // min_{i<k} J_i
  Alg1Rule rule = Alg1Rule::kNearMin;
};

enum class Alg1Branch { kMomentum, kNoMomentum };

template <typename Scalar>
Alg1State<Scalar> make_alg1_state(const VIProblem<Scalar>& problem,
                                  const VectorX<Scalar>& x0,
                                  const SolverOptions<Scalar>& opt,
                                  EvalCounter& counter) {
  if (!(opt.phi > 1) || opt.phi > golden_ratio<Scalar>() + Scalar(1e-12)) {
    throw InvalidInputError("alg1: phi must lie in (1, golden ratio]");
  }
  Alg1State<Scalar> s;
  s.step = StepSizeState<Scalar>::initial(opt.phi, opt.lambda0, opt.lambda_bar);
  WarmStart<Scalar> w = warm_start(problem, x0, s.step.lambda, counter);
  const VectorX<Scalar> p =
      evaluate_prox<Scalar>(problem, VectorX<Scalar>(w.x0 - w.F0), 1, counter);
  s.J_prev = (w.x0 - p).norm();
  s.J_min = s.J_prev;
  s.x = std::move(w.x1);
  s.x_bar = w.x0;
  s.x_prev = std::move(w.x0);
  s.F_prev = std::move(w.F0);
  s.phi = opt.phi;
  s.rule = opt.alg1_rule;
  return s;
}

template <typename Scalar>
Alg1Branch alg1_branch(const Alg1State<Scalar>& s, Scalar J_k) {
  const bool rising = (J_k - s.J_prev > 0) && s.flg == 1;
  const Scalar slack = Scalar(1) / static_cast<Scalar>(s.k_bar);
  bool keep;
  if (s.rule == Alg1Rule::kNearMin) {
    keep = s.J_min < J_k + slack;
  } else {
    keep = s.flg == 0 && J_k >= s.J_min + slack;
  }
  return (rising || keep) ? Alg1Branch::kMomentum : Alg1Branch::kNoMomentum;
}

template <typename Scalar>
StepReport<Scalar> alg1_step(Alg1State<Scalar>& s,
                             const VIProblem<Scalar>& problem,
                             EvalCounter& counter, bool capture_window = false) {
  VectorX<Scalar> Fx = evaluate_operator(problem, s.x, counter);
  internal::require_finite(Fx, "alg1");
  const StepSizeState<Scalar> step = step_size_update(
      s.step, s.phi, (s.x - s.x_prev).squaredNorm(), (Fx - s.F_prev).squaredNorm());
  const Scalar lambda = step.lambda;

  // J_k from the F(x^k) just computed.
  const VectorX<Scalar> p =
      evaluate_prox<Scalar>(problem, VectorX<Scalar>(s.x - Fx), 1, counter);
  const Scalar J = (s.x - p).norm();
  if (!std::isfinite(J)) throw DivergenceError("alg1: non-finite residual");

  const Alg1Branch branch = alg1_branch(s, J);
  VectorX<Scalar> x_bar = branch == Alg1Branch::kMomentum
                              ? VectorX<Scalar>(((s.phi - 1) * s.x + s.x_bar) / s.phi)
                              : s.x;
  VectorX<Scalar> next = evaluate_prox(
      problem, VectorX<Scalar>(x_bar - lambda * Fx), lambda, counter);
  internal::require_finite(next, "alg1");

  StepReport<Scalar> report;
  report.lambda = lambda;
  report.phi = branch == Alg1Branch::kMomentum
                   ? s.phi
                   : std::numeric_limits<Scalar>::infinity();
  if (capture_window) {
    DescentWindow<Scalar> w;
    w.x_prev = s.x_prev;
    w.x = s.x;
    w.x_next = next;
    w.x_bar_prev = s.x_bar;
    w.x_bar = x_bar;
    w.lambda_prev = s.step.lambda;
    w.lambda = lambda;
    w.theta_prev = s.step.theta;
    w.theta = step.theta;
    w.phi = report.phi;
    w.phi_next = s.phi;
    report.window = std::move(w);
  }

  if (branch == Alg1Branch::kMomentum) {
    s.flg = 0;
  } else {
    s.flg = 1;
    ++s.k_bar;
  }
  s.J_prev = J;
  s.J_min = std::min(s.J_min, J);
  s.step = step;
  s.x_bar = std::move(x_bar);
  s.x_prev = std::move(s.x);
  s.F_prev = std::move(Fx);
  s.x = std::move(next);
  report.flg = s.flg;
  return report;
}

// ---------------------------------------------------------------------------
// Summation-switching method.

// Summation terms, with a = phi_k lambda_k / lambda_{k-1}:
//   term13 = -a ||x^k - xbar^k||^2 + (a - 1 - 1/phi_{k+1}) ||x^{k+1} - xbar^k||^2
//            - (a - theta_k) ||x^{k+1} - x^k||^2
//   term12 = theta_{k-1}/2 ||x^k - x^{k-1}||^2 + term13
//            - theta_k/2 ||x^{k+1} - x^k||^2
template <typename Scalar>
struct SwitchingWindow {
  const VectorX<Scalar>& x_prev;  // x^{k-1}
  const VectorX<Scalar>& x;       // x^k
  const VectorX<Scalar>& x_next;  // x^{k+1}
  const VectorX<Scalar>& x_bar;   // xbar^k
};

template <typename Scalar>
Scalar sum_term_13(const SwitchingWindow<Scalar>& w, Scalar phi_k,
                   Scalar phi_next, Scalar lambda_k, Scalar lambda_prev,
                   Scalar theta_k) {
  const Scalar a = lambda_k * phi_k / lambda_prev;
  return -a * (w.x - w.x_bar).squaredNorm() +
         (a - 1 - 1 / phi_next) * (w.x_next - w.x_bar).squaredNorm() -
         (a - theta_k) * (w.x_next - w.x).squaredNorm();
}

template <typename Scalar>
Scalar sum_term_12(const SwitchingWindow<Scalar>& w, Scalar phi_k,
                   Scalar phi_next, Scalar lambda_k, Scalar lambda_prev,
                   Scalar theta_k, Scalar theta_prev) {
  const Scalar step_sq = (w.x_next - w.x).squaredNorm();
  return theta_prev / 2 * (w.x - w.x_prev).squaredNorm() +
         sum_term_13(w, phi_k, phi_next, lambda_k, lambda_prev, theta_k) -
         theta_k / 2 * step_sq;
}

template <typename Scalar = double>
struct Alg2State {
  VectorX<Scalar> x;       // x^k
  VectorX<Scalar> x_prev;  // x^{k-1}
  VectorX<Scalar> F_prev;  // F(x^{k-1})
  VectorX<Scalar> x_bar;   // xbar^{k-1}
  // F(x^k) kept across a rollback, where x^k is unchanged.
  std::optional<VectorX<Scalar>> F_cached;
  StepSizeState<Scalar> step;
  Scalar alpha = 1.5;
  Scalar phi_bar = 10;
  Scalar phi = 10;  // phi_k
  Scalar sum1 = 0;
  Scalar sum2 = 0;
  int flg = 1;
  bool force_accept = false;
  std::int64_t rollbacks = 0;
};

template <typename Scalar>
Alg2State<Scalar> make_alg2_state(const VIProblem<Scalar>& problem,
                                  const VectorX<Scalar>& x0,
                                  const SolverOptions<Scalar>& opt,
                                  EvalCounter& counter) {
  if (!(opt.alpha > 1) || opt.alpha > golden_ratio<Scalar>() + Scalar(1e-12)) {
    throw InvalidInputError("alg2: alpha must lie in (1, golden ratio]");
  }
  if (!(opt.phi_bar > 1)) throw InvalidInputError("alg2: phi_bar must exceed 1");
  Alg2State<Scalar> s;
  s.step = StepSizeState<Scalar>::initial(opt.alpha, opt.lambda0, opt.lambda_bar);
  WarmStart<Scalar> w = warm_start(problem, x0, s.step.lambda, counter);
  s.x = std::move(w.x1);
  s.x_bar = w.x0;
  s.x_prev = std::move(w.x0);
  s.F_prev = std::move(w.F0);
  s.alpha = opt.alpha;
  s.phi_bar = opt.phi_bar;
  s.phi = opt.phi_bar;
  s.force_accept = opt.alg2_force_accept;
  return s;
}

template <typename Scalar>
StepReport<Scalar> alg2_step(Alg2State<Scalar>& s,
                             const VIProblem<Scalar>& problem,
                             EvalCounter& counter, bool capture_window = false) {
  VectorX<Scalar> Fx = s.F_cached ? std::move(*s.F_cached)
                                  : evaluate_operator(problem, s.x, counter);
  s.F_cached.reset();
  internal::require_finite(Fx, "alg2");
  const StepSizeState<Scalar> step = step_size_update(
      s.step, s.alpha, (s.x - s.x_prev).squaredNorm(), (Fx - s.F_prev).squaredNorm());
  const Scalar lambda = step.lambda;
  const Scalar phi_k = s.phi;

  VectorX<Scalar> x_bar = ((phi_k - 1) * s.x + s.x_bar) / phi_k;
  VectorX<Scalar> next = evaluate_prox(
      problem, VectorX<Scalar>(x_bar - lambda * Fx), lambda, counter);
  internal::require_finite(next, "alg2");

  const SwitchingWindow<Scalar> win{s.x_prev, s.x, next, x_bar};
  const Scalar s1 = s.sum1 + sum_term_12(win, phi_k, s.phi_bar, lambda,
                                         s.step.lambda, step.theta, s.step.theta);
  const Scalar s2 =
      s.sum2 + sum_term_13(win, phi_k, s.phi_bar, lambda, s.step.lambda, step.theta);

  StepReport<Scalar> report;
  report.lambda = lambda;
  report.phi = phi_k;
  Scalar phi_next;
  if (s.force_accept || (s1 <= 0 && s.flg == 1) || (s2 <= 0 && s.flg == 0)) {
    phi_next = s.phi_bar;
    s.flg = 1;
    s.sum1 = s1;
    s.sum2 = s2;
  } else if (s.flg == 1) {
    // Discard x^{k+1}; (x^k, x^{k-1}, xbar^{k-1}, lambda, theta) stay as they
    // were before this step and the step is redone with phi = alpha.
    s.F_cached = std::move(Fx);
    s.phi = s.alpha;
    s.sum1 = 0;
    s.sum2 = 0;
    s.flg = 0;
    ++s.rollbacks;
    report.accepted = false;
    report.flg = s.flg;
    return report;
  } else {
    phi_next = s.alpha;
    s.sum2 = s.sum2 + sum_term_13(win, phi_k, s.alpha, lambda, s.step.lambda,
                                  step.theta);
    s.sum1 = 0;
  }

  if (capture_window) {
    DescentWindow<Scalar> w;
    w.x_prev = s.x_prev;
    w.x = s.x;
    w.x_next = next;
    w.x_bar_prev = s.x_bar;
    w.x_bar = x_bar;
    w.lambda_prev = s.step.lambda;
    w.lambda = lambda;
    w.theta_prev = s.step.theta;
    w.theta = step.theta;
    w.phi = phi_k;
    w.phi_next = phi_next;
    report.window = std::move(w);
  }

  s.phi = phi_next;
  s.step = step;
  s.x_bar = std::move(x_bar);
  s.x_prev = std::move(s.x);
  s.F_prev = std::move(Fx);
  s.x = std::move(next);
  report.flg = s.flg;
  return report;
}

// ---------------------------------------------------------------------------
// Driver.

enum class RunStatus { kConverged, kBudgetExhausted };

template <typename Scalar = double>
struct TracePoint {
  std::int64_t iteration = 0;
  std::uint64_t op_evals = 0;
  std::uint64_t prox_evals = 0;
  Scalar residual = 0;
  Scalar lambda = 0;
  Scalar phi = 0;
  int flg = 0;
  std::int64_t wall_nanos = 0;

  bool operator==(const TracePoint&) const = default;
};

template <typename Scalar = double>
struct SolveConfig {
  std::uint64_t max_operator_evals = 20000;
  Scalar tolerance = Scalar(1e-6);
  // Seeds the Lipschitz sampling of baselines without a known L.
  std::uint64_t seed = 0;
  SolverOptions<Scalar> options;
  // Keep (x^k, lambda_k) of every accepted step, for the ergodic audit.
  bool record_iterates = false;
  bool record_wall_time = false;
  // Called with the certificate window of each accepted adaptive step.
  std::function<void(const DescentWindow<Scalar>&)> on_window;
};

template <typename Scalar = double>
struct RunRecord {
  Method method = Method::kAlg2;
  RunStatus status = RunStatus::kBudgetExhausted;
  std::vector<TracePoint<Scalar>> trace;
  VectorX<Scalar> x;
  EvalCounter counter;
  std::int64_t accepted_iterations = 0;
  std::int64_t rejected_steps = 0;
  std::vector<VectorX<Scalar>> iterates;
  std::vector<Scalar> lambdas;
};

template <typename Scalar = double>
using AnyState =
    std::variant<BaselineState<Scalar>, Alg1State<Scalar>, Alg2State<Scalar>>;

template <typename Scalar>
AnyState<Scalar> initialize_method(const VIProblem<Scalar>& problem,
                                   Method method, const VectorX<Scalar>& x0,
                                   const SolverOptions<Scalar>& opt,
                                   std::uint64_t seed, EvalCounter& counter) {
  switch (method) {
    case Method::kAgraal:
      return make_agraal_state(problem, x0, opt, counter);
    case Method::kAlg1:
      return make_alg1_state(problem, x0, opt, counter);
    case Method::kAlg2:
      return make_alg2_state(problem, x0, opt, counter);
    default: {
      Rng rng(seed);
      const Scalar lambda = baseline_stepsize(problem, method, x0, opt, rng);
      return make_fixed_step_state(
          x0, lambda, method == Method::kGraal ? opt.graal_beta : Scalar(0));
    }
  }
}

template <typename Scalar>
StepReport<Scalar> step_method(AnyState<Scalar>& state, Method method,
                               const VIProblem<Scalar>& problem,
                               EvalCounter& counter, bool capture_window) {
  switch (method) {
    case Method::kPgd:
      return pgd_step(std::get<BaselineState<Scalar>>(state), problem, counter);
    case Method::kExtragradient:
      return extragradient_step(std::get<BaselineState<Scalar>>(state), problem,
                                counter);
    case Method::kProjectedReflected:
      return projected_reflected_step(std::get<BaselineState<Scalar>>(state),
                                      problem, counter);
    case Method::kGraal:
      return graal_step(std::get<BaselineState<Scalar>>(state), problem, counter);
    case Method::kAgraal:
      return agraal_step(std::get<BaselineState<Scalar>>(state), problem, counter);
    case Method::kAlg1:
      return alg1_step(std::get<Alg1State<Scalar>>(state), problem, counter,
                       capture_window);
    case Method::kAlg2:
      return alg2_step(std::get<Alg2State<Scalar>>(state), problem, counter,
                       capture_window);
  }
  throw InvalidInputError("unknown method");
}

template <typename Scalar>
const VectorX<Scalar>& current_iterate(const AnyState<Scalar>& state) {
  return std::visit([](const auto& s) -> const VectorX<Scalar>& { return s.x; },
                    state);
}

// Runs `method` from x0 until the natural residual of the latest iterate is
// <= tolerance or the operator-evaluation budget is spent. The residual column
// of the trace is a monitoring quantity and is not charged to the counter.
template <typename Scalar>
RunRecord<Scalar> solve(const VIProblem<Scalar>& problem,
                        const VectorX<Scalar>& x0, Method method,
                        const SolveConfig<Scalar>& config) {
  check_dimension(problem, x0);
  if (!(config.tolerance >= 0)) {
    throw InvalidInputError("solve: tolerance must be >= 0");
  }
  RunRecord<Scalar> record;
  record.method = method;
  record.x = x0;
  if (config.max_operator_evals == 0) return record;

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  AnyState<Scalar> state =
      initialize_method(problem, method, x0, config.options, config.seed,
                        record.counter);
  const bool capture = config.options.capture_window || bool(config.on_window);

  while (record.counter.operator_evals < config.max_operator_evals) {
    VectorX<Scalar> x_before;
    if (config.record_iterates) x_before = current_iterate(state);
    StepReport<Scalar> report =
        step_method(state, method, problem, record.counter, capture);
    if (!report.accepted) {
      ++record.rejected_steps;
      continue;
    }
    ++record.accepted_iterations;
    if (report.window && config.on_window) config.on_window(*report.window);
    if (config.record_iterates) {
      record.iterates.push_back(std::move(x_before));
      record.lambdas.push_back(report.lambda);
    }
    const VectorX<Scalar>& x = current_iterate(state);
    const Scalar J = residual(problem, x);
    if (!std::isfinite(J)) {
      throw DivergenceError(std::string(method_name(method)) +
                            ": non-finite residual");
    }
    TracePoint<Scalar> row;
    row.iteration = record.accepted_iterations;
    row.op_evals = record.counter.operator_evals;
    row.prox_evals = record.counter.prox_evals;
    row.residual = J;
    row.lambda = report.lambda;
    row.phi = report.phi;
    row.flg = report.flg;
    if (config.record_wall_time) {
      row.wall_nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                           Clock::now() - start)
                           .count();
    }
    record.trace.push_back(row);
    if (J <= config.tolerance) {
      record.status = RunStatus::kConverged;
      break;
    }
  }
  record.x = current_iterate(state);
  return record;
}

}  // namespace goldvi

#endif  // GOLDVI_SOLVERS_HPP_
