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

#ifndef GOLDVI_CORE_HPP_
#define GOLDVI_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace goldvi {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Eigen::Index;

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class InvalidInputError : public Error {
 public:
  using Error::Error;
};
class NumericError : public Error {
 public:
  using Error::Error;
};
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class SamplingError : public Error {
 public:
  using Error::Error;
};

template <typename Scalar>
constexpr Scalar golden_ratio() {
  return std::numbers::phi_v<Scalar>;
}

// ---------------------------------------------------------------------------
// Deterministic random stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are not, so the transforms below are
// written out: uniform() uses the top 53 bits, normal() is Box-Muller with the
// second variate cached. Identical seeds give identical draws on every
// conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw InvalidInputError("uniform_index: empty range");
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  double normal() {
    if (cached_) {
      cached_ = false;
      return cached_value_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    cached_value_ = r * std::sin(t);
    cached_ = true;
    return r * std::cos(t);
  }

  template <typename Scalar = double>
  VectorX<Scalar> uniform_vector(Index n, double lo, double hi) {
    VectorX<Scalar> v(n);
    for (Index i = 0; i < n; ++i) v[i] = static_cast<Scalar>(uniform(lo, hi));
    return v;
  }

  template <typename Scalar = double>
  VectorX<Scalar> normal_vector(Index n) {
    VectorX<Scalar> v(n);
    for (Index i = 0; i < n; ++i) v[i] = static_cast<Scalar>(normal());
    return v;
  }

 private:
  std::mt19937_64 engine_;
  bool cached_ = false;
  double cached_value_ = 0.0;
};

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// ---------------------------------------------------------------------------

struct EvalCounter {
  std::uint64_t operator_evals = 0;
  std::uint64_t prox_evals = 0;
};

// A variational inequality: find x* with <F(x*), x - x*> + g(x) - g(x*) >= 0.
// `prox(z, lambda)` is prox_{lambda g}; for indicator g it is the projection.
// `regularizer(x)` returns g(x) and +inf outside dom g.
template <typename Scalar = double>
struct VIProblem {
  using Vector = VectorX<Scalar>;
  using Operator = std::function<Vector(const Vector&)>;
  using Prox = std::function<Vector(const Vector&, Scalar)>;
  using Regularizer = std::function<Scalar(const Vector&)>;

  Index dim = 0;
  Operator op;
  Prox prox;
  Regularizer regularizer;
  // True when g is an indicator function (g = 0 on its domain).
  bool indicator = true;
  std::optional<Scalar> lipschitz;
  std::optional<Scalar> strong_monotonicity;
  bool monotone = true;
  std::string name;
  std::uint64_t seed = 0;
};

template <typename Scalar>
void check_dimension(const VIProblem<Scalar>& problem,
                     const VectorX<Scalar>& x) {
  if (x.size() != problem.dim) {
    throw InvalidInputError("vector of length " + std::to_string(x.size()) +
                            " passed to problem of dimension " +
                            std::to_string(problem.dim));
  }
}

template <typename Scalar>
VectorX<Scalar> evaluate_operator(const VIProblem<Scalar>& problem,
                                  const VectorX<Scalar>& x,
                                  EvalCounter& counter) {
  check_dimension(problem, x);
  ++counter.operator_evals;
  return problem.op(x);
}

template <typename Scalar>
VectorX<Scalar> evaluate_prox(const VIProblem<Scalar>& problem,
                              const VectorX<Scalar>& z, Scalar lambda,
                              EvalCounter& counter) {
  check_dimension(problem, z);
  ++counter.prox_evals;
  return problem.prox(z, lambda);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

// ---------------------------------------------------------------------------
// Adaptive stepsize shared by aGRAAL-type methods.
//
// lambda   = current stepsize (lambda_{k-1} before an update)
// theta    = phi * lambda / lambda_prev
// rho      = 1/phi + 1/phi^2, the maximal growth factor
template <typename Scalar = double>
struct StepSizeState {
  Scalar lambda = 1;
  Scalar lambda_prev = 1;
  Scalar theta = 1;
  Scalar rho = 1;
  Scalar lambda_bar = 1;

  static StepSizeState initial(Scalar phi, Scalar lambda0, Scalar lambda_bar) {
    if (!(phi > 1)) throw InvalidInputError("stepsize: phi must exceed 1");
    if (!(lambda0 > 0) || !(lambda_bar > 0)) {
      throw InvalidInputError("stepsize: lambda0 and lambda_bar must be > 0");
    }
    StepSizeState s;
    s.lambda = std::min(lambda0, lambda_bar);
    s.lambda_prev = s.lambda;
    s.theta = 1;
    s.rho = 1 / phi + 1 / (phi * phi);
    s.lambda_bar = lambda_bar;
    return s;
  }
};

// lambda_new = min{rho lambda, phi theta/(4 lambda) * dx2/dF2, lambda_bar};
// the middle term is dropped when dF2 = 0.
template <typename Scalar>
Scalar next_stepsize(const StepSizeState<Scalar>& state, Scalar phi,
                     Scalar dx_norm_sq, Scalar dF_norm_sq) {
  if (!std::isfinite(dx_norm_sq) || !std::isfinite(dF_norm_sq) ||
      !std::isfinite(state.lambda) || !std::isfinite(state.theta) ||
      !std::isfinite(phi)) {
    throw NumericError("stepsize update received a non-finite input");
  }
  if (!(phi > 1)) throw InvalidInputError("stepsize: phi must exceed 1");
  Scalar lambda_new = std::min(state.rho * state.lambda, state.lambda_bar);
  if (dF_norm_sq > 0) {
    const Scalar local =
        phi * state.theta / (4 * state.lambda) * dx_norm_sq / dF_norm_sq;
    lambda_new = std::min(lambda_new, local);
  }
  return lambda_new;
}

template <typename Scalar>
StepSizeState<Scalar> step_size_update(const StepSizeState<Scalar>& state,
                                       Scalar phi, Scalar dx_norm_sq,
                                       Scalar dF_norm_sq) {
  StepSizeState<Scalar> next = state;
  next.lambda = next_stepsize(state, phi, dx_norm_sq, dF_norm_sq);
  next.lambda_prev = state.lambda;
  next.theta = phi * next.lambda / next.lambda_prev;
  return next;
}

}  // namespace goldvi

#endif  // GOLDVI_CORE_HPP_
