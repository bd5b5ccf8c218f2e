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

// Closed-form proximal maps and Euclidean projections.

#ifndef GOLDVI_PROX_HPP_
#define GOLDVI_PROX_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "goldvi/core.hpp"

namespace goldvi {

// Soft-thresholding: sign(z_i) max(|z_i| - tau, 0).
template <typename Derived>
typename Derived::PlainObject prox_l1(const Eigen::MatrixBase<Derived>& z,
                                      typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  if (!(tau >= 0)) throw InvalidInputError("prox_l1: tau must be >= 0");
  return z.unaryExpr([tau](Scalar v) {
    const Scalar shrunk = std::abs(v) - tau;
    return shrunk > 0 ? std::copysign(shrunk, v) : Scalar(0);
  });
}

// Projection onto {v >= 0, sum v = s} by sorting. The threshold tau is fixed
// by partial sums of the sorted entries, so ties in the order do not matter.
template <typename Derived>
typename Derived::PlainObject project_simplex(
    const Eigen::MatrixBase<Derived>& z, typename Derived::Scalar s = 1) {
  using Scalar = typename Derived::Scalar;
  const Index n = z.size();
  if (n == 0) throw InvalidInputError("project_simplex: empty vector");
  if (!(s > 0)) throw InvalidInputError("project_simplex: radius must be > 0");

  const typename Derived::PlainObject values = z;
  std::vector<Scalar> sorted(values.data(), values.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());

  // The j = 0 candidate always qualifies, so tau is always assigned.
  Scalar cumulative = 0;
  Scalar tau = 0;
  for (Index j = 0; j < n; ++j) {
    cumulative += sorted[j];
    const Scalar candidate = (cumulative - s) / static_cast<Scalar>(j + 1);
    if (sorted[j] - candidate > 0) tau = candidate;
  }
  return (values.array() - tau).max(Scalar(0)).matrix();
}

// Coordinatewise clamp to [lo, hi]; entries of lo/hi may be infinite.
template <typename Derived, typename DerivedLo, typename DerivedHi>
typename Derived::PlainObject project_box(
    const Eigen::MatrixBase<Derived>& z, const Eigen::MatrixBase<DerivedLo>& lo,
    const Eigen::MatrixBase<DerivedHi>& hi) {
  if (lo.size() != z.size() || hi.size() != z.size()) {
    throw InvalidInputError("project_box: bound length mismatch");
  }
  if ((lo.array() > hi.array()).any()) {
    throw InvalidInputError("project_box: lo > hi");
  }
  return z.cwiseMax(lo).cwiseMin(hi);
}

template <typename Scalar = double>
struct SimplexBlock {
  Index size = 0;
  Scalar radius = 1;
};

// Independent simplex projection on consecutive blocks of z.
template <typename Derived>
typename Derived::PlainObject project_product_simplices(
    const Eigen::MatrixBase<Derived>& z,
    const std::vector<SimplexBlock<typename Derived::Scalar>>& blocks) {
  Index total = 0;
  for (const auto& b : blocks) {
    if (b.size <= 0) throw InvalidInputError("product simplex: empty block");
    total += b.size;
  }
  if (total != z.size()) {
    throw InvalidInputError("product simplex: block sizes do not sum to dim");
  }
  typename Derived::PlainObject out(z.size());
  Index offset = 0;
  for (const auto& b : blocks) {
    out.segment(offset, b.size) =
        project_simplex(z.segment(offset, b.size), b.radius);
    offset += b.size;
  }
  return out;
}

// ---------------------------------------------------------------------------

enum class SetKind {
  kWholeSpace,
  kNonnegOrthant,
  kBox,
  kSimplex,
  kProductOfSimplices,
};

template <typename Scalar = double>
struct FeasibleSetSpec {
  using Vector = VectorX<Scalar>;

  SetKind kind = SetKind::kWholeSpace;
  Vector lo, hi;                             // kBox
  Scalar radius = 1;                         // kSimplex
  std::vector<SimplexBlock<Scalar>> blocks;  // kProductOfSimplices

  static FeasibleSetSpec whole_space() { return {}; }
  static FeasibleSetSpec nonneg_orthant() {
    FeasibleSetSpec s;
    s.kind = SetKind::kNonnegOrthant;
    return s;
  }
  static FeasibleSetSpec box(Vector lo, Vector hi) {
    if (lo.size() != hi.size()) {
      throw InvalidInputError("box: bound length mismatch");
    }
    if ((lo.array() > hi.array()).any()) {
      throw InvalidInputError("box: lo > hi");
    }
    FeasibleSetSpec s;
    s.kind = SetKind::kBox;
    s.lo = std::move(lo);
    s.hi = std::move(hi);
    return s;
  }
  static FeasibleSetSpec simplex(Scalar radius) {
    if (!(radius > 0)) throw InvalidInputError("simplex: radius must be > 0");
    FeasibleSetSpec s;
    s.kind = SetKind::kSimplex;
    s.radius = radius;
    return s;
  }
  static FeasibleSetSpec product_of_simplices(
      std::vector<SimplexBlock<Scalar>> blocks) {
    for (const auto& b : blocks) {
      if (b.size <= 0 || !(b.radius > 0)) {
        throw InvalidInputError("product simplex: invalid block");
      }
    }
    FeasibleSetSpec s;
    s.kind = SetKind::kProductOfSimplices;
    s.blocks = std::move(blocks);
    return s;
  }

  Vector project(const Vector& z) const {
    switch (kind) {
      case SetKind::kWholeSpace:
        return z;
      case SetKind::kNonnegOrthant:
        return z.cwiseMax(Scalar(0));
      case SetKind::kBox:
        return project_box(z, lo, hi);
      case SetKind::kSimplex:
        return project_simplex(z, radius);
      case SetKind::kProductOfSimplices:
        return project_product_simplices(z, blocks);
    }
    return z;
  }

  // Membership up to an absolute tolerance.
  bool contains(const Vector& x, Scalar tol) const {
    switch (kind) {
      case SetKind::kWholeSpace:
        return true;
      case SetKind::kNonnegOrthant:
        return x.size() == 0 || x.minCoeff() >= -tol;
      case SetKind::kBox:
        return ((x - lo).array() >= -tol).all() &&
               ((hi - x).array() >= -tol).all();
      case SetKind::kSimplex:
        return (x.size() == 0 || x.minCoeff() >= -tol) &&
               std::abs(x.sum() - radius) <= tol;
      case SetKind::kProductOfSimplices: {
        Index offset = 0;
        for (const auto& b : blocks) {
          const auto seg = x.segment(offset, b.size);
          if (seg.minCoeff() < -tol || std::abs(seg.sum() - b.radius) > tol) {
            return false;
          }
          offset += b.size;
        }
        return true;
      }
    }
    return false;
  }
};

template <typename Scalar = double>
struct L1Penalty {
  Scalar weight = 0;
};

// g is either the indicator of a feasible set or a weighted l1 norm.
template <typename Scalar = double>
using Regularizer = std::variant<FeasibleSetSpec<Scalar>, L1Penalty<Scalar>>;

template <typename Scalar>
typename VIProblem<Scalar>::Prox prox_for(const FeasibleSetSpec<Scalar>& set) {
  if (set.kind == SetKind::kWholeSpace) {
    return [](const VectorX<Scalar>& z, Scalar) { return z; };
  }
  return [set](const VectorX<Scalar>& z, Scalar) { return set.project(z); };
}

template <typename Scalar>
typename VIProblem<Scalar>::Prox prox_for(const L1Penalty<Scalar>& penalty) {
  const Scalar w = penalty.weight;
  return [w](const VectorX<Scalar>& z, Scalar lambda) {
    return prox_l1(z, lambda * w);
  };
}

template <typename Scalar>
typename VIProblem<Scalar>::Prox prox_for(const Regularizer<Scalar>& g) {
  return std::visit([](const auto& r) { return prox_for<Scalar>(r); }, g);
}

// Feasibility tolerance for indicator functions, scaled to the point.
template <typename Scalar>
Scalar membership_tolerance(const VectorX<Scalar>& x) {
  return Scalar(1e-9) * (1 + x.template lpNorm<Eigen::Infinity>());
}

template <typename Scalar>
typename VIProblem<Scalar>::Regularizer regularizer_for(
    const Regularizer<Scalar>& g) {
  if (const auto* set = std::get_if<FeasibleSetSpec<Scalar>>(&g)) {
    return [s = *set](const VectorX<Scalar>& x) {
      return s.contains(x, membership_tolerance(x))
                 ? Scalar(0)
                 : std::numeric_limits<Scalar>::infinity();
    };
  }
  const Scalar w = std::get<L1Penalty<Scalar>>(g).weight;
  return [w](const VectorX<Scalar>& x) { return w * x.template lpNorm<1>(); };
}

// Installs prox, g and the indicator flag of `g` on `problem`.
template <typename Scalar>
void attach_regularizer(VIProblem<Scalar>& problem,
                        const Regularizer<Scalar>& g) {
  problem.prox = prox_for(g);
  problem.regularizer = regularizer_for(g);
  problem.indicator = std::holds_alternative<FeasibleSetSpec<Scalar>>(g);
}

// Nearest point of dom g. For indicator g this is the projection, which is the
// prox at any parameter; for finite-valued g it is the identity.
template <typename Scalar>
VectorX<Scalar> project_domain(const VIProblem<Scalar>& problem,
                               const VectorX<Scalar>& z) {
  return problem.indicator ? problem.prox(z, Scalar(1)) : z;
}

}  // namespace goldvi

#endif  // GOLDVI_PROX_HPP_
