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

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "goldvi/analysis.hpp"
#include "goldvi/prox.hpp"
#include "prox_oracle.hpp"

namespace goldvi {
namespace {

using Vec = VectorX<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(ProxL1, Examples) {
  EXPECT_EQ(prox_l1(vec({3, -1, 0.5}), 1.0), vec({2, 0, 0}));
  const Vec z = vec({3, -1, 0.5});
  EXPECT_EQ(prox_l1(z, 0.0), z);
  EXPECT_EQ(prox_l1(Vec::Zero(4), 2.5), Vec::Zero(4));
  EXPECT_THROW(prox_l1(z, -1.0), InvalidInputError);
}

TEST(ProxL1, MatchesScalarArgmin) {
  // Minimize tau|u| + (u - z)^2/2 over a fine grid.
  for (double z : {-3.0, -0.7, 0.0, 0.2, 1.4}) {
    const double tau = 0.5;
    double best_u = 0, best = kInf;
    for (int i = -40000; i <= 40000; ++i) {
      const double u = i * 1e-4;
      const double val = tau * std::abs(u) + 0.5 * (u - z) * (u - z);
      if (val < best) best = val, best_u = u;
    }
    EXPECT_NEAR(prox_l1(vec({z}), tau)[0], best_u, 1e-4);
  }
}

TEST(ProjectSimplex, Examples) {
  EXPECT_TRUE(project_simplex(vec({2, 0, 0}), 1.0).isApprox(vec({1, 0, 0})));
  const Vec third = project_simplex(vec({0.5, 0.5, 0.5}), 1.0);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(third[i], 1.0 / 3, 1e-15);
  const Vec z = vec({0.9, 0.2, -0.5, 0.4});
  const Vec got = project_simplex(z, 1.0);
  const Vec want = oracle::brute_force_simplex(z, 1.0);
  EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(got.sum(), 1.0, 1e-12);
}

TEST(ProjectSimplex, Errors) {
  EXPECT_THROW(project_simplex(Vec(0), 1.0), InvalidInputError);
  EXPECT_THROW(project_simplex(vec({1, 2}), 0.0), InvalidInputError);
}

TEST(ProjectSimplex, TiesAndRadius) {
  const Vec p = project_simplex(vec({1, 1, 1, 1}), 2.0);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(p[i], 0.5, 1e-15);
  const Vec q = project_simplex(vec({5, 5, -1}), 3.0);
  EXPECT_NEAR(q[0], 1.5, 1e-15);
  EXPECT_NEAR(q[1], 1.5, 1e-15);
  EXPECT_EQ(q[2], 0.0);
}

TEST(ProjectSimplex, BruteForceOracle) {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.uniform_index(6));
    const double s = rng.uniform(0.1, 5.0);
    const Vec z = rng.normal_vector(n) * rng.uniform(0.1, 4.0);
    const Vec got = project_simplex(z, s);
    const Vec want = oracle::brute_force_simplex(z, s);
    ASSERT_LE((got - want).cwiseAbs().maxCoeff(), 1e-8) << "trial " << trial;
    ASSERT_NEAR(got.sum(), s, 1e-12);
    ASSERT_GE(got.minCoeff(), 0.0);
  }
}

TEST(ProjectBox, Examples) {
  EXPECT_EQ(project_box(vec({-1, 2}), vec({0, 0}), vec({kInf, kInf})), vec({0, 2}));
  const Vec inside = vec({0.3, -0.2});
  EXPECT_EQ(project_box(inside, vec({0, -1}), vec({1, 1})), inside);
  EXPECT_EQ(project_box(vec({5, -3}), vec({0, -1}), vec({1, 1})), vec({1, -1}));
  EXPECT_THROW(project_box(vec({0, 0}), vec({1, 0}), vec({0, 1})), InvalidInputError);
  EXPECT_THROW(project_box(vec({0, 0}), vec({0}), vec({1})), InvalidInputError);
}

TEST(ProjectBox, BruteForceOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.uniform_index(6));
    Vec lo(n), hi(n);
    for (Index i = 0; i < n; ++i) {
      const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
      lo[i] = std::min(a, b);
      hi[i] = rng.uniform() < 0.2 ? kInf : std::max(a, b);
    }
    const Vec z = 2 * rng.normal_vector(n);
    const Vec got = project_box(z, lo, hi);
    const Vec want = oracle::brute_force_box(z, lo, hi);
    ASSERT_LE((got - want).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ProjectProductSimplices, Examples) {
  const std::vector<SimplexBlock<double>> blocks = {{2, 1.0}, {2, 1.0}};
  EXPECT_TRUE(project_product_simplices(vec({2, 0, 0, 2}), blocks)
                  .isApprox(vec({1, 0, 0, 1})));
  const Vec z = vec({0.3, -0.4, 1.2});
  EXPECT_EQ(project_product_simplices(z, {{3, 2.0}}), project_simplex(z, 2.0));
  EXPECT_THROW(project_product_simplices(z, {{2, 1.0}}), InvalidInputError);
  EXPECT_THROW(project_product_simplices(z, {{3, 1.0}, {0, 1.0}}),
               InvalidInputError);
}

TEST(ProjectProductSimplices, BruteForceOracleThreeByThree) {
  Rng rng(9);
  const std::vector<SimplexBlock<double>> blocks = {{3, 1.0}, {3, 1.0}};
  for (int trial = 0; trial < 200; ++trial) {
    const Vec z = rng.normal_vector(6);
    const Vec got = project_product_simplices(z, blocks);
    Vec want(6);
    want.head(3) = oracle::brute_force_simplex(Vec(z.head(3)), 1.0);
    want.tail(3) = oracle::brute_force_simplex(Vec(z.tail(3)), 1.0);
    ASSERT_LE((got - want).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ProxFor, Dispatch) {
  const Vec z = vec({1, 2});
  EXPECT_EQ(prox_for(FeasibleSetSpec<double>::whole_space())(z, 0.3), z);
  EXPECT_EQ(prox_for(FeasibleSetSpec<double>::nonneg_orthant())(vec({-1, 2}), 0.3),
            vec({0, 2}));
  const Vec w = vec({4, -1, 7});
  EXPECT_EQ(prox_for(FeasibleSetSpec<double>::simplex(3.0))(w, 0.5),
            project_simplex(w, 3.0));
  EXPECT_EQ(prox_for(L1Penalty<double>{2.0})(vec({3, -1}), 0.5), vec({2, 0}));
}

TEST(FeasibleSetSpec, InvalidConstruction) {
  EXPECT_THROW(FeasibleSetSpec<double>::simplex(0.0), InvalidInputError);
  EXPECT_THROW(FeasibleSetSpec<double>::box(vec({1}), vec({0})), InvalidInputError);
  EXPECT_THROW(FeasibleSetSpec<double>::product_of_simplices({{0, 1.0}}),
               InvalidInputError);
}

std::vector<Regularizer<double>> all_regularizers(Index n) {
  Vec lo = Vec::Constant(n, -0.5), hi = Vec::Constant(n, 1.5);
  hi[0] = kInf;
  std::vector<SimplexBlock<double>> blocks = {{n / 2, 1.0}, {n - n / 2, 2.0}};
  return {FeasibleSetSpec<double>::whole_space(),
          FeasibleSetSpec<double>::nonneg_orthant(),
          FeasibleSetSpec<double>::box(lo, hi),
          FeasibleSetSpec<double>::simplex(3.0),
          FeasibleSetSpec<double>::product_of_simplices(blocks),
          L1Penalty<double>{0.7}};
}

TEST(ProxProperties, IdempotentForProjections) {
  Rng rng(17);
  for (const auto& g : all_regularizers(6)) {
    if (!std::holds_alternative<FeasibleSetSpec<double>>(g)) continue;
    const auto P = prox_for(g);
    for (int t = 0; t < 100; ++t) {
      const Vec z = 3 * rng.normal_vector(6);
      const Vec p = P(z, 1.0);
      ASSERT_LE((P(p, 1.0) - p).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ProxProperties, Nonexpansive) {
  Rng rng(23);
  for (const auto& g : all_regularizers(6)) {
    const auto P = prox_for(g);
    for (int t = 0; t < 200; ++t) {
      const Vec u = 3 * rng.normal_vector(6), v = 3 * rng.normal_vector(6);
      const double lambda = rng.uniform(0.1, 2.0);
      ASSERT_LE((P(u, lambda) - P(v, lambda)).norm(), (u - v).norm() + 1e-12);
    }
  }
}

TEST(ProxProperties, VariationalCharacterization) {
  // y = prox_{lambda g}(x) iff <y - x, z - y> >= lambda (g(y) - g(z)) for all z.
  Rng rng(29);
  for (const auto& g : all_regularizers(6)) {
    VIProblem<double> p;
    p.dim = 6;
    attach_regularizer(p, g);
    for (int t = 0; t < 20; ++t) {
      const Vec x = 3 * rng.normal_vector(6);
      const double lambda = rng.uniform(0.1, 2.0);
      const Vec y = p.prox(x, lambda);
      const double gy = p.regularizer(y);
      ASSERT_TRUE(std::isfinite(gy));
      for (int k = 0; k < 100; ++k) {
        const Vec z = project_domain(p, Vec(3 * rng.normal_vector(6)));
        const double lhs = (y - x).dot(z - y);
        const double rhs = lambda * (gy - p.regularizer(z));
        ASSERT_GE(lhs - rhs, -1e-8);
      }
    }
  }
}

TEST(ProjectDomain, IdentityForFiniteRegularizer) {
  VIProblem<double> p;
  p.dim = 2;
  attach_regularizer<double>(p, L1Penalty<double>{1.0});
  EXPECT_FALSE(p.indicator);
  EXPECT_EQ(project_domain(p, vec({3, -4})), vec({3, -4}));
}

}  // namespace
}  // namespace goldvi
