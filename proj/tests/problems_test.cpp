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
#include <set>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "goldvi/analysis.hpp"
#include "goldvi/problems.hpp"

namespace goldvi {
namespace {

using Vec = VectorX<double>;
using Mat = MatrixX<double>;

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// ---------------------------------------------------------------------------
// Linear algebra helpers.

TEST(SpectralNorm, MatchesSvd) {
  Rng rng(1);
  for (int t = 0; t < 5; ++t) {
    Mat M(7, 4);
    for (Index i = 0; i < M.size(); ++i) M.data()[i] = rng.normal();
    const double svd = Eigen::JacobiSVD<Mat>(M).singularValues()[0];
    EXPECT_NEAR(spectral_norm(M), svd, 1e-8 * svd);
  }
}

TEST(MinSymmetricEigenvalue, Diagonal) {
  Mat M = Mat::Zero(3, 3);
  M.diagonal() = vec({3, 0.5, 2});
  M(0, 1) = 4;
  M(1, 0) = -4;
  EXPECT_NEAR(min_symmetric_eigenvalue(M), 0.5, 1e-14);
}

// ---------------------------------------------------------------------------
// Nash-Cournot.

TEST(NashCournot, SingleFirmExample) {
  NashCournotParams np;
  np.n = 1;
  np.gamma = 1;
  np.beta = vec({1});
  np.c = vec({0});
  np.L_cap = vec({1});
  const auto p = nash_cournot(np, 0);
  const Vec F = p.op(vec({5000}));
  EXPECT_NEAR(F[0], 5000, 1e-9);

  // Independent check: p(Q) = 5000/Q, p'(Q) by central difference.
  const double Q = 5000, h = 1e-3;
  const double price = 5000 / Q;
  const double slope = (5000 / (Q + h) - 5000 / (Q - h)) / (2 * h);
  EXPECT_NEAR(F[0], 5000 - price - Q * slope, 1e-6);
}

TEST(NashCournot, PriceDerivativeMatchesFiniteDifference) {
  for (double gamma : {1.1, 1.5}) {
    for (double Q : {0.5, 10.0, 900.0}) {
      const double h = 1e-6 * Q;
      const double fd =
          (cournot_price(Q + h, gamma) - cournot_price(Q - h, gamma)) / (2 * h);
      EXPECT_NEAR(cournot_price_derivative(Q, gamma), fd,
                  1e-6 * std::abs(fd));
    }
  }
}

TEST(NashCournot, ScenarioDrawsInRange) {
  Rng rng(7);
  const auto a = NashCournotParams::draw(NashScenario::kI, 200, rng);
  EXPECT_EQ(a.gamma, 1.1);
  EXPECT_GE(a.beta.minCoeff(), 0.5);
  EXPECT_LT(a.beta.maxCoeff(), 2.0);
  EXPECT_GE(a.c.minCoeff(), 1.0);
  EXPECT_LT(a.c.maxCoeff(), 100.0);
  EXPECT_GE(a.L_cap.minCoeff(), 0.5);
  EXPECT_LT(a.L_cap.maxCoeff(), 5.0);
  Rng rng2(7);
  const auto b = NashCournotParams::draw(NashScenario::kII, 200, rng2);
  EXPECT_EQ(b.gamma, 1.5);
  EXPECT_GE(b.beta.minCoeff(), 0.3);
  EXPECT_LT(b.beta.maxCoeff(), 4.0);
}

TEST(NashCournot, FiniteNearZeroQuantity) {
  const auto inst = make_instance(Family::kNashCournot, {.n = 10, .seed = 7});
  for (double scale : {0.0, 1e-300, 1e-20}) {
    const Vec F = inst.problem.op(Vec::Constant(10, scale));
    EXPECT_TRUE(F.allFinite()) << scale;
  }
}

TEST(NashCournot, InvalidParameters) {
  NashCournotParams np;
  np.n = 1;
  np.gamma = 1.1;
  np.beta = vec({-1});
  np.c = vec({1});
  np.L_cap = vec({1});
  EXPECT_THROW(nash_cournot(np, 0), InvalidInputError);
}

// ---------------------------------------------------------------------------
// Sparse logistic regression.

TEST(Logistic, OperatorAtZero) {
  Rng rng(2);
  const auto d = LogisticData::draw(6, 9, rng);
  const auto p = sparse_logistic(d, 2);
  const Vec expected = 0.5 * d.D.transpose() * Vec::Ones(9);
  EXPECT_LE((p.op(Vec::Zero(6)) - expected).norm(), 1e-14 * (1 + expected.norm()));
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  const auto d = LogisticData::draw(8, 12, rng);
  const auto p = sparse_logistic(d, 4);
  for (int t = 0; t < 10; ++t) {
    const Vec x = rng.normal_vector(8);
    const Vec F = p.op(x);
    Vec fd(8);
    const double h = 1e-5;
    for (Index i = 0; i < 8; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      fd[i] = (d.loss(xp) - d.loss(xm)) / (2 * h);
    }
    EXPECT_LE((F - fd).norm() / std::max(1.0, fd.norm()), 1e-5);
  }
}

TEST(Logistic, GammaFormula) {
  Rng rng(3);
  const auto d = LogisticData::draw(500, 200, rng);
  double best = 0;
  for (Index j = 0; j < d.A.cols(); ++j) {
    double s = 0;
    for (Index i = 0; i < d.A.rows(); ++i) s += d.A(i, j) * d.b[i];
    best = std::max(best, std::abs(s));
  }
  EXPECT_NEAR(d.gamma, 0.005 * best, 1e-12 * best);
  for (Index i = 0; i < d.b.size(); ++i) {
    EXPECT_TRUE(d.b[i] == 1 || d.b[i] == -1);
  }
  EXPECT_LE((d.D + d.b.asDiagonal() * d.A).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Logistic, RegularizerIsL1) {
  const auto p = sparse_logistic(4, 5, 1);
  EXPECT_FALSE(p.indicator);
  ASSERT_TRUE(p.lipschitz);
}

// ---------------------------------------------------------------------------
// Zero-sum game.

TEST(ZeroSum, SkewSymmetric) {
  const auto p = zero_sum_game(4, 6, 3);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Vec z = rng.normal_vector(10);
    EXPECT_NEAR(p.op(z).dot(z), 0.0, 1e-12 * (1 + z.squaredNorm()));
  }
}

TEST(ZeroSum, MatchingPennies) {
  const Mat A = (Mat(2, 2) << 0, 1, 1, 0).finished();
  const auto p = zero_sum_game_from(A);
  const Vec z = Vec::Constant(4, 0.5);
  EXPECT_EQ(p.op(z), vec({0.5, 0.5, -0.5, -0.5}));
  EXPECT_LE(residual(p, z), 1e-15);
  EXPECT_NEAR(duality_gap(A, z), 0.0, 1e-15);
  // Every pure profile has a positive gap.
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Vec pure = Vec::Zero(4);
      pure[i] = 1;
      pure[2 + j] = 1;
      EXPECT_GT(duality_gap(A, pure), 0.5);
      EXPECT_GT(residual(p, pure), 0.1);
    }
  }
}

TEST(ZeroSum, SingletonSimplices) {
  const auto inst = make_instance(Family::kZeroSum, {.n = 1, .m = 1, .seed = 2});
  EXPECT_EQ(inst.x0, vec({1, 1}));
  EXPECT_LE(residual(inst.problem, inst.x0), 1e-15);
}

TEST(ZeroSum, EntriesUniformUnit) {
  const auto inst = make_instance(Family::kZeroSum, {.seed = 1});
  ASSERT_TRUE(inst.payoff);
  EXPECT_EQ(inst.payoff->rows(), 50);
  EXPECT_GE(inst.payoff->minCoeff(), 0.0);
  EXPECT_LT(inst.payoff->maxCoeff(), 1.0);
  EXPECT_NEAR(inst.x0.head(50).sum(), 1.0, 1e-12);
  EXPECT_NEAR(inst.x0.tail(50).sum(), 1.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Garnet MDP.

TEST(Garnet, SingleStateClosedForm) {
  GarnetMDP mdp;
  mdp.n_states = 1;
  mdp.n_actions = 1;
  mdp.branching = 1;
  mdp.gamma = 0.9;
  mdp.transition = {{{0, 1.0}}};
  mdp.cost = Mat::Constant(1, 1, 0.3);
  const auto p = garnet_mdp(mdp);
  const Vec v = vec({0.3 / (1 - 0.9)});
  EXPECT_NEAR(p.op(v)[0], 0.0, 1e-14);
}

TEST(Garnet, ValueIterationFixedPoint) {
  Rng rng(11);
  const auto mdp = GarnetMDP::draw(5, 2, 2, 0.9, rng);
  const auto p = garnet_mdp(mdp);
  const Vec v = value_iteration(mdp, 1e-12);
  EXPECT_LE(p.op(v).lpNorm<Eigen::Infinity>(), 1e-11);
  EXPECT_LE(residual(p, v), 1e-8);
}

TEST(Garnet, BellmanContraction) {
  Rng rng(12);
  for (double gamma : {0.9, 0.99}) {
    const auto mdp = GarnetMDP::draw(20, 3, 2, gamma, rng);
    for (int t = 0; t < 100; ++t) {
      const Vec u = 10 * rng.normal_vector(20), v = 10 * rng.normal_vector(20);
      const double lhs = (mdp.bellman(u) - mdp.bellman(v)).lpNorm<Eigen::Infinity>();
      ASSERT_LE(lhs, gamma * (u - v).lpNorm<Eigen::Infinity>() * (1 + 1e-12));
    }
  }
}

TEST(Garnet, TransitionRows) {
  Rng rng(13);
  const auto mdp = GarnetMDP::draw(50, 5, 5, 0.9, rng);
  EXPECT_NO_THROW(mdp.validate());
  for (const auto& row : mdp.transition) {
    ASSERT_EQ(row.size(), 5u);
    std::set<Index> succ;
    double total = 0;
    for (const auto& [s, pr] : row) {
      succ.insert(s);
      ASSERT_GT(pr, 0.0);
      total += pr;
    }
    ASSERT_EQ(succ.size(), 5u);
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_GE(mdp.cost.minCoeff(), 0.0);
  EXPECT_LT(mdp.cost.maxCoeff(), 1.0);
  EXPECT_EQ(default_branching(50), 5);
}

TEST(Garnet, InvalidArguments) {
  EXPECT_THROW(garnet_mdp(5, 2, 0, 0.9, 1), InvalidInputError);
  EXPECT_THROW(garnet_mdp(5, 2, 6, 0.9, 1), InvalidInputError);
  EXPECT_THROW(garnet_mdp(5, 2, 2, 1.0, 1), InvalidInputError);
}

TEST(Garnet, ReferenceResidual) {
  const auto inst = make_instance(Family::kMdp, {.seed = 3});
  ASSERT_TRUE(inst.reference);
  EXPECT_LE(residual(inst.problem, *inst.reference), 1e-8);
}

// ---------------------------------------------------------------------------
// Strongly monotone affine.

TEST(Affine, PositiveDefiniteSymmetricPart) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto d = AffineData::draw(30, rng);
    EXPECT_GT(min_symmetric_eigenvalue(d.M), 0.0);
    const auto p = strongly_monotone_affine(d, seed);
    ASSERT_TRUE(p.strong_monotonicity);
    EXPECT_GT(*p.strong_monotonicity, 0.0);
  }
}

TEST(Affine, RecipeRanges) {
  Rng rng(21);
  const auto d = AffineData::draw(40, rng);
  EXPECT_EQ(d.radius, 40.0);
  EXPECT_GE(d.q.minCoeff(), -500.0);
  EXPECT_LE(d.q.maxCoeff(), 0.0);
}

TEST(Affine, TwoDimensionalGridAndKkt) {
  Rng rng(6);
  const auto d = AffineData::draw(2, rng);
  const auto p = strongly_monotone_affine(d, 6);
  const auto x = polish_affine_simplex(d.M, d.q, d.radius, Vec::Ones(2));
  ASSERT_TRUE(x);
  EXPECT_LE(affine_simplex_kkt_error(d.M, d.q, d.radius, *x), 1e-9);
  EXPECT_LE(residual(p, *x), 1e-8);

  // Grid over {(t, 2 - t)}: the VI solution minimizes max_y <F(x), x - y>,
  // which on a segment is the gap <F(x), x - vertex> over both vertices.
  const Vec e1 = vec({2, 0}), e2 = vec({0, 2});
  double best_gap = 1e300, best_t = -1;
  for (int i = 0; i <= 20000; ++i) {
    const double t = i * 1e-4;
    const Vec g = vec({t, 2 - t});
    const Vec F = d.M * g + d.q;
    const double gap = std::max(F.dot(g - e1), F.dot(g - e2));
    if (gap < best_gap) best_gap = gap, best_t = t;
  }
  EXPECT_NEAR((*x)[0], best_t, 2e-4);
}

TEST(Affine, StartIsFeasible) {
  const auto inst = make_instance(Family::kAffine, {.n = 100, .seed = 1});
  EXPECT_EQ(inst.x0, Vec::Ones(100));
  EXPECT_TRUE(std::isfinite(inst.problem.regularizer(inst.x0)));
}

TEST(Affine, ReferenceResidual) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = make_instance(Family::kAffine, {.n = 100, .seed = seed});
    ASSERT_TRUE(inst.reference);
    EXPECT_LE(residual(inst.problem, *inst.reference), 1e-8);
  }
}

// ---------------------------------------------------------------------------
// Rank-two nonmonotone.

TEST(Nonmonotone, SumOfSquares) {
  const auto p = nonmonotone_rank2(6, 1);
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Vec x = rng.normal_vector(6);
    EXPECT_GE(p.op(x).dot(x), -1e-12);
  }
  EXPECT_FALSE(p.monotone);
}

TEST(Nonmonotone, ZeroIsSolution) {
  const auto p = nonmonotone_rank2(6, 1);
  EXPECT_EQ(p.op(Vec::Zero(6)), Vec::Zero(6));
}

TEST(Nonmonotone, DenseRecomputation) {
  Rng rng(3);
  const auto d = NonmonotoneData::draw(4, rng);
  const auto p = nonmonotone_rank2(d);
  for (int t = 0; t < 5; ++t) {
    const Vec x = rng.normal_vector(4);
    Vec s(4), e(4);
    for (Index i = 0; i < 4; ++i) s[i] = std::sin(x[i]), e[i] = std::exp(x[i]);
    const Vec t1 = d.A * s, t2 = d.B * e;
    Mat M(4, 4);
    for (Index i = 0; i < 4; ++i) {
      for (Index j = 0; j < 4; ++j) M(i, j) = t1[i] * t1[j] + t2[i] * t2[j];
    }
    const Vec want = M * x;
    EXPECT_LE((p.op(x) - want).norm(), 1e-12 * (1 + want.norm()));
  }
}

// ---------------------------------------------------------------------------
// Families, snapshots and monotonicity.

FamilyParams small(Family f, std::uint64_t seed) {
  switch (f) {
    case Family::kNashCournot: return {.n = 20, .seed = seed};
    case Family::kLogistic: return {.n = 20, .m = 15, .seed = seed};
    case Family::kZeroSum: return {.n = 6, .m = 5, .seed = seed};
    case Family::kMdp: return {.n = 10, .m = 3, .seed = seed};
    case Family::kAffine: return {.n = 12, .seed = seed};
    case Family::kNonmonotone: return {.n = 10, .seed = seed};
  }
  return {};
}

TEST(Families, NamesRoundTrip) {
  for (Family f : kAllFamilies) EXPECT_EQ(parse_family(family_name(f)), f);
  EXPECT_FALSE(parse_family("quadratic"));
}

TEST(Families, DeterministicHash) {
  for (Family f : kAllFamilies) {
    const auto a = make_instance(f, small(f, 5));
    const auto b = make_instance(f, small(f, 5));
    const auto c = make_instance(f, small(f, 6));
    EXPECT_EQ(a.hash(), b.hash()) << family_name(f);
    EXPECT_NE(a.hash(), c.hash()) << family_name(f);
    EXPECT_EQ(a.snapshot.at("seed").get<std::uint64_t>(), 5u);
  }
}

TEST(Families, SnapshotRoundTrip) {
  Rng rng(77);
  for (Family f : kAllFamilies) {
    const auto a = make_instance(f, small(f, 4));
    const auto b = instance_from_snapshot(Json::parse(a.snapshot.dump()));
    EXPECT_EQ(a.hash(), b.hash()) << family_name(f);
    EXPECT_EQ(a.x0, b.x0);
    for (int t = 0; t < 3; ++t) {
      const Vec x = project_domain(a.problem, Vec(a.x0 + 0.1 * rng.normal_vector(a.x0.size())));
      EXPECT_EQ(a.problem.op(x), b.problem.op(x)) << family_name(f);
    }
  }
}

TEST(Families, StartPointsInDomain) {
  for (Family f : kAllFamilies) {
    const auto inst = make_instance(f, small(f, 1));
    EXPECT_TRUE(std::isfinite(inst.problem.regularizer(inst.x0))) << family_name(f);
    EXPECT_EQ(inst.x0.size(), inst.problem.dim);
  }
}

TEST(Families, MonotoneFlagMatchesSampledMonotonicity) {
  for (Family f : kAllFamilies) {
    for (std::uint64_t seed : {1, 2}) {
      const auto inst = make_instance(f, small(f, seed));
      Rng rng(seed);
      const double spread = 1 + inst.x0.lpNorm<Eigen::Infinity>();
      const double m = sampled_monotonicity(inst.problem, inst.x0, spread, 1000, rng);
      if (inst.problem.monotone) {
        EXPECT_GE(m, -1e-9) << family_name(f);
      }
    }
  }
  // The rank-two family is flagged because it is not monotone.
  const auto nm = make_instance(Family::kNonmonotone, {.n = 50, .seed = 1});
  Rng rng(1);
  EXPECT_LT(sampled_monotonicity(nm.problem, nm.x0, 1.0, 1000, rng), 0.0);
}

TEST(Json, MatrixRoundTrip) {
  const Mat M = (Mat(2, 3) << 1, 2, 3, 4, 5, 6.5).finished();
  const Json j = matrix_to_json(M);
  EXPECT_EQ(j.at("rows"), 2);
  EXPECT_EQ(j.at("data")[1], 2.0);
  EXPECT_EQ(matrix_from_json(j), M);
  EXPECT_THROW(matrix_from_json(Json{{"rows", 2}, {"cols", 2}, {"data", {1.0}}}),
               InvalidInputError);
}

TEST(Hash, HexFormat) {
  EXPECT_EQ(hash_hex(0xabcULL), "0000000000000abc");
  // FNV-1a 64 of the empty object "{}".
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : std::string("{}")) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  EXPECT_EQ(snapshot_hash(Json::object()), h);
}

}  // namespace
}  // namespace goldvi
