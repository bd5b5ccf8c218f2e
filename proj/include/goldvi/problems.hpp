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

// Seeded benchmark generators:
//
//   nash-cournot   oligopoly equilibrium on R^n_+
//   logistic       l1-regularized logistic regression (g = gamma ||x||_1)
//   zero-sum       bilinear matrix game on a product of simplices
//   mdp            Garnet MDP, F = Id - T with T the Bellman operator
//   affine         F(x) = Mx + q, M = AA^T + B + D, on {x >= 0, sum x = n}
//   nonmonotone    F(x) = (t1 t1^T + t2 t2^T) x, t1 = A sin x, t2 = B exp x
//
// Every generator is a pure function of its parameters and seed.

#ifndef GOLDVI_PROBLEMS_HPP_
#define GOLDVI_PROBLEMS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "goldvi/core.hpp"
#include "goldvi/prox.hpp"
#include "json.hpp"

namespace goldvi {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Linear algebra helpers.

// ||M||_2 by power iteration on M^T M from the all-ones vector, stopped at
// relative change <= tol.
double spectral_norm(const MatrixX<double>& M, double tol = 1e-10,
                     int max_iterations = 100000);

// Smallest eigenvalue of (M + M^T)/2.
double min_symmetric_eigenvalue(const MatrixX<double>& M);

// ---------------------------------------------------------------------------

enum class NashScenario { kI, kII };

struct NashCournotParams {
  Index n = 0;
  double gamma = 1.1;
  VectorX<double> beta;
  VectorX<double> c;
  VectorX<double> L_cap;

  // Scenario (i): gamma 1.1, beta ~ U(0.5, 2); scenario (ii): gamma 1.5,
  // beta ~ U(0.3, 4). Both: c ~ U(1, 100), L ~ U(0.5, 5).
  static NashCournotParams draw(NashScenario scenario, Index n, Rng& rng);
  void validate() const;
};

// Inverse demand p(Q) = 5000^{1/gamma} Q^{-1/gamma} and its derivative.
double cournot_price(double Q, double gamma);
double cournot_price_derivative(double Q, double gamma);

// Q is floored at this value before p and p' are evaluated.
inline constexpr double kCournotMinQuantity = 1e-12;

VIProblem<double> nash_cournot(const NashCournotParams& params,
                               std::uint64_t seed);

// Logistic loss data: D_ij = -b_i a_ij, gamma = 0.005 ||A^T b||_inf.
struct LogisticData {
  MatrixX<double> A;  // m x n, row i is a_i
  VectorX<double> b;  // labels in {-1, 1}
  MatrixX<double> D;
  double gamma = 0;

  static LogisticData draw(Index n, Index m, Rng& rng);
  // s(x) = sum_i log(1 + exp((Dx)_i)), whose gradient is F.
  double loss(const VectorX<double>& x) const;
};

VIProblem<double> sparse_logistic(const LogisticData& data, std::uint64_t seed);
VIProblem<double> sparse_logistic(Index n, Index m, std::uint64_t seed);

// F(x, y) = (Ay, -A^T x) on simplex(m) x simplex(n).
VIProblem<double> zero_sum_game_from(const MatrixX<double>& A,
                                     std::uint64_t seed = 0);
VIProblem<double> zero_sum_game(Index m, Index n, std::uint64_t seed);

// max_j (x^T A)_j - min_i (Ay)_i for z = (x, y).
double duality_gap(const MatrixX<double>& A, const VectorX<double>& z);

struct GarnetMDP {
  Index n_states = 0;
  Index n_actions = 0;
  Index branching = 0;
  double gamma = 0.9;
  // transition[s * n_actions + a] lists (successor, probability).
  std::vector<std::vector<std::pair<Index, double>>> transition;
  MatrixX<double> cost;  // n_states x n_actions

  static GarnetMDP draw(Index n_states, Index n_actions, Index branching,
                        double gamma, Rng& rng);
  // [T v](s) = min_a c(s, a) + gamma sum_s' P(s' | s, a) v(s')
  VectorX<double> bellman(const VectorX<double>& v) const;
  void validate() const;
};

inline Index default_branching(Index n_states) { return (n_states + 9) / 10; }

VIProblem<double> garnet_mdp(const GarnetMDP& mdp, std::uint64_t seed = 0);
VIProblem<double> garnet_mdp(Index n_states, Index n_actions, Index branching,
                             double gamma, std::uint64_t seed);

// Iterates v <- T v from zero until ||T v - v||_inf <= tol.
VectorX<double> value_iteration(const GarnetMDP& mdp, double tol,
                                std::int64_t max_iterations = 10000000);

struct AffineData {
  MatrixX<double> M;
  VectorX<double> q;
  double radius = 0;  // sum x = radius

  static AffineData draw(Index n, Rng& rng);
};

VIProblem<double> strongly_monotone_affine(const AffineData& data,
                                           std::uint64_t seed = 0);
VIProblem<double> strongly_monotone_affine(Index n, std::uint64_t seed);

// Solution of the affine VI on {x >= 0, sum x = radius} by an active-set
// method started from the support of `guess`: the equality-constrained system
// on the support is solved exactly, then one index is dropped (negative x_i)
// or added (most negative F_i - nu) per round.
std::optional<VectorX<double>> polish_affine_simplex(
    const MatrixX<double>& M, const VectorX<double>& q, double radius,
    const VectorX<double>& guess, int max_rounds = 0);

// Max violation of the KKT system of the affine simplex VI:
//   sum x = r, x >= 0, F_i - nu >= 0, x_i (F_i - nu) = 0,
// with nu the threshold of the projection of x - F(x).
double affine_simplex_kkt_error(const MatrixX<double>& M,
                                const VectorX<double>& q, double radius,
                                const VectorX<double>& x);

struct NonmonotoneData {
  MatrixX<double> A;
  MatrixX<double> B;
  static NonmonotoneData draw(Index n, Rng& rng);
};

VIProblem<double> nonmonotone_rank2(const NonmonotoneData& data,
                                    std::uint64_t seed = 0);
VIProblem<double> nonmonotone_rank2(Index n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Families with their starting point, optional reference solution and a JSON
// snapshot (family tag, seed, parameters, matrices row-major).

enum class Family { kNashCournot, kLogistic, kZeroSum, kMdp, kAffine, kNonmonotone };

inline constexpr Family kAllFamilies[] = {
    Family::kNashCournot, Family::kLogistic, Family::kZeroSum,
    Family::kMdp,         Family::kAffine,   Family::kNonmonotone};

std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);
std::string family_names_joined();

struct FamilyParams {
  // Zero means the family default.
  Index n = 0;
  Index m = 0;
  Index branching = 0;
  double discount = 0.9;
  NashScenario scenario = NashScenario::kI;
  std::uint64_t seed = 0;
};

struct BenchmarkInstance {
  Family family = Family::kAffine;
  VIProblem<double> problem;
  VectorX<double> x0;
  std::optional<VectorX<double>> reference;
  // Present for the zero-sum family.
  std::optional<MatrixX<double>> payoff;
  Json snapshot;

  std::uint64_t hash() const;
};

// Reference solutions: value iteration for mdp, the active-set solution for
// affine, zero for nonmonotone; none for the other families.
BenchmarkInstance make_instance(Family family, const FamilyParams& params);

// FNV-1a 64 of the compact JSON text.
std::uint64_t snapshot_hash(const Json& snapshot);
std::string hash_hex(std::uint64_t h);

Json matrix_to_json(const MatrixX<double>& M);
Json vector_to_json(const VectorX<double>& v);
MatrixX<double> matrix_from_json(const Json& j);
VectorX<double> vector_from_json(const Json& j);

// Rebuilds an instance from its snapshot.
BenchmarkInstance instance_from_snapshot(const Json& snapshot);

}  // namespace goldvi

#endif  // GOLDVI_PROBLEMS_HPP_
