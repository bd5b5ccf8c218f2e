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

#include "goldvi/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace goldvi {

using Vec = VectorX<double>;
using Mat = MatrixX<double>;

double spectral_norm(const Mat& M, double tol, int max_iterations) {
  if (M.size() == 0) return 0;
  Vec v = Vec::Ones(M.cols()) / std::sqrt(double(M.cols()));
  double sigma2 = 0;
  for (int it = 0; it < max_iterations; ++it) {
    Vec w = M.transpose() * (M * v);
    const double next = w.norm();
    if (next == 0) return 0;
    v = w / next;
    if (std::abs(next - sigma2) <= tol * next) {
      sigma2 = next;
      break;
    }
    sigma2 = next;
  }
  return std::sqrt(sigma2);
}

double min_symmetric_eigenvalue(const Mat& M) {
  const Mat S = (M + M.transpose()) / 2;
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Nash-Cournot

NashCournotParams NashCournotParams::draw(NashScenario scenario, Index n,
                                          Rng& rng) {
  if (n < 1) throw InvalidInputError("nash-cournot: n must be >= 1");
  NashCournotParams p;
  p.n = n;
  const bool first = scenario == NashScenario::kI;
  p.gamma = first ? 1.1 : 1.5;
  p.beta = rng.uniform_vector(n, first ? 0.5 : 0.3, first ? 2.0 : 4.0);
  p.c = rng.uniform_vector(n, 1.0, 100.0);
  p.L_cap = rng.uniform_vector(n, 0.5, 5.0);
  return p;
}

void NashCournotParams::validate() const {
  if (n < 1) throw InvalidInputError("nash-cournot: n must be >= 1");
  if (beta.size() != n || c.size() != n || L_cap.size() != n) {
    throw InvalidInputError("nash-cournot: parameter length mismatch");
  }
  if (!(gamma > 0)) throw InvalidInputError("nash-cournot: gamma must be > 0");
  if ((beta.array() <= 0).any() || (L_cap.array() <= 0).any()) {
    throw InvalidInputError("nash-cournot: beta and L must be positive");
  }
  if ((c.array() < 0).any()) {
    throw InvalidInputError("nash-cournot: c must be nonnegative");
  }
}

double cournot_price(double Q, double gamma) {
  return std::pow(5000.0 / Q, 1.0 / gamma);
}

double cournot_price_derivative(double Q, double gamma) {
  return -(1.0 / gamma) * std::pow(5000.0 / Q, 1.0 / gamma) / Q;
}

VIProblem<double> nash_cournot(const NashCournotParams& params,
                               std::uint64_t seed) {
  params.validate();
  const Vec inv_beta = params.beta.cwiseInverse();
  Vec scale(params.n);
  for (Index i = 0; i < params.n; ++i) {
    scale[i] = std::pow(params.L_cap[i], inv_beta[i]);
  }
  VIProblem<double> p;
  p.dim = params.n;
  p.op = [c = params.c, inv_beta, scale, gamma = params.gamma](const Vec& x) {
    const double Q = std::max(x.sum(), kCournotMinQuantity);
    const double price = cournot_price(Q, gamma);
    const double slope = cournot_price_derivative(Q, gamma);
    Vec F(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      const double marginal =
          c[i] + scale[i] * std::pow(std::max(x[i], 0.0), inv_beta[i]);
      F[i] = marginal - price - x[i] * slope;
    }
    return F;
  };
  attach_regularizer<double>(p, FeasibleSetSpec<double>::nonneg_orthant());
  p.monotone = true;
  p.name = "nash-cournot";
  p.seed = seed;
  return p;
}

// ---------------------------------------------------------------------------
// Sparse logistic regression

namespace {

double sigmoid(double t) {
  if (t >= 0) return 1 / (1 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1 + e);
}

double softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

}  // namespace

LogisticData LogisticData::draw(Index n, Index m, Rng& rng) {
  if (n < 1 || m < 1) throw InvalidInputError("logistic: n, m must be >= 1");
  LogisticData d;
  d.A.resize(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) d.A(i, j) = rng.normal();
  }
  d.b.resize(m);
  for (Index i = 0; i < m; ++i) d.b[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  d.D = -(d.b.asDiagonal() * d.A);
  d.gamma = 0.005 * (d.A.transpose() * d.b).lpNorm<Eigen::Infinity>();
  return d;
}

double LogisticData::loss(const Vec& x) const {
  const Vec t = D * x;
  double s = 0;
  for (Index i = 0; i < t.size(); ++i) s += softplus(t[i]);
  return s;
}

VIProblem<double> sparse_logistic(const LogisticData& data, std::uint64_t seed) {
  VIProblem<double> p;
  p.dim = data.D.cols();
  p.op = [D = data.D](const Vec& x) -> Vec {
    const Vec s = (D * x).unaryExpr([](double t) { return sigmoid(t); });
    return D.transpose() * s;
  };
  attach_regularizer<double>(p, L1Penalty<double>{data.gamma});
  const double dn = spectral_norm(data.D);
  p.lipschitz = dn * dn / 4;
  p.monotone = true;
  p.name = "logistic";
  p.seed = seed;
  return p;
}

VIProblem<double> sparse_logistic(Index n, Index m, std::uint64_t seed) {
  Rng rng(seed);
  return sparse_logistic(LogisticData::draw(n, m, rng), seed);
}

// ---------------------------------------------------------------------------
// Zero-sum game

VIProblem<double> zero_sum_game_from(const Mat& A, std::uint64_t seed) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (m < 1 || n < 1) throw InvalidInputError("zero-sum: empty payoff matrix");
  VIProblem<double> p;
  p.dim = m + n;
  p.op = [A, m, n](const Vec& z) {
    Vec F(m + n);
    F.head(m) = A * z.tail(n);
    F.tail(n) = -(A.transpose() * z.head(m));
    return F;
  };
  attach_regularizer<double>(
      p, FeasibleSetSpec<double>::product_of_simplices({{m, 1.0}, {n, 1.0}}));
  p.lipschitz = spectral_norm(A);
  if (!(*p.lipschitz > 0)) p.lipschitz.reset();
  p.monotone = true;
  p.name = "zero-sum";
  p.seed = seed;
  return p;
}

namespace {

Mat uniform_matrix(Index rows, Index cols, double lo, double hi, Rng& rng) {
  Mat M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = rng.uniform(lo, hi);
  }
  return M;
}

Mat normal_matrix(Index rows, Index cols, Rng& rng) {
  Mat M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = rng.normal();
  }
  return M;
}

}  // namespace

VIProblem<double> zero_sum_game(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidInputError("zero-sum: m, n must be >= 1");
  Rng rng(seed);
  return zero_sum_game_from(uniform_matrix(m, n, 0, 1, rng), seed);
}

double duality_gap(const Mat& A, const Vec& z) {
  if (z.size() != A.rows() + A.cols()) {
    throw InvalidInputError("duality_gap: dimension mismatch");
  }
  const Vec x = z.head(A.rows());
  const Vec y = z.tail(A.cols());
  return (A.transpose() * x).maxCoeff() - (A * y).minCoeff();
}

// ---------------------------------------------------------------------------
// Garnet MDP

GarnetMDP GarnetMDP::draw(Index n_states, Index n_actions, Index branching,
                          double gamma, Rng& rng) {
  GarnetMDP mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.branching = branching;
  mdp.gamma = gamma;
  if (n_states < 1 || n_actions < 1) {
    throw InvalidInputError("mdp: state and action counts must be >= 1");
  }
  if (branching < 1 || branching > n_states) {
    throw InvalidInputError("mdp: branching must lie in [1, n_states]");
  }
  if (!(gamma > 0 && gamma < 1)) {
    throw InvalidInputError("mdp: discount must lie in (0, 1)");
  }
  std::vector<Index> pool(n_states);
  mdp.transition.resize(n_states * n_actions);
  for (Index sa = 0; sa < n_states * n_actions; ++sa) {
    std::iota(pool.begin(), pool.end(), Index(0));
    for (Index j = 0; j < branching; ++j) {
      const Index pick =
          j + static_cast<Index>(rng.uniform_index(std::uint64_t(n_states - j)));
      std::swap(pool[j], pool[pick]);
    }
    std::vector<double> w(branching);
    double total = 0;
    for (auto& v : w) {
      v = 1 - rng.uniform();
      total += v;
    }
    auto& row = mdp.transition[sa];
    for (Index j = 0; j < branching; ++j) row.emplace_back(pool[j], w[j] / total);
  }
  mdp.cost = uniform_matrix(n_states, n_actions, 0, 1, rng);
  return mdp;
}

void GarnetMDP::validate() const {
  if (n_states < 1 || n_actions < 1) {
    throw InvalidInputError("mdp: state and action counts must be >= 1");
  }
  if (!(gamma > 0 && gamma < 1)) {
    throw InvalidInputError("mdp: discount must lie in (0, 1)");
  }
  if (static_cast<Index>(transition.size()) != n_states * n_actions ||
      cost.rows() != n_states || cost.cols() != n_actions) {
    throw InvalidInputError("mdp: table sizes do not match state/action counts");
  }
  for (const auto& row : transition) {
    double total = 0;
    if (row.empty() || static_cast<Index>(row.size()) > branching) {
      throw InvalidInputError("mdp: transition row exceeds branching");
    }
    for (const auto& [s, pr] : row) {
      if (s < 0 || s >= n_states || pr < 0) {
        throw InvalidInputError("mdp: invalid transition entry");
      }
      total += pr;
    }
    if (std::abs(total - 1) > 1e-12) {
      throw InvalidInputError("mdp: transition row does not sum to 1");
    }
  }
}

Vec GarnetMDP::bellman(const Vec& v) const {
  Vec out(n_states);
  for (Index s = 0; s < n_states; ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < n_actions; ++a) {
      double expect = 0;
      for (const auto& [next, pr] : transition[s * n_actions + a]) {
        expect += pr * v[next];
      }
      best = std::min(best, cost(s, a) + gamma * expect);
    }
    out[s] = best;
  }
  return out;
}

VIProblem<double> garnet_mdp(const GarnetMDP& mdp, std::uint64_t seed) {
  mdp.validate();
  VIProblem<double> p;
  p.dim = mdp.n_states;
  p.op = [mdp](const Vec& v) -> Vec { return v - mdp.bellman(v); };
  attach_regularizer<double>(p, FeasibleSetSpec<double>::whole_space());
  p.monotone = true;
  p.name = "mdp";
  p.seed = seed;
  return p;
}

VIProblem<double> garnet_mdp(Index n_states, Index n_actions, Index branching,
                             double gamma, std::uint64_t seed) {
  Rng rng(seed);
  return garnet_mdp(GarnetMDP::draw(n_states, n_actions, branching, gamma, rng),
                    seed);
}

Vec value_iteration(const GarnetMDP& mdp, double tol,
                    std::int64_t max_iterations) {
  Vec v = Vec::Zero(mdp.n_states);
  for (std::int64_t it = 0; it < max_iterations; ++it) {
    Vec next = mdp.bellman(v);
    const double change = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (change <= tol) return v;
  }
  throw NumericError("value iteration did not reach the tolerance");
}

// ---------------------------------------------------------------------------
// Strongly monotone affine

AffineData AffineData::draw(Index n, Rng& rng) {
  if (n < 1) throw InvalidInputError("affine: n must be >= 1");
  const Mat A = uniform_matrix(n, n, -5, 5, rng);
  Mat B = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      B(i, j) = rng.uniform(-5, 5);
      B(j, i) = -B(i, j);
    }
  }
  const Vec D = rng.uniform_vector(n, 0, 0.3);
  AffineData d;
  d.M = A * A.transpose() + B;
  d.M.diagonal() += D;
  d.q = rng.uniform_vector(n, -500, 0);
  d.radius = static_cast<double>(n);
  return d;
}

VIProblem<double> strongly_monotone_affine(const AffineData& data,
                                           std::uint64_t seed) {
  const Index n = data.M.rows();
  if (n < 1 || data.M.cols() != n || data.q.size() != n) {
    throw InvalidInputError("affine: M must be square and match q");
  }
  VIProblem<double> p;
  p.dim = n;
  p.op = [M = data.M, q = data.q](const Vec& x) -> Vec { return M * x + q; };
  attach_regularizer<double>(p, FeasibleSetSpec<double>::simplex(data.radius));
  p.lipschitz = spectral_norm(data.M);
  const double mu = min_symmetric_eigenvalue(data.M);
  if (mu > 0) p.strong_monotonicity = mu;
  p.monotone = mu >= 0;
  p.name = "affine";
  p.seed = seed;
  return p;
}

VIProblem<double> strongly_monotone_affine(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return strongly_monotone_affine(AffineData::draw(n, rng), seed);
}

std::optional<Vec> polish_affine_simplex(const Mat& M, const Vec& q,
                                         double radius, const Vec& guess,
                                         int max_rounds) {
  const Index n = M.rows();
  if (guess.size() != n) throw InvalidInputError("polish: guess length");
  if (max_rounds <= 0) max_rounds = static_cast<int>(20 * n + 50);
  std::vector<char> in(n, 0);
  const double cut = 1e-9 * radius;
  for (Index i = 0; i < n; ++i) in[i] = guess[i] > cut;
  if (std::none_of(in.begin(), in.end(), [](char c) { return c != 0; })) {
    Index best;
    q.minCoeff(&best);
    in[best] = 1;
  }
  const double scale = 1 + q.lpNorm<Eigen::Infinity>();
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<Index> S;
    for (Index i = 0; i < n; ++i) {
      if (in[i]) S.push_back(i);
    }
    const Index k = static_cast<Index>(S.size());
    Mat K = Mat::Zero(k + 1, k + 1);
    Vec rhs(k + 1);
    for (Index a = 0; a < k; ++a) {
      for (Index b = 0; b < k; ++b) K(a, b) = M(S[a], S[b]);
      K(a, k) = -1;
      K(k, a) = 1;
      rhs[a] = -q[S[a]];
    }
    rhs[k] = radius;
    const Vec sol = K.partialPivLu().solve(rhs);
    if (!sol.allFinite()) return std::nullopt;
    Index worst = -1;
    double most_negative = -1e-13 * radius;
    for (Index a = 0; a < k; ++a) {
      if (sol[a] < most_negative) {
        most_negative = sol[a];
        worst = a;
      }
    }
    if (worst >= 0) {
      in[S[worst]] = 0;
      continue;
    }
    Vec x = Vec::Zero(n);
    for (Index a = 0; a < k; ++a) x[S[a]] = std::max(sol[a], 0.0);
    const double nu = sol[k];
    const Vec F = M * x + q;
    Index add = -1;
    double lowest = -1e-12 * scale;
    for (Index i = 0; i < n; ++i) {
      if (!in[i] && F[i] - nu < lowest) {
        lowest = F[i] - nu;
        add = i;
      }
    }
    if (add < 0) return x;
    in[add] = 1;
  }
  return std::nullopt;
}

double affine_simplex_kkt_error(const Mat& M, const Vec& q, double radius,
                                const Vec& x) {
  const Vec F = M * x + q;
  const Vec z = x - F;
  const Vec p = project_simplex(z, radius);
  double tau = 0;
  int count = 0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0) {
      tau += z[i] - p[i];
      ++count;
    }
  }
  tau /= std::max(count, 1);
  const double nu = -tau;
  double err = std::abs(x.sum() - radius);
  for (Index i = 0; i < x.size(); ++i) {
    err = std::max(err, std::max(-x[i], 0.0));
    err = std::max(err, std::abs(std::min(x[i], F[i] - nu)));
  }
  return err;
}

// ---------------------------------------------------------------------------
// Non-monotone rank-two operator

NonmonotoneData NonmonotoneData::draw(Index n, Rng& rng) {
  if (n < 1) throw InvalidInputError("nonmonotone: n must be >= 1");
  NonmonotoneData d;
  d.A = normal_matrix(n, n, rng);
  d.B = normal_matrix(n, n, rng);
  return d;
}

VIProblem<double> nonmonotone_rank2(const NonmonotoneData& data,
                                    std::uint64_t seed) {
  const Index n = data.A.rows();
  if (n < 1 || data.A.cols() != n || data.B.rows() != n || data.B.cols() != n) {
    throw InvalidInputError("nonmonotone: A and B must be square and equal size");
  }
  VIProblem<double> p;
  p.dim = n;
  p.op = [A = data.A, B = data.B](const Vec& x) -> Vec {
    const Vec t1 = A * x.array().sin().matrix();
    const Vec t2 = B * x.array().exp().matrix();
    return t1 * t1.dot(x) + t2 * t2.dot(x);
  };
  attach_regularizer<double>(p, FeasibleSetSpec<double>::whole_space());
  p.monotone = false;
  p.name = "nonmonotone";
  p.seed = seed;
  return p;
}

VIProblem<double> nonmonotone_rank2(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return nonmonotone_rank2(NonmonotoneData::draw(n, rng), seed);
}

// ---------------------------------------------------------------------------
// Families and snapshots

std::string_view family_name(Family f) {
  switch (f) {
    case Family::kNashCournot: return "nash-cournot";
    case Family::kLogistic: return "logistic";
    case Family::kZeroSum: return "zero-sum";
    case Family::kMdp: return "mdp";
    case Family::kAffine: return "affine";
    case Family::kNonmonotone: return "nonmonotone";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

std::string family_names_joined() {
  std::string out;
  for (Family f : kAllFamilies) {
    if (!out.empty()) out += ", ";
    out += family_name(f);
  }
  return out;
}

Json matrix_to_json(const Mat& M) {
  Json data = Json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) data.push_back(M(i, j));
  }
  return Json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(data)}};
}

Json vector_to_json(const Vec& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Mat matrix_from_json(const Json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows * cols) {
    throw InvalidInputError("snapshot: matrix shape does not match data");
  }
  Mat M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) M(i, k) = data[i * cols + k].get<double>();
  }
  return M;
}

Vec vector_from_json(const Json& j) {
  Vec v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

std::uint64_t snapshot_hash(const Json& snapshot) {
  const std::string text = snapshot.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t BenchmarkInstance::hash() const { return snapshot_hash(snapshot); }

namespace {

Index pick(Index value, Index fallback) { return value > 0 ? value : fallback; }

Vec simplex_start(Index size, Rng& rng) {
  Vec u(size);
  for (Index i = 0; i < size; ++i) u[i] = 1 - rng.uniform();
  return u / u.sum();
}

Json transitions_to_json(const GarnetMDP& mdp) {
  Json rows = Json::array();
  for (const auto& row : mdp.transition) {
    Json r = Json::array();
    for (const auto& [s, pr] : row) r.push_back(Json::array({s, pr}));
    rows.push_back(std::move(r));
  }
  return rows;
}

BenchmarkInstance finish(Family family, VIProblem<double> problem, Vec x0,
                         Json params, Json data, std::uint64_t seed) {
  BenchmarkInstance inst;
  inst.family = family;
  inst.problem = std::move(problem);
  inst.x0 = std::move(x0);
  inst.snapshot = Json{{"family", std::string(family_name(family))},
                       {"seed", seed},
                       {"params", std::move(params)},
                       {"data", std::move(data)},
                       {"x0", vector_to_json(inst.x0)}};
  return inst;
}

BenchmarkInstance build_nash(const NashCournotParams& np, NashScenario scenario,
                             Vec x0, std::uint64_t seed) {
  Json params{{"n", np.n},
              {"scenario", scenario == NashScenario::kI ? "i" : "ii"},
              {"gamma", np.gamma}};
  Json data{{"beta", vector_to_json(np.beta)},
            {"c", vector_to_json(np.c)},
            {"L", vector_to_json(np.L_cap)}};
  return finish(Family::kNashCournot, nash_cournot(np, seed), std::move(x0),
                std::move(params), std::move(data), seed);
}

BenchmarkInstance build_logistic(const LogisticData& d, Vec x0,
                                 std::uint64_t seed) {
  Json params{{"n", d.A.cols()}, {"m", d.A.rows()}, {"gamma", d.gamma}};
  Json data{{"A", matrix_to_json(d.A)}, {"b", vector_to_json(d.b)}};
  return finish(Family::kLogistic, sparse_logistic(d, seed), std::move(x0),
                std::move(params), std::move(data), seed);
}

BenchmarkInstance build_zero_sum(const Mat& A, Vec x0, std::uint64_t seed) {
  Json params{{"m", A.rows()}, {"n", A.cols()}};
  Json data{{"A", matrix_to_json(A)}};
  BenchmarkInstance inst =
      finish(Family::kZeroSum, zero_sum_game_from(A, seed), std::move(x0),
             std::move(params), std::move(data), seed);
  inst.payoff = A;
  return inst;
}

BenchmarkInstance build_mdp(const GarnetMDP& mdp, Vec x0, std::uint64_t seed) {
  Json params{{"n", mdp.n_states},
              {"m", mdp.n_actions},
              {"branching", mdp.branching},
              {"discount", mdp.gamma}};
  Json data{{"cost", matrix_to_json(mdp.cost)},
            {"transition", transitions_to_json(mdp)}};
  BenchmarkInstance inst =
      finish(Family::kMdp, garnet_mdp(mdp, seed), std::move(x0),
             std::move(params), std::move(data), seed);
  inst.reference = value_iteration(mdp, 1e-13);
  return inst;
}

BenchmarkInstance build_affine(const AffineData& d, Vec x0, std::uint64_t seed) {
  Json params{{"n", d.M.rows()}, {"radius", d.radius}};
  Json data{{"M", matrix_to_json(d.M)}, {"q", vector_to_json(d.q)}};
  BenchmarkInstance inst =
      finish(Family::kAffine, strongly_monotone_affine(d, seed), std::move(x0),
             std::move(params), std::move(data), seed);
  inst.reference = polish_affine_simplex(d.M, d.q, d.radius, inst.x0);
  return inst;
}

BenchmarkInstance build_nonmonotone(const NonmonotoneData& d, Vec x0,
                                    std::uint64_t seed) {
  Json params{{"n", d.A.rows()}};
  Json data{{"A", matrix_to_json(d.A)}, {"B", matrix_to_json(d.B)}};
  BenchmarkInstance inst =
      finish(Family::kNonmonotone, nonmonotone_rank2(d, seed), std::move(x0),
             std::move(params), std::move(data), seed);
  inst.reference = Vec::Zero(d.A.rows());
  return inst;
}

}  // namespace

BenchmarkInstance make_instance(Family family, const FamilyParams& fp) {
  const std::uint64_t seed = fp.seed;
  Rng rng(seed);
  switch (family) {
    case Family::kNashCournot: {
      const Index n = pick(fp.n, 1000);
      const NashCournotParams np = NashCournotParams::draw(fp.scenario, n, rng);
      Vec x0 = rng.uniform_vector(n, 0, 1);
      return build_nash(np, fp.scenario, std::move(x0), seed);
    }
    case Family::kLogistic: {
      const Index n = pick(fp.n, 500);
      const LogisticData d = LogisticData::draw(n, pick(fp.m, 200), rng);
      Vec x0 = rng.uniform_vector(n, 0, 1);
      return build_logistic(d, std::move(x0), seed);
    }
    case Family::kZeroSum: {
      const Index m = pick(fp.m, 50);
      const Index n = pick(fp.n, 50);
      if (m < 1 || n < 1) throw InvalidInputError("zero-sum: m, n must be >= 1");
      const Mat A = uniform_matrix(m, n, 0, 1, rng);
      Vec x0(m + n);
      x0.head(m) = simplex_start(m, rng);
      x0.tail(n) = simplex_start(n, rng);
      return build_zero_sum(A, std::move(x0), seed);
    }
    case Family::kMdp: {
      const Index n = pick(fp.n, 50);
      const GarnetMDP mdp = GarnetMDP::draw(
          n, pick(fp.m, 5), pick(fp.branching, default_branching(n)),
          fp.discount, rng);
      Vec x0 = rng.uniform_vector(n, 0, 1);
      return build_mdp(mdp, std::move(x0), seed);
    }
    case Family::kAffine: {
      const Index n = pick(fp.n, 100);
      const AffineData d = AffineData::draw(n, rng);
      return build_affine(d, Vec::Ones(n), seed);
    }
    case Family::kNonmonotone: {
      const Index n = pick(fp.n, 500);
      const NonmonotoneData d = NonmonotoneData::draw(n, rng);
      Vec x0 = rng.uniform_vector(n, 0, 1e-3);
      return build_nonmonotone(d, std::move(x0), seed);
    }
  }
  throw InvalidInputError("unknown family");
}

BenchmarkInstance instance_from_snapshot(const Json& s) {
  const auto family = parse_family(s.at("family").get<std::string>());
  if (!family) throw InvalidInputError("snapshot: unknown family");
  const std::uint64_t seed = s.at("seed").get<std::uint64_t>();
  const Json& params = s.at("params");
  const Json& data = s.at("data");
  Vec x0 = vector_from_json(s.at("x0"));
  switch (*family) {
    case Family::kNashCournot: {
      NashCournotParams np;
      np.n = params.at("n").get<Index>();
      np.gamma = params.at("gamma").get<double>();
      np.beta = vector_from_json(data.at("beta"));
      np.c = vector_from_json(data.at("c"));
      np.L_cap = vector_from_json(data.at("L"));
      const NashScenario sc = params.at("scenario").get<std::string>() == "ii"
                                  ? NashScenario::kII
                                  : NashScenario::kI;
      return build_nash(np, sc, std::move(x0), seed);
    }
    case Family::kLogistic: {
      LogisticData d;
      d.A = matrix_from_json(data.at("A"));
      d.b = vector_from_json(data.at("b"));
      d.D = -(d.b.asDiagonal() * d.A);
      d.gamma = params.at("gamma").get<double>();
      return build_logistic(d, std::move(x0), seed);
    }
    case Family::kZeroSum:
      return build_zero_sum(matrix_from_json(data.at("A")), std::move(x0), seed);
    case Family::kMdp: {
      GarnetMDP mdp;
      mdp.n_states = params.at("n").get<Index>();
      mdp.n_actions = params.at("m").get<Index>();
      mdp.branching = params.at("branching").get<Index>();
      mdp.gamma = params.at("discount").get<double>();
      mdp.cost = matrix_from_json(data.at("cost"));
      for (const auto& row : data.at("transition")) {
        std::vector<std::pair<Index, double>> r;
        for (const auto& e : row) r.emplace_back(e[0].get<Index>(), e[1].get<double>());
        mdp.transition.push_back(std::move(r));
      }
      return build_mdp(mdp, std::move(x0), seed);
    }
    case Family::kAffine: {
      AffineData d;
      d.M = matrix_from_json(data.at("M"));
      d.q = vector_from_json(data.at("q"));
      d.radius = params.at("radius").get<double>();
      return build_affine(d, std::move(x0), seed);
    }
    case Family::kNonmonotone: {
      NonmonotoneData d;
      d.A = matrix_from_json(data.at("A"));
      d.B = matrix_from_json(data.at("B"));
      return build_nonmonotone(d, std::move(x0), seed);
    }
  }
  throw InvalidInputError("snapshot: unknown family");
}

}  // namespace goldvi
