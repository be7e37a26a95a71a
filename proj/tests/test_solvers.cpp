#include <catch2/catch_amalgamated.hpp>

#include "csr/rng.hpp"
#include "csr/solvers.hpp"

#include <cmath>
#include <utility>
#include <vector>

using namespace csr;

namespace {

Eigen::MatrixXd gaussian_matrix(Rng& rng, int m, int k) {
  Eigen::MatrixXd A(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) A(i, j) = rng.normal();
  return A;
}

// Exact basis-pursuit reference: enumerate all column subsets of size <= M
// (the optimum is attained at a vertex with support at most M), solve each
// square/least-squares system, keep the best feasible l1 objective.
double brute_force_bp(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  const int M = static_cast<int>(A.rows());
  const int K = static_cast<int>(A.cols());
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << K); ++mask) {
    const int cnt = __builtin_popcount(static_cast<unsigned>(mask));
    if (cnt > M) continue;
    std::vector<int> cols;
    for (int c = 0; c < K; ++c)
      if (mask & (1 << c)) cols.push_back(c);
    Eigen::MatrixXd As(M, cnt);
    for (int c = 0; c < cnt; ++c) As.col(c) = A.col(cols[c]);
    const Eigen::VectorXd ss = As.completeOrthogonalDecomposition().solve(y);
    if ((As * ss - y).norm() <= 1e-8 * std::max(1.0, y.norm()))
      best = std::min(best, ss.lpNorm<1>());
  }
  return best;
}

std::pair<int, int> top2_support(const Eigen::VectorXd& v) {
  int a = 0;
  for (int k = 1; k < v.size(); ++k)
    if (std::abs(v[k]) > std::abs(v[a])) a = k;
  int b = (a == 0) ? 1 : 0;
  for (int k = 0; k < v.size(); ++k)
    if (k != a && std::abs(v[k]) > std::abs(v[b])) b = k;
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

TEST_CASE("parameter validation") {
  REQUIRE_THROWS_AS(Sl0Params{.sigma_decrease = 0.0}.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(Sl0Params{.sigma_decrease = 1.0}.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(Sl0Params{.mu = 0.0}.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(Sl0Params{.inner_iters = 0}.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(Sl0Params{.sigma_min_ratio = 0.0}.validate(), std::invalid_argument);
  REQUIRE_NOTHROW(Sl0Params{}.validate());

  const Eigen::MatrixXd A = Eigen::MatrixXd::Ones(2, 3);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
  REQUIRE_THROWS_AS(sl0_solve(A, y), std::invalid_argument);
  REQUIRE_THROWS_AS(l1_solve(A, y), std::invalid_argument);
  REQUIRE_THROWS_AS(l1_solve(A, Eigen::VectorXd::Ones(2), 0.0), std::invalid_argument);
}

TEST_CASE("identity operator returns the measurements") {
  Rng rng(211);
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(6, 6);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) y[i] = rng.normal();

  const SparseSolution s0 = sl0_solve(A, y);
  REQUIRE((s0.s - y).norm() == 0.0);
  REQUIRE(s0.converged);

  const SparseSolution s1 = l1_solve(A, y);
  REQUIRE((s1.s - y).norm() <= 1e-9 * y.norm());
  REQUIRE(s1.converged);
}

TEST_CASE("zero measurements give the zero solution") {
  Rng rng(223);
  const Eigen::MatrixXd A = gaussian_matrix(rng, 4, 9);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
  REQUIRE(sl0_solve(A, y).s.norm() == 0.0);
  REQUIRE(l1_solve(A, y).s.norm() == 0.0);
}

TEST_CASE("one-row instance has the known closed-form optimum") {
  Eigen::MatrixXd A(1, 2);
  A << 1, 2;
  Eigen::VectorXd y(1);
  y << 2;
  const SparseSolution sol = l1_solve(A, y, 1e-12, 100000);
  REQUIRE(sol.converged);
  REQUIRE(sol.s[0] == Catch::Approx(0.0).margin(1e-8));
  REQUIRE(sol.s[1] == Catch::Approx(1.0).margin(1e-8));
  REQUIRE(sol.s.lpNorm<1>() == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("basis pursuit matches the exact vertex enumeration") {
  for (int t = 0; t < 100; ++t) {
    Rng rng(5000 + t);
    int K = 4 + static_cast<int>(rng.uniform_int(0, 4));
    int M = 2 + static_cast<int>(rng.uniform_int(0, 2));
    if (M >= K) M = K - 1;
    const Eigen::MatrixXd A = gaussian_matrix(rng, M, K);
    Eigen::VectorXd st = Eigen::VectorXd::Zero(K);
    st[rng.uniform_int(0, K - 1)] = rng.normal() * 2.0;
    const Eigen::VectorXd y = A * st;

    const SparseSolution sol = l1_solve(A, y, 1e-12, 200000);
    const double oracle = brute_force_bp(A, y);
    REQUIRE(sol.residual_norm <= 1e-8 * std::max(1.0, y.norm()));
    REQUIRE(std::abs(sol.s.lpNorm<1>() - oracle) <= 1e-6 * std::max(1.0, oracle));
  }
}

TEST_CASE("smoothed-l0 recovers 2-sparse supports and agrees with basis pursuit") {
  int support_ok = 0;
  int agree = 0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(1000 + t);
    const Eigen::MatrixXd A = gaussian_matrix(rng, 10, 20);
    Eigen::VectorXd s0 = Eigen::VectorXd::Zero(20);
    const int i = static_cast<int>(rng.uniform_int(0, 19));
    int j;
    do {
      j = static_cast<int>(rng.uniform_int(0, 19));
    } while (j == i);
    s0[i] = (rng.bernoulli(0.5) ? 1.0 : -1.0) * (1.0 + rng.uniform());
    s0[j] = (rng.bernoulli(0.5) ? 1.0 : -1.0) * (1.0 + rng.uniform());
    const Eigen::VectorXd y = A * s0;

    const SparseSolution sol = sl0_solve(A, y);
    const SparseSolution sol1 = l1_solve(A, y);
    const auto truth = std::pair<int, int>{std::min(i, j), std::max(i, j)};
    if (top2_support(sol.s) == truth) ++support_ok;
    if (top2_support(sol.s) == top2_support(sol1.s)) ++agree;
    REQUIRE(sol.residual_norm <= 1e-8 * std::max(1.0, y.norm()));
  }
  // Observed 98/100 for both rates with these seeds.
  REQUIRE(support_ok >= 95);
  REQUIRE(agree >= 95);
}

TEST_CASE("rank-deficient operators fall back to the pseudo-inverse") {
  Rng rng(307);
  Eigen::MatrixXd A(3, 6);
  A.row(0) = gaussian_matrix(rng, 1, 6);
  A.row(1) = A.row(0);  // duplicate measurement row
  A.row(2) = gaussian_matrix(rng, 1, 6);
  Eigen::VectorXd st = Eigen::VectorXd::Zero(6);
  st[2] = 3.0;
  const Eigen::VectorXd y = A * st;

  const SparseSolution s0 = sl0_solve(A, y);
  REQUIRE(s0.used_pseudoinverse);
  REQUIRE(s0.residual_norm <= 1e-8 * std::max(1.0, y.norm()));

  const SparseSolution s1 = l1_solve(A, y, 1e-10, 100000);
  REQUIRE(s1.used_pseudoinverse);
  REQUIRE(s1.residual_norm <= 1e-8 * std::max(1.0, y.norm()));
}

TEST_CASE("stored residual matches a recomputation") {
  Rng rng(311);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd A = gaussian_matrix(rng, 5, 12);
    Eigen::VectorXd y(5);
    for (int i = 0; i < 5; ++i) y[i] = rng.normal();
    for (const SparseSolution& sol : {sl0_solve(A, y), l1_solve(A, y)}) {
      REQUIRE(std::abs(sol.residual_norm - (A * sol.s - y).norm()) <= 1e-12);
      REQUIRE(sol.iterations > 0);
    }
  }
}

TEST_CASE("field recovery applies the basis") {
  const RepresentationBasis b = baseline_basis("diff", 4);
  Eigen::VectorXd s(4);
  s << 1, 2, 0, -1;
  const Eigen::VectorXd x = recover_field(b, s);
  Eigen::VectorXd expected(4);
  expected << 1, 3, 3, 2;
  REQUIRE((x - expected).norm() == 0.0);
  REQUIRE_THROWS_AS(recover_field(b, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}
