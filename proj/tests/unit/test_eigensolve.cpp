#include <doctest.h>

#include "cylspec/assembly.hpp"
#include "cylspec/eigensolve.hpp"
#include "cylspec/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace cylspec;

namespace {

SparseSym diag(std::vector<double> d) {
  DenseMatrix a(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
  return SparseSym::from_dense(a);
}

SparseSym laplace1(int n, double s = 1.0) {
  DenseMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0 * s;
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -s;
  }
  return SparseSym::from_dense(a);
}

// Random sparse SPD pair: a graph Laplacian plus a positive diagonal for K, a
// diagonally dominant M.
std::pair<SparseSym, SparseSym> random_pair(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  DenseMatrix k(n, n), m(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = u(rng);
    m(i, i) = 1.0 + u(rng);
  }
  for (int e = 0; e < 3 * n; ++e) {
    const int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    const double w = u(rng);
    k(i, i) += w, k(j, j) += w, k(i, j) -= w, k(j, i) -= w;
    const double c = 0.1 * u(rng);
    m(i, i) += c, m(j, j) += c, m(i, j) += c, m(j, i) += c;
  }
  return {SparseSym::from_dense(k), SparseSym::from_dense(m)};
}

int bandwidth(const SparseSym& a, const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  int b = 0;
  for (int i = 0; i < a.n(); ++i)
    for (int p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) b = std::max(b, std::abs(inv[i] - inv[a.col()[p]]));
  return b;
}

void check_invariants(const SparseSym& K, const SparseSym& M, const EigenResult& r, double tol) {
  for (std::size_t i = 1; i < r.values.size(); ++i) CHECK(r.values[i] >= r.values[i - 1]);
  for (double res : r.residuals) CHECK(res <= tol);
  for (std::size_t i = 0; i < r.vectors.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const auto mx = M.multiply(r.vectors[j]);
      CHECK(std::abs(dot(r.vectors[i], mx) - (i == j ? 1.0 : 0.0)) <= 1e-8);
    }
  for (std::size_t i = 0; i < r.values.size(); ++i)
    CHECK(relative_residual(K, M, r.values[i], r.vectors[i]) <= tol);
}

}  // namespace

TEST_SUITE("eigensolve") {

TEST_CASE("LDLT pivots and solves") {
  const auto f = factorize(diag({2.0, 3.0}));
  auto p = f.diagonal();
  CHECK(p[0] == 2.0);
  CHECK(p[1] == 3.0);

  const auto t = factorize(laplace1(3));
  const auto& d = t.pivots();
  REQUIRE(d.size() == 3);
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[1] == doctest::Approx(1.5));
  CHECK(d[2] == doctest::Approx(4.0 / 3.0));

  const auto [K, M] = random_pair(80, 4);
  const auto fk = factorize(K);
  std::vector<double> x(80);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (auto& v : x) v = g(rng);
  const auto back = fk.solve(K.multiply(x));
  double err = 0.0;
  for (int i = 0; i < 80; ++i) err = std::max(err, std::abs(back[i] - x[i]));
  CHECK(err <= 1e-10);

  DenseMatrix bad(2, 2);
  bad(0, 0) = 1, bad(0, 1) = bad(1, 0) = 2, bad(1, 1) = 1;
  CHECK_THROWS_WITH_AS(factorize(SparseSym::from_dense(bad)), doctest::Contains("not positive definite"), SolverError);
}

TEST_CASE("RCM is a bandwidth-reducing permutation") {
  const auto pair = assemble(mesh_box2(0, 4, 0, 1, 24, 6, true), CoefficientField::identity(1, 1), 1);
  // Shuffle the numbering, then let RCM recover a narrow band.
  std::vector<int> shuffle(pair.n());
  for (int i = 0; i < pair.n(); ++i) shuffle[i] = i;
  std::shuffle(shuffle.begin(), shuffle.end(), std::mt19937_64(2));
  std::vector<int> rows, cols;
  std::vector<double> vals;
  const auto& K = pair.K;
  for (int i = 0; i < K.n(); ++i)
    for (int p = K.row_ptr()[i]; p < K.row_ptr()[i + 1]; ++p) {
      rows.push_back(shuffle[i]);
      cols.push_back(shuffle[K.col()[p]]);
      vals.push_back(K.val()[p]);
    }
  const auto S = SparseSym::from_triplets(K.n(), rows, cols, vals);
  const auto perm = reverse_cuthill_mckee(S);
  CHECK(std::set<int>(perm.begin(), perm.end()).size() == static_cast<std::size_t>(S.n()));
  std::vector<int> ident(S.n());
  for (int i = 0; i < S.n(); ++i) ident[i] = i;
  CHECK(bandwidth(S, perm) < bandwidth(S, ident) / 4);
  CHECK(bandwidth(S, perm) <= 2 * 7);
}

TEST_CASE("diagonal and identity pencils") {
  const auto r = smallest_eigenpairs(diag({2.0, 3.0, 10.0}), diag({1.0, 1.0, 1.0}), 2);
  CHECK(r.values[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.values[1] == doctest::Approx(3.0).epsilon(1e-12));
  const auto id = dense_oracle(diag({1, 1, 1}), diag({1, 1, 1}), 3);
  for (double v : id.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("P1 pencil closed form") {
  // λ_k = (6/h²)(1 − cos kπh)/(2 + cos kπh) for the Dirichlet interval.
  const int n = 10;
  const double h = 1.0 / n;
  const auto pair = assemble(mesh_interval(0.0, 1.0, n), CoefficientField::identity(0, 1), 0);
  const auto r = smallest_eigenpairs(pair, 4);
  const auto o = dense_oracle(pair, 4);
  for (int k = 1; k <= 4; ++k) {
    const double c = std::cos(k * std::numbers::pi * h);
    const double exact = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
    CHECK(std::abs(r.values[k - 1] - exact) <= 1e-9 * exact);
    CHECK(std::abs(o.values[k - 1] - exact) <= 1e-11 * exact);
  }
  check_invariants(pair.K, pair.M, r, 1e-10);
  double s = 0.0;
  for (double v : r.vectors[0]) s += v;
  CHECK(s > 0.0);
}

TEST_CASE("cross-section Laplacian near π²") {
  const auto pair = assemble(mesh_interval(0.0, 1.0, 64), CoefficientField::identity(0, 1), 0);
  const double lam = smallest_eigenpairs(pair, 1).values[0];
  CHECK(lam >= std::numbers::pi * std::numbers::pi);
  CHECK(lam <= std::numbers::pi * std::numbers::pi + 0.01);
}

TEST_CASE("Lanczos agrees with the dense oracle on random pencils") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto [K, M] = random_pair(120, seed);
    const auto r = smallest_eigenpairs(K, M, 5);
    const auto o = dense_oracle(K, M, 5);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(r.values[i] - o.values[i]) <= 1e-8 * std::abs(o.values[i]));
    check_invariants(K, M, r, 1e-10);
  }
}

TEST_CASE("double eigenvalues are recovered") {
  // Dirichlet square: λ₂ = λ₃ by symmetry.
  const auto pair = assemble(mesh_box2(0, 1, 0, 1, 12, 12), CoefficientField::identity(1, 1), 1);
  const auto r = smallest_eigenpairs(pair, 3);
  const auto o = dense_oracle(pair, 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r.values[i] - o.values[i]) <= 1e-8 * o.values[i]);
  CHECK(std::abs(r.values[1] - r.values[2]) <= 1e-8 * r.values[1]);
  check_invariants(pair.K, pair.M, r, 1e-10);
}

TEST_CASE("determinism under a fixed seed") {
  const auto [K, M] = random_pair(90, 8);
  EigenOptions opt;
  opt.seed = 17;
  const auto a = smallest_eigenpairs(K, M, 3, opt);
  const auto b = smallest_eigenpairs(K, M, 3, opt);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("tridiagonal QL agrees with Jacobi") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 12;
  std::vector<double> d(n), e(n - 1);
  DenseMatrix a(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = d[i] = u(rng);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = e[i] = u(rng);
  const auto t = tridiagonal_eigen(d, e);
  const auto j = jacobi_eigen(a);
  for (int i = 0; i < n; ++i) CHECK(std::abs(t.values[i] - j.values[i]) <= 1e-13);
}

TEST_CASE("failure modes") {
  CHECK_THROWS_WITH_AS(smallest_eigenpairs(diag({1, 2}), diag({1, 1}), 3), doctest::Contains("n < k"), SolverError);
  const auto pair = assemble(mesh_box2(0, 1, 0, 1, 20, 20, true), CoefficientField::identity(1, 1), 1);
  EigenOptions opt;
  opt.max_iter = 2;
  try {
    smallest_eigenpairs(pair, 2, opt);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK_FALSE(e.best_residuals().empty());
  }
}

}  // TEST_SUITE
