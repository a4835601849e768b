#include "cylspec/eigensolve.hpp"

#include "cylspec/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cylspec {

double relative_residual(const SparseSym& K, const SparseSym& M, double lambda, std::span<const double> x) {
  const auto kx = K.multiply(x);
  const auto mx = M.multiply(x);
  double r = 0.0, s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = kx[i] - lambda * mx[i];
    r += d * d;
    s += kx[i] * kx[i];
  }
  return s > 0.0 ? std::sqrt(r / s) : std::sqrt(r);
}

namespace {

struct Pair {
  double value;
  std::vector<double> vector;
  std::vector<double> mvector;
  double residual;
};

class Lanczos {
public:
  Lanczos(const SparseSym& K, const SparseSym& M, const Factorization& f, double tol, int max_steps,
          std::mt19937_64& rng)
      : K_(K), M_(M), f_(f), tol_(tol), max_steps_(max_steps), rng_(rng) {}

  int steps() const noexcept { return steps_; }

  // The `want` smallest eigenpairs in the M-orthogonal complement of `locked`.
  // An empty `start` draws a seeded random vector.
  std::vector<Pair> run(std::vector<double> start, int want, const std::vector<Pair>& locked) {
    const int n = K_.n();
    const int dim = n - static_cast<int>(locked.size());
    Q_.clear();
    MQ_.clear();
    alpha_.clear();
    beta_.clear();
    best_.assign(want, 1e300);

    std::vector<double> q = std::move(start);
    if (q.empty() || !normalize(q, locked)) q = random_vector(locked);
    for (;;) {
      Q_.push_back(q);
      MQ_.push_back(M_.multiply(q));
      ++steps_;
      std::vector<double> w = f_.solve(MQ_.back());
      const int j = static_cast<int>(Q_.size()) - 1;
      const double a = dot(MQ_[j], w);
      alpha_.push_back(a);
      for (int i = 0; i < n; ++i) w[i] -= a * Q_[j][i];
      if (j > 0)
        for (int i = 0; i < n; ++i) w[i] -= beta_[j - 1] * Q_[j - 1][i];
      orthogonalize(w, locked);
      orthogonalize(w, locked);
      const double b = std::sqrt(std::max(0.0, dot(w, M_.multiply(w))));

      const int m = j + 1;
      const bool exhausted = m >= dim;
      const bool breakdown = b <= 1e-12 * std::abs(a);
      if (m >= want && (m % 5 == 0 || exhausted || breakdown)) {
        auto pairs = check(want, b, exhausted);
        if (!pairs.empty()) return pairs;
      }
      if (exhausted) throw SolverError("Lanczos exhausted the space without meeting the tolerance", best_);
      if (steps_ >= max_steps_) throw SolverError("Lanczos did not converge within max_iter", best_);
      if (breakdown) {
        beta_.push_back(0.0);
        q = random_vector(locked);
      } else {
        beta_.push_back(b);
        for (auto& x : w) x /= b;
        q = std::move(w);
      }
    }
  }

  std::vector<double> random_vector(const std::vector<Pair>& locked) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      std::vector<double> v(K_.n());
      for (auto& x : v) x = 2.0 * std::ldexp(static_cast<double>(rng_() >> 11), -53) - 1.0;
      if (normalize(v, locked)) return v;
    }
    throw SolverError("could not draw a restart vector outside the Krylov space", best_);
  }

private:
  void orthogonalize(std::vector<double>& w, const std::vector<Pair>& locked) const {
    for (const auto& p : locked) {
      const double c = dot(p.mvector, w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * p.vector[i];
    }
    for (std::size_t k = 0; k < Q_.size(); ++k) {
      const double c = dot(MQ_[k], w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * Q_[k][i];
    }
  }

  bool normalize(std::vector<double>& v, const std::vector<Pair>& locked) const {
    const double before = std::sqrt(dot(v, M_.multiply(v)));
    orthogonalize(v, locked);
    orthogonalize(v, locked);
    const double nrm = std::sqrt(std::max(0.0, dot(v, M_.multiply(v))));
    if (!(nrm > 1e-8 * before)) return false;
    for (auto& x : v) x /= nrm;
    return true;
  }

  std::vector<Pair> check(int want, double b, bool exhausted) {
    const int m = static_cast<int>(alpha_.size());
    const auto t = tridiagonal_eigen(alpha_, std::span<const double>(beta_).first(m - 1));
    // Largest θ of (K − σM)⁻¹M are the smallest λ.
    std::vector<int> idx;
    for (int i = m - 1; i >= 0 && static_cast<int>(idx.size()) < want; --i) idx.push_back(i);
    if (!exhausted)
      for (int i : idx) {
        const double est = std::abs(b * t.vectors(m - 1, i));
        if (est > 1e-6 * std::abs(t.values[i])) return {};
      }
    std::vector<Pair> out;
    bool ok = true;
    for (int r = 0; r < want; ++r) {
      const int i = idx[r];
      std::vector<double> x(K_.n(), 0.0);
      for (int k = 0; k < m; ++k) {
        const double s = t.vectors(k, i);
        for (std::size_t l = 0; l < x.size(); ++l) x[l] += s * Q_[k][l];
      }
      auto mx = M_.multiply(x);
      const double nrm = std::sqrt(dot(x, mx));
      for (auto& v : x) v /= nrm;
      for (auto& v : mx) v /= nrm;
      const double lambda = K_.quadratic_form(x);
      const double res = relative_residual(K_, M_, lambda, x);
      best_[r] = std::min(best_[r], res);
      if (!(res <= tol_)) ok = false;
      out.push_back({lambda, std::move(x), std::move(mx), res});
    }
    if (!ok) return {};
    return out;
  }

  const SparseSym& K_;
  const SparseSym& M_;
  const Factorization& f_;
  double tol_;
  int max_steps_;
  std::mt19937_64& rng_;
  int steps_ = 0;
  std::vector<std::vector<double>> Q_, MQ_;
  std::vector<double> alpha_, beta_;
  std::vector<double> best_;
};

EigenResult finish(std::vector<Pair> pairs, int iterations) {
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.value < b.value; });
  EigenResult r;
  r.iterations = iterations;
  for (auto& p : pairs) {
    const double s = std::accumulate(p.vector.begin(), p.vector.end(), 0.0);
    if (s < 0.0)
      for (auto& v : p.vector) v = -v;
    r.values.push_back(p.value);
    r.residuals.push_back(p.residual);
    r.vectors.push_back(std::move(p.vector));
  }
  return r;
}

}  // namespace

EigenResult smallest_eigenpairs(const SparseSym& K, const SparseSym& M, int k, const EigenOptions& opt) {
  const int n = K.n();
  if (M.n() != n) throw SolverError("K and M differ in size");
  if (k < 1) throw SolverError("k must be at least 1");
  if (n < k) throw SolverError("n < k: the problem has fewer degrees of freedom than requested eigenpairs");
  if (!(opt.tol > 0.0)) throw SolverError("tolerance must be positive");

  const Factorization f(opt.sigma == 0.0 ? K : add_scaled(K, M, -opt.sigma));
  std::mt19937_64 rng(opt.seed);
  const int max_steps = opt.max_iter > 0 ? opt.max_iter : 500 * k;
  Lanczos lz(K, M, f, opt.tol, max_steps, rng);

  auto pairs = lz.run(std::vector<double>(n, 1.0), k, {});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.value < b.value; });

  for (int pass = 0; pass <= k && n > k; ++pass) {
    auto extra = lz.run({}, 1, pairs);
    const double lk = pairs.back().value;
    if (!(extra[0].value < lk - 1e-12 * std::abs(lk))) break;
    pairs.back() = std::move(extra[0]);
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.value < b.value; });
  }
  return finish(std::move(pairs), lz.steps());
}

EigenResult smallest_eigenpairs(const DiscreteOperatorPair& pair, int k, const EigenOptions& opt) {
  return smallest_eigenpairs(pair.K, pair.M, k, opt);
}

EigenResult dense_oracle(const SparseSym& K, const SparseSym& M, int k) {
  const int n = K.n();
  if (n > 2000) throw SolverError("dense oracle limited to n <= 2000");
  if (k < 1 || k > n) throw SolverError("dense oracle needs 1 <= k <= n");
  DenseMatrix L;
  try {
    L = cholesky_lower(M.to_dense());
  } catch (const Error&) {
    throw SolverError("dense oracle: M is not positive definite");
  }
  const DenseMatrix Kd = K.to_dense();
  // Y = L⁻¹K column by column, then C = L⁻¹Yᵀ.
  DenseMatrix Y(n, n);
  std::vector<double> col(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = Kd(i, j);
    forward_substitute(L, col);
    for (int i = 0; i < n; ++i) Y(i, j) = col[i];
  }
  DenseMatrix C(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = Y(j, i);
    forward_substitute(L, col);
    for (int i = 0; i < n; ++i) C(i, j) = col[i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double s = 0.5 * (C(i, j) + C(j, i));
      C(i, j) = s;
      C(j, i) = s;
    }
  const auto eig = jacobi_eigen(C);
  std::vector<Pair> pairs;
  for (int r = 0; r < k; ++r) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = eig.vectors(i, r);
    backward_substitute_transposed(L, x);
    const double lambda = eig.values[r];
    pairs.push_back({lambda, x, {}, relative_residual(K, M, lambda, x)});
  }
  return finish(std::move(pairs), eig.sweeps);
}

EigenResult dense_oracle(const DiscreteOperatorPair& pair, int k) { return dense_oracle(pair.K, pair.M, k); }

}  // namespace cylspec
