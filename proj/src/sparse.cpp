#include "cylspec/sparse.hpp"

#include "cylspec/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>

namespace cylspec {

SparseSym SparseSym::from_triplets(int n, std::span<const int> rows, std::span<const int> cols,
                                   std::span<const double> vals) {
  if (rows.size() != cols.size() || rows.size() != vals.size()) throw Error("triplet arrays differ in length");
  const std::size_t nt = rows.size();
  std::vector<std::size_t> order(nt);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t t) {
    const int r = rows[t], c = cols[t];
    return r >= c ? std::pair{r, c} : std::pair{c, r};
  };
  for (std::size_t t = 0; t < nt; ++t) {
    const auto [r, c] = key(t);
    if (r < 0 || r >= n || c < 0) throw Error("triplet index out of range");
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  SparseSym s;
  s.n_ = n;
  s.row_ptr_.assign(n + 1, 0);
  int last_r = -1, last_c = -1;
  for (std::size_t t : order) {
    const auto [r, c] = key(t);
    if (r == last_r && c == last_c) {
      s.val_.back() += vals[t];
      continue;
    }
    s.col_.push_back(c);
    s.val_.push_back(vals[t]);
    ++s.row_ptr_[r + 1];
    last_r = r;
    last_c = c;
  }
  for (int i = 0; i < n; ++i) s.row_ptr_[i + 1] += s.row_ptr_[i];
  return s;
}

SparseSym SparseSym::from_dense(const DenseMatrix& a, double drop) {
  std::vector<int> r, c;
  std::vector<double> v;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (i == j || std::abs(a(i, j)) > drop) {
        r.push_back(static_cast<int>(i));
        c.push_back(static_cast<int>(j));
        v.push_back(a(i, j));
      }
  return from_triplets(static_cast<int>(a.rows()), r, c, v);
}

void SparseSym::multiply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    const double xi = x[i];
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const int j = col_[k];
      s += val_[k] * x[j];
      if (j != i) y[j] += val_[k] * xi;
    }
    y[i] += s;
  }
}

std::vector<double> SparseSym::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

double SparseSym::quadratic_form(std::span<const double> x) const { return dot(x, multiply(x)); }

double SparseSym::value(int i, int j) const {
  if (i < j) std::swap(i, j);
  const auto b = col_.begin() + row_ptr_[i];
  const auto e = col_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(b, e, j);
  return it != e && *it == j ? val_[it - col_.begin()] : 0.0;
}

std::vector<double> SparseSym::diagonal() const {
  std::vector<double> d(n_);
  for (int i = 0; i < n_; ++i) d[i] = value(i, i);
  return d;
}

DenseMatrix SparseSym::to_dense() const {
  DenseMatrix a(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      a(i, col_[k]) = val_[k];
      a(col_[k], i) = val_[k];
    }
  return a;
}

void SparseSym::dump(std::ostream& os) const {
  os.precision(17);
  for (int i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) os << i << ' ' << col_[k] << ' ' << val_[k] << '\n';
}

SparseSym add_scaled(const SparseSym& a, const SparseSym& b, double alpha) {
  if (a.n() != b.n()) throw Error("add_scaled: dimension mismatch");
  std::vector<int> r, c;
  std::vector<double> v;
  for (const auto* m : {&a, &b}) {
    const double f = m == &a ? 1.0 : alpha;
    for (int i = 0; i < m->n(); ++i)
      for (int k = m->row_ptr()[i]; k < m->row_ptr()[i + 1]; ++k) {
        r.push_back(i);
        c.push_back(m->col()[k]);
        v.push_back(f * m->val()[k]);
      }
  }
  return SparseSym::from_triplets(a.n(), r, c, v);
}

namespace {

std::vector<std::vector<int>> adjacency(const SparseSym& a) {
  std::vector<std::vector<int>> adj(a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const int j = a.col()[k];
      if (j == i) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  for (auto& l : adj) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return adj;
}

// Level structure rooted at `root` restricted to unmarked nodes.
std::vector<std::vector<int>> level_structure(const std::vector<std::vector<int>>& adj, int root,
                                              const std::vector<char>& done) {
  std::vector<std::vector<int>> levels{{root}};
  std::vector<char> seen(adj.size(), 0);
  seen[root] = 1;
  for (;;) {
    std::vector<int> next;
    for (int v : levels.back())
      for (int w : adj[v])
        if (!seen[w] && !done[w]) {
          seen[w] = 1;
          next.push_back(w);
        }
    if (next.empty()) return levels;
    levels.push_back(std::move(next));
  }
}

int pseudo_peripheral(const std::vector<std::vector<int>>& adj, int start, const std::vector<char>& done) {
  int root = start;
  auto levels = level_structure(adj, root, done);
  for (;;) {
    const auto& last = levels.back();
    int best = last.front();
    for (int v : last)
      if (adj[v].size() < adj[best].size() || (adj[v].size() == adj[best].size() && v < best)) best = v;
    auto cand = level_structure(adj, best, done);
    if (cand.size() <= levels.size()) return root;
    root = best;
    levels = std::move(cand);
  }
}

}  // namespace

std::vector<int> reverse_cuthill_mckee(const SparseSym& a) {
  const int n = a.n();
  const auto adj = adjacency(a);
  std::vector<char> done(n, 0);
  std::vector<int> order;
  order.reserve(n);
  for (;;) {
    int start = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && (start < 0 || adj[i].size() < adj[start].size())) start = i;
    if (start < 0) break;
    const int root = pseudo_peripheral(adj, start, done);
    std::deque<int> queue{root};
    done[root] = 1;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      order.push_back(v);
      std::vector<int> nb;
      for (int w : adj[v])
        if (!done[w]) nb.push_back(w);
      std::sort(nb.begin(), nb.end(), [&](int x, int y) {
        return adj[x].size() != adj[y].size() ? adj[x].size() < adj[y].size() : x < y;
      });
      for (int w : nb) {
        done[w] = 1;
        queue.push_back(w);
      }
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

Factorization::Factorization(const SparseSym& a) : n_(a.n()) {
  perm_ = reverse_cuthill_mckee(a);
  inv_.assign(n_, 0);
  for (int i = 0; i < n_; ++i) inv_[perm_[i]] = i;

  first_.resize(n_);
  for (int i = 0; i < n_; ++i) first_[i] = i;
  for (int i = 0; i < n_; ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const int pi = inv_[i], pj = inv_[a.col()[k]];
      const int r = std::max(pi, pj), c = std::min(pi, pj);
      first_[r] = std::min(first_[r], c);
    }
  start_.assign(n_ + 1, 0);
  for (int i = 0; i < n_; ++i) start_[i + 1] = start_[i] + static_cast<std::size_t>(i - first_[i]);
  env_.assign(start_[n_], 0.0);
  d_.assign(n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const int pi = inv_[i], pj = inv_[a.col()[k]];
      const int r = std::max(pi, pj), c = std::min(pi, pj);
      if (r == c) d_[r] += a.val()[k];
      else env_[start_[r] + (c - first_[r])] += a.val()[k];
    }

  // Row-oriented profile LDLᵀ: g_j = a_ij − Σ_k g_k L_jk, L_ij = g_j / d_j.
  for (int i = 0; i < n_; ++i) {
    double* gi = env_.data() + start_[i];
    const int fi = first_[i];
    double di = d_[i];
    for (int j = fi; j < i; ++j) {
      const double* lj = env_.data() + start_[j];
      const int fj = first_[j];
      const int k0 = std::max(fi, fj);
      double s = gi[j - fi];
      for (int k = k0; k < j; ++k) s -= gi[k - fi] * lj[k - fj];
      gi[j - fi] = s;
    }
    for (int j = fi; j < i; ++j) {
      const double g = gi[j - fi];
      const double l = g / d_[j];
      di -= g * l;
      gi[j - fi] = l;
    }
    if (!(di > 0.0)) throw SolverError("matrix not positive definite at pivot " + std::to_string(i));
    d_[i] = di;
  }
}

void Factorization::solve_in_place(std::span<double> x) const {
  std::vector<double> y(n_);
  for (int i = 0; i < n_; ++i) y[i] = x[perm_[i]];
  for (int i = 0; i < n_; ++i) {
    const double* li = env_.data() + start_[i];
    double s = y[i];
    for (int j = first_[i]; j < i; ++j) s -= li[j - first_[i]] * y[j];
    y[i] = s;
  }
  for (int i = 0; i < n_; ++i) y[i] /= d_[i];
  for (int i = n_ - 1; i >= 0; --i) {
    const double* li = env_.data() + start_[i];
    const double yi = y[i];
    for (int j = first_[i]; j < i; ++j) y[j] -= li[j - first_[i]] * yi;
  }
  for (int i = 0; i < n_; ++i) x[perm_[i]] = y[i];
}

std::vector<double> Factorization::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

std::vector<double> Factorization::diagonal() const {
  std::vector<double> d(n_);
  for (int i = 0; i < n_; ++i) d[perm_[i]] = d_[i];
  return d;
}

double Factorization::lower(int i, int j) const {
  if (i == j) return 1.0;
  if (j > i || j < first_[i]) return 0.0;
  return env_[start_[i] + (j - first_[i])];
}

Factorization factorize(const SparseSym& a) { return Factorization(a); }

}  // namespace cylspec
