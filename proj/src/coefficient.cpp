#include "cylspec/coefficient.hpp"

#include "cylspec/error.hpp"

#include <algorithm>
#include <cmath>

namespace cylspec {

CoefficientField::CoefficientField(int m, int p, std::vector<Expr> entries)
    : m_(m), p_(p), entries_(std::move(entries)) {
  if (m < 0 || p < 1) throw CoefficientError("coefficient needs m >= 0 and p >= 1");
  if (static_cast<int>(entries_.size()) != n() * n())
    throw CoefficientError("coefficient needs " + std::to_string(n() * n()) + " entries");
  for (const auto& e : entries_)
    if (e.arity() > p_) throw CoefficientError("entry " + e.to_string() + " uses a variable beyond xi" + std::to_string(p_));
}

CoefficientField CoefficientField::identity(int m, int p) {
  const int n = m + p;
  std::vector<Expr> e(n * n, Expr::constant(0.0));
  for (int i = 0; i < n; ++i) e[i * n + i] = Expr::constant(1.0);
  return CoefficientField(m, p, std::move(e));
}

CoefficientField CoefficientField::constant(int m, int p, const DenseMatrix& a) {
  const int n = m + p;
  if (static_cast<int>(a.rows()) != n || static_cast<int>(a.cols()) != n)
    throw CoefficientError("constant coefficient has the wrong size");
  std::vector<Expr> e;
  e.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e.push_back(Expr::constant(a(i, j)));
  return CoefficientField(m, p, std::move(e));
}

CoefficientField CoefficientField::parse(int m, int p, const std::vector<std::vector<std::string>>& rows) {
  const int n = m + p;
  if (static_cast<int>(rows.size()) != n) throw CoefficientError("coefficient needs " + std::to_string(n) + " rows");
  std::vector<Expr> e;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n)
      throw CoefficientError("coefficient row needs " + std::to_string(n) + " entries");
    for (const auto& s : r) e.push_back(parse_expr(s, p));
  }
  return CoefficientField(m, p, std::move(e));
}

bool CoefficientField::is_constant() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Expr& e) { return e.is_constant(); });
}

DenseMatrix CoefficientField::evaluate_raw(std::span<const double> xi) const {
  DenseMatrix a(n(), n());
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) a(i, j) = entry(i, j).evaluate(xi);
  return a;
}

DenseMatrix CoefficientField::evaluate(std::span<const double> xi) const {
  DenseMatrix a = evaluate_raw(xi);
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j) {
      const double s = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = s;
      a(j, i) = s;
    }
  return a;
}

std::vector<Expr> CoefficientField::a11() const {
  std::vector<Expr> e;
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) e.push_back(entry(i, j));
  return e;
}

CoefficientField CoefficientField::a22() const {
  std::vector<Expr> e;
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j) e.push_back(entry(m_ + i, m_ + j));
  return CoefficientField(0, p_, std::move(e));
}

std::vector<Expr> CoefficientField::a12() const {
  std::vector<Expr> e;
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < p_; ++j) e.push_back(entry(i, m_ + j));
  return e;
}

std::vector<std::vector<std::string>> CoefficientField::to_strings() const {
  std::vector<std::vector<std::string>> out(n());
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) out[i].push_back(entry(i, j).to_string());
  return out;
}

std::vector<std::vector<double>> sample_grid(const CrossSectionSpec& cross, int grid_n) {
  if (grid_n < 2) throw CoefficientError("sample grid needs grid_n >= 2");
  const int p = cross.dim();
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(p, 0);
  for (;;) {
    std::vector<double> xi(p);
    for (int j = 0; j < p; ++j) {
      const auto& iv = cross[j];
      xi[j] = iv.a + (idx[j] + 0.5) * iv.length() / grid_n;
    }
    pts.push_back(std::move(xi));
    int j = 0;
    while (j < p && ++idx[j] == grid_n) idx[j++] = 0;
    if (j == p) break;
  }
  return pts;
}

EllipticityBounds verify_ellipticity(const CoefficientField& a, const CrossSectionSpec& cross, int grid_n) {
  if (cross.dim() != a.p()) throw CoefficientError("coefficient p does not match the cross-section");
  double c = 1e300;
  double C = 0.0;
  for (const auto& xi : sample_grid(cross, grid_n)) {
    const DenseMatrix raw = a.evaluate_raw(xi);
    if (!raw.is_symmetric(1e-12)) throw CoefficientError("coefficient is not symmetric at a sample point");
    const auto eig = jacobi_eigen(raw);
    c = std::min(c, eig.values.front());
    C = std::max(C, std::max(std::abs(eig.values.front()), std::abs(eig.values.back())));
  }
  if (!(c > 0.0)) throw CoefficientError("not elliptic on sample grid");
  return {c, C};
}

CoefficientField reduce_direction(const CoefficientField& a, const Direction& nu) {
  const int m = a.m();
  const int p = a.p();
  if (nu.dim() != m) throw CoefficientError("direction dimension does not match m");
  const int nn = 1 + p;
  std::vector<Expr> e(nn * nn);

  std::vector<double> w;
  std::vector<Expr> terms;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      w.push_back(nu[i] * nu[j]);
      terms.push_back(a.entry(i, j));
    }
  e[0] = linear_combination(w, terms);

  for (int k = 0; k < p; ++k) {
    std::vector<double> wk;
    std::vector<Expr> tk;
    for (int i = 0; i < m; ++i) {
      wk.push_back(nu[i]);
      tk.push_back(a.entry(i, m + k));
    }
    e[1 + k] = linear_combination(wk, tk);
    std::vector<Expr> tkT;
    for (int i = 0; i < m; ++i) tkT.push_back(a.entry(m + k, i));
    e[(1 + k) * nn] = linear_combination(wk, tkT);
  }
  for (int r = 0; r < p; ++r)
    for (int s = 0; s < p; ++s) e[(1 + r) * nn + 1 + s] = a.entry(m + r, m + s);
  return CoefficientField(1, p, std::move(e));
}

CoefficientField conjugate_rotation(const CoefficientField& a, const DenseMatrix& b) {
  const int m = a.m();
  const int p = a.p();
  const int nn = m + p;
  if (static_cast<int>(b.rows()) != m || static_cast<int>(b.cols()) != m)
    throw CoefficientError("rotation has the wrong size");
  const DenseMatrix btb = b.transposed() * b;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (std::abs(btb(i, j) - (i == j ? 1.0 : 0.0)) > 1e-12) throw CoefficientError("rotation is not orthogonal");

  std::vector<Expr> e(nn * nn);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::vector<double> w;
      std::vector<Expr> t;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          w.push_back(b(i, k) * b(j, l));
          t.push_back(a.entry(k, l));
        }
      e[i * nn + j] = linear_combination(w, t);
    }
  for (int i = 0; i < m; ++i)
    for (int s = 0; s < p; ++s) {
      std::vector<double> w;
      std::vector<Expr> t, tT;
      for (int k = 0; k < m; ++k) {
        w.push_back(b(i, k));
        t.push_back(a.entry(k, m + s));
        tT.push_back(a.entry(m + s, k));
      }
      e[i * nn + m + s] = linear_combination(w, t);
      e[(m + s) * nn + i] = linear_combination(w, tT);
    }
  for (int r = 0; r < p; ++r)
    for (int s = 0; s < p; ++s) e[(m + r) * nn + m + s] = a.entry(m + r, m + s);
  return CoefficientField(m, p, std::move(e));
}

DenseMatrix rotation_from_direction(const Direction& nu) {
  if (nu.dim() == 1) {
    DenseMatrix b(1, 1);
    b(0, 0) = nu[0];
    return b;
  }
  DenseMatrix b(2, 2);
  b(0, 0) = nu[0];
  b(0, 1) = nu[1];
  b(1, 0) = -nu[1];
  b(1, 1) = nu[0];
  return b;
}

}  // namespace cylspec
