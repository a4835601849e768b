#pragma once

#include "cylspec/dense.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace cylspec {

/// Symmetric sparse matrix stored as the CSR lower triangle (diagonal
/// included, columns sorted within each row).
class SparseSym {
public:
  SparseSym() = default;

  /// Sums duplicate (row, col) entries in input order; entries above the
  /// diagonal are mirrored into the lower triangle.
  static SparseSym from_triplets(int n, std::span<const int> rows, std::span<const int> cols,
                                 std::span<const double> vals);
  static SparseSym from_dense(const DenseMatrix& a, double drop = 0.0);

  int n() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return col_.size(); }
  const std::vector<int>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<int>& col() const noexcept { return col_; }
  const std::vector<double>& val() const noexcept { return val_; }

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;

  double value(int i, int j) const;
  std::vector<double> diagonal() const;
  DenseMatrix to_dense() const;

  /// Coordinate text: "row col value" per stored lower-triangle entry.
  void dump(std::ostream& os) const;

private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> val_;
};

/// a + alpha·b on the union pattern.
SparseSym add_scaled(const SparseSym& a, const SparseSym& b, double alpha);

/// Reverse Cuthill–McKee ordering of the matrix graph: perm[new] = old.
/// Each component starts from a George–Liu pseudo-peripheral node; neighbours
/// are visited by increasing degree, then index.
std::vector<int> reverse_cuthill_mckee(const SparseSym& a);

/// Envelope (profile) LDLᵀ factorization of P A Pᵀ with P from RCM.
class Factorization {
public:
  /// Throws SolverError("matrix not positive definite at pivot i") on a
  /// nonpositive pivot, i counted in elimination order.
  explicit Factorization(const SparseSym& a);

  int n() const noexcept { return n_; }
  /// Solves A x = b.
  std::vector<double> solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> x) const;

  /// Pivots D in elimination order.
  const std::vector<double>& pivots() const noexcept { return d_; }
  /// Pivots mapped back to original indices.
  std::vector<double> diagonal() const;
  const std::vector<int>& permutation() const noexcept { return perm_; }
  /// Unit lower factor entry L(i, j) in elimination order.
  double lower(int i, int j) const;
  std::size_t envelope_size() const noexcept { return env_.size(); }

private:
  int n_ = 0;
  std::vector<int> perm_;
  std::vector<int> inv_;
  std::vector<int> first_;        // first column of row i in the envelope
  std::vector<std::size_t> start_;  // offset of row i in env_
  std::vector<double> env_;       // strictly lower rows, columns first_[i]..i-1
  std::vector<double> d_;
};

Factorization factorize(const SparseSym& a);

}  // namespace cylspec
