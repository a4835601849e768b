#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cylspec {

/// Row-major dense matrix for the small problems (coefficient blocks,
/// Lanczos tridiagonals, the dense reference eigensolver).
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  DenseMatrix transposed() const;
  bool is_symmetric(double tol) const;
  double max_abs_entry() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

/// Eigen-decomposition of a symmetric matrix. Values ascending; eigenvectors
/// are the columns of `vectors`.
struct SymmetricEigen {
  std::vector<double> values;
  DenseMatrix vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations, iterated until the off-diagonal mass is at
/// roundoff level relative to the Frobenius norm.
SymmetricEigen jacobi_eigen(const DenseMatrix& a, int max_sweeps = 100);

/// Eigen-decomposition of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal (implicit QL with Wilkinson shifts).
SymmetricEigen tridiagonal_eigen(std::span<const double> diag, std::span<const double> offdiag);

/// Lower Cholesky factor L with A = L Lᵀ. Throws if A is not positive definite.
DenseMatrix cholesky_lower(const DenseMatrix& a);

/// Solves L y = b in place (L lower triangular).
void forward_substitute(const DenseMatrix& lower, std::span<double> b);
/// Solves Lᵀ y = b in place (L lower triangular).
void backward_substitute_transposed(const DenseMatrix& lower, std::span<double> b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace cylspec
