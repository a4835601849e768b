#pragma once

#include "cylspec/dense.hpp"
#include "cylspec/expr.hpp"
#include "cylspec/geometry.hpp"

#include <span>
#include <string>
#include <vector>

namespace cylspec {

/// Symmetric (m+p)×(m+p) matrix field A(ξ) = [A11 A12; A12ᵀ A22].
/// Coordinates are (X₁..X_m, ξ₁..ξ_p); entries depend on ξ only.
/// m = 0 is allowed and describes a pure cross-section operator.
class CoefficientField {
public:
  /// `entries` is row-major with (m+p)² expressions. Throws CoefficientError
  /// on a size mismatch or if an entry uses a variable beyond ξ_p.
  CoefficientField(int m, int p, std::vector<Expr> entries);

  static CoefficientField identity(int m, int p);
  static CoefficientField constant(int m, int p, const DenseMatrix& a);
  /// Parses each string with parse_expr.
  static CoefficientField parse(int m, int p, const std::vector<std::vector<std::string>>& rows);

  int m() const noexcept { return m_; }
  int p() const noexcept { return p_; }
  int n() const noexcept { return m_ + p_; }

  const Expr& entry(int i, int j) const { return entries_[i * n() + j]; }
  bool is_constant() const;

  /// A(ξ), symmetrised as (E + Eᵀ)/2 so assembly never sees roundoff asymmetry.
  DenseMatrix evaluate(std::span<const double> xi) const;
  /// A(ξ) exactly as the entries evaluate.
  DenseMatrix evaluate_raw(std::span<const double> xi) const;

  /// A11 (m×m) and A12 (m×p) as row-major expression grids.
  std::vector<Expr> a11() const;
  std::vector<Expr> a12() const;
  /// A22 as a field with m = 0, the operator of the cross-section problem.
  CoefficientField a22() const;

  std::vector<std::vector<std::string>> to_strings() const;

private:
  int m_;
  int p_;
  std::vector<Expr> entries_;
};

struct EllipticityBounds {
  double c_A;
  double C_A;
};

/// Midpoint sample grid over ω₂: grid_n points per ξ-direction at cell
/// centres. Returns min λ_min(A(ξ)) and max ‖A(ξ)‖₂ via cyclic Jacobi.
/// Throws CoefficientError if A is non-symmetric (1e-12) at a sample or if
/// c_A ≤ 0 ("not elliptic on sample grid").
EllipticityBounds verify_ellipticity(const CoefficientField& a, const CrossSectionSpec& cross, int grid_n = 64);

/// Sample points used by verify_ellipticity.
std::vector<std::vector<double>> sample_grid(const CrossSectionSpec& cross, int grid_n);

/// A_ν = [[νᵀA11ν, νᵀA12],[(νᵀA12)ᵀ, A22]] as a (1+p)×(1+p) field.
CoefficientField reduce_direction(const CoefficientField& a, const Direction& nu);

/// A^B = [[B A11 Bᵀ, B A12],[(B A12)ᵀ, A22]] for orthogonal B (m×m).
CoefficientField conjugate_rotation(const CoefficientField& a, const DenseMatrix& b);

/// Orthogonal B whose first row is ν and second row ν⊥ = (−ν₂, ν₁).
DenseMatrix rotation_from_direction(const Direction& nu);

}  // namespace cylspec
