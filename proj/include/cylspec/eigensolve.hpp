#pragma once

#include "cylspec/assembly.hpp"
#include "cylspec/sparse.hpp"

#include <cstdint>
#include <vector>

namespace cylspec {

struct EigenResult {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // M-orthonormal, nonnegative component sum
  std::vector<double> residuals;             // ‖Kx − λMx‖₂ / ‖Kx‖₂
  int iterations = 0;
};

struct EigenOptions {
  double tol = 1e-10;
  double sigma = 0.0;
  std::uint64_t seed = 42;
  int max_iter = 0;  // 0 means 500·k
};

/// The k smallest eigenpairs of K x = λ M x by shift-invert Lanczos in the
/// M-inner product with full reorthogonalization. The Krylov run starts from
/// the M-normalized all-ones vector; verification runs from seeded random
/// vectors deflated against the accepted pairs recover eigenvalues the first
/// run could not see (multiplicities, symmetry-orthogonal modes).
/// Throws SolverError carrying the best residuals on non-convergence.
EigenResult smallest_eigenpairs(const SparseSym& K, const SparseSym& M, int k, const EigenOptions& opt = {});
EigenResult smallest_eigenpairs(const DiscreteOperatorPair& pair, int k, const EigenOptions& opt = {});

/// Dense reference: Cholesky of M, Jacobi on L⁻¹KL⁻ᵀ, back-transform. n ≤ 2000.
EigenResult dense_oracle(const SparseSym& K, const SparseSym& M, int k);
EigenResult dense_oracle(const DiscreteOperatorPair& pair, int k);

/// ‖Kx − λMx‖₂ / ‖Kx‖₂.
double relative_residual(const SparseSym& K, const SparseSym& M, double lambda, std::span<const double> x);

}  // namespace cylspec
