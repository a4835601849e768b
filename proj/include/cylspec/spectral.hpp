#pragma once

#include "cylspec/assembly.hpp"
#include "cylspec/coefficient.hpp"
#include "cylspec/eigensolve.hpp"
#include "cylspec/geometry.hpp"
#include "cylspec/mesh.hpp"

#include <memory>
#include <vector>

namespace cylspec {

struct SolveOptions {
  EigenOptions eig;
  MeshFamily family = MeshFamily::Simplex;
  long dof_cap = 200000;
  int jobs = 1;
};

struct CrossSectionResult {
  double mu1 = 0.0;
  std::vector<double> W;  // nodal on `mesh`, zeros on ∂ω₂
  double gap_indicator = 0.0;
  double residual = 0.0;
  int dofs = 0;
  std::shared_ptr<const Mesh> mesh;
};

/// First Dirichlet eigenpair of −div(A₂₂∇W) = μ₁W on ω₂ with n cells per
/// axis, and the discrete L² norm of A₁₂∇W.
CrossSectionResult solve_cross_section(const CrossSectionSpec& cross, const CoefficientField& a, int n,
                                       const SolveOptions& opt = {});
/// Same with per-axis subdivision counts from target_h, matching the
/// ξ-resolution of solve_reduced / solve_full meshes built with target_h.
CrossSectionResult solve_cross_section_h(const CrossSectionSpec& cross, const CoefficientField& a, double target_h,
                                         const SolveOptions& opt = {});

/// gap_indicator > threshold; a nonpositive threshold means 1e-8·√μ₁.
bool gap_condition_holds(const CrossSectionResult& cs, double threshold = 0.0);

struct ReducedResult {
  Direction nu{std::vector<double>{1.0}};
  std::vector<double> L_values;
  std::vector<double> Z_L;
  std::vector<double> residuals;
  std::vector<int> dofs;
  double Z_extrap = 0.0;
  bool converged = false;
  // Eigenfunction v of the last L, nodal on `mesh` (coordinates z₁, ξ).
  std::vector<double> v;
  std::shared_ptr<const Mesh> mesh;
};

/// Z_L^ν on (−L,0)×ω₂: Dirichlet at z₁ = −L and on ξ ∈ ∂ω₂, Neumann at z₁ = 0,
/// coefficient A_ν. Throws SolverError("monotonicity violated") if some Z_L
/// exceeds its predecessor by more than 1e-8 relative.
ReducedResult solve_reduced(const CoefficientField& a, const Direction& nu, const CrossSectionSpec& cross,
                            const std::vector<double>& L_schedule, double target_h, const SolveOptions& opt = {},
                            double rel_tol = 1e-4);

/// Mesh of (−L,0)×ω₂ with the strip's boundary tags.
Mesh mesh_strip(double L, const CrossSectionSpec& cross, double target_h, MeshFamily family);

/// s_K^ν on the slab (−K,0)×(−K,K)×ω₂ in rotated coordinates with A^B.
/// m = 2 only.
double solve_slab(const CoefficientField& a, const Direction& nu, const CrossSectionSpec& cross, double K,
                  double target_h, const SolveOptions& opt = {});

struct DirectionSample {
  double theta;
  Direction nu;
  double Z;  // NaN when the solve failed under keep_going
  bool converged;
  double residual;  // residual of the last L
  int dofs;
};

struct SweepResult {
  std::vector<DirectionSample> samples;  // grid samples then refinement samples
  int grid_size = 0;
  Direction argmin{std::vector<double>{1.0}};
  double argmin_theta = 0.0;
  double min_value = 0.0;
  double max_jump = 0.0;    // largest |Z(θ_{i+1}) − Z(θ_i)| on the grid
  double jump_bound = 0.0;  // 5·C·Δθ with C = 2·C_A·max Z / c_A
  bool continuous = true;
};

struct SweepOptions {
  int directions = 64;  // m = 2 grid size
  bool refine = false;
  std::vector<double> L_schedule{4, 8, 16, 32};
  double target_h = 0.125;
  double rel_tol = 1e-4;
  bool keep_going = false;  // record failed directions as NaN instead of aborting
};

/// Z^ν over S^{m−1}: {+1, −1} for m = 1, a uniform θ-grid for m = 2 with
/// optional golden-section refinement to Δθ/16. Ties go to the smallest θ.
SweepResult sweep_directions(const CoefficientField& a, const CrossSectionSpec& cross, const SweepOptions& sw,
                             const SolveOptions& opt = {});

enum class BoundaryMode { Mixed, Dirichlet };

struct FullResult {
  EigenResult eig;
  int dofs = 0;
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DiscreteOperatorPair> pair;
};

/// λ_ℓ^1..λ_ℓ^k on Ω_ℓ (mixed) or σ_ℓ^1..σ_ℓ^k (all Dirichlet).
/// Throws SolverError if the dof count exceeds opt.dof_cap.
FullResult solve_full(const CylinderSpec& cyl, const CoefficientField& a, int k, double target_h,
                      BoundaryMode bc = BoundaryMode::Mixed, const SolveOptions& opt = {});

/// Bump Φ(t) = c·cos²(πt/(2a)) on (−a,a), a = 1/√max(m−1,1), ∫Φ² = 1.
double bump(double t, int m);
double bump_derivative(double t, int m);
/// c₀ = ∫Φ'² = π²/(3a²).
double bump_energy(int m);

struct UpperBoundResult {
  double quotient = 0.0;
  double Z_K = 0.0;
  double residual = 0.0;  // of the reduced solve
  Direction nu{std::vector<double>{1.0}};
};

/// Rayleigh quotient on the Ω_ℓ mesh `full` of q = v_K(z₁, ξ)·Φ_K(z'), where
/// z₁ = (X − ℓP)·ν, z' = (X − ℓP)·ν⊥, P the midpoint of face `face_id` with
/// outward normal ν and v_K the reduced eigenfunction for L = K. Throws
/// GeometryError if the support box does not fit inside ℓω₁.
UpperBoundResult upper_bound_quotient(const CylinderSpec& cyl, const CoefficientField& a, int face_id, double K,
                                      double target_h, const FullResult& full, const SolveOptions& opt = {});

struct DecayProfile {
  std::vector<double> radii;
  std::vector<double> masses;            // ∫_{Ω_r} u², cumulative
  std::vector<double> gradient_masses;   // ∫_{Ω_r} |∇u|², cumulative
  std::vector<double> shell_densities;   // shell mass / shell measure
  double total_mass = 0.0;
  double slope = 0.0;                    // least squares of log density vs ℓ − r
};

/// Mass profile of the first eigenfunction u_ℓ over Ω_r (cells whose X
/// barycentre lies in rω₁). Throws Error("decay lemma hypotheses not met")
/// when require_gap is set and the gap condition fails.
DecayProfile decay_profile(const CylinderSpec& cyl, const CoefficientField& a, const std::vector<double>& radii,
                           double target_h, const SolveOptions& opt = {}, bool require_gap = true);
DecayProfile decay_profile(const CylinderSpec& cyl, const FullResult& full, const std::vector<double>& radii);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cylspec
