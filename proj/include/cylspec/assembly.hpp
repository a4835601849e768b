#pragma once

#include "cylspec/coefficient.hpp"
#include "cylspec/mesh.hpp"
#include "cylspec/sparse.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cylspec {

/// Stiffness and mass after Dirichlet elimination.
struct DiscreteOperatorPair {
  SparseSym K;
  SparseSym M;
  std::vector<int> free_dofs;  // mesh node → reduced index, −1 for Dirichlet nodes
  std::vector<int> dof_nodes;  // reduced index → mesh node
  std::string mesh_id;
  int n() const noexcept { return K.n(); }
};

/// Quadrature point of a cell: weight includes |det J|, shape values and
/// physical gradients of the cell's local basis functions.
struct QuadPoint {
  double weight;
  std::array<double, 8> N;
  std::array<std::array<double, 3>, 8> dN;
};

/// Degree-2 rules on simplices, 2-point Gauss per direction on Q1 cells.
std::vector<QuadPoint> cell_quadrature(const Mesh& mesh, int e);

/// ∫(A∇u)·∇v and ∫uv over the mesh; A = A(ξ) is evaluated once per cell at
/// the barycentre, with ξ read from coordinates xi_offset..xi_offset+p−1.
/// Nodes on Dirichlet-tagged facets are eliminated.
DiscreteOperatorPair assemble(const Mesh& mesh, const CoefficientField& a, int xi_offset,
                              std::string mesh_id = {});

/// Mesh nodes lying on a Dirichlet-tagged facet.
std::vector<char> dirichlet_nodes(const Mesh& mesh);

/// xᵀKx / xᵀMx. Throws AssemblyError for a zero vector or a size mismatch.
double rayleigh(const DiscreteOperatorPair& pair, std::span<const double> x);

/// Nodal interpolant of f restricted to the free dofs.
std::vector<double> interpolate(const Mesh& mesh, const DiscreteOperatorPair& pair,
                                const std::function<double(std::span<const double>)>& f);

/// Full nodal vector with zeros at Dirichlet nodes.
std::vector<double> expand_to_nodes(const DiscreteOperatorPair& pair, std::span<const double> x, int num_nodes);

struct CellIntegrals {
  double mass;      // ∫ u²
  double gradient;  // ∫ |∇u|²
};
CellIntegrals cell_integrals(const Mesh& mesh, int e, std::span<const double> nodal);

}  // namespace cylspec
