#pragma once

#include "cylspec/geometry.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cylspec {

enum class CellType { Segment, Triangle, Quad, Tetrahedron, Hexahedron };

int nodes_per_cell(CellType t);
int cell_dim(CellType t);
bool is_simplex(CellType t);
const char* to_string(CellType t);

struct BoundaryFacet {
  std::vector<int> nodes;
  BoundaryTag tag = BoundaryTag::Dirichlet;
  int face_id = -1;
  int cell = -1;
  std::vector<double> centroid;
  std::vector<double> normal;  // outward unit normal
  double measure = 0.0;        // 1 for the point facets of 1D meshes
};

/// Unstructured mesh with one cell type. Quad nodes are ordered
/// (−,−),(+,−),(+,+),(−,+); hex nodes are that ring at the bottom then the top.
struct Mesh {
  int dim = 0;
  CellType cell_type = CellType::Segment;
  std::vector<double> coords;  // dim per node
  std::vector<int> cells;      // nodes_per_cell per cell
  std::vector<BoundaryFacet> facets;
  double h_max = 0.0;

  int num_nodes() const { return static_cast<int>(coords.size()) / dim; }
  int num_cells() const { return static_cast<int>(cells.size()) / nodes_per_cell(cell_type); }
  std::span<const double> node(int i) const { return {coords.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)}; }
  std::span<const int> cell(int e) const {
    const int k = nodes_per_cell(cell_type);
    return {cells.data() + static_cast<std::size_t>(e) * k, static_cast<std::size_t>(k)};
  }
  std::vector<double> cell_centroid(int e) const;
  /// Signed measure (Jacobian at the cell centre times the reference measure
  /// for Q1 cells).
  double cell_measure(int e) const;
  double total_measure() const;
  double facet_measure(BoundaryTag tag) const;
};

/// Recomputes boundary facets (every facet owned by exactly one cell), tags
/// them Dirichlet with face id −1, and recomputes h_max. Facets are ordered
/// by their sorted node keys.
void finalize_mesh(Mesh& mesh);

using FacetClassifier = std::function<std::pair<BoundaryTag, int>(std::span<const double> centroid,
                                                                  std::span<const double> normal)>;
void apply_tags(Mesh& mesh, const FacetClassifier& classify);

/// Tags with classify_boundary_facet and records the lateral face of ℓω₁ for
/// Neumann facets.
void tag_cylinder(Mesh& mesh, const CylinderSpec& cyl);

/// Throws MeshError on a nonpositive cell measure, out of range indices, or
/// orphan nodes.
void validate_mesh(const Mesh& mesh);

Mesh mesh_interval(double a, double b, int n);
Mesh mesh_box2(double ax, double bx, double ay, double by, int nx, int ny, bool triangles = false);
Mesh mesh_box3(const std::array<double, 6>& box, int nx, int ny, int nz);

/// Fan triangulation from the origin refined `level` times by edge midpoints.
Mesh mesh_polygon(const BaseSpec& base, int level);
/// Fan triangulation of scale·ω₁ with every fan triangle split into n² copies.
Mesh mesh_polygon_subdivided(const BaseSpec& base, double scale, int n);

/// Prisms over a triangle mesh, each split into 3 tets by the sorted global
/// index rule. The new coordinate is appended last.
Mesh extrude(const Mesh& base, double a, double b, int n);

enum class MeshFamily { Simplex, Tensor };

/// Mesh of Ω_ℓ = ℓω₁×ω₂ with about `target_h` spacing, tagged. The tensor
/// family needs an axis-box base.
Mesh mesh_cylinder(const CylinderSpec& cyl, double target_h, MeshFamily family = MeshFamily::Simplex);

/// Mesh of a box given per-axis intervals with about `target_h` spacing;
/// every boundary facet is Dirichlet until retagged.
Mesh mesh_box(const std::vector<Interval>& axes, double target_h, MeshFamily family = MeshFamily::Simplex);

int subdivisions(double length, double target_h);

/// Plain-text dump: "nodes N", coordinates, "cells C <type>", node lists,
/// "facets F", then "tag face_id nodes...".
void dump_mesh(const Mesh& mesh, std::ostream& os);

/// Finds the cell containing a point and interpolates nodal values. Quad and
/// hex cells are assumed to be axis-aligned boxes.
class PointLocator {
public:
  explicit PointLocator(const Mesh& mesh);
  /// Cell containing `x` (within 1e-10 in reference coordinates), if any.
  std::optional<int> locate(std::span<const double> x) const;
  /// Interpolated value of the nodal field; nullopt outside the mesh.
  std::optional<double> evaluate(std::span<const double> nodal, std::span<const double> x) const;

private:
  bool shape_values(int e, std::span<const double> x, std::span<double> w) const;
  const Mesh& mesh_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<int> counts_;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace cylspec
