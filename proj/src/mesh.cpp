#include "cylspec/mesh.hpp"

#include "cylspec/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>

namespace cylspec {

int nodes_per_cell(CellType t) {
  switch (t) {
    case CellType::Segment: return 2;
    case CellType::Triangle: return 3;
    case CellType::Quad: return 4;
    case CellType::Tetrahedron: return 4;
    case CellType::Hexahedron: return 8;
  }
  return 0;
}

int cell_dim(CellType t) {
  switch (t) {
    case CellType::Segment: return 1;
    case CellType::Triangle:
    case CellType::Quad: return 2;
    default: return 3;
  }
}

bool is_simplex(CellType t) { return t != CellType::Quad && t != CellType::Hexahedron; }

const char* to_string(CellType t) {
  switch (t) {
    case CellType::Segment: return "segment";
    case CellType::Triangle: return "triangle";
    case CellType::Quad: return "quad";
    case CellType::Tetrahedron: return "tetrahedron";
    case CellType::Hexahedron: return "hexahedron";
  }
  return "?";
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 sub3(std::span<const double> a, std::span<const double> b) {
  Vec3 r{0, 0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

const std::vector<std::vector<int>>& local_faces(CellType t) {
  static const std::vector<std::vector<int>> seg{{0}, {1}};
  static const std::vector<std::vector<int>> tri{{0, 1}, {1, 2}, {2, 0}};
  static const std::vector<std::vector<int>> quad{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  static const std::vector<std::vector<int>> tet{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  static const std::vector<std::vector<int>> hex{{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                                 {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  switch (t) {
    case CellType::Segment: return seg;
    case CellType::Triangle: return tri;
    case CellType::Quad: return quad;
    case CellType::Tetrahedron: return tet;
    case CellType::Hexahedron: return hex;
  }
  return seg;
}

void fill_facet_geometry(const Mesh& mesh, BoundaryFacet& f) {
  const int d = mesh.dim;
  f.centroid.assign(d, 0.0);
  for (int v : f.nodes)
    for (int k = 0; k < d; ++k) f.centroid[k] += mesh.node(v)[k] / f.nodes.size();
  const auto cc = mesh.cell_centroid(f.cell);
  Vec3 n{0, 0, 0};
  if (d == 1) {
    n[0] = f.centroid[0] > cc[0] ? 1.0 : -1.0;
    f.measure = 1.0;
  } else if (d == 2) {
    const auto e = sub3(mesh.node(f.nodes[1]), mesh.node(f.nodes[0]));
    f.measure = std::hypot(e[0], e[1]);
    n = {e[1] / f.measure, -e[0] / f.measure, 0.0};
  } else {
    Vec3 c;
    if (f.nodes.size() == 3) c = cross3(sub3(mesh.node(f.nodes[1]), mesh.node(f.nodes[0])),
                                        sub3(mesh.node(f.nodes[2]), mesh.node(f.nodes[0])));
    else c = cross3(sub3(mesh.node(f.nodes[2]), mesh.node(f.nodes[0])),
                    sub3(mesh.node(f.nodes[3]), mesh.node(f.nodes[1])));
    const double len = std::sqrt(dot3(c, c));
    f.measure = 0.5 * len;
    n = {c[0] / len, c[1] / len, c[2] / len};
  }
  if (d > 1) {
    const Vec3 out = sub3(f.centroid, cc);
    if (dot3(out, n) < 0.0)
      for (auto& x : n) x = -x;
  }
  f.normal.assign(n.begin(), n.begin() + d);
}

}  // namespace

std::vector<double> Mesh::cell_centroid(int e) const {
  std::vector<double> c(dim, 0.0);
  const auto nodes = cell(e);
  for (int v : nodes)
    for (int k = 0; k < dim; ++k) c[k] += node(v)[k];
  for (auto& x : c) x /= nodes.size();
  return c;
}

double Mesh::cell_measure(int e) const {
  const auto c = cell(e);
  switch (cell_type) {
    case CellType::Segment: return node(c[1])[0] - node(c[0])[0];
    case CellType::Triangle: {
      const auto a = sub3(node(c[1]), node(c[0]));
      const auto b = sub3(node(c[2]), node(c[0]));
      return 0.5 * (a[0] * b[1] - a[1] * b[0]);
    }
    case CellType::Quad: {
      const auto a = sub3(node(c[2]), node(c[0]));
      const auto b = sub3(node(c[3]), node(c[1]));
      return 0.5 * (a[0] * b[1] - a[1] * b[0]);
    }
    case CellType::Tetrahedron: {
      const auto a = sub3(node(c[1]), node(c[0]));
      const auto b = sub3(node(c[2]), node(c[0]));
      const auto d = sub3(node(c[3]), node(c[0]));
      return dot3(cross3(a, b), d) / 6.0;
    }
    case CellType::Hexahedron: {
      static const int sign[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                     {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
      Vec3 j[3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
      for (int i = 0; i < 8; ++i)
        for (int r = 0; r < 3; ++r)
          for (int k = 0; k < 3; ++k) j[r][k] += 0.125 * sign[i][r] * node(c[i])[k];
      return 8.0 * dot3(cross3(j[0], j[1]), j[2]);
    }
  }
  return 0.0;
}

double Mesh::total_measure() const {
  double s = 0.0;
  for (int e = 0; e < num_cells(); ++e) s += cell_measure(e);
  return s;
}

double Mesh::facet_measure(BoundaryTag tag) const {
  double s = 0.0;
  for (const auto& f : facets)
    if (f.tag == tag) s += f.measure;
  return s;
}

void finalize_mesh(Mesh& mesh) {
  const auto& faces = local_faces(mesh.cell_type);
  struct Owner {
    int cell;
    int local;
    int count;
  };
  std::map<std::vector<int>, Owner> owners;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const auto c = mesh.cell(e);
    for (int lf = 0; lf < static_cast<int>(faces.size()); ++lf) {
      std::vector<int> key;
      for (int i : faces[lf]) key.push_back(c[i]);
      std::sort(key.begin(), key.end());
      auto [it, inserted] = owners.try_emplace(std::move(key), Owner{e, lf, 0});
      ++it->second.count;
    }
  }
  mesh.facets.clear();
  for (const auto& [key, owner] : owners) {
    if (owner.count > 2) throw MeshError("non-manifold facet shared by more than two cells");
    if (owner.count != 1) continue;
    BoundaryFacet f;
    const auto c = mesh.cell(owner.cell);
    for (int i : faces[owner.local]) f.nodes.push_back(c[i]);
    f.cell = owner.cell;
    fill_facet_geometry(mesh, f);
    mesh.facets.push_back(std::move(f));
  }

  double h = 0.0;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const auto c = mesh.cell(e);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        double s = 0.0;
        for (int k = 0; k < mesh.dim; ++k) {
          const double d = mesh.node(c[i])[k] - mesh.node(c[j])[k];
          s += d * d;
        }
        h = std::max(h, std::sqrt(s));
      }
  }
  mesh.h_max = h;
}

void apply_tags(Mesh& mesh, const FacetClassifier& classify) {
  for (auto& f : mesh.facets) {
    const auto [tag, face] = classify(f.centroid, f.normal);
    f.tag = tag;
    f.face_id = face;
  }
}

void tag_cylinder(Mesh& mesh, const CylinderSpec& cyl) {
  if (mesh.dim != cyl.dim()) throw MeshError("mesh dimension does not match the cylinder");
  apply_tags(mesh, [&](std::span<const double> c, std::span<const double> n) {
    const BoundaryTag tag = classify_boundary_facet(cyl, c, n);
    return std::pair{tag, tag == BoundaryTag::Neumann ? lateral_face_of(cyl, c) : -1};
  });
}

void validate_mesh(const Mesh& mesh) {
  const int nn = mesh.num_nodes();
  std::vector<char> used(nn, 0);
  for (int v : mesh.cells) {
    if (v < 0 || v >= nn) throw MeshError("cell node index out of range");
    used[v] = 1;
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) throw MeshError("mesh has orphan nodes");
  for (int e = 0; e < mesh.num_cells(); ++e)
    if (!(mesh.cell_measure(e) > 0.0)) throw MeshError("cell " + std::to_string(e) + " has nonpositive measure");
}

Mesh mesh_interval(double a, double b, int n) {
  if (n <= 0) throw MeshError("interval mesh needs n >= 1");
  if (!(a < b)) throw MeshError("interval mesh needs a < b");
  Mesh m;
  m.dim = 1;
  m.cell_type = CellType::Segment;
  for (int i = 0; i <= n; ++i) m.coords.push_back(i == n ? b : a + (b - a) * i / n);
  for (int i = 0; i < n; ++i) {
    m.cells.push_back(i);
    m.cells.push_back(i + 1);
  }
  finalize_mesh(m);
  return m;
}

Mesh mesh_box2(double ax, double bx, double ay, double by, int nx, int ny, bool triangles) {
  if (nx <= 0 || ny <= 0) throw MeshError("box mesh needs positive counts");
  if (!(ax < bx) || !(ay < by)) throw MeshError("degenerate box");
  Mesh m;
  m.dim = 2;
  m.cell_type = triangles ? CellType::Triangle : CellType::Quad;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      m.coords.push_back(i == nx ? bx : ax + (bx - ax) * i / nx);
      m.coords.push_back(j == ny ? by : ay + (by - ay) * j / ny);
    }
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int n00 = id(i, j), n10 = id(i + 1, j), n11 = id(i + 1, j + 1), n01 = id(i, j + 1);
      if (triangles) m.cells.insert(m.cells.end(), {n00, n10, n11, n00, n11, n01});
      else m.cells.insert(m.cells.end(), {n00, n10, n11, n01});
    }
  finalize_mesh(m);
  return m;
}

Mesh mesh_box3(const std::array<double, 6>& box, int nx, int ny, int nz) {
  if (nx <= 0 || ny <= 0 || nz <= 0) throw MeshError("box mesh needs positive counts");
  if (!(box[0] < box[1]) || !(box[2] < box[3]) || !(box[4] < box[5])) throw MeshError("degenerate box");
  Mesh m;
  m.dim = 3;
  m.cell_type = CellType::Hexahedron;
  const int n[3] = {nx, ny, nz};
  auto coord = [&](int axis, int i) {
    return i == n[axis] ? box[2 * axis + 1] : box[2 * axis] + (box[2 * axis + 1] - box[2 * axis]) * i / n[axis];
  };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) m.coords.insert(m.coords.end(), {coord(0, i), coord(1, j), coord(2, k)});
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        m.cells.insert(m.cells.end(), {id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k),
                                       id(i, j, k + 1), id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1),
                                       id(i, j + 1, k + 1)});
  finalize_mesh(m);
  return m;
}

Mesh mesh_polygon_subdivided(const BaseSpec& base, double scale, int n) {
  if (base.is_interval()) throw MeshError("mesh_polygon needs a polygon base");
  if (n <= 0) throw MeshError("polygon subdivision needs n >= 1");
  const auto& v = base.as_polygon().vertices;
  const int nv = static_cast<int>(v.size());
  for (int e = 0; e < nv; ++e) {
    const auto& a = v[e];
    const auto& b = v[(e + 1) % nv];
    if (!(a[0] * b[1] - a[1] * b[0] > 0.0)) throw MeshError("polygon is not convex around the origin");
  }

  Mesh m;
  m.dim = 2;
  m.cell_type = CellType::Triangle;
  auto push = [&](double x, double y) {
    m.coords.push_back(x);
    m.coords.push_back(y);
    return m.num_nodes() - 1;
  };
  push(0.0, 0.0);
  // spoke[s][i], i = 1..n: point i/n along the segment origin → v_s.
  std::vector<std::vector<int>> spoke(nv, std::vector<int>(n + 1, 0));
  for (int s = 0; s < nv; ++s)
    for (int i = 1; i <= n; ++i) spoke[s][i] = push(scale * v[s][0] * i / n, scale * v[s][1] * i / n);

  for (int e = 0; e < nv; ++e) {
    const int f = (e + 1) % nv;
    // Lattice point (a, b) = (a/n) v_e + (b/n) v_f.
    std::vector<std::vector<int>> id(n + 1, std::vector<int>(n + 1, -1));
    id[0][0] = 0;
    for (int a = 1; a <= n; ++a) id[a][0] = spoke[e][a];
    for (int b = 1; b <= n; ++b) id[0][b] = spoke[f][b];
    for (int a = 1; a < n; ++a)
      for (int b = 1; a + b <= n; ++b)
        id[a][b] = push(scale * (v[e][0] * a + v[f][0] * b) / n, scale * (v[e][1] * a + v[f][1] * b) / n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; a + b < n; ++b) {
        m.cells.insert(m.cells.end(), {id[a][b], id[a + 1][b], id[a][b + 1]});
        if (a + b < n - 1) m.cells.insert(m.cells.end(), {id[a + 1][b], id[a + 1][b + 1], id[a][b + 1]});
      }
  }
  finalize_mesh(m);
  return m;
}

Mesh mesh_polygon(const BaseSpec& base, int level) {
  if (level < 0 || level > 12) throw MeshError("refine level must be in 0..12");
  return mesh_polygon_subdivided(base, 1.0, 1 << level);
}

Mesh extrude(const Mesh& base, double a, double b, int n) {
  if (base.cell_type != CellType::Triangle) throw MeshError("extrude needs a triangle mesh");
  if (n <= 0) throw MeshError("extrude needs n >= 1");
  if (!(a < b)) throw MeshError("extrude needs a < b");
  for (int e = 0; e < base.num_cells(); ++e)
    if (!(base.cell_measure(e) > 0.0)) throw MeshError("inconsistent orientation in base mesh");

  const int nb = base.num_nodes();
  Mesh m;
  m.dim = 3;
  m.cell_type = CellType::Tetrahedron;
  for (int k = 0; k <= n; ++k) {
    const double z = k == n ? b : a + (b - a) * k / n;
    for (int v = 0; v < nb; ++v) m.coords.insert(m.coords.end(), {base.node(v)[0], base.node(v)[1], z});
  }
  for (int k = 0; k < n; ++k)
    for (int e = 0; e < base.num_cells(); ++e) {
      auto c = base.cell(e);
      std::array<int, 3> s{c[0], c[1], c[2]};
      std::sort(s.begin(), s.end());
      const int a0 = k * nb + s[0], b0 = k * nb + s[1], c0 = k * nb + s[2];
      const int a1 = a0 + nb, b1 = b0 + nb, c1 = c0 + nb;
      const std::array<std::array<int, 4>, 3> tets{{{a0, b0, c0, c1}, {a0, b0, b1, c1}, {a0, a1, b1, c1}}};
      for (auto t : tets) {
        const auto u = sub3(m.node(t[1]), m.node(t[0]));
        const auto w = sub3(m.node(t[2]), m.node(t[0]));
        const auto x = sub3(m.node(t[3]), m.node(t[0]));
        if (dot3(cross3(u, w), x) < 0.0) std::swap(t[1], t[2]);
        m.cells.insert(m.cells.end(), t.begin(), t.end());
      }
    }
  finalize_mesh(m);
  return m;
}

int subdivisions(double length, double target_h) {
  if (!(target_h > 0.0)) throw MeshError("target_h must be positive");
  return std::max(1, static_cast<int>(std::ceil(length / target_h - 1e-9)));
}

Mesh mesh_box(const std::vector<Interval>& axes, double target_h, MeshFamily family) {
  std::vector<int> n;
  for (const auto& iv : axes) n.push_back(subdivisions(iv.length(), target_h));
  switch (axes.size()) {
    case 1: return mesh_interval(axes[0].a, axes[0].b, n[0]);
    case 2: return mesh_box2(axes[0].a, axes[0].b, axes[1].a, axes[1].b, n[0], n[1], family == MeshFamily::Simplex);
    case 3:
      if (family == MeshFamily::Tensor)
        return mesh_box3({axes[0].a, axes[0].b, axes[1].a, axes[1].b, axes[2].a, axes[2].b}, n[0], n[1], n[2]);
      return extrude(mesh_box2(axes[0].a, axes[0].b, axes[1].a, axes[1].b, n[0], n[1], true), axes[2].a, axes[2].b, n[2]);
    default: throw MeshError("box meshes need 1 to 3 axes");
  }
}

Mesh mesh_cylinder(const CylinderSpec& cyl, double target_h, MeshFamily family) {
  const double s = cyl.scale();
  Mesh mesh;
  if (cyl.m() == 1 || cyl.base().is_axis_box()) {
    std::vector<Interval> axes;
    const auto b = cyl.base().bounds();
    axes.push_back({s * b[0], s * b[1]});
    if (cyl.m() == 2) axes.push_back({s * b[2], s * b[3]});
    for (const auto& iv : cyl.cross().intervals()) axes.push_back(iv);
    mesh = mesh_box(axes, target_h, family);
  } else {
    if (family == MeshFamily::Tensor) throw MeshError("tensor meshes need an axis-aligned box base");
    const auto& v = cyl.base().as_polygon().vertices;
    double len = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& a = v[i];
      const auto& b = v[(i + 1) % v.size()];
      len = std::max({len, std::hypot(a[0], a[1]), std::hypot(b[0] - a[0], b[1] - a[1])});
    }
    const auto& xi = cyl.cross()[0];
    mesh = extrude(mesh_polygon_subdivided(cyl.base(), s, subdivisions(s * len, target_h)), xi.a, xi.b,
                   subdivisions(xi.length(), target_h));
  }
  tag_cylinder(mesh, cyl);
  return mesh;
}

void dump_mesh(const Mesh& mesh, std::ostream& os) {
  os.precision(17);
  os << "nodes " << mesh.num_nodes() << ' ' << mesh.dim << '\n';
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    for (int k = 0; k < mesh.dim; ++k) os << (k ? " " : "") << mesh.node(i)[k];
    os << '\n';
  }
  os << "cells " << mesh.num_cells() << ' ' << to_string(mesh.cell_type) << '\n';
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const auto c = mesh.cell(e);
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i];
    os << '\n';
  }
  os << "facets " << mesh.facets.size() << '\n';
  for (const auto& f : mesh.facets) {
    os << to_string(f.tag) << ' ' << f.face_id;
    for (int v : f.nodes) os << ' ' << v;
    os << '\n';
  }
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
  const int d = mesh.dim;
  lo_.assign(d, 1e300);
  hi_.assign(d, -1e300);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    for (int k = 0; k < d; ++k) {
      lo_[k] = std::min(lo_[k], mesh.node(i)[k]);
      hi_[k] = std::max(hi_[k], mesh.node(i)[k]);
    }
  const double per_axis = std::max(1.0, std::pow(static_cast<double>(mesh.num_cells()), 1.0 / d));
  counts_.assign(d, 1);
  double vol = 1.0;
  for (int k = 0; k < d; ++k) vol *= std::max(hi_[k] - lo_[k], 1e-300);
  const double cell = std::pow(vol, 1.0 / d) / per_axis;
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    counts_[k] = std::clamp(static_cast<int>((hi_[k] - lo_[k]) / cell), 1, 4096);
    total *= counts_[k];
  }
  buckets_.resize(total);
  for (int e = 0; e < mesh.num_cells(); ++e) {
    std::vector<int> b0(d), b1(d);
    for (int k = 0; k < d; ++k) {
      double mn = 1e300, mx = -1e300;
      for (int v : mesh.cell(e)) {
        mn = std::min(mn, mesh.node(v)[k]);
        mx = std::max(mx, mesh.node(v)[k]);
      }
      const double w = (hi_[k] - lo_[k]) / counts_[k];
      b0[k] = std::clamp(static_cast<int>((mn - lo_[k]) / w - 1e-9), 0, counts_[k] - 1);
      b1[k] = std::clamp(static_cast<int>((mx - lo_[k]) / w + 1e-9), 0, counts_[k] - 1);
    }
    std::vector<int> idx = b0;
    for (;;) {
      std::size_t flat = 0;
      for (int k = d - 1; k >= 0; --k) flat = flat * counts_[k] + idx[k];
      buckets_[flat].push_back(e);
      int k = 0;
      while (k < d && ++idx[k] > b1[k]) {
        idx[k] = b0[k];
        ++k;
      }
      if (k == d) break;
    }
  }
}

bool PointLocator::shape_values(int e, std::span<const double> x, std::span<double> w) const {
  constexpr double tol = 1e-10;
  const int d = mesh_.dim;
  const auto c = mesh_.cell(e);
  if (is_simplex(mesh_.cell_type)) {
    // Solve x − x0 = J λ for the barycentric coordinates λ₁..λ_d.
    double j[3][3] = {};
    double r[3] = {};
    for (int k = 0; k < d; ++k) {
      r[k] = x[k] - mesh_.node(c[0])[k];
      for (int i = 0; i < d; ++i) j[k][i] = mesh_.node(c[i + 1])[k] - mesh_.node(c[0])[k];
    }
    double lam[3] = {};
    if (d == 1) {
      lam[0] = r[0] / j[0][0];
    } else if (d == 2) {
      const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
      lam[0] = (r[0] * j[1][1] - j[0][1] * r[1]) / det;
      lam[1] = (j[0][0] * r[1] - r[0] * j[1][0]) / det;
    } else {
      const Vec3 c0{j[0][0], j[1][0], j[2][0]}, c1{j[0][1], j[1][1], j[2][1]}, c2{j[0][2], j[1][2], j[2][2]};
      const Vec3 rr{r[0], r[1], r[2]};
      const double det = dot3(c0, cross3(c1, c2));
      lam[0] = dot3(rr, cross3(c1, c2)) / det;
      lam[1] = dot3(c0, cross3(rr, c2)) / det;
      lam[2] = dot3(c0, cross3(c1, rr)) / det;
    }
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      if (lam[i] < -tol) return false;
      w[i + 1] = lam[i];
      s += lam[i];
    }
    if (1.0 - s < -tol) return false;
    w[0] = 1.0 - s;
    return true;
  }
  const int far = mesh_.cell_type == CellType::Quad ? 2 : 6;
  double t[3] = {};
  for (int k = 0; k < d; ++k) {
    const double a = mesh_.node(c[0])[k];
    const double b = mesh_.node(c[far])[k];
    t[k] = (x[k] - a) / (b - a);
    if (t[k] < -tol || t[k] > 1.0 + tol) return false;
  }
  static const int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                   {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  for (std::size_t i = 0; i < c.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < d; ++k) p *= corner[i][k] ? t[k] : 1.0 - t[k];
    w[i] = p;
  }
  return true;
}

std::optional<int> PointLocator::locate(std::span<const double> x) const {
  const int d = mesh_.dim;
  std::size_t flat = 0;
  for (int k = d - 1; k >= 0; --k) {
    const double span = hi_[k] - lo_[k];
    const double tol = 1e-10 * std::max(span, 1.0);
    if (x[k] < lo_[k] - tol || x[k] > hi_[k] + tol) return std::nullopt;
    const int b = std::clamp(static_cast<int>((x[k] - lo_[k]) / span * counts_[k]), 0, counts_[k] - 1);
    flat = flat * counts_[k] + b;
  }
  std::array<double, 8> w{};
  for (int e : buckets_[flat])
    if (shape_values(e, x, w)) return e;
  return std::nullopt;
}

std::optional<double> PointLocator::evaluate(std::span<const double> nodal, std::span<const double> x) const {
  const auto e = locate(x);
  if (!e) return std::nullopt;
  std::array<double, 8> w{};
  shape_values(*e, x, w);
  double v = 0.0;
  const auto c = mesh_.cell(*e);
  for (std::size_t i = 0; i < c.size(); ++i) v += w[i] * nodal[c[i]];
  return v;
}

}  // namespace cylspec
