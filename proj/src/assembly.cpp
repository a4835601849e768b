#include "cylspec/assembly.hpp"

#include "cylspec/error.hpp"

#include <cmath>

namespace cylspec {

namespace {

struct RefPoint {
  double w;
  std::array<double, 3> x;
};

const std::vector<RefPoint>& simplex_rule(int d) {
  static const std::vector<RefPoint> seg{{0.5, {0.5 - 0.5 / std::sqrt(3.0), 0, 0}},
                                         {0.5, {0.5 + 0.5 / std::sqrt(3.0), 0, 0}}};
  static const std::vector<RefPoint> tri{{1.0 / 3.0, {1.0 / 6.0, 1.0 / 6.0, 0}},
                                         {1.0 / 3.0, {2.0 / 3.0, 1.0 / 6.0, 0}},
                                         {1.0 / 3.0, {1.0 / 6.0, 2.0 / 3.0, 0}}};
  constexpr double a = 0.5854101966249685;
  constexpr double b = 0.1381966011250105;
  static const std::vector<RefPoint> tet{
      {0.25, {b, b, b}}, {0.25, {a, b, b}}, {0.25, {b, a, b}}, {0.25, {b, b, a}}};
  return d == 1 ? seg : d == 2 ? tri : tet;
}

// Inverts a d×d matrix (d ≤ 3) and returns its determinant.
double invert(int d, const double j[3][3], double inv[3][3]) {
  if (d == 1) {
    inv[0][0] = 1.0 / j[0][0];
    return j[0][0];
  }
  if (d == 2) {
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    inv[0][0] = j[1][1] / det;
    inv[0][1] = -j[0][1] / det;
    inv[1][0] = -j[1][0] / det;
    inv[1][1] = j[0][0] / det;
    return det;
  }
  const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                     j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                     j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
  inv[0][0] = (j[1][1] * j[2][2] - j[1][2] * j[2][1]) / det;
  inv[0][1] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / det;
  inv[0][2] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / det;
  inv[1][0] = (j[1][2] * j[2][0] - j[1][0] * j[2][2]) / det;
  inv[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / det;
  inv[1][2] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / det;
  inv[2][0] = (j[1][0] * j[2][1] - j[1][1] * j[2][0]) / det;
  inv[2][1] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / det;
  inv[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / det;
  return det;
}

constexpr int kCorner[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                               {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

}  // namespace

std::vector<QuadPoint> cell_quadrature(const Mesh& mesh, int e) {
  const int d = mesh.dim;
  const auto c = mesh.cell(e);
  const int nv = static_cast<int>(c.size());
  std::vector<QuadPoint> out;

  if (is_simplex(mesh.cell_type)) {
    double j[3][3] = {}, inv[3][3] = {};
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i) j[k][i] = mesh.node(c[i + 1])[k] - mesh.node(c[0])[k];
    const double det = invert(d, j, inv);
    if (!(det > 0.0)) throw AssemblyError("cell " + std::to_string(e) + " has nonpositive measure");
    double fact = 1.0;
    for (int i = 2; i <= d; ++i) fact *= i;
    // ∇λ_i = row i−1 of J⁻¹ for i ≥ 1; ∇λ_0 = −Σ.
    std::array<std::array<double, 3>, 8> grad{};
    for (int i = 1; i <= d; ++i)
      for (int k = 0; k < d; ++k) {
        grad[i][k] = inv[i - 1][k];
        grad[0][k] -= inv[i - 1][k];
      }
    for (const auto& rp : simplex_rule(d)) {
      QuadPoint q{};
      q.weight = rp.w * det / fact;
      double s = 0.0;
      for (int i = 1; i <= d; ++i) {
        q.N[i] = rp.x[i - 1];
        s += rp.x[i - 1];
      }
      q.N[0] = 1.0 - s;
      q.dN = grad;
      out.push_back(q);
    }
    return out;
  }

  const double g = 1.0 / std::sqrt(3.0);
  const int npts = 1 << d;
  for (int qi = 0; qi < npts; ++qi) {
    double r[3] = {0, 0, 0};
    for (int k = 0; k < d; ++k) r[k] = ((qi >> k) & 1) ? g : -g;
    double N[8], dNr[8][3];
    for (int i = 0; i < nv; ++i) {
      double p = 1.0;
      for (int k = 0; k < d; ++k) p *= 0.5 * (1.0 + kCorner[i][k] * r[k]);
      N[i] = p;
      for (int k = 0; k < d; ++k) {
        double dp = 0.5 * kCorner[i][k];
        for (int l = 0; l < d; ++l)
          if (l != k) dp *= 0.5 * (1.0 + kCorner[i][l] * r[l]);
        dNr[i][k] = dp;
      }
    }
    // J[k][l] = ∂x_k/∂r_l.
    double j[3][3] = {}, inv[3][3] = {};
    for (int i = 0; i < nv; ++i)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) j[k][l] += mesh.node(c[i])[k] * dNr[i][l];
    const double det = invert(d, j, inv);
    if (!(det > 0.0)) throw AssemblyError("cell " + std::to_string(e) + " has nonpositive measure");
    QuadPoint q{};
    q.weight = det;
    for (int i = 0; i < nv; ++i) {
      q.N[i] = N[i];
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += dNr[i][l] * inv[l][k];
        q.dN[i][k] = s;
      }
    }
    out.push_back(q);
  }
  return out;
}

std::vector<char> dirichlet_nodes(const Mesh& mesh) {
  std::vector<char> dir(mesh.num_nodes(), 0);
  for (const auto& f : mesh.facets)
    if (f.tag == BoundaryTag::Dirichlet)
      for (int v : f.nodes) dir[v] = 1;
  return dir;
}

DiscreteOperatorPair assemble(const Mesh& mesh, const CoefficientField& a, int xi_offset, std::string mesh_id) {
  const int d = mesh.dim;
  if (a.n() != d) throw AssemblyError("coefficient dimension does not match the mesh");
  if (xi_offset < 0 || xi_offset + a.p() > d) throw AssemblyError("xi_offset out of range");

  DiscreteOperatorPair pair;
  pair.mesh_id = std::move(mesh_id);
  const auto dir = dirichlet_nodes(mesh);
  pair.free_dofs.assign(mesh.num_nodes(), -1);
  for (int v = 0; v < mesh.num_nodes(); ++v)
    if (!dir[v]) {
      pair.free_dofs[v] = static_cast<int>(pair.dof_nodes.size());
      pair.dof_nodes.push_back(v);
    }
  const int n = static_cast<int>(pair.dof_nodes.size());
  if (n == 0) throw AssemblyError("no free degrees of freedom");

  std::vector<int> rows, cols;
  std::vector<double> kv, mv;
  const int nv = nodes_per_cell(mesh.cell_type);
  const std::size_t est = static_cast<std::size_t>(mesh.num_cells()) * nv * (nv + 1) / 2;
  rows.reserve(est);
  cols.reserve(est);
  kv.reserve(est);
  mv.reserve(est);

  std::vector<double> ke(nv * nv), me(nv * nv);
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const auto centre = mesh.cell_centroid(e);
    const DenseMatrix A = a.evaluate(std::span<const double>(centre).subspan(xi_offset, a.p()));
    std::fill(ke.begin(), ke.end(), 0.0);
    std::fill(me.begin(), me.end(), 0.0);
    for (const auto& q : cell_quadrature(mesh, e)) {
      for (int i = 0; i < nv; ++i) {
        double adi[3] = {0, 0, 0};
        for (int r = 0; r < d; ++r)
          for (int s = 0; s < d; ++s) adi[r] += A(r, s) * q.dN[i][s];
        for (int j = 0; j <= i; ++j) {
          double kij = 0.0;
          for (int r = 0; r < d; ++r) kij += adi[r] * q.dN[j][r];
          ke[i * nv + j] += q.weight * kij;
          me[i * nv + j] += q.weight * q.N[i] * q.N[j];
        }
      }
    }
    const auto c = mesh.cell(e);
    for (int i = 0; i < nv; ++i) {
      const int gi = pair.free_dofs[c[i]];
      if (gi < 0) continue;
      for (int j = 0; j <= i; ++j) {
        const int gj = pair.free_dofs[c[j]];
        if (gj < 0) continue;
        rows.push_back(gi);
        cols.push_back(gj);
        kv.push_back(ke[i * nv + j]);
        mv.push_back(me[i * nv + j]);
      }
    }
  }
  pair.K = SparseSym::from_triplets(n, rows, cols, kv);
  pair.M = SparseSym::from_triplets(n, rows, cols, mv);
  return pair;
}

double rayleigh(const DiscreteOperatorPair& pair, std::span<const double> x) {
  if (static_cast<int>(x.size()) != pair.n()) throw AssemblyError("vector size does not match the operator pair");
  const double den = pair.M.quadratic_form(x);
  if (!(den > 0.0)) throw AssemblyError("rayleigh quotient of a zero vector");
  return pair.K.quadratic_form(x) / den;
}

std::vector<double> interpolate(const Mesh& mesh, const DiscreteOperatorPair& pair,
                                const std::function<double(std::span<const double>)>& f) {
  std::vector<double> x(pair.n());
  for (int i = 0; i < pair.n(); ++i) {
    const double v = f(mesh.node(pair.dof_nodes[i]));
    if (!std::isfinite(v)) throw AssemblyError("interpolant is not finite at node " + std::to_string(pair.dof_nodes[i]));
    x[i] = v;
  }
  return x;
}

std::vector<double> expand_to_nodes(const DiscreteOperatorPair& pair, std::span<const double> x, int num_nodes) {
  std::vector<double> u(num_nodes, 0.0);
  for (int i = 0; i < pair.n(); ++i) u[pair.dof_nodes[i]] = x[i];
  return u;
}

CellIntegrals cell_integrals(const Mesh& mesh, int e, std::span<const double> nodal) {
  const auto c = mesh.cell(e);
  CellIntegrals out{0.0, 0.0};
  for (const auto& q : cell_quadrature(mesh, e)) {
    double u = 0.0;
    double g[3] = {0, 0, 0};
    for (std::size_t i = 0; i < c.size(); ++i) {
      u += q.N[i] * nodal[c[i]];
      for (int k = 0; k < mesh.dim; ++k) g[k] += q.dN[i][k] * nodal[c[i]];
    }
    out.mass += q.weight * u * u;
    out.gradient += q.weight * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  }
  return out;
}

}  // namespace cylspec
