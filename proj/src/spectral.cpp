#include "cylspec/spectral.hpp"

#include "cylspec/error.hpp"
#include "cylspec/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cylspec {

namespace {

void check_dof_cap(long n, const SolveOptions& opt) {
  if (opt.dof_cap > 0 && n > opt.dof_cap)
    throw SolverError("dof cap exceeded: " + std::to_string(n) + " > " + std::to_string(opt.dof_cap));
}

long free_node_count(const Mesh& mesh) {
  const auto dir = dirichlet_nodes(mesh);
  return static_cast<long>(std::count(dir.begin(), dir.end(), 0));
}

EigenResult solve_pair(const DiscreteOperatorPair& pair, int k, const SolveOptions& opt) {
  return smallest_eigenpairs(pair, k, opt.eig);
}

CrossSectionResult cross_section_on_mesh(Mesh mesh, const CoefficientField& a, const SolveOptions& opt) {
  const CoefficientField a22 = a.m() == 0 ? a : a.a22();
  check_dof_cap(free_node_count(mesh), opt);
  const auto pair = assemble(mesh, a22, 0, "cross-section");
  const auto eig = solve_pair(pair, 1, opt);

  CrossSectionResult r;
  r.mu1 = eig.values[0];
  r.residual = eig.residuals[0];
  r.dofs = pair.n();
  r.W = expand_to_nodes(pair, eig.vectors[0], mesh.num_nodes());

  const int m = a.m();
  const int p = a.p();
  double gap2 = 0.0;
  if (m > 0) {
    const auto a12 = a.a12();
    for (int e = 0; e < mesh.num_cells(); ++e) {
      const auto centre = mesh.cell_centroid(e);
      std::vector<double> b(m * p);
      for (int i = 0; i < m * p; ++i) b[i] = a12[i].evaluate(centre);
      const auto c = mesh.cell(e);
      for (const auto& q : cell_quadrature(mesh, e)) {
        double g[3] = {0, 0, 0};
        for (std::size_t i = 0; i < c.size(); ++i)
          for (int k = 0; k < p; ++k) g[k] += q.dN[i][k] * r.W[c[i]];
        for (int i = 0; i < m; ++i) {
          double v = 0.0;
          for (int k = 0; k < p; ++k) v += b[i * p + k] * g[k];
          gap2 += q.weight * v * v;
        }
      }
    }
  }
  r.gap_indicator = std::sqrt(gap2);
  r.mesh = std::make_shared<const Mesh>(std::move(mesh));
  return r;
}

bool near_zero(double x, double scale) { return std::abs(x) <= 1e-9 * std::max(scale, 1.0); }

}  // namespace

CrossSectionResult solve_cross_section(const CrossSectionSpec& cross, const CoefficientField& a, int n,
                                       const SolveOptions& opt) {
  if (n < 4) throw Error("cross-section needs n >= 4");
  if (a.p() != cross.dim()) throw CoefficientError("coefficient p does not match the cross-section");
  Mesh mesh = cross.dim() == 1 ? mesh_interval(cross[0].a, cross[0].b, n)
                               : mesh_box2(cross[0].a, cross[0].b, cross[1].a, cross[1].b, n, n,
                                           opt.family == MeshFamily::Simplex);
  return cross_section_on_mesh(std::move(mesh), a, opt);
}

CrossSectionResult solve_cross_section_h(const CrossSectionSpec& cross, const CoefficientField& a, double target_h,
                                         const SolveOptions& opt) {
  if (a.p() != cross.dim()) throw CoefficientError("coefficient p does not match the cross-section");
  return cross_section_on_mesh(mesh_box(cross.intervals(), target_h, opt.family), a, opt);
}

bool gap_condition_holds(const CrossSectionResult& cs, double threshold) {
  if (!(threshold > 0.0)) threshold = 1e-8 * std::sqrt(cs.mu1);
  return cs.gap_indicator > threshold;
}

Mesh mesh_strip(double L, const CrossSectionSpec& cross, double target_h, MeshFamily family) {
  if (!(L > 0.0)) throw GeometryError("strip length must be positive");
  std::vector<Interval> axes{{-L, 0.0}};
  for (const auto& iv : cross.intervals()) axes.push_back(iv);
  Mesh mesh = mesh_box(axes, target_h, family);
  apply_tags(mesh, [&](std::span<const double> c, std::span<const double> n) {
    if (near_zero(c[0], L) && n[0] > 0.5) return std::pair{BoundaryTag::Neumann, 0};
    return std::pair{BoundaryTag::Dirichlet, -1};
  });
  return mesh;
}

ReducedResult solve_reduced(const CoefficientField& a, const Direction& nu, const CrossSectionSpec& cross,
                            const std::vector<double>& L_schedule, double target_h, const SolveOptions& opt,
                            double rel_tol) {
  if (L_schedule.empty()) throw Error("L schedule is empty");
  for (std::size_t i = 1; i < L_schedule.size(); ++i)
    if (!(L_schedule[i] > L_schedule[i - 1])) throw Error("L schedule must be ascending");
  if (!(target_h > 0.0)) throw Error("target_h must be positive");
  const CoefficientField a_nu = reduce_direction(a, nu);

  ReducedResult r;
  r.nu = nu;
  for (double L : L_schedule) {
    Mesh mesh = mesh_strip(L, cross, target_h, opt.family);
    check_dof_cap(free_node_count(mesh), opt);
    const auto pair = assemble(mesh, a_nu, 1, "strip");
    const auto eig = solve_pair(pair, 1, opt);
    const double z = eig.values[0];
    if (!r.Z_L.empty() && z > r.Z_L.back() + 1e-8 * std::abs(r.Z_L.back()))
      throw SolverError("monotonicity violated: Z_" + std::to_string(L) + " exceeds its predecessor");
    r.L_values.push_back(L);
    r.Z_L.push_back(z);
    r.residuals.push_back(eig.residuals[0]);
    r.dofs.push_back(pair.n());
    r.v = expand_to_nodes(pair, eig.vectors[0], mesh.num_nodes());
    r.mesh = std::make_shared<const Mesh>(std::move(mesh));
  }
  r.Z_extrap = r.Z_L.back();
  const std::size_t n = r.Z_L.size();
  r.converged = n >= 2 && std::abs(r.Z_L[n - 1] - r.Z_L[n - 2]) <= rel_tol * std::abs(r.Z_L[n - 1]);
  return r;
}

double solve_slab(const CoefficientField& a, const Direction& nu, const CrossSectionSpec& cross, double K,
                  double target_h, const SolveOptions& opt) {
  if (a.m() != 2) throw Error("slab problems need m = 2");
  if (!(K > 0.0)) throw Error("slab thickness K must be positive");
  const CoefficientField ab = conjugate_rotation(a, rotation_from_direction(nu));
  std::vector<Interval> axes{{-K, 0.0}, {-K, K}};
  for (const auto& iv : cross.intervals()) axes.push_back(iv);
  Mesh mesh = mesh_box(axes, target_h, opt.family);
  apply_tags(mesh, [&](std::span<const double> c, std::span<const double> n) {
    if (near_zero(c[0], K) && n[0] > 0.5) return std::pair{BoundaryTag::Neumann, 0};
    return std::pair{BoundaryTag::Dirichlet, -1};
  });
  check_dof_cap(free_node_count(mesh), opt);
  const auto pair = assemble(mesh, ab, 2, "slab");
  return solve_pair(pair, 1, opt).values[0];
}

SweepResult sweep_directions(const CoefficientField& a, const CrossSectionSpec& cross, const SweepOptions& sw,
                             const SolveOptions& opt) {
  const int m = a.m();
  if (m != 1 && m != 2) throw Error("direction sweeps need m = 1 or m = 2");
  SolveOptions inner = opt;
  inner.jobs = 1;

  auto direction_of = [&](double theta) {
    if (m == 1) return Direction({theta == 0.0 ? 1.0 : -1.0});
    return Direction::from_angle(theta);
  };
  auto evaluate = [&](double theta) {
    const Direction nu = direction_of(theta);
    try {
      const auto r = solve_reduced(a, nu, cross, sw.L_schedule, sw.target_h, inner, sw.rel_tol);
      return DirectionSample{theta, nu, r.Z_extrap, r.converged, r.residuals.back(), r.dofs.back()};
    } catch (const SolverError&) {
      if (!sw.keep_going) throw;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return DirectionSample{theta, nu, nan, false, nan, 0};
    }
  };

  std::vector<double> thetas;
  if (m == 1) {
    thetas = {0.0, std::numbers::pi};
  } else {
    if (sw.directions < 3) throw Error("a sweep needs at least 3 directions");
    for (int i = 0; i < sw.directions; ++i) thetas.push_back(2.0 * std::numbers::pi * i / sw.directions);
  }

  SweepResult res;
  res.samples = parallel_map(static_cast<int>(thetas.size()), opt.jobs, [&](int i) { return evaluate(thetas[i]); });
  res.grid_size = static_cast<int>(res.samples.size());

  auto better = [](const DirectionSample& x, const DirectionSample& y) {
    if (std::isnan(x.Z) || std::isnan(y.Z)) return !std::isnan(x.Z) && std::isnan(y.Z);
    const double tie = 1e-10 * std::max(std::abs(x.Z), std::abs(y.Z));
    if (x.Z < y.Z - tie) return true;
    if (x.Z > y.Z + tie) return false;
    return x.theta < y.theta;
  };
  auto grid_best = std::min_element(res.samples.begin(), res.samples.end(), better) - res.samples.begin();

  if (m == 2) {
    const double dtheta = 2.0 * std::numbers::pi / sw.directions;
    double zmax = 0.0;
    for (std::size_t i = 0; i < res.samples.size(); ++i) {
      const auto& nxt = res.samples[(i + 1) % res.samples.size()];
      if (std::isnan(nxt.Z) || std::isnan(res.samples[i].Z)) continue;
      res.max_jump = std::max(res.max_jump, std::abs(nxt.Z - res.samples[i].Z));
      zmax = std::max(zmax, std::abs(res.samples[i].Z));
    }
    const auto bounds = verify_ellipticity(a, cross, 64);
    res.jump_bound = 5.0 * (2.0 * bounds.C_A * zmax / bounds.c_A) * dtheta;
    res.continuous = res.max_jump <= res.jump_bound;

    if (sw.refine && !std::isnan(res.samples[grid_best].Z)) {
      const double g = (std::sqrt(5.0) - 1.0) / 2.0;
      const double center = res.samples[grid_best].theta;
      double lo = center - dtheta, hi = center + dtheta;
      auto wrap = [](double t) {
        const double two_pi = 2.0 * std::numbers::pi;
        t = std::fmod(t, two_pi);
        return t < 0.0 ? t + two_pi : t;
      };
      auto eval_wrapped = [&](double t) {
        auto s = evaluate(wrap(t));
        res.samples.push_back(s);
        return s.Z;
      };
      double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
      double fc = eval_wrapped(c), fd = eval_wrapped(d);
      while (hi - lo > dtheta / 16.0) {
        if (fc <= fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - g * (hi - lo);
          fc = eval_wrapped(c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + g * (hi - lo);
          fd = eval_wrapped(d);
        }
      }
    }
  }
  const auto& best = *std::min_element(res.samples.begin(), res.samples.end(), better);
  res.argmin = best.nu;
  res.argmin_theta = best.theta;
  res.min_value = best.Z;
  return res;
}

FullResult solve_full(const CylinderSpec& cyl, const CoefficientField& a, int k, double target_h, BoundaryMode bc,
                      const SolveOptions& opt) {
  if (a.m() != cyl.m() || a.p() != cyl.p()) throw CoefficientError("coefficient dimensions do not match the cylinder");
  Mesh mesh = mesh_cylinder(cyl, target_h, opt.family);
  if (bc == BoundaryMode::Dirichlet)
    for (auto& f : mesh.facets) {
      f.tag = BoundaryTag::Dirichlet;
      f.face_id = -1;
    }
  check_dof_cap(free_node_count(mesh), opt);
  auto pair = assemble(mesh, a, cyl.m(), bc == BoundaryMode::Mixed ? "full-mixed" : "full-dirichlet");
  FullResult r;
  r.eig = solve_pair(pair, k, opt);
  r.dofs = pair.n();
  r.mesh = std::make_shared<const Mesh>(std::move(mesh));
  r.pair = std::make_shared<const DiscreteOperatorPair>(std::move(pair));
  return r;
}

namespace {
double bump_halfwidth(int m) { return 1.0 / std::sqrt(static_cast<double>(std::max(m - 1, 1))); }
}  // namespace

double bump(double t, int m) {
  const double a = bump_halfwidth(m);
  if (std::abs(t) >= a) return 0.0;
  const double c = std::sqrt(4.0 / (3.0 * a));
  const double u = std::cos(std::numbers::pi * t / (2.0 * a));
  return c * u * u;
}

double bump_derivative(double t, int m) {
  const double a = bump_halfwidth(m);
  if (std::abs(t) >= a) return 0.0;
  const double c = std::sqrt(4.0 / (3.0 * a));
  const double w = std::numbers::pi / (2.0 * a);
  return -c * w * std::sin(2.0 * w * t);
}

double bump_energy(int m) {
  const double a = bump_halfwidth(m);
  return std::numbers::pi * std::numbers::pi / (3.0 * a * a);
}

UpperBoundResult upper_bound_quotient(const CylinderSpec& cyl, const CoefficientField& a, int face_id, double K,
                                      double target_h, const FullResult& full, const SolveOptions& opt) {
  if (!(K > 0.0)) throw GeometryError("K must be positive");
  const int m = cyl.m();
  const double ell = cyl.scale();
  const auto normals = outward_normals(cyl.base());
  if (face_id < 0 || face_id >= static_cast<int>(normals.size())) throw GeometryError("face id out of range");
  const Direction nu = normals[face_id].normal;
  std::vector<double> P = face_centroid(cyl.base(), face_id);
  for (auto& x : P) x *= ell;

  const double eps = 1e-9 * cyl.diameter();
  const double half = K * bump_halfwidth(m);
  std::vector<std::vector<double>> corners;
  if (m == 1) {
    corners.push_back({P[0] - (K - eps) * nu[0]});
  } else {
    for (double z1 : {-eps, -K})
      for (double zp : {-(half - eps), half - eps})
        corners.push_back({P[0] + z1 * nu[0] - zp * nu[1], P[1] + z1 * nu[1] + zp * nu[0]});
  }
  for (const auto& c : corners)
    if (!point_in_scaled_base(cyl.base(), ell, c)) throw GeometryError("upper-bound support does not fit inside the scaled base");

  const auto red = solve_reduced(a, nu, cyl.cross(), {K}, target_h, opt);
  const PointLocator locator(*red.mesh);
  const int p = cyl.p();
  const double sk = 1.0 / std::sqrt(K);

  auto q = [&](std::span<const double> x) {
    double z1 = 0.0, zp = 0.0;
    for (int i = 0; i < m; ++i) z1 += (x[i] - P[i]) * nu[i];
    if (m == 2) zp = -(x[0] - P[0]) * nu[1] + (x[1] - P[1]) * nu[0];
    if (z1 <= -K || z1 > eps) return 0.0;
    z1 = std::min(z1, 0.0);
    const double phi = m == 2 ? sk * bump(zp / K, m) : 1.0;
    if (phi == 0.0) return 0.0;
    std::vector<double> pt{z1};
    for (int j = 0; j < p; ++j) pt.push_back(x[m + j]);
    const auto v = locator.evaluate(red.v, pt);
    if (!v) throw AssemblyError("reduced eigenfunction could not be evaluated at a cylinder node");
    return *v * phi;
  };
  const auto x = interpolate(*full.mesh, *full.pair, q);
  return {rayleigh(*full.pair, x), red.Z_extrap, red.residuals.back(), nu};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error("slope fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw Error("slope fit needs distinct abscissae");
  return sxy / sxx;
}

DecayProfile decay_profile(const CylinderSpec& cyl, const FullResult& full, const std::vector<double>& radii) {
  const double ell = cyl.scale();
  if (radii.size() < 2) throw Error("decay profile needs at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || radii[i] > ell - 1.0 + 1e-12) throw Error("radii must lie in (0, ell - 1]");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw Error("radii must be ascending");
  }
  const Mesh& mesh = *full.mesh;
  const auto u = expand_to_nodes(*full.pair, full.eig.vectors[0], mesh.num_nodes());
  const int m = cyl.m();
  const std::size_t nr = radii.size();
  std::vector<double> shell_mass(nr, 0.0), shell_grad(nr, 0.0), shell_measure(nr, 0.0);

  DecayProfile d;
  d.radii = radii;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const auto ci = cell_integrals(mesh, e, u);
    d.total_mass += ci.mass;
    const auto c = mesh.cell_centroid(e);
    const std::span<const double> X(c.data(), m);
    for (std::size_t i = 0; i < nr; ++i)
      if (point_in_scaled_base(cyl.base(), radii[i], X)) {
        shell_mass[i] += ci.mass;
        shell_grad[i] += ci.gradient;
        shell_measure[i] += mesh.cell_measure(e);
        break;
      }
  }
  double cm = 0.0, cg = 0.0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < nr; ++i) {
    cm += shell_mass[i];
    cg += shell_grad[i];
    d.masses.push_back(cm);
    d.gradient_masses.push_back(cg);
    if (!(shell_measure[i] > 0.0)) throw Error("radius " + std::to_string(radii[i]) + " selects no cells");
    const double dens = shell_mass[i] / shell_measure[i];
    d.shell_densities.push_back(dens);
    if (dens > 0.0) {
      xs.push_back(ell - radii[i]);
      ys.push_back(std::log(dens));
    }
  }
  d.slope = xs.size() >= 2 ? fit_slope(xs, ys) : std::nan("");
  return d;
}

DecayProfile decay_profile(const CylinderSpec& cyl, const CoefficientField& a, const std::vector<double>& radii,
                           double target_h, const SolveOptions& opt, bool require_gap) {
  if (require_gap) {
    const auto cs = solve_cross_section_h(cyl.cross(), a, target_h, opt);
    if (!gap_condition_holds(cs)) throw Error("decay lemma hypotheses not met");
  }
  const auto full = solve_full(cyl, a, 1, target_h, BoundaryMode::Mixed, opt);
  return decay_profile(cyl, full, radii);
}

}  // namespace cylspec
