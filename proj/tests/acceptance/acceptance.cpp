// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "cylspec/error.hpp"
#include "cylspec/spectral.hpp"
#include "cylspec/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cylspec;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
const CrossSectionSpec kUnit({{0.0, 1.0}});

// Frozen strip values for the m = 1 gap coefficient at h = 1/16, computed by
// the independent assembly in tests/oracles/strip_oracle.py.
constexpr double kStripOracle[4] = {10.0450012527144, 9.89419981117794, 9.8703811709, 9.86854072301085};

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string csv;
  double seconds = 0.0;
};

// Accumulates named sub-checks into an outcome.
class Checks {
public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failed_ += (failed_.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
  Outcome finish(std::string csv) const {
    Outcome o;
    o.pass = pass_;
    o.detail = notes_ + (failed_.empty() ? "" : " | failed: " + failed_);
    o.csv = std::move(csv);
    return o;
  }

private:
  bool pass_ = true;
  std::string notes_, failed_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// CSV through the same writer the CLI uses.
struct Table {
  StudyRecord rec;
  explicit Table(std::vector<std::string> columns) { rec.columns = std::move(columns); }
  void add(std::vector<double> row) { rec.rows.push_back(std::move(row)); }
  std::string csv() const { return csv_text(rec); }
};

CoefficientField gap_m1() { return CoefficientField::parse(1, 1, {{"2", "0.5"}, {"0.5", "1"}}); }

CoefficientField hexagon_coefficient() {
  return CoefficientField::parse(2, 1, {{"2", "0", "0.5"}, {"0", "2", "0"}, {"0.5", "0", "1"}});
}

BaseSpec unit_square() { return BaseSpec::polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}); }

SolveOptions tensor() {
  SolveOptions o;
  o.family = MeshFamily::Tensor;
  return o;
}

Outcome cross_section_exactness() {
  Checks c;
  Table t({"n", "mu1", "error", "residual"});
  const auto a = CoefficientField::identity(0, 1);
  std::vector<double> errs;
  CrossSectionResult fine;
  for (int n : {16, 32, 64}) {
    auto cs = solve_cross_section(kUnit, a, n);
    errs.push_back(cs.mu1 - kPi2);
    t.add({double(n), cs.mu1, cs.mu1 - kPi2, cs.residual});
    if (n == 64) fine = std::move(cs);
  }
  c.require(fine.mu1 >= kPi2 && fine.mu1 <= kPi2 + 0.01, "mu1 in [pi^2, pi^2 + 0.01]");
  c.note("mu1=" + fmt("%.10f", fine.mu1));

  bool positive = true;
  for (std::size_t i = 0; i < fine.W.size(); ++i) {
    const double x = fine.mesh->node(static_cast<int>(i))[0];
    if (x > 0.0 && x < 1.0 && !(fine.W[i] > 0.0)) positive = false;
  }
  c.require(positive, "W positive");
  const auto pair = assemble(*fine.mesh, a, 0);
  std::vector<double> w(pair.n());
  for (int i = 0; i < pair.n(); ++i) w[i] = fine.W[pair.dof_nodes[i]];
  const double norm = std::sqrt(pair.M.quadratic_form(w));
  c.require(std::abs(norm - 1.0) <= 1e-10, "||W||_M = 1");
  c.note("||W||_M-1=" + fmt("%.2e", norm - 1.0));

  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double rate = std::log2(errs[i - 1] / errs[i]);
    c.require(std::abs(rate - 2.0) <= 0.2, "rate 2 +- 0.2");
    c.note("rate=" + fmt("%.4f", rate));
  }
  return c.finish(t.csv());
}

Outcome no_gap_identity() {
  Checks c;
  Table t({"ell", "dofs", "lambda", "mu1_h", "difference"});
  const double h = 0.125;
  auto opt = tensor();
  opt.dof_cap = 100000;
  const auto a = CoefficientField::identity(2, 1);
  const double mu = solve_cross_section_h(kUnit, a, h, opt).mu1;
  double worst = 0.0;
  for (double ell : {2.0, 4.0, 8.0}) {
    const auto full = solve_full(CylinderSpec(unit_square(), kUnit, ell), a, 1, h, BoundaryMode::Mixed, opt);
    const double d = full.eig.values[0] - mu;
    worst = std::max(worst, std::abs(d));
    t.add({ell, double(full.dofs), full.eig.values[0], mu, d});
  }
  c.require(worst <= 1e-8, "|lambda - mu1_h| <= 1e-8");
  c.note("max|lambda-mu1_h|=" + fmt("%.2e", worst));
  return c.finish(t.csv());
}

Outcome gap_reproduction() {
  Checks c;
  Table t({"quantity", "value"});
  const double h = 1.0 / 16;
  const auto a = gap_m1();
  const double mu = solve_cross_section_h(kUnit, a, h).mu1;
  const auto full = solve_full(CylinderSpec(BaseSpec::interval(-1, 1), kUnit, 8.0), a, 1, h);
  const double lam = full.eig.values[0];
  SweepOptions sw;
  sw.target_h = h;
  const auto sweep = sweep_directions(a, kUnit, sw);
  const double zmin = sweep.min_value;
  t.add({0, mu});
  t.add({1, lam});
  t.add({2, sweep.samples[0].Z});
  t.add({3, sweep.samples[1].Z});

  c.require(lam < mu - 0.05, "lambda_8 < mu1_h - 0.05");
  const double rel = std::abs(lam - zmin) / zmin;
  c.require(rel <= 0.02, "|lambda_8 - min Z|/min Z <= 0.02");
  c.require(std::abs(zmin - kStripOracle[3]) <= 1e-9 * kStripOracle[3], "min Z matches frozen oracle baseline");
  c.note("lambda_8=" + fmt("%.8f", lam) + ", mu1_h=" + fmt("%.8f", mu) + ", gap=" + fmt("%.5f", mu - lam) +
         ", minZ=" + fmt("%.8f", zmin) + ", rel=" + fmt("%.5f", rel));
  return c.finish(t.csv());
}

// Shared run for criteria 4, 7 and 10.
struct HexagonRun {
  double h = 0.25;
  double mu = 0.0;
  SweepResult sweep;
  std::map<int, FullResult> full;
  std::vector<UpperBoundResult> ub;
  int face = 0;
  double z_face = 0.0;
  double seconds_main = 0.0, seconds_ub = 0.0;
};

CylinderSpec hexagon_cylinder(double ell) {
  return CylinderSpec(regular_polygon(6, 1.5, std::numbers::pi / 6), kUnit, ell);
}

HexagonRun hexagon_run() {
  HexagonRun r;
  const auto a = hexagon_coefficient();
  const auto t0 = std::chrono::steady_clock::now();
  r.mu = solve_cross_section_h(kUnit, a, r.h).mu1;
  SweepOptions sw;
  sw.directions = 64;
  sw.target_h = r.h;
  r.sweep = sweep_directions(a, kUnit, sw);
  for (int ell : {2, 4, 6}) r.full.emplace(ell, solve_full(hexagon_cylinder(ell), a, 3, r.h));
  const auto t1 = std::chrono::steady_clock::now();
  // Face whose outward normal is closest to the sweep minimiser.
  const auto normals = outward_normals(hexagon_cylinder(6).base());
  double best = -2.0;
  for (std::size_t f = 0; f < normals.size(); ++f) {
    const double d = normals[f].normal[0] * r.sweep.argmin[0] + normals[f].normal[1] * r.sweep.argmin[1];
    if (d > best + 1e-12) best = d, r.face = static_cast<int>(f);
  }
  for (double K : {2.0, 4.0})
    r.ub.push_back(upper_bound_quotient(hexagon_cylinder(6), a, r.face, K, r.h, r.full.at(6)));
  r.z_face = solve_reduced(a, r.ub.front().nu, kUnit, sw.L_schedule, r.h).Z_extrap;
  const auto t2 = std::chrono::steady_clock::now();
  r.seconds_main = std::chrono::duration<double>(t1 - t0).count();
  r.seconds_ub = std::chrono::duration<double>(t2 - t1).count();
  return r;
}

Outcome main_theorem(const HexagonRun& r) {
  Checks c;
  Table t({"ell", "dofs", "lambda_1", "lambda_2", "lambda_3"});
  for (const auto& [ell, f] : r.full) t.add({double(ell), double(f.dofs), f.eig.values[0], f.eig.values[1], f.eig.values[2]});
  for (const auto& s : r.sweep.samples) t.add({s.theta, double(s.dofs), s.Z, s.residual, double(s.converged)});
  const double zmin = r.sweep.min_value;
  c.require(zmin < r.mu - 0.05, "min Z < mu1_h - 0.05");
  const double l2 = r.full.at(2).eig.values[0], l4 = r.full.at(4).eig.values[0], l6 = r.full.at(6).eig.values[0];
  c.require(l2 > l4 && l4 > l6, "lambda_ell decreasing over {2,4,6}");
  const double rel = std::abs(l6 - zmin) / zmin;
  c.require(rel <= 0.05, "|lambda_6 - min Z|/min Z <= 0.05");
  c.note("minZ=" + fmt("%.6f", zmin) + " at theta=" + fmt("%.4f", r.sweep.argmin_theta) + ", mu1_h=" +
         fmt("%.6f", r.mu) + ", gap=" + fmt("%.5f", r.mu - zmin) + ", lambda_2,4,6=" + fmt("%.6f", l2) + "," +
         fmt("%.6f", l4) + "," + fmt("%.6f", l6) + ", rel=" + fmt("%.5f", rel));
  auto o = c.finish(t.csv());
  o.seconds = r.seconds_main;
  return o;
}

Outcome higher_eigenvalues(const HexagonRun& r) {
  Checks c;
  Table t({"ell", "spread"});
  const auto spread = [&](int ell) { return r.full.at(ell).eig.values[2] - r.full.at(ell).eig.values[0]; };
  for (int ell : {2, 4, 6}) t.add({double(ell), spread(ell)});
  const double ratio = spread(6) / spread(2);
  c.require(ratio <= 0.25, "spread(6) <= spread(2)/4");
  c.note("spread ratio=" + fmt("%.4f", ratio));
  auto o = c.finish(t.csv());
  o.seconds = r.seconds_main;
  return o;
}

Outcome upper_bound(const HexagonRun& r) {
  Checks c;
  Table t({"K", "quotient", "Z_K", "excess"});
  const double lam = r.full.at(6).eig.values[0];
  const double e2 = r.ub[0].quotient - r.z_face, e4 = r.ub[1].quotient - r.z_face;
  t.add({2, r.ub[0].quotient, r.ub[0].Z_K, e2});
  t.add({4, r.ub[1].quotient, r.ub[1].Z_K, e4});
  c.require(r.ub[0].quotient >= lam && r.ub[1].quotient >= lam, "quotient >= lambda_6");
  c.require(r.ub[1].quotient < r.ub[0].quotient, "quotient decreasing in K");
  c.require(e4 > 0.0 && e4 < e2, "0 < excess(4) < excess(2)");
  c.note("face " + std::to_string(r.face) + ", lambda_6=" + fmt("%.6f", lam) + ", q2=" + fmt("%.6f", r.ub[0].quotient) + ", q4=" +
         fmt("%.6f", r.ub[1].quotient) + ", Z(nu)=" + fmt("%.6f", r.z_face));
  auto o = c.finish(t.csv());
  o.seconds = r.seconds_ub;
  return o;
}

Outcome monotonicity() {
  Checks c;
  Table t({"case", "kind", "size", "value"});
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 0.6);
  const auto opt = tensor();
  const double h_strip = 0.125, h_slab = 0.25;
  double worst_excess = -1e300;
  for (int trial = 0; trial < 5; ++trial) {
    DenseMatrix b(3, 3), d(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = g(rng);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = i == j ? 0.3 : 0.0;
        for (int k = 0; k < 3; ++k) s += b(i, k) * b(j, k);
        d(i, j) = s;
      }
    const auto a = CoefficientField::constant(2, 1, d);
    const double bn = std::hypot(d(0, 2), d(1, 2));
    const Direction nu = bn > 1e-3 ? Direction::normalized({d(0, 2), d(1, 2)}) : Direction({1.0, 0.0});

    const auto red = solve_reduced(a, nu, kUnit, {4, 8, 16, 32}, h_strip, opt);
    for (std::size_t i = 0; i < red.Z_L.size(); ++i) {
      t.add({double(trial), 0, red.L_values[i], red.Z_L[i]});
      if (i > 0) c.require(red.Z_L[i] <= red.Z_L[i - 1] * (1.0 + 1e-8), "Z_L non-increasing");
    }
    std::vector<double> s;
    for (double K : {2.0, 4.0, 8.0}) {
      s.push_back(solve_slab(a, nu, kUnit, K, h_slab, opt));
      t.add({double(trial), 1, K, s.back()});
    }
    for (std::size_t i = 1; i < s.size(); ++i) c.require(s[i] <= s[i - 1] * (1.0 + 1e-8), "s_K non-increasing");
    const double mu = solve_cross_section_h(kUnit, a, h_strip, opt).mu1;
    c.require(red.Z_extrap <= mu + 1e-8, "Z_extrap <= mu1_h + 1e-8");
    worst_excess = std::max(worst_excess, red.Z_extrap - mu);
  }
  c.note("max(Z_extrap - mu1_h)=" + fmt("%.3e", worst_excess));
  return c.finish(t.csv());
}

Outcome dirichlet_bracket() {
  Checks c;
  Table t({"ell", "sigma_1", "sigma_2", "sigma_3"});
  const double h = 0.25;
  const auto opt = tensor();
  const auto a = CoefficientField::identity(2, 1);
  const double mu = solve_cross_section_h(kUnit, a, h, opt).mu1;
  std::vector<double> x, y;
  double lowest = 1e300;
  for (double ell : {2.0, 4.0, 8.0}) {
    const auto f = solve_full(CylinderSpec(unit_square(), kUnit, ell), a, 3, h, BoundaryMode::Dirichlet, opt);
    t.add({ell, f.eig.values[0], f.eig.values[1], f.eig.values[2]});
    for (double s : f.eig.values) lowest = std::min(lowest, s - mu);
    x.push_back(std::log(ell));
    y.push_back(std::log(f.eig.values[0] - mu));
  }
  const double slope = fit_slope(x, y);
  c.require(lowest >= -1e-8, "sigma >= mu1_h - 1e-8");
  c.require(std::abs(slope + 2.0) <= 0.3, "slope -2 +- 0.3");
  c.note("min(sigma-mu1_h)=" + fmt("%.5f", lowest) + ", slope=" + fmt("%.5f", slope));
  return c.finish(t.csv());
}

Outcome decay() {
  Checks c;
  Table t({"case", "r", "mass", "shell_density"});
  const double h = 1.0 / 16;
  const CylinderSpec cyl(BaseSpec::interval(-1, 1), kUnit, 8.0);
  const std::vector<double> radii{1, 2, 3, 4, 5, 6, 7};
  const auto gap = decay_profile(cyl, gap_m1(), radii, h);
  const auto ctl = decay_profile(cyl, CoefficientField::identity(1, 1), radii, h, {}, false);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    t.add({0, radii[i], gap.masses[i], gap.shell_densities[i]});
    t.add({1, radii[i], ctl.masses[i], ctl.shell_densities[i]});
  }
  c.require(gap.slope <= -0.1, "gap slope <= -0.1");
  c.require(std::abs(ctl.slope) <= 0.02, "control |slope| <= 0.02");
  c.note("gap slope=" + fmt("%.5f", gap.slope) + ", control slope=" + fmt("%.2e", ctl.slope));
  return c.finish(t.csv());
}

Outcome oracle_equivalence() {
  Checks c;
  Table t({"pair", "n", "index", "lanczos", "dense"});
  std::vector<DiscreteOperatorPair> pairs;
  pairs.push_back(assemble(mesh_interval(0, 1, 64), CoefficientField::identity(0, 1), 0));
  pairs.push_back(assemble(mesh_box2(0, 1, 0, 1, 12, 12, true), CoefficientField::identity(1, 1), 1));
  pairs.push_back(assemble(mesh_box2(0, 1, 0, 1, 10, 10), CoefficientField::parse(1, 1, {{"1+xi1", "0.2"}, {"0.2", "1"}}), 1));
  pairs.push_back(assemble(mesh_strip(4, kUnit, 0.25, MeshFamily::Simplex), reduce_direction(gap_m1(), Direction({1.0})), 1));
  pairs.push_back(assemble(mesh_cylinder(CylinderSpec(BaseSpec::interval(-1, 1), kUnit, 2.0), 0.125), gap_m1(), 1));
  pairs.push_back(assemble(mesh_cylinder(hexagon_cylinder(1.0), 0.5), hexagon_coefficient(), 2));
  pairs.push_back(assemble(mesh_box3({0, 1, 0, 1, 0, 1}, 6, 6, 6), CoefficientField::identity(2, 1), 2));
  int checked = 0;
  double worst = 0.0, worst_res = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& pair = pairs[p];
    if (pair.n() > 300 || pair.n() < 4) continue;
    const auto l = smallest_eigenpairs(pair, 4);
    const auto d = dense_oracle(pair, 4);
    for (int i = 0; i < 4; ++i) {
      t.add({double(p), double(pair.n()), double(i), l.values[i], d.values[i]});
      worst = std::max(worst, std::abs(l.values[i] - d.values[i]) / std::abs(d.values[i]));
      worst_res = std::max({worst_res, l.residuals[i], d.residuals[i]});
    }
    ++checked;
  }
  c.require(checked >= 6, "at least six operator pairs with n <= 300");
  c.require(worst <= 1e-8, "relative agreement 1e-8");
  c.require(worst_res <= 1e-10, "residuals <= 1e-10");
  c.note(std::to_string(checked) + " pairs, max rel diff=" + fmt("%.2e", worst) + ", max residual=" + fmt("%.2e", worst_res));
  return c.finish(t.csv());
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
};

const Criterion kCriteria[] = {
    {1, "cross-section exactness", 1.0},  {2, "no-gap identity", 120.0},
    {3, "gap reproduction", 60.0},         {4, "main theorem m=2", 900.0},
    {5, "monotonicity suites", 300.0},     {6, "Dirichlet bracket", 300.0},
    {7, "higher eigenvalues", 900.0},      {8, "decay", 60.0},
    {9, "solver oracle equivalence", 30.0}, {10, "upper-bound construction", 180.0},
};

Outcome guarded(const std::function<Outcome()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (o.seconds == 0.0) o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

std::map<int, Outcome> run_all() {
  std::map<int, Outcome> out;
  out[1] = guarded(cross_section_exactness);
  out[2] = guarded(no_gap_identity);
  out[3] = guarded(gap_reproduction);
  std::optional<HexagonRun> hex;
  std::string hex_error;
  try {
    hex = hexagon_run();
  } catch (const std::exception& e) {
    hex_error = e.what();
  }
  auto with_hex = [&](Outcome (*f)(const HexagonRun&)) {
    return guarded([&] {
      if (!hex) throw Error("hexagon run failed: " + hex_error);
      return f(*hex);
    });
  };
  out[4] = with_hex(main_theorem);
  out[7] = with_hex(higher_eigenvalues);
  out[10] = with_hex(upper_bound);
  out[5] = guarded(monotonicity);
  out[6] = guarded(dirichlet_bracket);
  out[8] = guarded(decay);
  out[9] = guarded(oracle_equivalence);
  return out;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, bool pass, const std::string& detail) {
    std::printf("%s  %2d %-27s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  };

  auto first = run_all();
  for (const auto& c : kCriteria) {
    auto& o = first[c.id];
    const bool in_time = o.seconds < c.limit_seconds;
    std::string detail = o.detail + " [" + fmt("%.2f", o.seconds) + " s";
    detail += in_time ? "]" : " exceeds " + fmt("%.0f", c.limit_seconds) + " s]";
    report(c.id, c.name, o.pass && in_time, detail);
  }

  auto second = run_all();
  std::vector<int> differing;
  for (const auto& c : kCriteria)
    if (first[c.id].csv != second[c.id].csv || first[c.id].csv.empty()) differing.push_back(c.id);
  std::string detail = "CSV bytes of criteria 1-10 identical on rerun";
  if (!differing.empty()) {
    detail = "differing or empty CSV for criteria";
    for (int id : differing) detail += " " + std::to_string(id);
  }
  report(11, "determinism", differing.empty(), detail);

  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
