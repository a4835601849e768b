#include <doctest.h>

#include "cylspec/error.hpp"
#include "cylspec/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace cylspec;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
const CrossSectionSpec kUnit({{0.0, 1.0}});

CoefficientField gap_m1() { return CoefficientField::parse(1, 1, {{"2", "0.5"}, {"0.5", "1"}}); }

CoefficientField coupled(double b) {
  return CoefficientField::parse(2, 1, {{"2", "0", std::to_string(b)}, {"0", "2", "0"}, {std::to_string(b), "0", "2"}});
}

SolveOptions tensor() {
  SolveOptions o;
  o.family = MeshFamily::Tensor;
  return o;
}

BaseSpec unit_square() { return BaseSpec::polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}); }

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("cross-section eigenpair") {
  const auto id = solve_cross_section(kUnit, CoefficientField::identity(1, 1), 64);
  CHECK(id.mu1 >= kPi2);
  CHECK(id.mu1 <= kPi2 + 0.01);
  CHECK(id.gap_indicator == 0.0);
  CHECK_FALSE(gap_condition_holds(id));
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < id.W.size(); ++i) {
    CHECK(id.W[i] > 0.0);
    s += id.W[i] * id.W[i] / 64.0;
  }
  CHECK(s == doctest::Approx(1.0).epsilon(0.01));

  const auto scaled = solve_cross_section(kUnit, CoefficientField::parse(1, 1, {{"1", "0"}, {"0", "4"}}), 64);
  CHECK(std::abs(scaled.mu1 - 4.0 * id.mu1) <= 1e-9 * scaled.mu1);

  const auto g = solve_cross_section(kUnit, gap_m1(), 64);
  CHECK(std::abs(g.gap_indicator - 0.5 * std::numbers::pi) <= 0.01);
  CHECK(gap_condition_holds(g));
  CHECK_FALSE(gap_condition_holds(g, 2.0));
  CHECK_THROWS_AS(solve_cross_section(kUnit, CoefficientField::identity(1, 1), 3), Error);
}

TEST_CASE("cross-section converges at second order") {
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const double err = solve_cross_section(kUnit, CoefficientField::identity(1, 1), n).mu1 - kPi2;
    if (n > 16) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.02));
    prev = err;
  }
}

TEST_CASE("reduced problem without coupling approaches the cross-section value") {
  const std::vector<double> Ls{4, 8, 16, 32};
  const double h = 1.0 / 16;
  const auto opt = tensor();
  const double mu = solve_cross_section_h(kUnit, CoefficientField::identity(1, 1), h, opt).mu1;
  const auto r = solve_reduced(CoefficientField::identity(1, 1), Direction({1.0}), kUnit, Ls, h, opt);
  for (std::size_t i = 1; i < r.Z_L.size(); ++i) CHECK(r.Z_L[i] <= r.Z_L[i - 1]);
  for (std::size_t i = 0; i < r.Z_L.size(); ++i) {
    const double q = std::numbers::pi / (2.0 * Ls[i]);
    CHECK(r.Z_L[i] - mu >= q * q * (1.0 - 1e-9));
    CHECK(r.Z_L[i] - mu <= q * q * 1.1);
  }
  CHECK(r.Z_extrap - mu <= std::pow(std::numbers::pi / 64.0, 2) * 1.1);
}

TEST_CASE("reduced problem with coupling matches the frozen strip oracle") {
  // Independent P1 strip assembly (tests/oracles/strip_oracle.py), h = 1/16.
  const double oracle[4] = {10.0450012527144, 9.89419981117794, 9.8703811709, 9.86854072301085};
  const double h = 1.0 / 16;
  const auto r = solve_reduced(gap_m1(), Direction({1.0}), kUnit, {4, 8, 16, 32}, h);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(r.Z_L[i] - oracle[i]) <= 1e-9 * oracle[i]);
  const double mu = solve_cross_section_h(kUnit, gap_m1(), h).mu1;
  CHECK(r.Z_extrap < kPi2);
  CHECK(r.Z_extrap <= mu + 1e-8);
  CHECK_FALSE(r.v.empty());
  CHECK_THROWS_AS(solve_reduced(gap_m1(), Direction({1.0}), kUnit, {8, 4}, h), Error);
}

TEST_CASE("slab values decrease with K") {
  SolveOptions opt;
  const auto a = coupled(0.5);
  const Direction nu({1.0, 0.0});
  const double s2 = solve_slab(a, nu, kUnit, 2.0, 0.25, opt);
  const double s4 = solve_slab(a, nu, kUnit, 4.0, 0.25, opt);
  CHECK(s4 <= s2 * (1.0 + 1e-9));
  CHECK_THROWS_AS(solve_slab(gap_m1(), Direction({1.0}), kUnit, 2.0, 0.25, opt), Error);
}

TEST_CASE("direction sweeps") {
  SweepOptions sw;
  sw.directions = 8;
  sw.target_h = 0.125;
  const auto opt = tensor();

  SUBCASE("isotropic coefficient gives a constant profile") {
    const auto r = sweep_directions(CoefficientField::identity(2, 1), kUnit, sw, opt);
    REQUIRE(r.samples.size() == 8);
    for (const auto& s : r.samples) CHECK(s.Z == doctest::Approx(r.samples[0].Z).epsilon(1e-10));
    CHECK(r.argmin_theta == 0.0);
    CHECK(r.continuous);
  }
  SUBCASE("coupling along e1") {
    const double b = 0.5;
    const auto a = coupled(b);
    const double mu = solve_cross_section_h(kUnit, a, sw.target_h, opt).mu1;
    const auto r = sweep_directions(a, kUnit, sw, opt);
    CHECK((r.argmin_theta == 0.0 || std::abs(r.argmin_theta - std::numbers::pi) < 1e-12));
    const auto& perp = r.samples[2];
    CHECK(perp.theta == doctest::Approx(std::numbers::pi / 2));
    const double q = std::numbers::pi / 64.0;
    CHECK(perp.Z - mu >= -1e-9);
    CHECK(perp.Z - mu <= 2.0 * q * q * 1.1);
    CHECK(r.min_value < mu);
    CHECK(r.samples[0].Z == doctest::Approx(r.samples[4].Z).epsilon(1e-9));
  }
  SUBCASE("m = 1 samples both directions") {
    const auto r = sweep_directions(gap_m1(), kUnit, sw);
    REQUIRE(r.samples.size() == 2);
    CHECK(r.samples[0].nu[0] == 1.0);
    CHECK(r.samples[1].nu[0] == -1.0);
    CHECK(r.min_value == std::min(r.samples[0].Z, r.samples[1].Z));
  }
}

TEST_CASE("full problem separates for an isotropic tensor-mesh cylinder") {
  const auto opt = tensor();
  const double h = 0.25;
  const double mu = solve_cross_section_h(kUnit, CoefficientField::identity(2, 1), h, opt).mu1;
  for (double ell : {2.0, 4.0}) {
    const CylinderSpec cyl(unit_square(), kUnit, ell);
    const auto full = solve_full(cyl, CoefficientField::identity(2, 1), 2, h, BoundaryMode::Mixed, opt);
    CHECK(std::abs(full.eig.values[0] - mu) <= 1e-8);
    const double lateral = std::pow(std::numbers::pi / ell, 2);
    CHECK(full.eig.values[1] - mu == doctest::Approx(lateral).epsilon(0.05));
  }
}

TEST_CASE("Dirichlet values bound the mixed ones from above") {
  const CylinderSpec cyl(BaseSpec::interval(-1, 1), kUnit, 3.0);
  const auto mixed = solve_full(cyl, gap_m1(), 3, 0.125);
  const auto dir = solve_full(cyl, gap_m1(), 3, 0.125, BoundaryMode::Dirichlet);
  for (int i = 0; i < 3; ++i) CHECK(dir.eig.values[i] >= mixed.eig.values[i]);
  CHECK(dir.dofs < mixed.dofs);
  SolveOptions capped;
  capped.dof_cap = 10;
  CHECK_THROWS_WITH_AS(solve_full(cyl, gap_m1(), 1, 0.125, BoundaryMode::Mixed, capped),
                       doctest::Contains("dof cap"), SolverError);
}

TEST_CASE("bump profile") {
  for (int m : {1, 2, 3}) {
    const double a = 1.0 / std::sqrt(std::max(m - 1, 1));
    double mass = 0.0, energy = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double t = -a + (i + 0.5) * 2.0 * a / n;
      mass += bump(t, m) * bump(t, m) * 2.0 * a / n;
      energy += bump_derivative(t, m) * bump_derivative(t, m) * 2.0 * a / n;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(energy == doctest::Approx(bump_energy(m)).epsilon(1e-8));
    CHECK(bump(a * 1.01, m) == 0.0);
  }
}

TEST_CASE("upper-bound quotients sit above the eigenvalue and fall with K") {
  const CylinderSpec cyl(BaseSpec::interval(-1, 1), kUnit, 20.0);
  const double h = 0.125;
  const auto full = solve_full(cyl, gap_m1(), 1, h);
  double prev = 1e300;
  for (double K : {2.0, 4.0, 8.0}) {
    const auto ub = upper_bound_quotient(cyl, gap_m1(), 0, K, h, full);
    CHECK(ub.quotient >= full.eig.values[0] * (1.0 - 1e-12));
    CHECK(ub.quotient < prev);
    prev = ub.quotient;
  }
  CHECK_THROWS_AS(upper_bound_quotient(cyl, gap_m1(), 5, 2.0, h, full), GeometryError);
  CHECK_THROWS_AS(upper_bound_quotient(cyl, gap_m1(), 0, 45.0, h, full), GeometryError);
}

TEST_CASE("decay profile") {
  const CylinderSpec cyl(BaseSpec::interval(-1, 1), kUnit, 6.0);
  const auto d = decay_profile(cyl, gap_m1(), {1, 2, 3, 4, 5}, 0.125);
  CHECK(d.total_mass == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t i = 1; i < d.masses.size(); ++i) {
    CHECK(d.masses[i] >= d.masses[i - 1]);
    CHECK(d.gradient_masses[i] >= d.gradient_masses[i - 1]);
  }
  CHECK(d.masses.back() <= d.total_mass);
  CHECK(d.slope < 0.0);
  CHECK_THROWS_WITH_AS(decay_profile(cyl, CoefficientField::identity(1, 1), {1, 2}, 0.125),
                       "decay lemma hypotheses not met", Error);
  CHECK_THROWS_AS(decay_profile(cyl, gap_m1(), {1, 5.5}, 0.125), Error);
}

TEST_CASE("least-squares slope") {
  CHECK(fit_slope({0, 1, 2}, {1, 3, 5}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(fit_slope({1}, {1}), Error);
  CHECK_THROWS_AS(fit_slope({1, 1}, {1, 2}), Error);
}

}  // TEST_SUITE
