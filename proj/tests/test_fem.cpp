#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pcond/fem.hpp"

using namespace pcond;
using namespace pcond::geom;
using namespace pcond::fem;
using oracles::AnnulusOracle;
using oracles::trace_of;

namespace {

Scenario disk_scenario(std::vector<InclusionComponent> incs, double p = 2.0) {
  return build_scenario(Circle{{0, 0}, 1.0}, std::move(incs), 1.0, p);
}

}  // namespace

TEST_CASE("p=2, no inclusions: linear data is reproduced exactly") {
  auto sc = disk_scenario({});
  auto m = mesh::triangulate(sc, 0.2);
  auto f = trace_of(m, [](Vec2 x) { return x.x; });
  auto u = solve_p2(sc, m, f);
  double err = 0.0;
  for (std::size_t v = 0; v < m.node_count(); ++v)
    err = std::max(err, std::abs(u.nodal_values[v] - m.nodes[v].x));
  CHECK(err <= 1e-12);
}

TEST_CASE("superconducting annulus matches the separation-of-variables oracle") {
  double rho0 = 0.5;
  auto sc = disk_scenario({{Circle{{0, 0}, rho0}, InclusionKind::Superconducting}});
  auto m = mesh::triangulate(sc, 0.04);
  auto oracle = AnnulusOracle::superconducting(rho0);
  auto f = trace_of(m, [](Vec2 x) { return x.x; });  // cos(theta) on the unit circle
  auto u = solve_p2(sc, m, f);
  CHECK(std::abs(u.component_constants[0]) <= 1e-6);
  double err = 0.0;
  for (std::size_t v = 0; v < m.node_count(); ++v) {
    if (m.nodes[v].norm() < rho0) continue;
    err = std::max(err, std::abs(u.nodal_values[v] - oracle.eval(m.nodes[v])));
  }
  CHECK(err <= 0.01);
  CHECK(energy(u) == doctest::Approx(oracle.dn_pairing()).epsilon(0.02));
}

TEST_CASE("insulating annulus matches the Neumann oracle") {
  double rho0 = 0.5;
  auto sc = disk_scenario({{Circle{{0, 0}, rho0}, InclusionKind::Insulating}});
  auto m = mesh::triangulate(sc, 0.04);
  auto oracle = AnnulusOracle::insulating(rho0);
  auto f = trace_of(m, [](Vec2 x) { return x.x; });
  auto u = solve_p2(sc, m, f);
  double err = 0.0;
  for (std::size_t v = 0; v < m.node_count(); ++v) {
    if (m.nodes[v].norm() < rho0 - 1e-12) continue;
    err = std::max(err, std::abs(u.nodal_values[v] - oracle.eval(m.nodes[v])));
  }
  CHECK(err <= 0.01);
  CHECK(energy(u) == doctest::Approx(oracle.dn_pairing()).epsilon(0.02));
}

TEST_CASE("solve_p at p=2 reproduces the linear path") {
  auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting}});
  auto m = mesh::triangulate(sc, 0.1);
  auto f = trace_of(m, [](Vec2 x) { return x.x + 0.3 * x.y; });
  auto u2 = solve_p2(sc, m, f);
  auto up = solve_p(sc, m, f);
  CHECK(up.converged);
  double err = 0.0;
  for (std::size_t v = 0; v < m.node_count(); ++v)
    err = std::max(err, std::abs(u2.nodal_values[v] - up.nodal_values[v]));
  CHECK(err <= 1e-8);
}

TEST_CASE("p=4 with affine data: affine functions are p-harmonic") {
  auto sc = disk_scenario({}, 4.0);
  auto m = mesh::triangulate(sc, 0.15);
  auto f = trace_of(m, [](Vec2 x) { return x.x; });
  SolverOptions opts;
  opts.epsilon_override = 1e-10;
  auto u = solve_p(sc, m, f, opts);
  CHECK(u.converged);
  double err = 0.0;
  for (std::size_t v = 0; v < m.node_count(); ++v)
    err = std::max(err, std::abs(u.nodal_values[v] - m.nodes[v].x));
  CHECK(err <= 1e-6);
  // |grad u| = 1 so the p-energy equals the disk area.
  CHECK(energy(u) == doctest::Approx(M_PI).epsilon(0.02));
}

TEST_CASE("energy monotonicity in the conductivity") {
  // insulating <= empty <= superconducting for the same region and data.
  for (double p : {1.5, 2.0, 3.0}) {
    auto sc_s = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting}}, p);
    auto sc_i = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Insulating}}, p);
    auto m = mesh::triangulate(sc_s, 0.1);
    auto f = trace_of(m, [](Vec2 x) { return x.x; });
    double Ee = energy(solve_p(sc_s, m, f, {}, fem::NewtonInit::Harmonic, 0, true));
    double Es = energy(solve_p(sc_s, m, f));
    double Ei = energy(solve_p(sc_i, m, f));
    CHECK(Ei < Ee - 1e-6);
    CHECK(Ee < Es - 1e-6);
  }
}

TEST_CASE("el_residual: converged solves are orthogonal, one step is not") {
  auto sc = disk_scenario({{Circle{{-0.1, 0.2}, 0.25}, InclusionKind::Superconducting}}, 4.0);
  auto m = mesh::triangulate(sc, 0.12);
  auto f = trace_of(m, [](Vec2 x) { return x.x * x.x - x.y * x.y; });

  auto u2 = solve_p2(sc, m, trace_of(m, [](Vec2 x) { return x.x; }));
  CHECK(el_residual(u2) <= 1e-10);

  SolverOptions opts;
  auto u4 = solve_p(sc, m, f, opts);
  CHECK(u4.converged);
  CHECK(el_residual(u4) <= 10 * opts.newton_tol);

  SolverOptions one;
  one.max_iters = 1;
  auto u1 = solve_p(sc, m, f, one, NewtonInit::Zero);
  CHECK_FALSE(u1.converged);
  CHECK(el_residual(u1) > 10 * opts.newton_tol);
}

TEST_CASE("component flux vanishes weakly") {
  auto sc = disk_scenario({{Circle{{0, 0}, 0.4}, InclusionKind::Superconducting}});
  auto m = mesh::triangulate(sc, 0.08);
  auto f = trace_of(m, [](Vec2 x) { return x.x; });
  auto u = solve_p2(sc, m, f);
  CHECK(std::abs(component_flux(u, 0)) <= 1e-9);

  auto sc2 = disk_scenario({{Circle{{0.25, 0.1}, 0.3}, InclusionKind::Superconducting}});
  auto m2 = mesh::triangulate(sc2, 0.08);
  auto f2 = trace_of(m2, [](Vec2 x) { return x.x; });
  auto u2 = solve_p2(sc2, m2, f2);
  CHECK(std::abs(component_flux(u2, 0)) <= 1e-8);
}

TEST_CASE("flux field vanishes on insulator triangles") {
  auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Insulating}}, 3.0);
  auto m = mesh::triangulate(sc, 0.12);
  auto f = trace_of(m, [](Vec2 x) { return x.x; });
  auto u = solve_p(sc, m, f);
  auto F = flux_field(u);
  for (std::size_t t = 0; t < m.triangle_count(); ++t)
    if (m.region[t] == 0) {
      CHECK(F.flux[t].x == 0.0);
      CHECK(F.flux[t].y == 0.0);
    }
}

TEST_CASE("flux uniqueness across optimizer initializations") {
  auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Insulating}}, 3.0);
  auto m = mesh::triangulate(sc, 0.12);
  auto f = trace_of(m, [](Vec2 x) { return x.x + 0.5 * x.y; });
  SolverOptions opts;
  opts.newton_tol = 1e-12;
  auto ua = solve_p(sc, m, f, opts, NewtonInit::Harmonic);
  auto ub = solve_p(sc, m, f, opts, NewtonInit::Random, 1234);
  REQUIRE(ua.converged);
  REQUIRE(ub.converged);
  auto Fa = flux_field(ua), Fb = flux_field(ub);
  double err = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t)
    err = std::max(err, (Fa.flux[t] - Fb.flux[t]).norm());
  CHECK(err <= 1e-6);
}

TEST_CASE("superconductor constant is linear in the data at p=2") {
  auto sc = disk_scenario({{Circle{{0.1, -0.2}, 0.3}, InclusionKind::Superconducting}});
  auto m = mesh::triangulate(sc, 0.1);
  auto f = trace_of(m, [](Vec2 x) { return x.x; });
  auto g = trace_of(m, [](Vec2 x) { return x.y + 0.5; });
  LinearP2System sys(sc, m, false);
  double cf = sys.solve(f).component_constants[0];
  double cg = sys.solve(g).component_constants[0];
  fem::BoundaryTrace fg(f.size());
  double alpha = 1.7, beta = -0.6;
  for (std::size_t i = 0; i < f.size(); ++i) fg[i] = alpha * f[i] + beta * g[i];
  double cfg = sys.solve(fg).component_constants[0];
  CHECK(cfg == doctest::Approx(alpha * cf + beta * cg).epsilon(1e-10));
}

TEST_CASE("energy ignores values inside insulators") {
  auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Insulating}});
  auto m = mesh::triangulate(sc, 0.15);
  auto f = trace_of(m, [](Vec2 x) { return x.x; });
  auto u = solve_p2(sc, m, f);
  double e0 = energy(u);
  // Perturb strictly interior insulator nodes only.
  std::vector<char> on_interface(m.node_count(), 0);
  for (const auto& be : m.boundary_edges)
    if (be.curve == 0) on_interface[be.a] = on_interface[be.b] = 1;
  int touched = 0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t)
    if (m.region[t] == 0)
      for (int v : m.triangles[t])
        if (!on_interface[v]) {
          u.nodal_values[v] += 17.0;
          ++touched;
        }
  CHECK(touched > 0);
  CHECK(energy(u) == e0);  // bit identical
}

TEST_CASE("H1 norm of the solution is data-continuous at p=2") {
  auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting}});
  auto m = mesh::triangulate(sc, 0.12);
  LinearP2System sys(sc, m, false);
  LinearP2System free_sys(sc, m, true);
  std::mt19937 rng(42);
  double rmin = 1e300, rmax = 0.0;
  for (int k = 0; k < 20; ++k) {
    auto f = oracles::random_fourier_trace(m, rng);
    auto u = sys.solve(f);
    // Discrete H^{1/2} trace norm: H1 norm of the free harmonic extension.
    auto uh = free_sys.solve_nodal(f);
    double ratio = std::sqrt(h1_norm_sq(m, u.nodal_values) / h1_norm_sq(m, uh));
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
  }
  CHECK(rmin > 0.0);
  CHECK(rmax / rmin < 100.0);
}

TEST_CASE("insulator gauge fill is harmonic inside and leaves energy unchanged") {
  auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Insulating}});
  auto m = mesh::triangulate(sc, 0.1);
  auto f = trace_of(m, [](Vec2 x) { return x.x; });
  auto u = solve_p2(sc, m, f);
  double e0 = energy(u);
  fill_insulator_interior(u);
  CHECK(energy(u) == e0);
  // Interior values must now interpolate between interface values (maximum
  // principle for the discrete Laplacian).
  double lo = 1e300, hi = -1e300;
  for (const auto& be : m.boundary_edges)
    if (be.curve == 0) {
      lo = std::min({lo, u.nodal_values[be.a], u.nodal_values[be.b]});
      hi = std::max({hi, u.nodal_values[be.a], u.nodal_values[be.b]});
    }
  for (std::size_t t = 0; t < m.triangle_count(); ++t)
    if (m.region[t] == 0)
      for (int v : m.triangles[t]) {
        CHECK(u.nodal_values[v] >= lo - 1e-12);
        CHECK(u.nodal_values[v] <= hi + 1e-12);
      }
}
