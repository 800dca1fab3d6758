#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pcond/dn_map.hpp"
#include "pcond/layer_potential.hpp"

using namespace pcond;
using namespace pcond::bem;

namespace {
PanelCurve circle_panels(Vec2 c, double R, int n) {
  return PanelCurve::from_shape(geom::Circle{c, R}, n);
}
}  // namespace

TEST_CASE("single layer of the uniform circle density") {
  double R = 0.8;
  LogScale scale{8.0};
  auto c = circle_panels({0, 0}, R, 256);
  Eigen::VectorXd q = Eigen::VectorXd::Constant(256, 1.0 / (2 * M_PI * R));
  // Mean value property at the center.
  CHECK(single_layer_eval(c, q, {0, 0}, scale) ==
        doctest::Approx(std::log(scale.r / R) / (2 * M_PI)).epsilon(1e-3));
  // Outside, the potential equals that of the total mass at the center.
  Vec2 x{2 * R, 0.3};
  CHECK(single_layer_eval(c, q, x, scale) ==
        doctest::Approx(std::log(scale.r / x.norm()) / (2 * M_PI)).epsilon(1e-3));
  // Zero density vanishes.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(256);
  CHECK(single_layer_eval(c, z, {0.1, 0.4}, scale) == 0.0);
}

TEST_CASE("single layer potential is discretely harmonic off the panels") {
  LogScale scale{8.0};
  auto c = circle_panels({0, 0}, 1.0, 128);
  Eigen::VectorXd q(128);
  for (int i = 0; i < 128; ++i) q[i] = std::cos(3.0 * 2 * M_PI * i / 128);
  Vec2 x{0.31, 0.12};
  auto lap = [&](double h) {
    auto f = [&](Vec2 y) { return single_layer_eval(c, q, y, scale); };
    return std::abs((f({x.x + h, x.y}) + f({x.x - h, x.y}) + f({x.x, x.y + h}) +
                     f({x.x, x.y - h}) - 4 * f(x)) /
                    (h * h));
  };
  CHECK(lap(1e-3) <= 0.35 * lap(2e-3) + 1e-7);
}

TEST_CASE("scale violation is rejected") {
  auto c = circle_panels({0, 0}, 1.0, 32);
  CHECK_THROWS_AS(single_layer_matrix(c, c, LogScale{1.5}), Error);
}

TEST_CASE("equilibrium density of a circle is uniform with the log trace") {
  double R = 0.7;
  LogScale scale{8.0};
  auto c = circle_panels({0, 0}, R, 128);
  auto eq = equilibrium_density(c, scale);
  double expect = 1.0 / (2 * M_PI * R);
  for (int i = 0; i < 128; ++i) CHECK(eq.density[i] == doctest::Approx(expect).epsilon(0.01));
  CHECK(eq.s_value == doctest::Approx(std::log(scale.r / R) / (2 * M_PI)).epsilon(0.01));
  // Doubling the panel count moves s_value by less than 0.25%.
  auto eq2 = equilibrium_density(circle_panels({0, 0}, R, 256), scale);
  CHECK(std::abs(eq2.s_value - eq.s_value) <= 0.0025 * std::abs(eq.s_value));
}

TEST_CASE("ellipse equilibrium density peaks at the high-curvature ends") {
  LogScale scale{10.0};
  std::vector<Vec2> pts(256);
  for (int i = 0; i < 256; ++i) {
    double th = 2 * M_PI * i / 256;
    pts[i] = {1.0 * std::cos(th), 0.5 * std::sin(th)};
  }
  auto c = PanelCurve::from_points(std::move(pts));
  auto eq = equilibrium_density(c, scale);
  // Panels nearest the x-axis ends vs the y-axis ends.
  double at_end = eq.density[0], at_side = eq.density[64];
  CHECK(at_end > 1.3 * at_side);
  // Self-convergence against a finer reference.
  std::vector<Vec2> pts2(512);
  for (int i = 0; i < 512; ++i) {
    double th = 2 * M_PI * i / 512;
    pts2[i] = {1.0 * std::cos(th), 0.5 * std::sin(th)};
  }
  auto eq2 = equilibrium_density(PanelCurve::from_points(std::move(pts2)), scale);
  CHECK(eq.s_value == doctest::Approx(eq2.s_value).epsilon(0.005));
}

TEST_CASE("capacity of circles and dilation covariance") {
  LogScale scale{8.0};
  double R = 0.5;
  CHECK(capacity(circle_panels({0, 0}, R, 128), scale) == doctest::Approx(R / scale.r).epsilon(0.01));
  double c1 = capacity(circle_panels({0, 0}, 0.4, 128), scale);
  double c2 = capacity(circle_panels({0, 0}, 0.8, 128), scale);
  CHECK(c2 == doctest::Approx(2.0 * c1).epsilon(0.01));
  CHECK(c2 > c1);  // monotone under dilation
}

TEST_CASE("jump relation of the Neumann traces") {
  double R = 0.9;
  auto c = circle_panels({0, 0}, R, 256);
  auto K = adjoint_double_layer(c);
  Eigen::VectorXd q = Eigen::VectorXd::Constant(256, 1.0);
  Eigen::VectorXd interior = 0.5 * q + K * q;
  Eigen::VectorXd exterior = -0.5 * q + K * q;
  for (int i = 0; i < 256; ++i) {
    // Uniform density: interior derivative 0, exterior -q.
    CHECK(std::abs(interior[i]) <= 0.02);
    CHECK(exterior[i] == doctest::Approx(-1.0).epsilon(0.02));
    CHECK(interior[i] - exterior[i] == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("operator norms are contractions and shrink with the inclusion") {
  LogScale scale{8.0};
  auto outer = circle_panels({0, 0}, 1.0, 192);
  double prev = 1.0;
  for (double Rin : {0.8, 0.5, 0.2}) {
    ReflectedSolver solver(outer, circle_panels({0.0, 0}, Rin, 128), scale);
    auto n = solver.operator_norms();
    CHECK(n.K < 1.0);
    CHECK(n.K_D_to_Omega < 1.0);
    CHECK(n.K_Omega_to_D < 1.0);
    CHECK(n.K < prev);
    prev = n.K;
  }
}

TEST_CASE("near-touching curves stay below norm one") {
  LogScale scale{8.0};
  auto outer = circle_panels({0, 0}, 1.0, 192);
  ReflectedSolver solver(outer, circle_panels({0, 0}, 0.97, 192), scale);
  auto n = solver.operator_norms();
  CHECK(n.K < 1.0);
  CHECK(n.K > 0.5);  // flagged as close to one
}

TEST_CASE("reflected solve matches the annulus oracle") {
  double rho0 = 0.5;
  LogScale scale{8.0};
  auto outer = circle_panels({0, 0}, 1.0, 256);
  auto incl = circle_panels({0, 0}, rho0, 128);
  ReflectedSolver solver(outer, incl, scale);
  std::vector<double> u0(incl.size());
  for (std::size_t i = 0; i < incl.size(); ++i) u0[i] = incl.mid[i].x;
  auto sol = solver.solve(u0);
  CHECK(sol.neumann_iterations > 0);  // contraction path taken
  // w = u - u0 on the annulus from the separation-of-variables oracle.
  double A = 1.0 / (1 - rho0 * rho0), B = -A * rho0 * rho0;
  double err = 0.0, scale_w = 0.0;
  for (int k = 0; k < 48; ++k) {
    double th = 2 * M_PI * (k + 0.5) / 48;
    Vec2 x{0.75 * std::cos(th), 0.75 * std::sin(th)};
    double w_oracle = ((A - 1) * 0.75 + B / 0.75) * std::cos(th);
    double w_bem = sol.eval_w(x);
    err = std::max(err, std::abs(w_bem - w_oracle));
    scale_w = std::max(scale_w, std::abs(w_oracle));
  }
  CHECK(err <= 0.01 * scale_w);
  CHECK(std::abs(sol.c_f) <= 1e-8);

  // Constant data: the projection kills it, so w vanishes identically.
  std::vector<double> ones(incl.size(), 1.0);
  auto sol1 = solver.solve(ones);
  CHECK(sol1.p_hat.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(std::abs(sol1.eval_w({0.7, 0.1})) <= 1e-10);
  CHECK(sol1.c_f == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("BEM and FEM agree on the DN gap") {
  double rho0 = 0.5;
  LogScale scale{8.0};
  auto outer = circle_panels({0, 0}, 1.0, 256);
  auto incl = circle_panels({0, 0}, rho0, 128);
  ReflectedSolver solver(outer, incl, scale);
  std::vector<double> u0(incl.size());
  for (std::size_t i = 0; i < incl.size(); ++i) u0[i] = incl.mid[i].x;
  auto sol = solver.solve(u0);
  std::vector<double> f(outer.size());
  for (std::size_t i = 0; i < outer.size(); ++i) f[i] = outer.mid[i].x;
  double gap_bem = solver.dn_gap(sol, f);
  double exact = 2 * M_PI * rho0 * rho0 / (1 - rho0 * rho0);
  CHECK(gap_bem == doctest::Approx(exact).epsilon(0.02));

  // Cross-check against the FEM gap on an off-center inclusion.
  auto sc = geom::build_scenario(geom::Circle{{0, 0}, 1.0},
                                 {{geom::Circle{{0.2, 0}, 0.3}, geom::InclusionKind::Superconducting}},
                                 1.0, 2.0);
  auto m = mesh::triangulate(sc, 0.03);
  auto ftr = oracles::trace_of(m, [](Vec2 x) { return x.x; });
  double gap_fem = dn::gap_difference_form(sc, m, ftr).value;
  auto incl2 = circle_panels({0.2, 0}, 0.3, 128);
  ReflectedSolver solver2(outer, incl2, scale);
  std::vector<double> u02(incl2.size());
  for (std::size_t i = 0; i < incl2.size(); ++i) u02[i] = incl2.mid[i].x;
  double gap_bem2 = solver2.dn_gap(solver2.solve(u02), f);
  CHECK(gap_bem2 == doctest::Approx(gap_fem).epsilon(0.02));
}

TEST_CASE("boundary term matches the annulus closed form") {
  double rho0 = 0.5;
  LogScale scale{8.0};
  ReflectedSolver solver(circle_panels({0, 0}, 1.0, 256), circle_panels({0, 0}, rho0, 128), scale);
  std::vector<double> u0(solver.inclusion().size());
  for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = solver.inclusion().mid[i].x;
  auto sol = solver.solve(u0);
  HarmonicField field{[](Vec2 x) { return x.x; }, [](Vec2) { return Vec2{1, 0}; }};
  double A = 1.0 / (1 - rho0 * rho0);
  double expect = -(2 * A - 1) * M_PI * rho0 * rho0;
  CHECK(solver.boundary_term(sol, field) == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("boundary-term ratio bounded over polynomial and CGO families") {
  LogScale scale{8.0};
  ReflectedSolver solver(circle_panels({0, 0}, 1.0, 192), circle_panels({0.2, 0}, 0.3, 96), scale);
  std::vector<HarmonicField> low = {
      {[](Vec2 x) { return x.x; }, [](Vec2) { return Vec2{1, 0}; }},
      {[](Vec2 x) { return x.y; }, [](Vec2) { return Vec2{0, 1}; }},
      {[](Vec2 x) { return x.x * x.x - x.y * x.y; }, [](Vec2 x) { return Vec2{2 * x.x, -2 * x.y}; }},
      {[](Vec2 x) { return x.x * x.y; }, [](Vec2 x) { return Vec2{x.y, x.x}; }},
  };
  double low_ratio = solver.boundary_term_ratio(low);
  CHECK(low_ratio > 0.0);
  CHECK(low_ratio < 1e3);

  std::vector<HarmonicField> cgo;
  for (double tau : {2.0, 4.0, 8.0}) {
    cgo.push_back({[tau](Vec2 x) { return std::exp(tau * (x.x - 0.6)) * std::cos(tau * x.y); },
                   [tau](Vec2 x) {
                     double e = std::exp(tau * (x.x - 0.6));
                     return Vec2{tau * e * std::cos(tau * x.y), -tau * e * std::sin(tau * x.y)};
                   }});
  }
  double cgo_ratio = solver.boundary_term_ratio(cgo);
  CHECK(cgo_ratio <= 10.0 * low_ratio);
  MESSAGE("boundary-term ratios: low-order ", low_ratio, ", CGO ", cgo_ratio);
}
