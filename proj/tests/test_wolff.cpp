#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pcond/wolff.hpp"

using namespace pcond;
using namespace pcond::wolff;

TEST_CASE("p=2 profile is the cosine with period 2 pi") {
  auto prof = integrate_wolff(2.0, 1.0, 0.0);
  CHECK(std::abs(prof.lambda - 2 * M_PI) <= 1e-8);
  for (double s : {0.0, 0.3, 1.7, 3.9, 6.1}) {
    CHECK(prof.eval(s) == doctest::Approx(std::cos(s)).epsilon(1e-8));
    CHECK(prof.eval_deriv(s) == doctest::Approx(-std::sin(s)).epsilon(1e-8));
  }
}

TEST_CASE("p=2 conserves w^2 + w'^2 for any start") {
  auto prof = integrate_wolff(2.0, 0.7, -1.3);
  double E = 0.7 * 0.7 + 1.3 * 1.3;
  CHECK(prof.bound_low == doctest::Approx(E).epsilon(1e-8));
  CHECK(prof.bound_high == doctest::Approx(E).epsilon(1e-8));
}

TEST_CASE("period self-convergence under step halving") {
  for (double p : {1.5, 3.0, 4.0}) {
    auto a = integrate_wolff(p, 1.0, 0.0);
    auto b = integrate_wolff(p, 1.0, 0.0, a.step / 2.0);
    CHECK(std::abs(a.lambda - b.lambda) < 1e-6);
    CHECK(a.lambda > 0.0);
  }
}

TEST_CASE("phase-space bounds stay away from the origin") {
  for (double p : {1.3, 1.5, 2.0, 3.0, 4.0}) {
    auto prof = integrate_wolff(p, 1.0, 0.0);
    CHECK(prof.bound_low > 0.0);
    CHECK(prof.bound_high < 1e6);
    CHECK(prof.bound_high >= prof.bound_low);
  }
}

TEST_CASE("mean over one period vanishes") {
  auto p2 = integrate_wolff(2.0, 1.0, 0.0);
  CHECK(std::abs(mean_over_period(p2)) <= 1e-10);
  auto p3 = integrate_wolff(3.0, 1.0, 0.0);
  CHECK(std::abs(mean_over_period(p3)) <= 1e-6 * p3.amplitude);
  auto p15 = integrate_wolff(1.5, 0.0, 1.0);
  CHECK(std::abs(mean_over_period(p15)) <= 1e-6 * p15.amplitude);
}

TEST_CASE("rejects bad input") {
  CHECK_THROWS_AS(integrate_wolff(1.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(integrate_wolff(2.0, 0.0, 0.0), Error);
  CHECK_THROWS_AS(CgoParams::make({1, 0}, 0.0, 0.0), Error);
}

TEST_CASE("cgo_p2 basics") {
  auto prm = CgoParams::make({1, 0}, 3.0, 0.5);
  // At x.rho = t on the axis the value is exactly (1, 0).
  auto c = cgo_p2({0.5, 0.0}, prm);
  CHECK(c.re == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.im == doctest::Approx(0.0).epsilon(1e-14));
  // Modulus is the bare exponential.
  Vec2 x{0.3, -0.7};
  auto v = cgo_p2(x, prm);
  CHECK(std::hypot(v.re, v.im) ==
        doctest::Approx(std::exp(prm.tau * (x.dot(prm.rho) - prm.t))).epsilon(1e-13));
}

TEST_CASE("cgo_p2 is discretely harmonic") {
  auto prm = CgoParams::make({0.6, 0.8}, 2.0, 0.1);
  Vec2 x{0.2, -0.1};
  auto lap = [&](double h) {
    auto f = [&](Vec2 y) { return cgo_p2(y, prm).re; };
    return (f({x.x + h, x.y}) + f({x.x - h, x.y}) + f({x.x, x.y + h}) + f({x.x, x.y - h}) -
            4 * f(x)) /
           (h * h);
  };
  double l1 = std::abs(lap(1e-2));
  double l2 = std::abs(lap(5e-3));
  CHECK(l2 <= 0.3 * l1 + 1e-8);  // O(h^2) stencil error
}

TEST_CASE("wolff at p=2 equals the real part of the CGO") {
  auto prof = integrate_wolff(2.0, 1.0, 0.0);
  auto prm = CgoParams::make({0, 1}, 2.5, -0.2);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  for (int k = 0; k < 10; ++k) {
    Vec2 x{U(rng), U(rng)};
    CHECK(wolff_eval(x, prm, prof) == doctest::Approx(cgo_p2(x, prm).re).epsilon(1e-8));
  }
}

TEST_CASE("wolff gradient matches central differences") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(-0.7, 0.7);
  for (double p : {1.5, 3.0, 4.0}) {
    auto prof = integrate_wolff(p, 1.0, 0.0);
    auto prm = CgoParams::make({0.8, -0.6}, 2.0, 0.0);
    for (int k = 0; k < 10; ++k) {
      Vec2 x{U(rng), U(rng)};
      Vec2 g = wolff_grad(x, prm, prof);
      double h = 1e-6;
      Vec2 fd{(wolff_eval({x.x + h, x.y}, prm, prof) - wolff_eval({x.x - h, x.y}, prm, prof)) /
                  (2 * h),
              (wolff_eval({x.x, x.y + h}, prm, prof) - wolff_eval({x.x, x.y - h}, prm, prof)) /
                  (2 * h)};
      CHECK((g - fd).norm() <= 1e-6 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("gradient modulus obeys the phase-space bounds") {
  auto prof = integrate_wolff(3.0, 1.0, 0.0);
  auto prm = CgoParams::make({1, 0}, 4.0, 0.3);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (int k = 0; k < 20; ++k) {
    Vec2 x{U(rng), U(rng)};
    Vec2 g = wolff_grad(x, prm, prof);
    double envelope = prm.tau * std::exp(prm.tau * (x.dot(prm.rho) - prm.t));
    double ratio = g.norm2() / (envelope * envelope);
    CHECK(ratio >= prof.bound_low * (1 - 1e-6));
    CHECK(ratio <= prof.bound_high * (1 + 1e-6));
  }
}

TEST_CASE("wolff is weakly p-harmonic on a refined patch") {
  // Interpolate the solution on a structured local patch and test the weak
  // residual against the center hat function; first-order decay or better.
  auto residual_at = [](double p, const WolffProfile& prof, const CgoParams& prm, Vec2 x0,
                        double h) {
    const int n = 8;  // nodes per side: (n+1)^2, center at (n/2, n/2)
    auto node = [&](int i, int j) {
      return Vec2{x0.x + (i - n / 2) * h, x0.y + (j - n / 2) * h};
    };
    double r = 0.0;
    // Two triangles per cell; accumulate flux . grad(phi_center).
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Vec2 a = node(i, j), b = node(i + 1, j), c = node(i + 1, j + 1), d = node(i, j + 1);
        struct T {
          Vec2 v[3];
          int idx[3][2];
        };
        T tris[2] = {{{a, b, c}, {{i, j}, {i + 1, j}, {i + 1, j + 1}}},
                     {{a, c, d}, {{i, j}, {i + 1, j + 1}, {i, j + 1}}}};
        for (const auto& tri : tris) {
          Vec2 e1 = tri.v[1] - tri.v[0], e2 = tri.v[2] - tri.v[0];
          double twoA = e1.cross(e2);
          Vec2 grads[3] = {Vec2{(tri.v[1].y - tri.v[2].y) / twoA, (tri.v[2].x - tri.v[1].x) / twoA},
                           Vec2{(tri.v[2].y - tri.v[0].y) / twoA, (tri.v[0].x - tri.v[2].x) / twoA},
                           Vec2{(tri.v[0].y - tri.v[1].y) / twoA, (tri.v[1].x - tri.v[0].x) / twoA}};
          Vec2 g{0, 0};
          double phi_grad_set = 0.0;
          Vec2 gphi{0, 0};
          for (int k = 0; k < 3; ++k) {
            g += grads[k] * wolff_eval(tri.v[k], prm, prof);
            if (tri.idx[k][0] == n / 2 && tri.idx[k][1] == n / 2) {
              gphi = grads[k];
              phi_grad_set = 1.0;
            }
          }
          if (phi_grad_set == 0.0) continue;
          double A = 0.5 * twoA;
          r += A * std::pow(g.norm2(), 0.5 * p - 1.0) * g.dot(gphi);
        }
      }
    }
    return std::abs(r);
  };
  for (double p : {1.5, 3.0, 4.0}) {
    auto prof = integrate_wolff(p, 1.0, 0.0);
    auto prm = CgoParams::make({0.6, 0.8}, 2.0, 0.0);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (int k = 0; k < 3; ++k) {
      Vec2 x0{U(rng), U(rng)};
      double r1 = residual_at(p, prof, prm, x0, 0.02);
      double r2 = residual_at(p, prof, prm, x0, 0.01);
      CHECK(r2 <= 0.75 * r1 + 1e-12);
    }
  }
}

TEST_CASE("profile exports one period as CSV") {
  auto prof = integrate_wolff(3.0, 1.0, 0.0);
  auto csv = profile_csv(prof);
  CHECK(csv.rfind("s,w,wprime\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2049);  // header + samples
}

TEST_CASE("boundary traces are shifted to order one") {
  auto sc = geom::build_scenario(geom::Circle{{0, 0}, 1.0}, {}, 1.0, 2.0);
  auto m = mesh::triangulate(sc, 0.2);
  auto prm = CgoParams::make({1, 0}, 50.0, 0.0);
  auto tr = boundary_trace(prm, m, nullptr);
  REQUIRE(tr.re.size() == m.outer_nodes.size());
  REQUIRE(tr.im.size() == m.outer_nodes.size());
  double mx = 0.0;
  for (std::size_t k = 0; k < tr.re.size(); ++k)
    mx = std::max(mx, std::hypot(tr.re[k], tr.im[k]));
  CHECK(mx <= 1.0 + 1e-12);
  CHECK(mx >= 0.5);  // the supporting node attains the shift
  CHECK(tr.log_scale == doctest::Approx(50.0).epsilon(1e-9));

  auto prof = integrate_wolff(3.0, 1.0, 0.0);
  auto trw = boundary_trace(prm, m, &prof);
  CHECK(trw.im.empty());
  for (double v : trw.re) CHECK(std::isfinite(v));
}
