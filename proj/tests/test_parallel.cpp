#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pcond/enclosure.hpp"
#include "pcond/parallel.hpp"
#include "pcond/probe.hpp"

using namespace pcond;

TEST_CASE("serial and OpenMP loops fill identical slots") {
  const std::size_t n = 1 << 12;
  std::vector<double> a(n), b(n);
  auto body_a = [&](std::size_t i) { a[i] = std::sin(0.001 * static_cast<double>(i)); };
  auto body_b = [&](std::size_t i) { b[i] = std::sin(0.001 * static_cast<double>(i)); };
  serial_for(n, body_a);
  parallel_for(n, max_threads() > 1 ? max_threads() : 2, body_b);
  for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("hull direction sweep is bitwise identical across thread counts") {
  auto sc = geom::build_scenario(geom::Circle{{0, 0}, 1.0},
                                 {{geom::Circle{{0.2, 0}, 0.3}, geom::InclusionKind::Superconducting}},
                                 1.0, 2.0);
  std::vector<double> grid = {5, 6.5, 8, 10, 12.5};
  enclosure::HullOptions serial_opts, parallel_opts;
  serial_opts.threads = 1;
  parallel_opts.threads = 4;
  enclosure::MeshFamily fam1(sc), fam2(sc);
  auto h1 = enclosure::reconstruct_hull(fam1, 8, grid, serial_opts);
  auto h2 = enclosure::reconstruct_hull(fam2, 8, grid, parallel_opts);
  REQUIRE(h1.directions.size() == h2.directions.size());
  for (std::size_t i = 0; i < h1.directions.size(); ++i) {
    CHECK(h1.directions[i].h_hat == h2.directions[i].h_hat);
    CHECK(h1.directions[i].slope_stderr == h2.directions[i].slope_stderr);
  }
  REQUIRE(h1.polygon.vertices.size() == h2.polygon.vertices.size());
  for (std::size_t i = 0; i < h1.polygon.vertices.size(); ++i) {
    CHECK(h1.polygon.vertices[i].x == h2.polygon.vertices[i].x);
    CHECK(h1.polygon.vertices[i].y == h2.polygon.vertices[i].y);
  }
}

TEST_CASE("needle fan is bitwise identical across thread counts") {
  auto sc = geom::build_scenario(geom::Circle{{0, 0}, 1.0},
                                 {{geom::Circle{{0.2, 0}, 0.3}, geom::InclusionKind::Superconducting}},
                                 1.0, 2.0);
  auto m = mesh::triangulate(sc, 0.06);
  std::vector<probe::Needle> fan;
  for (int k = 0; k < 4; ++k) fan.push_back(probe::Needle::chord(sc.domain, 2 * M_PI * k / 4));
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(i / 11.0);
  auto c1 = probe::reconstruct_boundary(sc, m, fan, grid, 2, {}, 1);
  auto c2 = probe::reconstruct_boundary(sc, m, fan, grid, 2, {}, 4);
  REQUIRE(c1.size() == c2.size());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(c1[i].t_hat == c2[i].t_hat);
    CHECK(c1[i].hit == c2[i].hit);
  }
}
