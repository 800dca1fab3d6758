#include <doctest.h>

#include <cmath>

#include "pcond/mesh.hpp"

using namespace pcond;
using namespace pcond::geom;
using namespace pcond::mesh;

namespace {
Scenario unit_disk_scenario(std::vector<InclusionComponent> incs = {}) {
  return build_scenario(Circle{{0, 0}, 1.0}, std::move(incs), 1.0, 2.0);
}
}  // namespace

TEST_CASE("unit disk mesh validity") {
  auto sc = unit_disk_scenario();
  auto m = triangulate(sc, 0.5);
  CHECK(m.triangle_count() > 10);
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    CHECK(m.triangle_area(static_cast<int>(t)) > 0.0);
    CHECK(m.circumdiameter(static_cast<int>(t)) <= 0.5 * (1 + 1e-12));
  }
  // Boundary nodes sit on the circle to rounding accuracy.
  for (int v : m.outer_nodes) CHECK(std::abs(m.nodes[v].norm() - 1.0) <= 1e-12 * 0.5);
  // Total area approximates the disk (boundary is polygonal).
  double area = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) area += m.triangle_area(static_cast<int>(t));
  CHECK(area == doctest::Approx(M_PI).epsilon(0.02));
}

TEST_CASE("region tags match the region containing each centroid") {
  std::vector<InclusionComponent> incs = {{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting},
                                          {Polygon{{{-0.6, -0.3}, {-0.2, -0.3}, {-0.2, 0.2}, {-0.6, 0.2}}},
                                           InclusionKind::Insulating}};
  auto sc = unit_disk_scenario(incs);
  auto m = triangulate(sc, 0.12);
  int in_disk = 0, in_poly = 0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    Vec2 c = m.centroid(static_cast<int>(t));
    int expect = kBackground;
    for (std::size_t i = 0; i < sc.inclusions.size(); ++i)
      if (contains(sc.inclusions[i].shape, c)) expect = static_cast<int>(i);
    CHECK(m.region[t] == expect);
    if (m.region[t] == 0) ++in_disk;
    if (m.region[t] == 1) ++in_poly;
  }
  CHECK(in_disk > 0);
  CHECK(in_poly > 0);
  // Tagged areas approximate the inclusion areas.
  double a0 = 0, a1 = 0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (m.region[t] == 0) a0 += m.triangle_area(static_cast<int>(t));
    if (m.region[t] == 1) a1 += m.triangle_area(static_cast<int>(t));
  }
  CHECK(a0 == doctest::Approx(M_PI * 0.09).epsilon(0.03));
  CHECK(a1 == doctest::Approx(0.4 * 0.5).epsilon(0.03));
}

TEST_CASE("node count grows like h^-2 under refinement") {
  auto sc = unit_disk_scenario();
  double n04 = static_cast<double>(triangulate(sc, 0.4).node_count());
  double n02 = static_cast<double>(triangulate(sc, 0.2).node_count());
  double n01 = static_cast<double>(triangulate(sc, 0.1).node_count());
  CHECK(n02 / n04 > 2.5);
  CHECK(n02 / n04 < 6.0);
  CHECK(n01 / n02 > 3.0);
  CHECK(n01 / n02 < 5.5);
}

TEST_CASE("polygonal domain with inclusion meshes cleanly") {
  Polygon dom{{{-1.2, -1.0}, {1.2, -1.0}, {1.4, 0.8}, {0, 1.3}, {-1.4, 0.8}}};
  std::vector<InclusionComponent> incs = {{Circle{{0.1, 0.1}, 0.35}, InclusionKind::Insulating}};
  auto sc = build_scenario(dom, incs, 1.0, 3.0);
  auto m = triangulate(sc, 0.15);
  CHECK_NOTHROW(validate(m, sc));
  CHECK(!m.inclusion_nodes[0].empty());
}

TEST_CASE("small inclusion relative to h is still resolved") {
  std::vector<InclusionComponent> incs = {{Circle{{0.3, -0.1}, 0.08}, InclusionKind::Superconducting}};
  auto sc = unit_disk_scenario(incs);
  auto m = triangulate(sc, 0.3);
  CHECK_NOTHROW(validate(m, sc));
  int tagged = 0;
  for (int r : m.region) tagged += (r == 0);
  CHECK(tagged > 0);
}

TEST_CASE("mesh failure on nonpositive h") {
  auto sc = unit_disk_scenario();
  CHECK_THROWS_AS(triangulate(sc, 0.0), Error);
}
