#pragma once

#include <array>
#include <vector>

#include "pcond/geometry.hpp"

namespace pcond::mesh {

/// Region tag per triangle: kBackground or the inclusion index.
constexpr int kBackground = -1;
/// Curve id for boundary edges: kOuterCurve or the inclusion index.
constexpr int kOuterCurve = -1;

struct BoundaryEdge {
  int a = 0, b = 0;  // node indices, consecutive along the curve (CCW)
  int curve = kOuterCurve;
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // CCW
  std::vector<int> region;                    // per triangle
  std::vector<BoundaryEdge> boundary_edges;   // outer boundary and all interfaces
  std::vector<int> outer_nodes;               // nodes on the outer boundary, curve order
  std::vector<std::vector<int>> inclusion_nodes;  // all nodes of each inclusion (interface + interior)
  double h_max = 0.0;

  double triangle_area(int t) const;
  Vec2 centroid(int t) const;
  double circumdiameter(int t) const;
  /// Gradients of the three P1 hat functions on triangle t.
  std::array<Vec2, 3> p1_gradients(int t) const;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
};

struct MeshStats {
  double max_circumdiameter = 0.0;
  double min_area = 0.0;
  double min_angle_deg = 0.0;
};

MeshStats mesh_stats(const Mesh& m);

/// Conforming, interface-resolved triangulation of the scenario with max
/// circumdiameter <= h_max. Throws MeshFailure on degenerate geometry.
Mesh triangulate(const geom::Scenario& sc, double h_max);

/// Structural validation used by tests and the mesher itself: conformity,
/// positive areas, interface resolution, circumdiameter bound.
void validate(const Mesh& m, const geom::Scenario& sc);

}  // namespace pcond::mesh
