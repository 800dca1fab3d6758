#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pcond/errors.hpp"
#include "pcond/vec2.hpp"

namespace pcond::geom {

struct Circle {
  Vec2 center;
  double radius = 1.0;
};

/// Simple closed polygon. Stored CCW; the closing edge is implicit.
struct Polygon {
  std::vector<Vec2> vertices;
};

using Shape = std::variant<Circle, Polygon>;

enum class InclusionKind { Insulating, Superconducting };

struct InclusionComponent {
  Shape shape;
  InclusionKind kind = InclusionKind::Superconducting;
};

struct ScenarioOptions {
  /// Minimum distance between any two of the outer boundary and the inclusion
  /// closures, as a fraction of the domain diameter.
  double clearance_fraction = 0.02;
  /// log(sigma) bound: sigma_background must lie in [1/c, c].
  double sigma_log_bound = 1e6;
};

/// The tuple (domain, inclusions, background conductivity, exponent p).
struct Scenario {
  Shape domain;
  std::vector<InclusionComponent> inclusions;
  double sigma_background = 1.0;
  double p = 2.0;
  double clearance = 0.0;  // absolute clearance used for validation

  bool has_kind(InclusionKind k) const;
  std::vector<int> components_of(InclusionKind k) const;
};

// --- shape queries ---------------------------------------------------------

double area(const Shape& s);
bool contains(const Shape& s, Vec2 x);
/// Signed distance is not needed; this is the unsigned distance from x to the
/// boundary curve of s.
double boundary_distance(const Shape& s, Vec2 x);
/// Exact minimum distance between the two boundary curves.
double curve_distance(const Shape& a, const Shape& b);
double diameter(const Shape& s);
Vec2 reference_point(const Shape& s);
/// Radius of the smallest origin-centered disk containing the shape.
double bounding_radius(const Shape& s);
/// Polyline sampling of the boundary with segment length <= h (vertices of a
/// polygon are always kept; circles get exact on-curve nodes).
std::vector<Vec2> sample_boundary(const Shape& s, double h);
bool polygon_is_simple(const Polygon& poly);
double polygon_signed_area(const Polygon& poly);

// --- scenario --------------------------------------------------------------

/// Validates the disjointness, containment, Lipschitz and exponent hypotheses
/// and returns a Scenario. Throws Error on violation.
Scenario build_scenario(const Shape& domain, std::vector<InclusionComponent> inclusions,
                        double sigma_background, double p, const ScenarioOptions& opts = {});

// --- support functions and hulls -------------------------------------------

/// sup over the union of inclusion boundaries of x . rho. Exact for circles
/// and polygons. |rho| must be 1.
double support_function(const std::vector<InclusionComponent>& inclusions, Vec2 rho);
double support_function(const Shape& shape, Vec2 rho);

struct HalfplaneSample {
  Vec2 rho;  // unit outward direction
  double h;  // support value: the half-plane is x . rho <= h
};

struct HalfplaneOptions {
  /// When the sampled directions span at most a half circle the intersection
  /// is unbounded. With clip_to_bbox the result is clipped to [-R,R]^2
  /// instead of failing.
  bool clip_to_bbox = false;
  double bbox_radius = 0.0;
};

/// Intersection of half-planes {x . rho <= h}. Returns a convex polygon (CCW),
/// possibly empty. Throws UnboundedResult when the directions do not enclose
/// a bounded region and clipping is disabled.
Polygon halfplane_intersection(const std::vector<HalfplaneSample>& samples,
                               const HalfplaneOptions& opts = {});

/// max over vertices of a of d(v, b-as-convex-set) plus the symmetric part;
/// used to compare a recovered hull against a true shape.
double hausdorff_to_shape(const Polygon& hull, const Shape& truth);
bool polygon_contains_shape(const Polygon& hull, const Shape& truth, double tol = 1e-12);

}  // namespace pcond::geom
