#include "pcond/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcond {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisjointnessViolation: return "DisjointnessViolation";
    case ErrorCode::NonLipschitzShape: return "NonLipschitzShape";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::EmptyInclusion: return "EmptyInclusion";
    case ErrorCode::UnboundedResult: return "UnboundedResult";
    case ErrorCode::MeshFailure: return "MeshFailure";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PeriodNotFound: return "PeriodNotFound";
    case ErrorCode::OriginApproach: return "OriginApproach";
    case ErrorCode::ScaleViolation: return "ScaleViolation";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::ContractionFailure: return "ContractionFailure";
    case ErrorCode::FitDegenerate: return "FitDegenerate";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::MeshResolutionExceeded: return "MeshResolutionExceeded";
    case ErrorCode::RegimeNotReached: return "RegimeNotReached";
    case ErrorCode::MixedSigns: return "MixedSigns";
    case ErrorCode::AssertionFailure: return "AssertionFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace pcond

namespace pcond::geom {

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = ab.norm2();
  if (len2 == 0.0) return dist(p, a);
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return dist(p, a + ab * t);
}

double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return (q - p).cross(r - p); };
  double d1 = orient(a0, a1, b0), d2 = orient(a0, a1, b1);
  double d3 = orient(b0, b1, a0), d4 = orient(b0, b1, a1);
  if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0;  // proper crossing
  double d = point_segment_distance(b0, a0, a1);
  d = std::min(d, point_segment_distance(b1, a0, a1));
  d = std::min(d, point_segment_distance(a0, b0, b1));
  d = std::min(d, point_segment_distance(a1, b0, b1));
  return d;
}

bool segments_properly_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return (q - p).cross(r - p); };
  double d1 = orient(a0, a1, b0), d2 = orient(a0, a1, b1);
  double d3 = orient(b0, b1, a0), d4 = orient(b0, b1, a1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double circle_polyline_distance(const Circle& c, const std::vector<Vec2>& verts) {
  // Distance from the circle curve to each segment: the distance-to-center
  // function spans [dmin, dmax] along a segment, so the curve is hit exactly
  // when the radius falls in that interval.
  double best = std::numeric_limits<double>::infinity();
  std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = verts[i], b = verts[(i + 1) % n];
    double dmin = point_segment_distance(c.center, a, b);
    double dmax = std::max(dist(a, c.center), dist(b, c.center));
    if (dmin <= c.radius && c.radius <= dmax) return 0.0;
    best = std::min(best, std::min(std::abs(dmin - c.radius), std::abs(dmax - c.radius)));
  }
  return best;
}

}  // namespace

bool Scenario::has_kind(InclusionKind k) const {
  for (const auto& inc : inclusions)
    if (inc.kind == k) return true;
  return false;
}

std::vector<int> Scenario::components_of(InclusionKind k) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < inclusions.size(); ++i)
    if (inclusions[i].kind == k) out.push_back(static_cast<int>(i));
  return out;
}

double polygon_signed_area(const Polygon& poly) {
  double a = 0.0;
  std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) a += poly.vertices[i].cross(poly.vertices[(i + 1) % n]);
  return 0.5 * a;
}

bool polygon_is_simple(const Polygon& poly) {
  std::size_t n = poly.vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a0 = poly.vertices[i], a1 = poly.vertices[(i + 1) % n];
    if (dist(a0, a1) == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      Vec2 b0 = poly.vertices[j], b1 = poly.vertices[(j + 1) % n];
      if (segments_properly_intersect(a0, a1, b0, b1)) return false;
    }
  }
  return true;
}

double area(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) return M_PI * c->radius * c->radius;
  return std::abs(polygon_signed_area(std::get<Polygon>(s)));
}

bool contains(const Shape& s, Vec2 x) {
  if (const auto* c = std::get_if<Circle>(&s)) return dist(x, c->center) < c->radius;
  const auto& verts = std::get<Polygon>(s).vertices;
  // Even-odd crossing rule.
  bool inside = false;
  std::size_t n = verts.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    Vec2 a = verts[i], b = verts[j];
    if ((a.y > x.y) != (b.y > x.y)) {
      double t = (x.y - a.y) / (b.y - a.y);
      if (x.x < a.x + t * (b.x - a.x)) inside = !inside;
    }
  }
  return inside;
}

double boundary_distance(const Shape& s, Vec2 x) {
  if (const auto* c = std::get_if<Circle>(&s)) return std::abs(dist(x, c->center) - c->radius);
  const auto& verts = std::get<Polygon>(s).vertices;
  double d = std::numeric_limits<double>::infinity();
  std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i)
    d = std::min(d, point_segment_distance(x, verts[i], verts[(i + 1) % n]));
  return d;
}

double curve_distance(const Shape& a, const Shape& b) {
  const auto* ca = std::get_if<Circle>(&a);
  const auto* cb = std::get_if<Circle>(&b);
  if (ca && cb) {
    double dc = dist(ca->center, cb->center);
    double sum = ca->radius + cb->radius;
    double diff = std::abs(ca->radius - cb->radius);
    if (dc >= sum) return dc - sum;    // exterior-disjoint
    if (dc <= diff) return diff - dc;  // nested
    return 0.0;                        // curves cross
  }
  if (ca) return circle_polyline_distance(*ca, std::get<Polygon>(b).vertices);
  if (cb) return circle_polyline_distance(*cb, std::get<Polygon>(a).vertices);
  const auto& va = std::get<Polygon>(a).vertices;
  const auto& vb = std::get<Polygon>(b).vertices;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < va.size(); ++i)
    for (std::size_t j = 0; j < vb.size(); ++j)
      d = std::min(d, segment_segment_distance(va[i], va[(i + 1) % va.size()], vb[j],
                                               vb[(j + 1) % vb.size()]));
  return d;
}

double diameter(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) return 2.0 * c->radius;
  const auto& verts = std::get<Polygon>(s).vertices;
  double d = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j) d = std::max(d, dist(verts[i], verts[j]));
  return d;
}

Vec2 reference_point(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) return c->center;
  const auto& verts = std::get<Polygon>(s).vertices;
  Vec2 c{0, 0};
  for (Vec2 v : verts) c += v;
  return c / static_cast<double>(verts.size());
}

double bounding_radius(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) return c->center.norm() + c->radius;
  double r = 0.0;
  for (Vec2 v : std::get<Polygon>(s).vertices) r = std::max(r, v.norm());
  return r;
}

std::vector<Vec2> sample_boundary(const Shape& s, double h) {
  std::vector<Vec2> pts;
  if (const auto* c = std::get_if<Circle>(&s)) {
    int n = std::max(12, static_cast<int>(std::ceil(2.0 * M_PI * c->radius / h)));
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      double th = 2.0 * M_PI * i / n;
      pts.push_back({c->center.x + c->radius * std::cos(th), c->center.y + c->radius * std::sin(th)});
    }
    return pts;
  }
  const auto& verts = std::get<Polygon>(s).vertices;
  std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = verts[i], b = verts[(i + 1) % n];
    int m = std::max(1, static_cast<int>(std::ceil(dist(a, b) / h)));
    for (int k = 0; k < m; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / m));
  }
  return pts;
}

Scenario build_scenario(const Shape& domain, std::vector<InclusionComponent> inclusions,
                        double sigma_background, double p, const ScenarioOptions& opts) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error(ErrorCode::BadExponent, "p must lie in (1, inf), got " + std::to_string(p));
  if (!(sigma_background >= 1.0 / opts.sigma_log_bound && sigma_background <= opts.sigma_log_bound))
    throw Error(ErrorCode::ValidationError, "sigma_background not log-bounded");

  auto check_shape = [](const Shape& s, const char* what) {
    if (const auto* c = std::get_if<Circle>(&s)) {
      if (!(c->radius > 0.0)) throw Error(ErrorCode::NonLipschitzShape, std::string(what) + ": nonpositive radius");
      return;
    }
    const auto& poly = std::get<Polygon>(s);
    if (poly.vertices.size() < 3 || !polygon_is_simple(poly) ||
        std::abs(polygon_signed_area(poly)) <= 0.0)
      throw Error(ErrorCode::NonLipschitzShape, std::string(what) + ": not a simple positive-area polygon");
  };

  check_shape(domain, "domain");
  // Normalize polygons to CCW.
  auto normalize = [](Shape& s) {
    if (auto* poly = std::get_if<Polygon>(&s))
      if (polygon_signed_area(*poly) < 0.0) std::reverse(poly->vertices.begin(), poly->vertices.end());
  };
  Shape dom = domain;
  normalize(dom);
  for (std::size_t i = 0; i < inclusions.size(); ++i) {
    check_shape(inclusions[i].shape, "inclusion");
    normalize(inclusions[i].shape);
  }

  double clearance = opts.clearance_fraction * diameter(dom);

  for (std::size_t i = 0; i < inclusions.size(); ++i) {
    if (!contains(dom, reference_point(inclusions[i].shape)))
      throw Error(ErrorCode::DisjointnessViolation, "inclusion " + std::to_string(i) + " not inside the domain");
    double d = curve_distance(dom, inclusions[i].shape);
    if (d < clearance)
      throw Error(ErrorCode::DisjointnessViolation,
                  "inclusion " + std::to_string(i) + " within clearance of the outer boundary (d=" +
                      std::to_string(d) + ")");
    for (std::size_t j = i + 1; j < inclusions.size(); ++j) {
      double dij = curve_distance(inclusions[i].shape, inclusions[j].shape);
      if (dij < clearance)
        throw Error(ErrorCode::DisjointnessViolation,
                    "inclusions " + std::to_string(i) + "," + std::to_string(j) + " too close (d=" +
                        std::to_string(dij) + ")");
    }
  }

  Scenario sc;
  sc.domain = dom;
  sc.inclusions = std::move(inclusions);
  sc.sigma_background = sigma_background;
  sc.p = p;
  sc.clearance = clearance;
  return sc;
}

double support_function(const Shape& shape, Vec2 rho) {
  if (const auto* c = std::get_if<Circle>(&shape)) return c->center.dot(rho) + c->radius;
  double h = -std::numeric_limits<double>::infinity();
  for (Vec2 v : std::get<Polygon>(shape).vertices) h = std::max(h, v.dot(rho));
  return h;
}

double support_function(const std::vector<InclusionComponent>& inclusions, Vec2 rho) {
  if (inclusions.empty()) throw Error(ErrorCode::EmptyInclusion, "support function of an empty union");
  if (std::abs(rho.norm() - 1.0) > 1e-12)
    throw Error(ErrorCode::ValidationError, "support direction must be a unit vector");
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& inc : inclusions) h = std::max(h, support_function(inc.shape, rho));
  return h;
}

namespace {

/// Clips a convex CCW polygon against x . rho <= h.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 rho, double h) {
  std::vector<Vec2> out;
  std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    double da = a.dot(rho) - h, db = b.dot(rho) - h;
    if (da <= 0) out.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
      double t = da / (da - db);
      out.push_back(a + (b - a) * t);
    }
  }
  return out;
}

}  // namespace

Polygon halfplane_intersection(const std::vector<HalfplaneSample>& samples,
                               const HalfplaneOptions& opts) {
  if (samples.size() < 3)
    throw Error(ErrorCode::UnboundedResult, "need at least 3 directions");

  // Directions must span more than a half circle, otherwise the intersection
  // is an unbounded wedge.
  std::vector<double> angles;
  angles.reserve(samples.size());
  for (const auto& s : samples) angles.push_back(std::atan2(s.rho.y, s.rho.x));
  std::sort(angles.begin(), angles.end());
  double max_gap = 2.0 * M_PI - (angles.back() - angles.front());
  for (std::size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  if (max_gap >= M_PI - 1e-12 && !opts.clip_to_bbox)
    throw Error(ErrorCode::UnboundedResult, "directions span at most a half circle; enable clipping");

  double R = opts.bbox_radius;
  if (R <= 0.0) {
    for (const auto& s : samples) R = std::max(R, std::abs(s.h));
    R = 4.0 * std::max(R, 1.0);
  }
  std::vector<Vec2> poly = {{-R, -R}, {R, -R}, {R, R}, {-R, R}};
  for (const auto& s : samples) {
    poly = clip_halfplane(poly, s.rho, s.h);
    if (poly.empty()) break;
  }
  return Polygon{poly};
}

double hausdorff_to_shape(const Polygon& hull, const Shape& truth) {
  // Both sets are convex here (hull by construction, truth circle/convex use).
  double d_hull_to_truth = 0.0;
  if (const auto* c = std::get_if<Circle>(&truth)) {
    for (Vec2 v : hull.vertices) d_hull_to_truth = std::max(d_hull_to_truth, dist(v, c->center) - c->radius);
  } else {
    const auto& tv = std::get<Polygon>(truth).vertices;
    for (Vec2 v : hull.vertices) {
      double d = std::numeric_limits<double>::infinity();
      if (contains(truth, v)) d = 0.0;
      for (std::size_t i = 0; i < tv.size(); ++i)
        d = std::min(d, point_segment_distance(v, tv[i], tv[(i + 1) % tv.size()]));
      d_hull_to_truth = std::max(d_hull_to_truth, d);
    }
  }
  double d_truth_to_hull = 0.0;
  // Sample the truth boundary; distance to the hull polygon (0 when inside).
  for (Vec2 x : sample_boundary(truth, diameter(truth) / 256.0)) {
    double d = std::numeric_limits<double>::infinity();
    if (contains(Shape{hull}, x)) d = 0.0;
    const auto& hv = hull.vertices;
    for (std::size_t i = 0; i < hv.size(); ++i)
      d = std::min(d, point_segment_distance(x, hv[i], hv[(i + 1) % hv.size()]));
    d_truth_to_hull = std::max(d_truth_to_hull, d);
  }
  return std::max(d_hull_to_truth, d_truth_to_hull);
}

bool polygon_contains_shape(const Polygon& hull, const Shape& truth, double tol) {
  std::size_t n = hull.vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = hull.vertices[i], b = hull.vertices[(i + 1) % n];
    Vec2 nrm = (b - a).perp().normalized() * -1.0;  // outward for CCW polygon
    double offset = a.dot(nrm);
    if (support_function(truth, nrm) > offset + tol) return false;
  }
  return true;
}

}  // namespace pcond::geom
