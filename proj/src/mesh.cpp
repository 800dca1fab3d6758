#include "pcond/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace pcond::mesh {

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  Vec2 a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
  return 0.5 * (b - a).cross(c - a);
}

Vec2 Mesh::centroid(int t) const {
  const auto& tri = triangles[t];
  return (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]) / 3.0;
}

double Mesh::circumdiameter(int t) const {
  const auto& tri = triangles[t];
  Vec2 a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
  double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
  double area = triangle_area(t);
  if (area <= 0.0) return std::numeric_limits<double>::infinity();
  return la * lb * lc / (2.0 * area);
}

std::array<Vec2, 3> Mesh::p1_gradients(int t) const {
  const auto& tri = triangles[t];
  Vec2 a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
  double twoA = (b - a).cross(c - a);
  // grad of the hat at vertex i is perpendicular to the opposite edge.
  return {Vec2{(b.y - c.y) / twoA, (c.x - b.x) / twoA},
          Vec2{(c.y - a.y) / twoA, (a.x - c.x) / twoA},
          Vec2{(a.y - b.y) / twoA, (b.x - a.x) / twoA}};
}

MeshStats mesh_stats(const Mesh& m) {
  MeshStats s;
  s.min_area = std::numeric_limits<double>::infinity();
  s.min_angle_deg = 180.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    s.max_circumdiameter = std::max(s.max_circumdiameter, m.circumdiameter(static_cast<int>(t)));
    s.min_area = std::min(s.min_area, m.triangle_area(static_cast<int>(t)));
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      Vec2 u = (m.nodes[tri[(k + 1) % 3]] - m.nodes[tri[k]]).normalized();
      Vec2 v = (m.nodes[tri[(k + 2) % 3]] - m.nodes[tri[k]]).normalized();
      double ang = std::acos(std::clamp(u.dot(v), -1.0, 1.0)) * 180.0 / M_PI;
      s.min_angle_deg = std::min(s.min_angle_deg, ang);
    }
  }
  return s;
}

namespace {

// ---------------------------------------------------------------------------
// Incremental Delaunay triangulation (Bowyer-Watson) with adjacency,
// constrained-edge recovery by flips, and size-driven point insertion. The
// interior lattice is jittered deterministically so the cocircular
// degeneracies of a regular lattice cannot arise; predicates use long double.
// ---------------------------------------------------------------------------

struct Tri {
  int v[3];    // CCW
  int adj[3];  // adj[k] shares the edge opposite v[k]; -1 at the hull
  bool alive = true;
};

long double orient_ld(Vec2 a, Vec2 b, Vec2 c) {
  return (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
         (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
}

long double incircle_ld(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  long double ax = a.x - p.x, ay = a.y - p.y;
  long double bx = b.x - p.x, by = b.y - p.y;
  long double cx = c.x - p.x, cy = c.y - p.y;
  long double a2 = ax * ax + ay * ay;
  long double b2 = bx * bx + by * by;
  long double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

double hash_jitter(std::uint64_t i, std::uint64_t salt) {
  std::uint64_t x = i * 0x9E3779B97F4A7C15ull + salt * 0xBF58476D1CE4E5B9ull;
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return (static_cast<double>(x >> 11) / 9007199254740992.0) - 0.5;  // [-0.5, 0.5)
}

class Delaunay {
public:
  Delaunay(std::vector<Vec2> pts, double extent) : pts_(std::move(pts)) {
    double R = 16.0 * extent + 1.0;
    n_real_ = static_cast<int>(pts_.size());
    pts_.push_back({-3 * R, -R});
    pts_.push_back({3 * R, -R});
    pts_.push_back({0, 3 * R});
    super_ = n_real_;
    tris_.push_back({{super_, super_ + 1, super_ + 2}, {-1, -1, -1}, true});
    vert2tri_.assign(pts_.size(), 0);
    for (int i = 0; i < n_real_; ++i) insert(i);
  }

  Vec2 point(int i) const { return pts_[i]; }
  bool is_super(int v) const { return v >= super_ && v < super_ + 3; }
  const std::vector<Tri>& triangles() const { return tris_; }
  int size() const { return static_cast<int>(pts_.size()); }

  /// Appends a point and inserts it into the triangulation.
  int add_and_insert(Vec2 p) {
    pts_.push_back(p);
    vert2tri_.push_back(0);
    int vi = static_cast<int>(pts_.size()) - 1;
    insert(vi);
    return vi;
  }

  /// Vertices of the triangle containing p (for proximity guards).
  std::array<int, 3> containing_vertices(Vec2 p) const {
    int t = locate(p, hint_);
    return {tris_[t].v[0], tris_[t].v[1], tris_[t].v[2]};
  }

  bool has_edge(int a, int b) const {
    for (int t : star(a)) {
      for (int k = 0; k < 3; ++k) {
        int u = tris_[t].v[k], w = tris_[t].v[(k + 1) % 3];
        if ((u == a && w == b) || (u == b && w == a)) return true;
      }
    }
    return false;
  }

  /// Forces edge (a,b) into the triangulation by diagonal flips.
  void recover_edge(int a, int b) {
    for (int guard = 0; guard < 4096; ++guard) {
      if (has_edge(a, b)) return;
      int t = -1, k = -1;
      for (int st : star(a)) {
        int ka = opposite_index(st, a);
        int u = tris_[st].v[(ka + 1) % 3], w = tris_[st].v[(ka + 2) % 3];
        if (crosses(a, b, u, w)) {
          t = st;
          k = ka;
          break;
        }
      }
      if (t < 0) throw Error(ErrorCode::MeshFailure, "lost constrained edge");
      // March along the segment flipping the first flippable crossing edge.
      bool flipped = false;
      for (int step = 0; step < 4096 && !flipped; ++step) {
        if (flip(t, k)) {
          flipped = true;
          break;
        }
        int tn = tris_[t].adj[k];
        if (tn < 0) throw Error(ErrorCode::MeshFailure, "constrained edge hit the hull");
        // Find the next edge of tn crossing the segment.
        int u0 = tris_[t].v[(k + 1) % 3], w0 = tris_[t].v[(k + 2) % 3];
        int nk = -1;
        for (int kk = 0; kk < 3; ++kk) {
          int u = tris_[tn].v[(kk + 1) % 3], w = tris_[tn].v[(kk + 2) % 3];
          bool same = (u == u0 && w == w0) || (u == w0 && w == u0);
          if (!same && crosses(a, b, u, w)) {
            nk = kk;
            break;
          }
        }
        if (nk < 0) throw Error(ErrorCode::MeshFailure, "unflippable constrained edge");
        t = tn;
        k = nk;
      }
      if (!flipped) throw Error(ErrorCode::MeshFailure, "edge recovery stalled");
    }
    throw Error(ErrorCode::MeshFailure, "edge recovery did not terminate");
  }

private:
  /// All alive triangles incident to vertex v.
  std::vector<int> star(int v) const {
    std::vector<int> out;
    int t0 = find_any_incident(v);
    std::deque<int> queue{t0};
    std::unordered_set<int> seen{t0};
    while (!queue.empty()) {
      int t = queue.front();
      queue.pop_front();
      out.push_back(t);
      for (int k = 0; k < 3; ++k) {
        int n = tris_[t].adj[k];
        if (n < 0 || seen.count(n)) continue;
        if (opposite_index(n, v) < 0) continue;
        seen.insert(n);
        queue.push_back(n);
      }
    }
    return out;
  }

  int locate(Vec2 p, int hint) const {
    int t = hint;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) t = last_alive();
    for (int guard = 0; guard < 1 << 24; ++guard) {
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        Vec2 u = point(tris_[t].v[(k + 1) % 3]), w = point(tris_[t].v[(k + 2) % 3]);
        if (orient_ld(u, w, p) < 0) {
          next = tris_[t].adj[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    throw Error(ErrorCode::MeshFailure, "point location did not terminate");
  }

  int last_alive() const {
    for (int t = static_cast<int>(tris_.size()) - 1; t >= 0; --t)
      if (tris_[t].alive) return t;
    throw Error(ErrorCode::MeshFailure, "empty triangulation");
  }

  void insert(int vi) {
    Vec2 p = point(vi);
    int t0 = locate(p, hint_);
    std::vector<int> bad;
    std::unordered_map<int, char> mark;
    std::deque<int> queue{t0};
    mark[t0] = 1;
    while (!queue.empty()) {
      int t = queue.front();
      queue.pop_front();
      Vec2 a = point(tris_[t].v[0]), b = point(tris_[t].v[1]), c = point(tris_[t].v[2]);
      bool inside = (t == t0) || incircle_ld(a, b, c, p) > 0;
      if (!inside) continue;
      bad.push_back(t);
      mark[t] = 2;
      for (int k = 0; k < 3; ++k) {
        int n = tris_[t].adj[k];
        if (n >= 0 && !mark.count(n)) {
          mark[n] = 1;
          queue.push_back(n);
        }
      }
    }
    struct BEdge {
      int u, w, outer, outer_k;
    };
    std::vector<BEdge> boundary;
    for (int t : bad) {
      for (int k = 0; k < 3; ++k) {
        int n = tris_[t].adj[k];
        if (n < 0 || mark[n] != 2) {
          int u = tris_[t].v[(k + 1) % 3], w = tris_[t].v[(k + 2) % 3];
          int outer_k = -1;
          if (n >= 0)
            for (int kk = 0; kk < 3; ++kk)
              if (tris_[n].adj[kk] == t) outer_k = kk;
          boundary.push_back({u, w, n, outer_k});
        }
      }
    }
    for (int t : bad) tris_[t].alive = false;
    std::map<std::pair<int, int>, std::pair<int, int>> open;  // directed edge -> (tri, k)
    for (const auto& e : boundary) {
      int nt = static_cast<int>(tris_.size());
      tris_.push_back({{vi, e.u, e.w}, {e.outer, -1, -1}, true});
      if (e.outer >= 0) tris_[e.outer].adj[e.outer_k] = nt;
      vert2tri_[vi] = nt;
      vert2tri_[e.u] = nt;
      vert2tri_[e.w] = nt;
      auto link = [&](int u0, int w0, int k) {
        auto it = open.find({w0, u0});
        if (it != open.end()) {
          tris_[nt].adj[k] = it->second.first;
          tris_[it->second.first].adj[it->second.second] = nt;
          open.erase(it);
        } else {
          open[{u0, w0}] = {nt, k};
        }
      };
      link(e.w, vi, 1);  // edge (w, vi) opposite u
      link(vi, e.u, 2);  // edge (vi, u) opposite w
    }
    hint_ = vert2tri_[vi];
  }

  int opposite_index(int t, int v) const {
    for (int k = 0; k < 3; ++k)
      if (tris_[t].v[k] == v) return k;
    return -1;
  }

  bool crosses(int a, int b, int u, int w) const {
    Vec2 pa = point(a), pb = point(b), pu = point(u), pw = point(w);
    long double d1 = orient_ld(pa, pb, pu), d2 = orient_ld(pa, pb, pw);
    long double d3 = orient_ld(pu, pw, pa), d4 = orient_ld(pu, pw, pb);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
  }

  int find_any_incident(int v) const {
    int t = vert2tri_[v];
    if (t >= 0 && t < static_cast<int>(tris_.size()) && tris_[t].alive && opposite_index(t, v) >= 0)
      return t;
    for (std::size_t i = tris_.size(); i-- > 0;)
      if (tris_[i].alive && opposite_index(static_cast<int>(i), v) >= 0) return static_cast<int>(i);
    throw Error(ErrorCode::MeshFailure, "vertex lost all incident triangles");
  }

  /// Flips the edge opposite vertex k of triangle t when the quad is convex.
  bool flip(int t, int k) {
    int n = tris_[t].adj[k];
    if (n < 0) return false;
    int kn = -1;
    for (int kk = 0; kk < 3; ++kk)
      if (tris_[n].adj[kk] == t) kn = kk;
    if (kn < 0) return false;
    int x = tris_[t].v[k];
    int u = tris_[t].v[(k + 1) % 3];
    int w = tris_[t].v[(k + 2) % 3];
    int y = tris_[n].v[kn];
    if (!(orient_ld(point(x), point(u), point(y)) > 0 &&
          orient_ld(point(y), point(w), point(x)) > 0))
      return false;
    int t_adj_u = tris_[t].adj[(k + 2) % 3];  // across (x,u)
    int t_adj_w = tris_[t].adj[(k + 1) % 3];  // across (w,x)
    int n_adj_u = -1, n_adj_w = -1;
    for (int kk = 0; kk < 3; ++kk) {
      int a0 = tris_[n].v[(kk + 1) % 3], b0 = tris_[n].v[(kk + 2) % 3];
      if ((a0 == u && b0 == y) || (a0 == y && b0 == u)) n_adj_u = tris_[n].adj[kk];
      if ((a0 == w && b0 == y) || (a0 == y && b0 == w)) n_adj_w = tris_[n].adj[kk];
    }
    tris_[t] = {{x, u, y}, {n_adj_u, n, t_adj_u}, true};
    tris_[n] = {{x, y, w}, {n_adj_w, t_adj_w, t}, true};
    auto relink = [&](int tri, int old_nb, int new_nb) {
      if (tri < 0) return;
      for (int kk = 0; kk < 3; ++kk)
        if (tris_[tri].adj[kk] == old_nb) tris_[tri].adj[kk] = new_nb;
    };
    relink(n_adj_u, n, t);
    relink(t_adj_w, t, n);
    vert2tri_[x] = t;
    vert2tri_[u] = t;
    vert2tri_[y] = t;
    vert2tri_[w] = n;
    return true;
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vert2tri_;
  int n_real_ = 0;
  int super_ = -1;
  int hint_ = 0;
};

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  Vec2 ab = b - a, ac = c - a;
  double d = 2.0 * ab.cross(ac);
  double ab2 = ab.norm2(), ac2 = ac.norm2();
  return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

}  // namespace

Mesh triangulate(const geom::Scenario& sc, double h_max) {
  if (!(h_max > 0.0)) throw Error(ErrorCode::MeshFailure, "h_max must be positive");
  const double spacing = 0.6 * h_max;

  std::vector<Vec2> pts;
  std::vector<std::pair<int, int>> curve_ranges;  // (first, count); curve 0 = outer
  std::vector<double> curve_spacing;

  auto add_curve = [&](const geom::Shape& s) {
    auto ring = geom::sample_boundary(s, spacing);
    curve_ranges.push_back({static_cast<int>(pts.size()), static_cast<int>(ring.size())});
    double smax = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i)
      smax = std::max(smax, dist(ring[i], ring[(i + 1) % ring.size()]));
    curve_spacing.push_back(smax);
    pts.insert(pts.end(), ring.begin(), ring.end());
  };
  add_curve(sc.domain);
  for (const auto& inc : sc.inclusions) add_curve(inc.shape);

  // Interior hexagonal lattice, jittered, kept away from each curve by a band
  // proportional to that curve's own sampling.
  double R = geom::bounding_radius(sc.domain);
  double row = spacing * std::sqrt(3.0) / 2.0;
  int jmax = static_cast<int>(std::ceil(1.2 * R / row)) + 1;
  int imax = static_cast<int>(std::ceil(1.2 * R / spacing)) + 1;
  std::uint64_t idx = 0;
  for (int j = -jmax; j <= jmax; ++j) {
    double y = j * row;
    double x0 = (j % 2 == 0) ? 0.0 : spacing / 2.0;
    for (int i = -imax; i <= imax; ++i) {
      ++idx;
      Vec2 p{x0 + i * spacing + 1e-4 * spacing * hash_jitter(idx, 1),
             y + 1e-4 * spacing * hash_jitter(idx, 2)};
      if (!geom::contains(sc.domain, p)) continue;
      if (geom::boundary_distance(sc.domain, p) < 0.6 * std::min(spacing, curve_spacing[0])) continue;
      bool near_interface = false;
      for (std::size_t ci = 0; ci < sc.inclusions.size(); ++ci)
        if (geom::boundary_distance(sc.inclusions[ci].shape, p) <
            0.6 * std::min(spacing, curve_spacing[ci + 1])) {
          near_interface = true;
          break;
        }
      if (!near_interface) pts.push_back(p);
    }
  }

  Delaunay dt(std::move(pts), R);

  auto recover_all = [&]() {
    for (auto [first, count] : curve_ranges)
      for (int k = 0; k < count; ++k) {
        int a = first + k, b = first + (k + 1) % count;
        if (!dt.has_edge(a, b)) dt.recover_edge(a, b);
      }
  };
  recover_all();

  // Size-driven refinement: insert circumcenters (or centroids) of oversized
  // interior triangles until the circumdiameter bound holds.
  const double target = 0.9 * h_max;
  double guard = 0.35 * spacing;
  std::uint64_t rid = 0;
  for (int pass = 0; pass < 60; ++pass) {
    int inserted = 0, oversized = 0;
    // Snapshot of oversized triangles; each insertion is guarded against the
    // current triangulation so refinement points cannot land on top of each
    // other.
    std::vector<int> candidates;
    const auto& tris = dt.triangles();
    for (std::size_t ti = 0; ti < tris.size(); ++ti) {
      const auto& tri = tris[ti];
      if (!tri.alive) continue;
      if (dt.is_super(tri.v[0]) || dt.is_super(tri.v[1]) || dt.is_super(tri.v[2])) continue;
      Vec2 a = dt.point(tri.v[0]), b = dt.point(tri.v[1]), c = dt.point(tri.v[2]);
      Vec2 cen = (a + b + c) / 3.0;
      if (!geom::contains(sc.domain, cen)) continue;
      double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
      double area = 0.5 * (b - a).cross(c - a);
      if (area <= 0.0) continue;
      if (la * lb * lc / (2.0 * area) > target) candidates.push_back(static_cast<int>(ti));
    }
    for (int ti : candidates) {
      const auto& tri = dt.triangles()[ti];
      if (!tri.alive) continue;
      Vec2 a = dt.point(tri.v[0]), b = dt.point(tri.v[1]), c = dt.point(tri.v[2]);
      double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
      double area = 0.5 * (b - a).cross(c - a);
      if (area <= 0.0 || la * lb * lc / (2.0 * area) <= target) continue;
      ++oversized;
      Vec2 cc = circumcenter(a, b, c);
      Vec2 cen = (a + b + c) / 3.0;
      for (Vec2 cand : {cc, cen}) {
        ++rid;
        Vec2 q{cand.x + 1e-5 * spacing * hash_jitter(rid, 11),
               cand.y + 1e-5 * spacing * hash_jitter(rid, 13)};
        if (!geom::contains(sc.domain, q)) continue;
        auto near = dt.containing_vertices(q);
        double dmin = std::numeric_limits<double>::infinity();
        for (int v : near) dmin = std::min(dmin, dist(dt.point(v), q));
        if (dmin < guard) continue;
        dt.add_and_insert(q);
        ++inserted;
        break;
      }
    }
    if (oversized == 0 && inserted == 0) break;
    recover_all();
    if (inserted == 0) {
      guard *= 0.5;
      if (guard < 0.02 * spacing)
        throw Error(ErrorCode::MeshFailure, "size refinement stalled");
    }
    if (pass == 59) throw Error(ErrorCode::MeshFailure, "size refinement did not converge");
  }

  // Extract interior triangles.
  Mesh m;
  m.h_max = h_max;
  m.nodes.resize(dt.size());
  for (int i = 0; i < dt.size(); ++i) m.nodes[i] = dt.point(i);
  for (const auto& tri : dt.triangles()) {
    if (!tri.alive) continue;
    if (dt.is_super(tri.v[0]) || dt.is_super(tri.v[1]) || dt.is_super(tri.v[2])) continue;
    Vec2 c = (m.nodes[tri.v[0]] + m.nodes[tri.v[1]] + m.nodes[tri.v[2]]) / 3.0;
    if (!geom::contains(sc.domain, c)) continue;
    m.triangles.push_back({tri.v[0], tri.v[1], tri.v[2]});
  }

  // Drop unused nodes (super vertices and any stray exterior points).
  {
    std::vector<int> remap(m.nodes.size(), -1);
    std::vector<Vec2> kept;
    for (auto& tri : m.triangles)
      for (int& v : tri) {
        if (remap[v] < 0) {
          remap[v] = static_cast<int>(kept.size());
          kept.push_back(m.nodes[v]);
        }
        v = remap[v];
      }
    // Curve ranges were allocated first and every curve node belongs to some
    // interior triangle, so their remapped ids stay contiguous per curve only
    // logically; keep explicit lists instead.
    m.nodes = std::move(kept);
    for (auto& [first, count] : curve_ranges) {
      for (int k = 0; k < count; ++k)
        if (remap[first + k] < 0)
          throw Error(ErrorCode::MeshFailure, "boundary node dropped from the triangulation");
    }
    m.outer_nodes.resize(curve_ranges[0].second);
    for (int k = 0; k < curve_ranges[0].second; ++k)
      m.outer_nodes[k] = remap[curve_ranges[0].first + k];
    for (std::size_t ci = 0; ci < curve_ranges.size(); ++ci) {
      auto [first, count] = curve_ranges[ci];
      int curve = static_cast<int>(ci) - 1;
      for (int k = 0; k < count; ++k)
        m.boundary_edges.push_back({remap[first + k], remap[first + (k + 1) % count], curve});
    }
  }

  // Region tags from centroids.
  m.region.assign(m.triangles.size(), kBackground);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    Vec2 c = m.centroid(static_cast<int>(t));
    for (std::size_t i = 0; i < sc.inclusions.size(); ++i)
      if (geom::contains(sc.inclusions[i].shape, c)) {
        m.region[t] = static_cast<int>(i);
        break;
      }
  }

  // Inclusion node sets: interface ring + nodes of tagged triangles.
  m.inclusion_nodes.assign(sc.inclusions.size(), {});
  std::vector<char> seen(m.nodes.size(), 0);
  for (std::size_t i = 0; i < sc.inclusions.size(); ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    for (const auto& be : m.boundary_edges)
      if (be.curve == static_cast<int>(i)) seen[be.a] = seen[be.b] = 1;
    for (std::size_t t = 0; t < m.triangles.size(); ++t)
      if (m.region[t] == static_cast<int>(i))
        for (int v : m.triangles[t]) seen[v] = 1;
    for (std::size_t v = 0; v < m.nodes.size(); ++v)
      if (seen[v]) m.inclusion_nodes[i].push_back(static_cast<int>(v));
  }

  validate(m, sc);
  return m;
}

void validate(const Mesh& m, const geom::Scenario& sc) {
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (m.triangle_area(static_cast<int>(t)) <= 0.0)
      throw Error(ErrorCode::MeshFailure, "inverted triangle " + std::to_string(t));
    if (m.circumdiameter(static_cast<int>(t)) > m.h_max * (1.0 + 1e-9))
      throw Error(ErrorCode::MeshFailure,
                  "circumdiameter bound violated at triangle " + std::to_string(t));
  }
  std::unordered_map<std::uint64_t, int> edge_count;
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  for (const auto& tri : m.triangles)
    for (int k = 0; k < 3; ++k) edge_count[key(tri[k], tri[(k + 1) % 3])]++;
  std::unordered_map<std::uint64_t, int> boundary_curve;
  for (const auto& be : m.boundary_edges) boundary_curve[key(be.a, be.b)] = be.curve;
  for (const auto& [k, c] : edge_count) {
    if (c > 2) throw Error(ErrorCode::MeshFailure, "non-manifold edge");
    if (c == 1) {
      auto it = boundary_curve.find(k);
      if (it == boundary_curve.end() || it->second != kOuterCurve)
        throw Error(ErrorCode::MeshFailure, "dangling interior edge");
    }
  }
  for (const auto& be : m.boundary_edges)
    if (edge_count.find(key(be.a, be.b)) == edge_count.end())
      throw Error(ErrorCode::MeshFailure, "constrained edge missing from the triangulation");
  // Interface resolution: regions must change exactly across interface edges.
  std::unordered_map<std::uint64_t, std::pair<int, int>> edge_regions;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      auto kk = key(tri[k], tri[(k + 1) % 3]);
      auto it = edge_regions.find(kk);
      if (it == edge_regions.end())
        edge_regions[kk] = {m.region[t], -2};
      else
        it->second.second = m.region[t];
    }
  }
  for (const auto& [k, regs] : edge_regions) {
    if (regs.second == -2) continue;
    bool is_interface = boundary_curve.count(k) && boundary_curve[k] != kOuterCurve;
    if (is_interface && regs.first == regs.second)
      throw Error(ErrorCode::MeshFailure, "interface edge does not separate regions");
    if (!is_interface && regs.first != regs.second)
      throw Error(ErrorCode::MeshFailure, "region change across a non-interface edge");
  }
  (void)sc;
}

}  // namespace pcond::mesh
