#include "pcond/probe.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "pcond/layer_potential.hpp"
#include "pcond/parallel.hpp"

namespace pcond::probe {

double fundamental_solution(Vec2 x, Vec2 y, double r) { return bem::kernel(x, y, r); }
Vec2 fundamental_gradient(Vec2 x, Vec2 y) { return bem::kernel_grad_x(x, y); }

double Needle::length() const {
  double l = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) l += dist(vertices[i - 1], vertices[i]);
  return l;
}

Vec2 Needle::at(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  double target = t * length();
  double acc = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    double seg = dist(vertices[i - 1], vertices[i]);
    if (acc + seg >= target || i + 1 == vertices.size()) {
      double s = seg > 0 ? (target - acc) / seg : 0.0;
      return vertices[i - 1] + (vertices[i] - vertices[i - 1]) * std::clamp(s, 0.0, 1.0);
    }
    acc += seg;
  }
  return vertices.back();
}

double Needle::subpath_distance(Vec2 x, double t) const {
  double target = std::clamp(t, 0.0, 1.0) * length();
  double acc = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < vertices.size() && acc < target; ++i) {
    Vec2 a = vertices[i - 1], b = vertices[i];
    double seg = dist(a, b);
    double frac = std::min(1.0, (target - acc) / std::max(seg, 1e-300));
    Vec2 bb = a + (b - a) * frac;
    Vec2 ab = bb - a;
    double len2 = ab.norm2();
    double s = len2 > 0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, dist(x, a + ab * s));
    acc += seg;
  }
  return best;
}

void Needle::validate(const geom::Shape& domain) const {
  if (vertices.size() < 2) throw Error(ErrorCode::ValidationError, "needle needs two endpoints");
  if (geom::boundary_distance(domain, vertices.front()) > 1e-10 ||
      geom::boundary_distance(domain, vertices.back()) > 1e-10)
    throw Error(ErrorCode::ValidationError, "needle endpoints must lie on the outer boundary");
  // Interior samples must be strictly inside.
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    for (int q = 1; q <= 8; ++q) {
      double s = q / 9.0;
      Vec2 x = vertices[i - 1] + (vertices[i] - vertices[i - 1]) * s;
      bool endpoint_leg = (i == 1 && s < 0.2) || (i + 1 == vertices.size() && s > 0.8);
      if (!geom::contains(domain, x) && !endpoint_leg)
        throw Error(ErrorCode::ValidationError, "needle leaves the domain");
    }
  }
}

Needle Needle::chord(const geom::Shape& domain, double theta) {
  Vec2 ref = geom::reference_point(domain);
  // Entry point: boundary intersection of the ray from ref at angle theta.
  auto boundary_point = [&](Vec2 dir) {
    double lo = 0.0, hi = 4.0 * geom::bounding_radius(domain) + 1.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (geom::contains(domain, ref + dir * mid))
        lo = mid;
      else
        hi = mid;
    }
    return ref + dir * (0.5 * (lo + hi));
  };
  Vec2 dir{std::cos(theta), std::sin(theta)};
  Needle n;
  n.vertices = {boundary_point(dir), boundary_point(-dir)};
  return n;
}

double RungeApproximant::eval(Vec2 x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < poles.size(); ++j)
    s += coeffs[j] * fundamental_solution(x, poles[j], scale_r);
  return s;
}

Vec2 RungeApproximant::grad(Vec2 x) const {
  Vec2 g{0, 0};
  for (std::size_t j = 0; j < poles.size(); ++j)
    g += coeffs[j] * fundamental_gradient(x, poles[j]);
  return g;
}

fem::BoundaryTrace RungeApproximant::trace(const mesh::Mesh& m) const {
  fem::BoundaryTrace f(m.outer_nodes.size());
  for (std::size_t i = 0; i < m.outer_nodes.size(); ++i) f[i] = eval(m.nodes[m.outer_nodes[i]]);
  return f;
}

RungeApproximant fit_runge(const geom::Shape& domain, std::vector<Vec2> poles, Vec2 target,
                           const std::vector<Vec2>& collocation, double r, double svd_threshold) {
  (void)domain;
  std::size_t np = poles.size(), nc = collocation.size();
  if (np == 0 || nc < np) throw Error(ErrorCode::FitDegenerate, "collocation set too small");
  Eigen::MatrixXd A(3 * nc, np);
  Eigen::VectorXd b(3 * nc);
  for (std::size_t i = 0; i < nc; ++i) {
    Vec2 x = collocation[i];
    b[3 * i] = fundamental_solution(x, target, r);
    Vec2 gt = fundamental_gradient(x, target);
    b[3 * i + 1] = gt.x;
    b[3 * i + 2] = gt.y;
    for (std::size_t j = 0; j < np; ++j) {
      A(3 * i, j) = fundamental_solution(x, poles[j], r);
      Vec2 g = fundamental_gradient(x, poles[j]);
      A(3 * i + 1, j) = g.x;
      A(3 * i + 2, j) = g.y;
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(svd_threshold);
  RungeApproximant out;
  out.poles = std::move(poles);
  out.coeffs = svd.solve(b);
  out.target = target;
  out.scale_r = r;
  double bn = b.norm();
  out.fit_residual = bn > 0 ? (A * out.coeffs - b).norm() / bn : 0.0;
  return out;
}

RungeApproximant fit_runge_weighted(const geom::Shape& domain, std::vector<Vec2> poles,
                                    Vec2 target, const std::vector<Vec2>& collocation,
                                    const std::vector<double>& weights, double r,
                                    double tikhonov) {
  (void)domain;
  std::size_t np = poles.size(), nc = collocation.size();
  if (np == 0 || nc < np) throw Error(ErrorCode::FitDegenerate, "collocation set too small");
  Eigen::MatrixXd A(3 * nc, np);
  Eigen::VectorXd b(3 * nc);
  for (std::size_t i = 0; i < nc; ++i) {
    Vec2 x = collocation[i];
    double w = std::sqrt(weights[i]);
    b[3 * i] = w * fundamental_solution(x, target, r);
    Vec2 gt = fundamental_gradient(x, target);
    b[3 * i + 1] = w * gt.x;
    b[3 * i + 2] = w * gt.y;
    for (std::size_t j = 0; j < np; ++j) {
      A(3 * i, j) = w * fundamental_solution(x, poles[j], r);
      Vec2 g = fundamental_gradient(x, poles[j]);
      A(3 * i + 1, j) = w * g.x;
      A(3 * i + 2, j) = w * g.y;
    }
  }
  // Fixed-parameter Tikhonov keeps the coefficients (and hence the datum's
  // scale) a smooth function of the needle parameter.
  Eigen::MatrixXd AtA = A.transpose() * A;
  Eigen::VectorXd Atb = A.transpose() * b;
  AtA.diagonal().array() += tikhonov * tikhonov * AtA.trace();
  RungeApproximant out;
  out.poles = std::move(poles);
  out.coeffs = AtA.ldlt().solve(Atb);
  out.target = target;
  out.scale_r = r;
  // Residual restricted to the fully-weighted rows: the quality of the fit
  // on the region it is actually asked to match.
  double wmax = 0.0;
  for (double w : weights) wmax = std::max(wmax, w);
  Eigen::VectorXd resid = A * out.coeffs - b;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    if (weights[i] < 0.999 * wmax) continue;
    for (int c = 0; c < 3; ++c) {
      num += resid[3 * i + c] * resid[3 * i + c];
      den += b[3 * i + c] * b[3 * i + c];
    }
  }
  out.fit_residual = den > 0 ? std::sqrt(num / den) : 0.0;
  return out;
}

namespace {

/// Distance to the subpath gamma([0,t]) with a conical allowance: the
/// excluded neighborhood is narrow (tube) at the moving tip and widens
/// toward the entry, which keeps the harmonic continuation through the
/// needle mouth well conditioned. Returns dist - allowance (negative inside).
double cone_clearance(const Needle& needle, double t, double tube, double flare, Vec2 x) {
  double target = std::clamp(t, 0.0, 1.0) * needle.length();
  double acc = 0.0;
  double clearance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < needle.vertices.size() && acc < target; ++i) {
    Vec2 a = needle.vertices[i - 1], b = needle.vertices[i];
    double seg = dist(a, b);
    double frac = std::min(1.0, (target - acc) / std::max(seg, 1e-300));
    Vec2 bb = a + (b - a) * frac;
    Vec2 ab = bb - a;
    double len2 = ab.norm2();
    double s = len2 > 0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    Vec2 cp = a + ab * s;
    double arc_at_cp = acc + seg * frac * s;
    double allow = tube + flare * (target - arc_at_cp);
    clearance = std::min(clearance, dist(x, cp) - allow);
    acc += seg;
  }
  return clearance;
}

struct WeightedCollocation {
  std::vector<Vec2> pts;
  std::vector<double> w;  // area weights with standoff damping
};

WeightedCollocation collocation_grid(const geom::Shape& domain, const Needle& needle, double t,
                                     double spacing, double tube, double flare, double standoff) {
  WeightedCollocation out;
  double R = geom::bounding_radius(domain);
  int n = static_cast<int>(std::ceil(2.0 * R / spacing)) + 1;
  for (int j = -n; j <= n; ++j) {
    for (int i = -n; i <= n; ++i) {
      Vec2 x{i * spacing + 0.5 * spacing * ((j % 2 + 2) % 2), j * spacing * 0.866};
      if (!geom::contains(domain, x)) continue;
      if (cone_clearance(needle, t, tube, flare, x) < 0) continue;
      double d = needle.subpath_distance(x, t);
      double damp = std::min(1.0, std::pow(d / standoff, 4.0));
      out.pts.push_back(x);
      out.w.push_back(spacing * spacing * 0.866 * damp);
    }
  }
  return out;
}

std::vector<Vec2> make_poles(const geom::Shape& domain, const Needle& needle, int k,
                             double min_offset) {
  Vec2 entry = needle.vertices.front();
  Vec2 inward = (needle.at(0.05) - entry).normalized();
  Vec2 outward = -inward;
  Vec2 tangent = outward.perp();
  double diam = geom::diameter(domain);
  std::vector<Vec2> poles;
  // 8k poles: k levels clustering toward the entry, floored at a
  // mesh-resolvable offset so the boundary traces stay representable.
  for (int level = 0; level < k; ++level) {
    double d = std::max(0.45 * diam * std::pow(0.55, level), min_offset);
    for (int a = 0; a < 8; ++a) {
      double rad = (-72.0 + 144.0 * a / 7.0) * M_PI / 180.0;
      Vec2 z = entry + d * (std::cos(rad) * outward + std::sin(rad) * tangent);
      if (geom::contains(domain, z)) {
        z = entry + 2.0 * d * outward;  // fallback for concave boundaries
        if (geom::contains(domain, z)) continue;
      }
      poles.push_back(z);
    }
  }
  return poles;
}

}  // namespace

RungeApproximant build_runge_sequence(const geom::Shape& domain, const Needle& needle, double t,
                                      int k, const RungeOptions& opts) {
  if (k < 1) throw Error(ErrorCode::ValidationError, "sequence index k must be >= 1");
  if (!(t > 0.0 && t < 1.0))
    throw Error(ErrorCode::ValidationError, "needle parameter must lie in (0,1)");
  double diam = geom::diameter(domain);
  double spacing = opts.collocation_spacing > 0 ? opts.collocation_spacing : diam / 70.0;
  double tube = opts.tube_override > 0 ? opts.tube_override : needle.tube_radius / k;
  auto cols = collocation_grid(domain, needle, t, spacing, tube, opts.cone_flare,
                               opts.standoff > 0 ? opts.standoff : 0.075 * diam);
  double r = bem::default_scale(domain).r;
  auto poles = make_poles(domain, needle, k, opts.min_pole_offset > 0 ? opts.min_pole_offset
                                                                      : 0.0375 * diam);
  return fit_runge_weighted(domain, std::move(poles), needle.at(t), cols.pts, cols.w, r,
                            opts.tikhonov);
}

double probe_indicator(const geom::Scenario& sc, const mesh::Mesh& m, const RungeApproximant& fk,
                       dn::P2Workspace* ws) {
  if (sc.p != 2.0) throw Error(ErrorCode::ValidationError, "the probe method requires p = 2");
  for (const auto& inc : sc.inclusions)
    if (inc.kind != geom::InclusionKind::Superconducting)
      throw Error(ErrorCode::ValidationError, "the probe method targets superconducting scenarios");
  auto f = fk.trace(m);
  return dn::gap_difference_form(sc, m, f, {}, ws).value;
}

HitEstimate hitting_time(const geom::Scenario& sc, const mesh::Mesh& m, const Needle& needle,
                         const std::vector<double>& t_grid, int k, const HitOptions& opts,
                         dn::P2Workspace* ws) {
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1] && t_grid[i] < 1.0 && t_grid[0] > 0.0))
      throw Error(ErrorCode::ValidationError, "t grid must be increasing inside (0,1)");
  std::unique_ptr<dn::P2Workspace> local;
  if (ws == nullptr) {
    local = std::make_unique<dn::P2Workspace>(sc, m);
    ws = local.get();
  }
  HitEstimate est;
  est.t_grid = t_grid;
  std::size_t n_far = std::max<std::size_t>(3, static_cast<std::size_t>(
                                                   opts.farfield_fraction * t_grid.size()));
  n_far = std::min(n_far, t_grid.size());
  std::vector<double> farfield;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    auto fk = build_runge_sequence(sc.domain, needle, t_grid[i], k, opts.runge);
    auto f = fk.trace(m);
    auto g = dn::gap_difference_form(sc, m, f, {}, ws);
    est.indicator.push_back(g.value);
    est.rel_magnitude.push_back(g.free_pairing > 0 ? std::abs(g.value) / g.free_pairing : 0.0);
    if (i + 1 == n_far) {
      std::vector<double> sorted(est.indicator);
      std::sort(sorted.begin(), sorted.end());
      est.threshold = opts.threshold_factor * sorted[sorted.size() / 2];
    }
    if (i + 1 >= n_far && est.threshold > 0 && est.indicator.back() > est.threshold &&
        est.rel_magnitude.back() > opts.rel_floor) {
      est.hit = true;
      est.t_hat = t_grid[i];
      break;
    }
  }
  return est;
}

std::vector<BoundaryPoint> reconstruct_boundary(const geom::Scenario& sc, const mesh::Mesh& m,
                                                const std::vector<Needle>& needles,
                                                const std::vector<double>& t_grid, int k,
                                                const HitOptions& opts, int threads) {
  dn::P2Workspace ws(sc, m);
  std::vector<BoundaryPoint> cloud(needles.size());
  parallel_for(needles.size(), threads, [&](std::size_t i) {
    auto est = hitting_time(sc, m, needles[i], t_grid, k, opts, &ws);
    BoundaryPoint bp;
    bp.needle_id = static_cast<int>(i);
    bp.entry = needles[i].vertices.front();
    bp.t_hat = est.t_hat;
    bp.hit = est.hit;
    bp.point = needles[i].at(est.t_hat);
    cloud[i] = bp;
  });
  return cloud;
}

}  // namespace pcond::probe
