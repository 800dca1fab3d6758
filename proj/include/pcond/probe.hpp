#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pcond/dn_map.hpp"
#include "pcond/geometry.hpp"

namespace pcond::probe {

/// Fundamental solution (1/2pi) log(r / |x-y|), sharing the kernel scale
/// convention of the layer-potential module.
double fundamental_solution(Vec2 x, Vec2 y, double r);
Vec2 fundamental_gradient(Vec2 x, Vec2 y);

/// Boundary-to-boundary polyline, parametrized by normalized arclength.
struct Needle {
  std::vector<Vec2> vertices;
  double tube_radius = 0.08;

  double length() const;
  Vec2 at(double t) const;
  /// Distance from x to the subpath gamma([0, t]).
  double subpath_distance(Vec2 x, double t) const;
  void validate(const geom::Shape& domain) const;

  /// Straight chord from the boundary point at angle theta through the
  /// domain reference point to the opposite boundary.
  static Needle chord(const geom::Shape& domain, double theta);
};

struct RungeApproximant {
  std::vector<Vec2> poles;  // strictly outside the domain closure
  Eigen::VectorXd coeffs;
  Vec2 target;
  double fit_residual = 0.0;  // relative H1 residual on the collocation set
  double scale_r = 1.0;

  double eval(Vec2 x) const;
  Vec2 grad(Vec2 x) const;
  fem::BoundaryTrace trace(const mesh::Mesh& m) const;
};

struct RungeOptions {
  double collocation_spacing = 0.0;  // 0: diam/70
  double tube_override = 0.0;        // 0: needle.tube_radius / k
  double svd_threshold = 1e-13;      // exact-basis fits (fit_runge)
  double tikhonov = 1e-6;            // relative regularization of the LS fit
  double cone_flare = 0.45;          // exclusion cone widening toward the entry
  double standoff = 0.0;             // fit-metric standoff; 0: 0.075 * diam
  double min_pole_offset = 0.0;      // 0: 0.0375 * diam (mesh-resolvable traces)
};

/// Least-squares pole expansion approximating Phi(., gamma(t)) in the
/// discrete H1 norm over the domain minus the needle tube. Poles cluster
/// geometrically toward the needle entry, 8 per level, nested across k.
RungeApproximant build_runge_sequence(const geom::Shape& domain, const Needle& needle, double t,
                                      int k, const RungeOptions& opts = {});

/// Low-level fit against the field of a given target pole (which may lie
/// outside the domain; used by exact-representation tests).
RungeApproximant fit_runge(const geom::Shape& domain, std::vector<Vec2> poles, Vec2 target,
                           const std::vector<Vec2>& collocation, double r, double svd_threshold);

/// Area- and standoff-weighted Tikhonov variant used by the needle pipeline.
RungeApproximant fit_runge_weighted(const geom::Shape& domain, std::vector<Vec2> poles,
                                    Vec2 target, const std::vector<Vec2>& collocation,
                                    const std::vector<double>& weights, double r, double tikhonov);

/// <(Lambda_D - Lambda_empty) f_k, f_k> for the approximant's boundary datum.
double probe_indicator(const geom::Scenario& sc, const mesh::Mesh& m, const RungeApproximant& fk,
                       dn::P2Workspace* ws = nullptr);

struct HitOptions {
  double threshold_factor = 50.0;  // blow-up = factor x far-field median
  double farfield_fraction = 0.1;  // leading part of the grid used as far field
  double rel_floor = 1e-8;         // indicator must also clear the solver floor
  RungeOptions runge;
};

struct HitEstimate {
  double t_hat = 1.0;
  bool hit = false;
  std::vector<double> t_grid;
  std::vector<double> indicator;       // values actually computed (early stop at the hit)
  std::vector<double> rel_magnitude;   // |gap| / free pairing per t
  double threshold = 0.0;
};

HitEstimate hitting_time(const geom::Scenario& sc, const mesh::Mesh& m, const Needle& needle,
                         const std::vector<double>& t_grid, int k, const HitOptions& opts = {},
                         dn::P2Workspace* ws = nullptr);

struct BoundaryPoint {
  int needle_id = 0;
  Vec2 entry;
  double t_hat = 1.0;
  bool hit = false;
  Vec2 point;
};

/// Fan of chords; the hit points gamma(t_hat) sample the obstacle boundary.
std::vector<BoundaryPoint> reconstruct_boundary(const geom::Scenario& sc, const mesh::Mesh& m,
                                                const std::vector<Needle>& needles,
                                                const std::vector<double>& t_grid, int k,
                                                const HitOptions& opts = {}, int threads = 1);

}  // namespace pcond::probe
