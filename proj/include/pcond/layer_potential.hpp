#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pcond/geometry.hpp"

namespace pcond::bem {

/// Closed panel discretization of a curve: midpoint collocation with exact
/// self-panel integration of the log kernel.
struct PanelCurve {
  std::vector<Vec2> endpoints;  // CCW, closed implicitly
  std::vector<Vec2> mid;
  std::vector<double> len;
  std::vector<Vec2> normal;        // outward of the enclosed region
  std::vector<double> curvature;   // per panel, used for the Neumann self-term
  double total_length = 0.0;
  double diameter = 0.0;

  static PanelCurve from_shape(const geom::Shape& s, int n_panels);
  static PanelCurve from_points(std::vector<Vec2> endpoints);
  std::size_t size() const { return mid.size(); }
};

/// Kernel scale: Phi = (1/2pi) log(r / |x-y|) with r > diam(domain).
struct LogScale {
  double r = 1.0;
};
/// r fixed at 4x the domain diameter.
LogScale default_scale(const geom::Shape& domain);

double kernel(Vec2 x, Vec2 y, double r);
Vec2 kernel_grad_x(Vec2 x, Vec2 y);

/// Midpoint-collocation single layer matrix: row i is the trace at tgt.mid[i]
/// of the potential of a density on src. Self-interaction (same object passed
/// twice) integrates the log exactly over the straight panel.
Eigen::MatrixXd single_layer_matrix(const PanelCurve& src, const PanelCurve& tgt, LogScale scale);

/// Pointwise potential of a per-unit-length density (x off the panels).
double single_layer_eval(const PanelCurve& c, const Eigen::VectorXd& density, Vec2 x,
                         LogScale scale);
Vec2 single_layer_grad(const PanelCurve& c, const Eigen::VectorXd& density, Vec2 x);

/// Adjoint double layer K* on the curve itself (for the one-sided Neumann
/// traces +-1/2 I + K*). The self-panel entry carries the curvature term.
Eigen::MatrixXd adjoint_double_layer(const PanelCurve& c);

struct EquilibriumResult {
  Eigen::VectorXd density;  // per unit length, integrates to 1
  double s_value = 0.0;     // the constant trace S psi_eq
  double mean_abs_residual = 0.0;
};

/// Unique density with constant single-layer trace and total mass one.
EquilibriumResult equilibrium_density(const PanelCurve& c, LogScale scale);

/// exp(-2 pi S psi_eq); the n=2 capacity relative to the kernel scale.
double capacity(const PanelCurve& c, LogScale scale);

/// Harmonic datum supplied analytically to the reflected solve.
struct HarmonicField {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> grad;
};

class ReflectedSolver;

struct ReflectedSolution {
  Eigen::VectorXd p_hat;  // density on the inclusion boundary, mean zero
  Eigen::VectorXd q_hat;  // density on the outer boundary
  double c_f = 0.0;       // constant of w + u0 on the inclusion
  int neumann_iterations = 0;  // 0 when the direct path was taken
  const ReflectedSolver* solver = nullptr;

  /// w(x) = S_dD p_hat + S_dOmega q_hat.
  double eval_w(Vec2 x) const;
  Vec2 eval_grad_w(Vec2 x) const;
};

struct OperatorNorms {
  double K_Omega_to_D = 0.0;
  double K_D_to_Omega = 0.0;
  double K = 0.0;
};

/// Dense two-curve machinery for the reflected problem w = S_dD p + S_dOm q
/// with w = 0 on the outer boundary and w + u0 constant on the inclusion.
class ReflectedSolver {
public:
  ReflectedSolver(PanelCurve outer, PanelCurve inclusion, LogScale scale);

  const PanelCurve& outer() const { return outer_; }
  const PanelCurve& inclusion() const { return incl_; }
  LogScale scale() const { return scale_; }

  /// Neumann series on (I - K) p = -Pi_dD u0 when the estimated contraction
  /// norm is below 0.9, dense direct solve otherwise.
  ReflectedSolution solve(const std::vector<double>& u0_at_inclusion_midpoints) const;

  /// H^{1/2} operator-norm estimates of the interaction operators.
  OperatorNorms operator_norms() const;

  /// <(Lambda_D - Lambda_empty) f, f> from the interior Neumann trace of w on
  /// the outer boundary, for f given at the outer midpoints.
  double dn_gap(const ReflectedSolution& sol, const std::vector<double>& f_at_outer) const;

  /// Boundary term int_dD (dw/dnu) u0 dS with nu pointing out of the annulus
  /// (into D), computed from the density jump relation.
  double boundary_term(const ReflectedSolution& sol, const HarmonicField& u0) const;

  /// max over the family of |boundary term| / ||u0||_{H1(D)}^2; the inclusion
  /// must be a circle (quadrature domain).
  double boundary_term_ratio(const std::vector<HarmonicField>& family) const;

private:
  friend struct ReflectedSolution;
  PanelCurve outer_, incl_;
  LogScale scale_;
  Eigen::MatrixXd S_dd_, S_oo_, S_do_, S_od_;  // S_xy: trace on x of density on y
  Eigen::MatrixXd Kstar_oo_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_direct_;  // (N_D + N_O + 1) system
  Eigen::VectorXd psi_d_, psi_o_;                   // equilibrium densities
  double s_d_ = 0.0, s_o_ = 0.0;
  // trace -> density maps (augmented inverses) and H^{1/2} Gram matrices
  Eigen::MatrixXd Md_, Mo_, Gd_, Go_;
  Eigen::VectorXd proj_d(const Eigen::VectorXd& q) const;  // Pi_dD on traces
  Eigen::VectorXd proj_o(const Eigen::VectorXd& q) const;
  mutable OperatorNorms cached_norms_;
  mutable bool norms_ready_ = false;
};

}  // namespace pcond::bem
