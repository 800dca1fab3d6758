#include "pcond/layer_potential.hpp"

#include <algorithm>
#include <cmath>

namespace pcond::bem {

PanelCurve PanelCurve::from_points(std::vector<Vec2> endpoints) {
  PanelCurve c;
  c.endpoints = std::move(endpoints);
  std::size_t n = c.endpoints.size();
  if (n < 3) throw Error(ErrorCode::ValidationError, "panel curve needs at least 3 points");
  // Normalize to CCW.
  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) area += c.endpoints[i].cross(c.endpoints[(i + 1) % n]);
  if (area < 0) std::reverse(c.endpoints.begin(), c.endpoints.end());
  c.mid.resize(n);
  c.len.resize(n);
  c.normal.resize(n);
  c.curvature.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = c.endpoints[i], b = c.endpoints[(i + 1) % n];
    c.mid[i] = (a + b) * 0.5;
    c.len[i] = dist(a, b);
    Vec2 t = (b - a) / c.len[i];
    c.normal[i] = {t.y, -t.x};  // outward for CCW orientation
    c.total_length += c.len[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      c.diameter = std::max(c.diameter, dist(c.endpoints[i], c.endpoints[j]));
  // Curvature estimate from the circumcircle of consecutive midpoints; exact
  // shapes override below.
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = c.mid[(i + n - 1) % n], b = c.mid[i], d = c.mid[(i + 1) % n];
    double twice = (b - a).cross(d - a);
    double la = dist(b, d), lb = dist(a, d), lc = dist(a, b);
    double denom = la * lb * lc;
    c.curvature[i] = denom > 0 ? 2.0 * twice / denom : 0.0;
  }
  return c;
}

PanelCurve PanelCurve::from_shape(const geom::Shape& s, int n_panels) {
  if (const auto* circ = std::get_if<geom::Circle>(&s)) {
    std::vector<Vec2> pts(n_panels);
    for (int i = 0; i < n_panels; ++i) {
      double th = 2.0 * M_PI * i / n_panels;
      pts[i] = {circ->center.x + circ->radius * std::cos(th),
                circ->center.y + circ->radius * std::sin(th)};
    }
    auto c = from_points(std::move(pts));
    std::fill(c.curvature.begin(), c.curvature.end(), 1.0 / circ->radius);
    return c;
  }
  const auto& poly = std::get<geom::Polygon>(s);
  double per = 0.0;
  std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i)
    per += dist(poly.vertices[i], poly.vertices[(i + 1) % n]);
  double target = per / n_panels;
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = poly.vertices[i], b = poly.vertices[(i + 1) % n];
    int mseg = std::max(1, static_cast<int>(std::round(dist(a, b) / target)));
    for (int k = 0; k < mseg; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / mseg));
  }
  auto c = from_points(std::move(pts));
  std::fill(c.curvature.begin(), c.curvature.end(), 0.0);  // straight panels
  return c;
}

LogScale default_scale(const geom::Shape& domain) { return {4.0 * geom::diameter(domain)}; }

double kernel(Vec2 x, Vec2 y, double r) {
  double d = dist(x, y);
  if (d == 0.0) throw Error(ErrorCode::CoincidentPoints, "kernel evaluated on the diagonal");
  return std::log(r / d) / (2.0 * M_PI);
}

Vec2 kernel_grad_x(Vec2 x, Vec2 y) {
  Vec2 d = x - y;
  double d2 = d.norm2();
  if (d2 == 0.0) throw Error(ErrorCode::CoincidentPoints, "kernel gradient on the diagonal");
  return d * (-1.0 / (2.0 * M_PI * d2));
}

namespace {

void check_scale(const PanelCurve& c, LogScale scale) {
  if (scale.r <= c.diameter)
    throw Error(ErrorCode::ScaleViolation, "kernel scale r must exceed the curve diameter");
}

/// Exact integral of (1/2pi) log(r/|x-y|) over a straight panel of length l,
/// evaluated at its own midpoint: (l/2pi)(log(2r/l) + 1).
double self_entry(double l, double r) { return l / (2.0 * M_PI) * (std::log(2.0 * r / l) + 1.0); }

}  // namespace

Eigen::MatrixXd single_layer_matrix(const PanelCurve& src, const PanelCurve& tgt, LogScale scale) {
  check_scale(src, scale);
  bool self = &src == &tgt;
  Eigen::MatrixXd S(tgt.size(), src.size());
  for (std::size_t i = 0; i < tgt.size(); ++i)
    for (std::size_t j = 0; j < src.size(); ++j)
      S(i, j) = (self && i == j) ? self_entry(src.len[j], scale.r)
                                 : kernel(tgt.mid[i], src.mid[j], scale.r) * src.len[j];
  return S;
}

double single_layer_eval(const PanelCurve& c, const Eigen::VectorXd& density, Vec2 x,
                         LogScale scale) {
  check_scale(c, scale);
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) s += kernel(x, c.mid[j], scale.r) * density[j] * c.len[j];
  return s;
}

Vec2 single_layer_grad(const PanelCurve& c, const Eigen::VectorXd& density, Vec2 x) {
  Vec2 g{0, 0};
  for (std::size_t j = 0; j < c.size(); ++j) g += kernel_grad_x(x, c.mid[j]) * (density[j] * c.len[j]);
  return g;
}

Eigen::MatrixXd adjoint_double_layer(const PanelCurve& c) {
  Eigen::MatrixXd K(c.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      K(i, j) = (i == j) ? -c.curvature[i] * c.len[i] / (4.0 * M_PI)
                         : kernel_grad_x(c.mid[i], c.mid[j]).dot(c.normal[i]) * c.len[j];
  return K;
}

EquilibriumResult equilibrium_density(const PanelCurve& c, LogScale scale) {
  // [S | -1; l^T | 0] (w, s) = (0, 1): constant trace with unit total mass.
  std::size_t n = c.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  A.topLeftCorner(n, n) = single_layer_matrix(c, c, scale);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, n) = -1.0;
    A(n, i) = c.len[i];
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b[n] = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd sol = lu.solve(b);
  double resid = (A * sol - b).cwiseAbs().maxCoeff();
  if (!std::isfinite(resid) || resid > 1e-8)
    throw Error(ErrorCode::IllConditioned,
                "equilibrium system residual " + std::to_string(resid));
  EquilibriumResult out;
  out.density = sol.head(n);
  out.s_value = sol[n];
  out.mean_abs_residual = resid;
  return out;
}

double capacity(const PanelCurve& c, LogScale scale) {
  return std::exp(-2.0 * M_PI * equilibrium_density(c, scale).s_value);
}

// --- reflected problem ------------------------------------------------------

ReflectedSolver::ReflectedSolver(PanelCurve outer, PanelCurve inclusion, LogScale scale)
    : outer_(std::move(outer)), incl_(std::move(inclusion)), scale_(scale) {
  check_scale(outer_, scale_);
  S_dd_ = single_layer_matrix(incl_, incl_, scale_);
  S_oo_ = single_layer_matrix(outer_, outer_, scale_);
  S_do_ = single_layer_matrix(outer_, incl_, scale_);  // trace on dD of outer density
  S_od_ = single_layer_matrix(incl_, outer_, scale_);  // trace on dOmega of inclusion density
  Kstar_oo_ = adjoint_double_layer(outer_);

  auto eq_d = equilibrium_density(incl_, scale_);
  auto eq_o = equilibrium_density(outer_, scale_);
  psi_d_ = eq_d.density;
  s_d_ = eq_d.s_value;
  psi_o_ = eq_o.density;
  s_o_ = eq_o.s_value;

  const std::size_t nd = incl_.size(), no = outer_.size();
  // Direct system for (p_hat, q_hat, c_f).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nd + no + 1, nd + no + 1);
  A.topLeftCorner(nd, nd) = S_dd_;
  A.block(0, nd, nd, no) = S_do_;
  for (std::size_t i = 0; i < nd; ++i) A(i, nd + no) = -1.0;
  A.block(nd, 0, no, nd) = S_od_;
  A.block(nd, nd, no, no) = S_oo_;
  for (std::size_t j = 0; j < nd; ++j) A(nd + no, j) = incl_.len[j];
  lu_direct_.compute(A);

  // Trace -> density maps via augmented solves against the identity.
  auto trace_to_density = [&](const Eigen::MatrixXd& S, const PanelCurve& c) {
    std::size_t n = c.size();
    Eigen::MatrixXd Aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Aug.topLeftCorner(n, n) = S;
    for (std::size_t i = 0; i < n; ++i) {
      Aug(i, n) = 1.0;
      Aug(n, i) = c.len[i];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Aug);
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    for (std::size_t j = 0; j < n; ++j) {
      rhs.setZero();
      rhs[j] = 1.0;
      M.col(j) = lu.solve(rhs).head(n);
    }
    return M;
  };
  Md_ = trace_to_density(S_dd_, incl_);
  Mo_ = trace_to_density(S_oo_, outer_);
  // H^{1/2} Gram matrices on traces: <q, p> = (M q)^T L p.
  Eigen::VectorXd Ld = Eigen::Map<const Eigen::VectorXd>(incl_.len.data(), nd);
  Eigen::VectorXd Lo = Eigen::Map<const Eigen::VectorXd>(outer_.len.data(), no);
  Eigen::MatrixXd Ldm = Ld.asDiagonal();
  Eigen::MatrixXd Lom = Lo.asDiagonal();
  Gd_ = 0.5 * (Md_.transpose() * Ldm + Ldm * Md_);
  Go_ = 0.5 * (Mo_.transpose() * Lom + Lom * Mo_);
}

Eigen::VectorXd ReflectedSolver::proj_d(const Eigen::VectorXd& q) const {
  double mean = 0.0;
  for (std::size_t i = 0; i < incl_.size(); ++i) mean += psi_d_[i] * q[i] * incl_.len[i];
  return q - Eigen::VectorXd::Constant(q.size(), mean);
}

Eigen::VectorXd ReflectedSolver::proj_o(const Eigen::VectorXd& q) const {
  double mean = 0.0;
  for (std::size_t i = 0; i < outer_.size(); ++i) mean += psi_o_[i] * q[i] * outer_.len[i];
  return q - Eigen::VectorXd::Constant(q.size(), mean);
}

OperatorNorms ReflectedSolver::operator_norms() const {
  if (norms_ready_) return cached_norms_;
  const std::size_t nd = incl_.size(), no = outer_.size();
  // Interaction operators in trace coordinates.
  Eigen::MatrixXd T_do = S_od_ * Md_;  // H(dD) -> traces on dOmega
  for (std::size_t j = 0; j < nd; ++j) T_do.col(j) = proj_o(T_do.col(j));
  Eigen::MatrixXd T_od = S_do_ * Mo_;  // H(dOmega) -> traces on dD
  for (std::size_t j = 0; j < no; ++j) T_od.col(j) = proj_d(T_od.col(j));
  Eigen::MatrixXd K = T_od * T_do;

  // Projectors onto H (psi-mean-zero traces); the equilibrium mass is one, so
  // P = I - 1 (L psi)^T removes the constant component of the pairing.
  auto projector = [](const Eigen::VectorXd& psi, const std::vector<double>& len) {
    std::size_t n = psi.size();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) P(i, j) -= psi[j] * len[j];
    return P;
  };
  Eigen::MatrixXd Pd = projector(psi_d_, incl_.len);
  Eigen::MatrixXd Po = projector(psi_o_, outer_.len);

  // Generalized symmetric eigenproblem restricted to H: the source Gram is
  // made definite by a rank-one term along the removed direction, which the
  // projected numerator sends to zero.
  auto gen_norm = [](const Eigen::MatrixXd& T, const Eigen::MatrixXd& G_src,
                     const Eigen::MatrixXd& G_tgt, const Eigen::MatrixXd& P_src,
                     const Eigen::VectorXd& psi, const std::vector<double>& len) -> double {
    Eigen::MatrixXd TP = T * P_src;
    Eigen::MatrixXd A = TP.transpose() * G_tgt * TP;
    Eigen::MatrixXd B = P_src.transpose() * G_src * P_src;
    Eigen::VectorXd lpsi(psi.size());
    for (int i = 0; i < psi.size(); ++i) lpsi[i] = psi[i] * len[i];
    double mu = std::max(1.0, B.cwiseAbs().maxCoeff());
    B += mu * (lpsi * lpsi.transpose());
    A = 0.5 * (A + A.transpose());
    B = 0.5 * (B + B.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    if (es.info() != Eigen::Success)
      throw Error(ErrorCode::IllConditioned, "operator norm eigensolve failed");
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  };

  cached_norms_.K_D_to_Omega = gen_norm(T_do, Gd_, Go_, Pd, psi_d_, incl_.len);
  cached_norms_.K_Omega_to_D = gen_norm(T_od, Go_, Gd_, Po, psi_o_, outer_.len);
  cached_norms_.K = gen_norm(K, Gd_, Gd_, Pd, psi_d_, incl_.len);
  norms_ready_ = true;
  return cached_norms_;
}

ReflectedSolution ReflectedSolver::solve(const std::vector<double>& u0_at_incl) const {
  const std::size_t nd = incl_.size(), no = outer_.size();
  if (u0_at_incl.size() != nd)
    throw Error(ErrorCode::ValidationError, "u0 trace length mismatch");
  Eigen::VectorXd u0 = Eigen::Map<const Eigen::VectorXd>(u0_at_incl.data(), nd);

  ReflectedSolution sol;
  sol.solver = this;

  double normK = operator_norms().K;
  if (normK < 0.9) {
    // Neumann series on (I - K) p = -Pi_dD(u0), in trace coordinates.
    Eigen::MatrixXd T_do = S_od_ * Md_;
    Eigen::MatrixXd T_od = S_do_ * Mo_;
    Eigen::VectorXd rhs = -proj_d(u0);
    Eigen::VectorXd p = rhs, term = rhs;
    int it = 1;
    for (; it < 2000; ++it) {
      term = proj_d(T_od * proj_o(T_do * term));
      p += term;
      if (term.norm() <= 1e-14 * std::max(1.0, p.norm())) break;
      if (term.norm() > 1e6 * std::max(1.0, rhs.norm()))
        throw Error(ErrorCode::ContractionFailure,
                    "Neumann series diverged although |K| = " + std::to_string(normK));
    }
    sol.neumann_iterations = it;
    sol.p_hat = Md_ * p;
    // q_hat solves the outer trace equation w = 0 on dOmega exactly.
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_oo(S_oo_);
    sol.q_hat = lu_oo.solve(-(S_od_ * sol.p_hat));
    // c_f from the unprojected trace equation paired with psi_eq.
    Eigen::VectorXd wD = S_dd_ * sol.p_hat + S_do_ * sol.q_hat;
    double cf = 0.0;
    for (std::size_t i = 0; i < nd; ++i) cf += psi_d_[i] * (wD[i] + u0[i]) * incl_.len[i];
    sol.c_f = cf;
  }
  if (normK >= 0.9) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nd + no + 1);
    b.head(nd) = -u0;
    Eigen::VectorXd x = lu_direct_.solve(b);
    sol.p_hat = x.head(nd);
    sol.q_hat = x.segment(nd, no);
    sol.c_f = x[nd + no];
    sol.neumann_iterations = 0;
  }
  return sol;
}

double ReflectedSolution::eval_w(Vec2 x) const {
  const auto* s = solver;
  return single_layer_eval(s->incl_, p_hat, x, s->scale_) +
         single_layer_eval(s->outer_, q_hat, x, s->scale_);
}

Vec2 ReflectedSolution::eval_grad_w(Vec2 x) const {
  const auto* s = solver;
  return single_layer_grad(s->incl_, p_hat, x) + single_layer_grad(s->outer_, q_hat, x);
}

double ReflectedSolver::dn_gap(const ReflectedSolution& sol,
                               const std::vector<double>& f_at_outer) const {
  if (f_at_outer.size() != outer_.size())
    throw Error(ErrorCode::ValidationError, "outer trace length mismatch");
  // Interior Neumann trace of w on the outer boundary: the inclusion part is
  // smooth there; the own-density part jumps by (1/2 I + K*).
  Eigen::VectorXd dn = Kstar_oo_ * sol.q_hat + 0.5 * sol.q_hat;
  double gap = 0.0;
  for (std::size_t i = 0; i < outer_.size(); ++i) {
    double from_incl = single_layer_grad(incl_, sol.p_hat, outer_.mid[i]).dot(outer_.normal[i]);
    gap += (dn[i] + from_incl) * f_at_outer[i] * outer_.len[i];
  }
  return gap;
}

double ReflectedSolver::boundary_term(const ReflectedSolution& sol, const HarmonicField& u0) const {
  // int_dD (dw/dnu) u0 with nu into D equals int_dD (du0/dnu_D + p_hat) u0,
  // by the jump relation and grad(w + u0) = 0 inside D.
  double term = 0.0;
  for (std::size_t i = 0; i < incl_.size(); ++i) {
    double du0dn = u0.grad(incl_.mid[i]).dot(incl_.normal[i]);
    term += (du0dn + sol.p_hat[i]) * u0.value(incl_.mid[i]) * incl_.len[i];
  }
  return term;
}

double ReflectedSolver::boundary_term_ratio(const std::vector<HarmonicField>& family) const {
  // H1(D) quadrature needs the solid inclusion; supported for circles.
  geom::Circle disk;
  {
    // Reconstruct the circle from the panel geometry.
    Vec2 c{0, 0};
    for (Vec2 m : incl_.mid) c += m;
    c = c / static_cast<double>(incl_.size());
    double R = 0.0;
    for (Vec2 m : incl_.mid) R += dist(m, c);
    R /= static_cast<double>(incl_.size());
    for (Vec2 m : incl_.mid)
      if (std::abs(dist(m, c) - R) > 0.05 * R)
        throw Error(ErrorCode::ValidationError, "boundary_term_ratio supports circular inclusions");
    disk = {c, R};
  }
  // Tensor Gauss-Legendre in (radius^2, angle).
  static const double gx[8] = {0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                               0.40828267875217505, 0.5917173212478249,  0.7627662049581645,
                               0.8983332387068134,  0.9801449282487681};
  static const double gw[8] = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                               0.18134189168918097, 0.18134189168918097, 0.15685332293894363,
                               0.11119051722668724, 0.05061426814518813};
  double worst = 0.0;
  for (const auto& u0 : family) {
    std::vector<double> trace(incl_.size());
    for (std::size_t i = 0; i < incl_.size(); ++i) trace[i] = u0.value(incl_.mid[i]);
    auto sol = solve(trace);
    double num = std::abs(boundary_term(sol, u0));
    double h1 = 0.0;
    const int ntheta = 64;
    for (int a = 0; a < ntheta; ++a) {
      double th = 2.0 * M_PI * (a + 0.5) / ntheta;
      for (int k = 0; k < 8; ++k) {
        double rr = disk.radius * std::sqrt(gx[k]);
        Vec2 x{disk.center.x + rr * std::cos(th), disk.center.y + rr * std::sin(th)};
        double w = gw[k] * (M_PI * disk.radius * disk.radius / ntheta);
        double v = u0.value(x);
        h1 += w * (u0.grad(x).norm2() + v * v);
      }
    }
    if (h1 > 0) worst = std::max(worst, num / h1);
  }
  return worst;
}

}  // namespace pcond::bem
