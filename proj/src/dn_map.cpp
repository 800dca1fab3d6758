#include "pcond/dn_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <unordered_map>

namespace pcond::dn {

namespace {

/// Integrand weight (|g|^2 + eps^2)^{(p-2)/2} with the p=2 shortcut.
double flux_weight(double p, double q) { return p == 2.0 ? 1.0 : std::pow(q, 0.5 * p - 1.0); }

fem::DiscreteSolution forward(const geom::Scenario& sc, const mesh::Mesh& m,
                              const fem::BoundaryTrace& f, const fem::SolverOptions& opts,
                              bool free_variant) {
  if (sc.p == 2.0) return fem::solve_p2(sc, m, f, free_variant);
  auto sol = fem::solve_p(sc, m, f, opts, fem::NewtonInit::Harmonic, 0, free_variant);
  if (!sol.converged)
    throw Error(ErrorCode::NoConvergence, "forward solve did not reach the gradient tolerance");
  return sol;
}

}  // namespace

double pairing_against(const fem::DiscreteSolution& fbar, const std::vector<double>& gbar_nodal) {
  const auto& m = *fbar.mesh;
  const auto& sc = fbar.scenario;
  double e2 = fbar.epsilon * fbar.epsilon;
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (!(fbar.free_variant || m.region[t] == mesh::kBackground)) continue;
    Vec2 gf = fem::triangle_gradient(m, fbar.nodal_values, static_cast<int>(t));
    Vec2 gg = fem::triangle_gradient(m, gbar_nodal, static_cast<int>(t));
    double w = flux_weight(fbar.p, gf.norm2() + e2);
    s += sc.sigma_background * m.triangle_area(static_cast<int>(t)) * w * gf.dot(gg);
  }
  return s;
}

double pair(const geom::Scenario& sc, const mesh::Mesh& m, const fem::BoundaryTrace& f,
            const fem::BoundaryTrace& g, const fem::SolverOptions& opts) {
  auto fbar = forward(sc, m, f, opts, false);
  // Harmonic extension of g with the same tying (gradient vanishes on
  // superconductor components); values on insulators are immaterial.
  auto gbar = fem::solve_p2(sc, m, g, false);
  return pairing_against(fbar, gbar.nodal_values);
}

double free_pair(const mesh::Mesh& m, const fem::BoundaryTrace& f, const fem::BoundaryTrace& g,
                 double p, const fem::SolverOptions& opts) {
  geom::Scenario sc;
  sc.domain = geom::Circle{{0, 0}, 1.0};  // unused by the free variant
  sc.sigma_background = 1.0;
  sc.p = p;
  auto fbar = forward(sc, m, f, opts, true);
  auto gbar = fem::solve_p2(sc, m, g, true);
  return pairing_against(fbar, gbar.nodal_values);
}

double gap(const geom::Scenario& sc, const mesh::Mesh& m, const fem::BoundaryTrace& f,
           const fem::SolverOptions& opts) {
  return pair(sc, m, f, f, opts) - sc.sigma_background * free_pair(m, f, f, sc.p, opts);
}

namespace {

/// Taylor remainder of s -> (|g0 + s d|^2 + eps^2)^{p/2} on [0,1]:
/// R = phi(1) - phi(0) - phi'(0), evaluated without cancellation.
double energy_remainder(double p, double e2, Vec2 g0, Vec2 d) {
  double d2 = d.norm2();
  if (d2 == 0.0) return 0.0;
  if (p == 2.0) return d2;
  double g02 = g0.norm2();
  if (d2 > 0.0625 * (g02 + e2)) {
    // Increment comparable to the base gradient: direct evaluation is stable.
    double q0 = g02 + e2;
    double q1 = (g0 + d).norm2() + e2;
    return std::pow(q1, 0.5 * p) - std::pow(q0, 0.5 * p) -
           p * std::pow(q0, 0.5 * p - 1.0) * g0.dot(d);
  }
  // Small increment: integral remainder int_0^1 (1-s) phi''(s) ds by Gauss
  // quadrature; quadratic in d, so no cancellation against the base terms.
  static const double xs[8] = {0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                               0.40828267875217505, 0.5917173212478249,  0.7627662049581645,
                               0.8983332387068134,  0.9801449282487681};
  static const double wsq[8] = {0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                0.18134189168918097, 0.18134189168918097, 0.15685332293894363,
                                0.11119051722668724, 0.05061426814518813};
  double r = 0.0;
  for (int i = 0; i < 8; ++i) {
    Vec2 g = g0 + xs[i] * d;
    double q = g.norm2() + e2;
    double gd = g.dot(d);
    double phi2 = p * std::pow(q, 0.5 * p - 2.0) * (q * d2 + (p - 2.0) * gd * gd);
    r += wsq[i] * (1.0 - xs[i]) * phi2;
  }
  return r;
}

}  // namespace

namespace {

/// p=2 gap with every term assembled at the scale of the reflected field.
/// The reflected field w solves the tied system against a right-hand side
/// supported near the inclusions, so no difference of exponentially large
/// pairings is ever formed: the result stays accurate relative to its own
/// size even when the pairings dwarf it (large-tau CGO data).
GapResult gap_p2_local(const geom::Scenario& sc, const mesh::Mesh& m, const fem::BoundaryTrace& f,
                       const P2Workspace& ws) {
  const double sigma = sc.sigma_background;
  auto u0 = ws.free.solve_nodal(f);
  const auto& dofs = ws.incl.dofs();

  // Tied lift: u0 with each superconductor component replaced by the mean of
  // u0 over its interface ring; chi is the correction.
  std::vector<double> chi(m.node_count(), 0.0);
  std::vector<char> super_node(m.node_count(), 0);
  for (std::size_t i = 0; i < sc.inclusions.size(); ++i) {
    if (sc.inclusions[i].kind != geom::InclusionKind::Superconducting) continue;
    double mean = 0.0;
    int cnt = 0;
    for (const auto& be : m.boundary_edges)
      if (be.curve == static_cast<int>(i)) {
        mean += u0[be.a] + u0[be.b];
        cnt += 2;
      }
    mean = cnt > 0 ? mean / cnt : 0.0;
    for (int v : m.inclusion_nodes[i]) {
      chi[v] = mean - u0[v];
      super_node[v] = 1;
    }
  }

  // b_i = a_incl(u0, phi_i) - a_Bg(chi, phi_i): both sums are local.
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dofs.n_dofs);
  double incl_energy = 0.0;   // a_incl(u0, u0)
  double chi_term = 0.0;      // a_Bg(chi, 2 u0 + chi)
  double free_pairing = 0.0;  // a_all(u0, u0)
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    double A = m.triangle_area(static_cast<int>(t));
    Vec2 g0 = fem::triangle_gradient(m, u0, static_cast<int>(t));
    free_pairing += sigma * A * g0.norm2();
    const auto& tri = m.triangles[t];
    auto grads = m.p1_gradients(static_cast<int>(t));
    if (m.region[t] != mesh::kBackground) {
      incl_energy += sigma * A * g0.norm2();
      for (int k = 0; k < 3; ++k) {
        int dof = dofs.node_dof[tri[k]];
        if (dof >= 0) b[dof] += sigma * A * g0.dot(grads[k]);
      }
    } else if (super_node[tri[0]] || super_node[tri[1]] || super_node[tri[2]]) {
      Vec2 gchi = grads[0] * chi[tri[0]] + grads[1] * chi[tri[1]] + grads[2] * chi[tri[2]];
      chi_term += sigma * A * gchi.dot(2.0 * g0 + gchi);
      for (int k = 0; k < 3; ++k) {
        int dof = dofs.node_dof[tri[k]];
        if (dof >= 0) b[dof] -= sigma * A * gchi.dot(grads[k]);
      }
    }
  }
  Eigen::VectorXd w = ws.incl.solve_rhs_dofs(b);

  GapResult out;
  out.free_pairing = free_pairing;
  out.value = chi_term - incl_energy - b.dot(w);
  out.sign = out.value > 0 ? 1 : (out.value < 0 ? -1 : 0);
  out.log_abs = out.value == 0.0 ? -std::numeric_limits<double>::infinity()
                                 : std::log(std::abs(out.value));
  return out;
}

}  // namespace

GapResult gap_difference_form(const geom::Scenario& sc, const mesh::Mesh& m,
                              const fem::BoundaryTrace& f, const fem::SolverOptions& opts,
                              const P2Workspace* ws) {
  if (sc.p == 2.0) {
    if (ws != nullptr) return gap_p2_local(sc, m, f, *ws);
    P2Workspace local(sc, m);
    return gap_p2_local(sc, m, f, local);
  }
  fem::DiscreteSolution uD, u0;
  {
    uD = forward(sc, m, f, opts, false);
    u0 = forward(sc, m, f, opts, true);
  }
  fem::fill_insulator_interior(uD);
  const double p = sc.p;
  const double eps = uD.epsilon;  // both solves share the data, hence the eps
  const double e2 = eps * eps;

  std::vector<double> w(m.node_count());
  for (std::size_t v = 0; v < m.node_count(); ++v) w[v] = uD.nodal_values[v] - u0.nodal_values[v];

  // <E0'(u0), w>: exactly the free solver's residual paired with w. Kept in
  // the identity so solver tolerance enters linearly, not as a bias.
  auto r0 = fem::free_energy_gradient(sc, m, u0.nodal_values, p, eps);
  double lin = 0.0;
  for (std::size_t v = 0; v < m.node_count(); ++v) lin += r0[v] * w[v];

  double rem = 0.0, corr = 0.0, free_pairing = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    double A = m.triangle_area(static_cast<int>(t));
    Vec2 g0 = fem::triangle_gradient(m, u0.nodal_values, static_cast<int>(t));
    Vec2 d = fem::triangle_gradient(m, w, static_cast<int>(t));
    rem += sc.sigma_background * A * energy_remainder(p, e2, g0, d);
    free_pairing += sc.sigma_background * A * std::pow(g0.norm2(), 0.5 * p);
    if (m.region[t] != mesh::kBackground) {
      Vec2 gD = fem::triangle_gradient(m, uD.nodal_values, static_cast<int>(t));
      double q = gD.norm2() + e2;
      corr -= sc.sigma_background * A * (p == 2.0 ? q : std::pow(q, 0.5 * p));
    }
  }
  GapResult out;
  out.free_pairing = free_pairing;
  out.value = lin + rem + corr;
  out.sign = out.value > 0 ? 1 : (out.value < 0 ? -1 : 0);
  out.log_abs = out.value == 0.0 ? -std::numeric_limits<double>::infinity()
                                 : std::log(std::abs(out.value));
  return out;
}

EstimateReport check_estimates_p2(const geom::Scenario& sc, const mesh::Mesh& m,
                                  const fem::BoundaryTrace& f, double slack) {
  if (sc.p != 2.0)
    throw Error(ErrorCode::ValidationError, "check_estimates_p2 requires p = 2");
  for (const auto& inc : sc.inclusions)
    if (inc.kind != geom::InclusionKind::Superconducting)
      throw Error(ErrorCode::ValidationError, "check_estimates_p2 requires superconducting-only scenarios");

  P2Workspace ws(sc, m);
  auto uD = ws.incl.solve(f);
  auto u0 = ws.free.solve(f);
  auto g = gap_difference_form(sc, m, f, {}, &ws);

  EstimateReport rep;
  rep.gap = g.value;
  const double sig = sc.sigma_background;
  double h1_D = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (m.region[t] == mesh::kBackground) continue;
    double A = m.triangle_area(static_cast<int>(t));
    Vec2 g0 = fem::triangle_gradient(m, u0.nodal_values, static_cast<int>(t));
    rep.grad_u0_sq_D += sig * A * g0.norm2();
    const auto& tri = m.triangles[t];
    double umean =
        (u0.nodal_values[tri[0]] + u0.nodal_values[tri[1]] + u0.nodal_values[tri[2]]) / 3.0;
    h1_D += A * (g0.norm2() + umean * umean);
  }

  // Boundary term on each superconductor interface; nu points out of the
  // annulus, i.e. into D. The adjacent background triangle carries grad w.
  std::vector<double> w(m.node_count());
  for (std::size_t v = 0; v < m.node_count(); ++v) w[v] = uD.nodal_values[v] - u0.nodal_values[v];
  // Locate the background triangle of every interface edge.
  std::unordered_map<std::uint64_t, int> bg_tri;
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (m.region[t] != mesh::kBackground) continue;
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) bg_tri[key(tri[k], tri[(k + 1) % 3])] = static_cast<int>(t);
  }
  for (const auto& be : m.boundary_edges) {
    if (be.curve == mesh::kOuterCurve) continue;
    auto it = bg_tri.find(key(be.a, be.b));
    if (it == bg_tri.end()) throw Error(ErrorCode::MeshFailure, "interface edge without background triangle");
    int t = it->second;
    Vec2 a = m.nodes[be.a], b = m.nodes[be.b];
    Vec2 edge = b - a;
    double len = edge.norm();
    Vec2 nu = edge.perp() / len;
    // Orient nu away from the background triangle centroid (into D).
    Vec2 mid = (a + b) * 0.5;
    if (nu.dot(m.centroid(t) - mid) > 0) nu = -nu;
    Vec2 gw = fem::triangle_gradient(m, w, t);
    double u0_mid = 0.5 * (u0.nodal_values[be.a] + u0.nodal_values[be.b]);
    rep.boundary_term += sig * gw.dot(nu) * u0_mid * len;
  }
  rep.ratio = h1_D > 0 ? std::abs(rep.boundary_term) / h1_D : 0.0;

  double upper = rep.grad_u0_sq_D - 2.0 * rep.boundary_term;
  double scale = std::max({std::abs(rep.gap), std::abs(rep.grad_u0_sq_D), std::abs(upper)});
  rep.estimate_ii_ok = rep.grad_u0_sq_D <= rep.gap + slack * scale;
  rep.estimate_i_ok = rep.gap <= upper + slack * scale;
  if (!rep.estimate_i_ok || !rep.estimate_ii_ok)
    throw Error(ErrorCode::AssertionFailure,
                "integral estimate violated: grad_sq_D=" + std::to_string(rep.grad_u0_sq_D) +
                    " gap=" + std::to_string(rep.gap) + " upper=" + std::to_string(upper));
  return rep;
}

double h_half_seminorm_sq(const mesh::Mesh& m, const fem::BoundaryTrace& f) {
  geom::Scenario sc;
  sc.domain = geom::Circle{{0, 0}, 1.0};
  sc.sigma_background = 1.0;
  sc.p = 2.0;
  auto u = fem::solve_p2(sc, m, f, true);
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    Vec2 g = fem::triangle_gradient(m, u.nodal_values, static_cast<int>(t));
    s += m.triangle_area(static_cast<int>(t)) * g.norm2();
  }
  return s;
}

EllipticityReport ellipticity_report(const geom::Scenario& sc, const mesh::Mesh& m,
                                     const std::vector<fem::BoundaryTrace>& family) {
  if (sc.p != 2.0) throw Error(ErrorCode::ValidationError, "ellipticity_report requires p = 2");
  EllipticityReport rep;
  rep.lambda_low = std::numeric_limits<double>::infinity();
  P2Workspace ws(sc, m);
  for (const auto& f : family) {
    double semi = h_half_seminorm_sq(m, f);
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    if (semi <= 1e-24 * (1.0 + fmax * fmax)) {
      ++rep.excluded;  // constant trace: gauge direction
      continue;
    }
    auto fbar = ws.incl.solve(f);
    double lam = pairing_against(fbar, fbar.nodal_values) / semi;
    rep.ratios.push_back(lam);
    rep.lambda_low = std::min(rep.lambda_low, lam);
    rep.lambda_high = std::max(rep.lambda_high, lam);
  }
  return rep;
}

std::string pairing_matrix_csv(const geom::Scenario& sc, const mesh::Mesh& m,
                               const std::vector<BoundaryData>& family) {
  if (sc.p != 2.0)
    throw Error(ErrorCode::ValidationError, "pairing matrices are exported for p = 2 families");
  P2Workspace ws(sc, m);
  std::vector<fem::DiscreteSolution> bars;
  bars.reserve(family.size());
  for (const auto& f : family) bars.push_back(ws.incl.solve(f.values));
  std::string out = "f_id,g_id,value\n";
  char buf[64];
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = 0; j < family.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", pairing_against(bars[i], bars[j].nodal_values));
      out += family[i].label + "," + family[j].label + "," + buf;
    }
  return out;
}

}  // namespace pcond::dn
