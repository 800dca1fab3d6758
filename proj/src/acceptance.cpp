#include "pcond/acceptance.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "pcond/dn_map.hpp"
#include "pcond/enclosure.hpp"
#include "pcond/layer_potential.hpp"
#include "pcond/probe.hpp"
#include "pcond/wolff.hpp"

namespace pcond::acceptance {

namespace {

using geom::Circle;
using geom::InclusionComponent;
using geom::InclusionKind;
using geom::Polygon;
using geom::Scenario;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Scenario disk_scenario(std::vector<InclusionComponent> incs, double p = 2.0, double sigma = 1.0) {
  return geom::build_scenario(Circle{{0, 0}, 1.0}, std::move(incs), sigma, p);
}

fem::BoundaryTrace coord_trace(const mesh::Mesh& m, Vec2 dir) {
  fem::BoundaryTrace f(m.outer_nodes.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = m.nodes[m.outer_nodes[k]].dot(dir);
  return f;
}

struct Line {
  double slope = 0.0;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= x.size();
  ym /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  return {sxy / sxx};
}

// --- criterion implementations ---------------------------------------------

CriterionResult annulus_oracle(bool superconducting) {
  CriterionResult r;
  r.id = superconducting ? 1 : 2;
  r.name = superconducting ? "annulus-oracle-superconducting" : "annulus-oracle-insulating";
  for (double rho0 : {0.3, 0.5}) {
    auto kind = superconducting ? InclusionKind::Superconducting : InclusionKind::Insulating;
    auto sc = disk_scenario({{Circle{{0, 0}, rho0}, kind}});
    auto m = mesh::triangulate(sc, 0.02);
    auto f = coord_trace(m, {1, 0});
    double pairing = dn::pair(sc, m, f, f);
    double expect = superconducting ? M_PI * (1 + rho0 * rho0) / (1 - rho0 * rho0)
                                    : M_PI * (1 - rho0 * rho0) / (1 + rho0 * rho0);
    double rel = std::abs(pairing - expect) / expect;
    SubCheck c;
    c.name = "rho0=" + fmt(rho0);
    c.pass = rel <= 0.02;
    c.detail = "pairing=" + fmt(pairing) + " expected=" + fmt(expect) + " rel=" + fmt(rel);
    r.checks.push_back(c);
  }
  return r;
}

CriterionResult monotonicity_suite() {
  CriterionResult r;
  r.id = 3;
  r.name = "energy-monotonicity";
  std::vector<std::vector<InclusionComponent>> regions = {
      {{Circle{{0.2, 0}, 0.3}, InclusionKind::Insulating}},
      {{Circle{{-0.3, -0.2}, 0.25}, InclusionKind::Insulating}},
      {{Polygon{{{-0.1, -0.45}, {0.35, -0.4}, {0.3, -0.05}, {-0.05, -0.1}}},
        InclusionKind::Insulating}},
      {{Polygon{{{-0.55, 0.1}, {-0.15, 0.15}, {-0.2, 0.5}, {-0.5, 0.45}}},
        InclusionKind::Insulating}},
      {{Circle{{0.35, 0.3}, 0.2}, InclusionKind::Insulating},
       {Circle{{-0.35, 0.25}, 0.18}, InclusionKind::Insulating}},
  };
  for (double p : {1.5, 2.0, 3.0}) {
    for (std::size_t s = 0; s < regions.size(); ++s) {
      auto incs_i = regions[s];
      auto incs_s = regions[s];
      for (auto& inc : incs_s) inc.kind = InclusionKind::Superconducting;
      auto sc_i = disk_scenario(incs_i, p);
      auto sc_s = disk_scenario(incs_s, p);
      auto m = mesh::triangulate(sc_s, 0.1);
      auto f = coord_trace(m, {0.8, 0.6});
      double Ei = fem::energy(fem::solve_p(sc_i, m, f));
      double Ee = fem::energy(fem::solve_p(sc_s, m, f, {}, fem::NewtonInit::Harmonic, 0, true));
      double Es = fem::energy(fem::solve_p(sc_s, m, f));
      SubCheck c;
      c.name = "scenario " + std::to_string(s) + " p=" + fmt(p);
      c.pass = (Ei < Ee - 1e-6) && (Ee < Es - 1e-6);
      c.detail = "E_ins=" + fmt(Ei) + " E_empty=" + fmt(Ee) + " E_super=" + fmt(Es);
      r.checks.push_back(c);
    }
  }
  return r;
}

CriterionResult flux_uniqueness() {
  CriterionResult r;
  r.id = 4;
  r.name = "flux-uniqueness";
  for (double p : {1.5, 3.0}) {
    auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Insulating}}, p);
    auto m = mesh::triangulate(sc, 0.1);
    auto f = coord_trace(m, {1, 0.4});
    fem::SolverOptions opts;
    opts.newton_tol = 1e-12;
    auto ua = fem::solve_p(sc, m, f, opts, fem::NewtonInit::Harmonic);
    auto ub = fem::solve_p(sc, m, f, opts, fem::NewtonInit::Random, 1234);
    auto Fa = fem::flux_field(ua);
    auto Fb = fem::flux_field(ub);
    double err = 0.0;
    for (std::size_t t = 0; t < m.triangle_count(); ++t)
      err = std::max(err, (Fa.flux[t] - Fb.flux[t]).norm());
    SubCheck c;
    c.name = "p=" + fmt(p);
    c.pass = ua.converged && ub.converged && err <= 1e-6;
    c.detail = "max flux difference " + fmt(err);
    r.checks.push_back(c);
  }
  return r;
}

CriterionResult wolff_suite() {
  CriterionResult r;
  r.id = 5;
  r.name = "wolff-ode";
  {
    auto prof = wolff::integrate_wolff(2.0, 1.0, 0.0);
    double err = std::abs(prof.lambda - 2 * M_PI);
    for (double s : {0.0, 0.7, 2.1, 4.4, 6.0})
      err = std::max(err, std::abs(prof.eval(s) - std::cos(s)));
    SubCheck c;
    c.name = "p=2 profile is cos";
    c.pass = err <= 1e-8;
    c.detail = "max deviation " + fmt(err);
    r.checks.push_back(c);
    SubCheck cm;
    cm.name = "p=2 zero mean";
    double mean = wolff::mean_over_period(prof);
    cm.pass = std::abs(mean) <= 1e-10;
    cm.detail = "integral " + fmt(mean);
    r.checks.push_back(cm);
  }
  for (double p : {1.5, 3.0, 4.0}) {
    auto a = wolff::integrate_wolff(p, 1.0, 0.0);
    auto b = wolff::integrate_wolff(p, 1.0, 0.0, a.step / 2);
    SubCheck c;
    c.name = "p=" + fmt(p) + " period self-convergence";
    c.pass = std::abs(a.lambda - b.lambda) <= 1e-6 && a.bound_low > 0 &&
             a.bound_high < std::numeric_limits<double>::infinity();
    c.detail = "lambda=" + fmt(a.lambda) + " delta=" + fmt(std::abs(a.lambda - b.lambda)) +
               " bounds=[" + fmt(a.bound_low) + "," + fmt(a.bound_high) + "]";
    r.checks.push_back(c);
    SubCheck cm;
    cm.name = "p=" + fmt(p) + " mean over period";
    double mean = wolff::mean_over_period(a);
    cm.pass = std::abs(mean) <= 1e-6 * a.amplitude;
    cm.detail = "integral " + fmt(mean) + " amplitude " + fmt(a.amplitude);
    r.checks.push_back(cm);
  }
  return r;
}

/// Slope of log|I| vs tau over the floor-valid samples.
struct SweepFit {
  double slope_tau = 0.0;
  int n_valid = 0;
  std::vector<double> taus, logs;
};

SweepFit fit_sweep(const std::vector<enclosure::IndicatorSample>& sweep) {
  SweepFit f;
  for (const auto& s : sweep) {
    if (!s.valid || !std::isfinite(s.log_abs)) continue;
    f.taus.push_back(s.tau);
    f.logs.push_back(s.log_abs);
  }
  f.n_valid = static_cast<int>(f.taus.size());
  if (f.n_valid >= 2) f.slope_tau = fit_line(f.taus, f.logs).slope;
  return f;
}

/// log|I| = S tau + a log(tau) + c: separates the exponential rate from the
/// algebraic prefactor of the boundary-touching regime.
struct PowerFit {
  double S = 0.0, a = 0.0;
};

PowerFit fit_with_power(const std::vector<double>& taus, const std::vector<double>& logs) {
  Eigen::MatrixXd A(taus.size(), 3);
  Eigen::VectorXd b(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    A(i, 0) = taus[i];
    A(i, 1) = std::log(taus[i]);
    A(i, 2) = 1.0;
    b[i] = logs[i];
  }
  Eigen::Vector3d x = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  return {x[0], x[1]};
}

CriterionResult indicator_regimes() {
  CriterionResult r;
  r.id = 6;
  r.name = "indicator-regimes";
  const double h_support = 0.5;
  {
    auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting}});
    enclosure::MeshFamily fam(sc);
    std::vector<double> grid = enclosure::default_tau_grid();  // {8..40}
    // This direction has h_Omega - h_D = 0.5; contamination of the pairing
    // difference sets in around rel 1e-12, so a criterion-local floor keeps
    // tau = 24 in the fit with a safe margin.
    enclosure::IndicatorOptions iopts;
    iopts.snr_floor = 2e-11;
    for (double t : {0.3, 0.8}) {
      auto sweep = enclosure::tau_sweep(fam, {1, 0}, t, grid, iopts);
      auto f = fit_sweep(sweep);
      double target = 2 * (h_support - t);
      SubCheck c;
      c.name = "p=2 slope at t=" + fmt(t);
      c.pass = f.n_valid >= 3 && std::abs(f.slope_tau - target) <= 0.05 &&
               ((f.slope_tau > 0) == (h_support - t > 0));
      c.detail = "slope=" + fmt(f.slope_tau) + " target=" + fmt(target) +
                 " valid=" + std::to_string(f.n_valid);
      r.checks.push_back(c);
    }
    {
      auto sweep = enclosure::tau_sweep(fam, {1, 0}, h_support, grid, iopts);
      auto f = fit_sweep(sweep);
      SubCheck c;
      c.name = "p=2 window at t=h";
      bool ok = f.n_valid >= 3 && std::abs(f.slope_tau) <= 0.05;
      std::string env = "rate=" + fmt(f.slope_tau);
      for (int i = 1; i < f.n_valid; ++i) {
        double dlog = f.logs[i] - f.logs[0];
        bool in_window = dlog >= -1.0 && dlog <= 2.0 * std::log(f.taus[i] / f.taus[0]) + 1.0;
        ok = ok && in_window;
      }
      c.pass = ok;
      c.detail = env + " valid=" + std::to_string(f.n_valid) +
                 " (floor-gated tail: the pairing difference at tau>24 carries no information"
                 " at double precision for this geometry)";
      r.checks.push_back(c);
    }
  }
  {
    auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting}}, 3.0);
    enclosure::MeshFamily fam(sc);
    enclosure::IndicatorOptions opts;
    opts.solver.newton_tol = 1e-12;
    opts.snr_floor = 1e-9;
    std::vector<double> grid = {5, 7, 9, 11, 13};
    for (double t : {0.3, 0.8}) {
      auto sweep = enclosure::tau_sweep(fam, {1, 0}, t, grid, opts);
      auto f = fit_sweep(sweep);
      double target = 3.0 * (h_support - t);  // degree-p homogeneity of the pairing
      auto pf = fit_with_power(f.taus, f.logs);
      SubCheck c;
      c.name = "p=3 slope at t=" + fmt(t);
      c.pass = f.n_valid >= 4 && ((pf.S > 0) == (h_support - t > 0)) &&
               std::abs(pf.S - target) <= 0.05;
      c.detail = "slope=" + fmt(pf.S) + " (plain fit " + fmt(f.slope_tau) + ", power " +
                 fmt(pf.a) + ") target=" + fmt(target) + " valid=" + std::to_string(f.n_valid);
      r.checks.push_back(c);
    }
  }
  return r;
}

CriterionResult hull_recovery() {
  CriterionResult r;
  r.id = 7;
  r.name = "hull-recovery";
  Circle truth{{0.2, 0}, 0.3};
  {
    auto sc = disk_scenario({{truth, InclusionKind::Superconducting}});
    enclosure::MeshFamily fam(sc);
    auto hull = enclosure::reconstruct_hull(fam, 32, enclosure::hull_tau_grid(2.0));
    double haus = geom::hausdorff_to_shape(hull.polygon, truth);
    SubCheck c;
    c.name = "p=2 containment + Hausdorff";
    c.pass = geom::polygon_contains_shape(hull.polygon, truth, 1e-6) && haus <= 0.08;
    c.detail = "hausdorff=" + fmt(haus) + " dropped=" + std::to_string(hull.dropped);
    r.checks.push_back(c);
  }
  {
    auto sc = disk_scenario({{truth, InclusionKind::Superconducting}}, 3.0);
    enclosure::MeshFamily fam(sc);
    auto hull = enclosure::reconstruct_hull(fam, 32, enclosure::hull_tau_grid(3.0));
    SubCheck c;
    c.name = "p=3 containment";
    c.pass = geom::polygon_contains_shape(hull.polygon, truth, 1e-6);
    c.detail = "hausdorff=" + fmt(geom::hausdorff_to_shape(hull.polygon, truth)) +
               " dropped=" + std::to_string(hull.dropped);
    r.checks.push_back(c);
  }
  return r;
}

CriterionResult sign_classification() {
  CriterionResult r;
  r.id = 8;
  r.name = "sign-classification";
  struct Case {
    std::vector<InclusionComponent> incs;
    double p;
    enclosure::Verdict expect;
    std::string name;
  };
  Polygon square{{{-0.05, -0.35}, {0.35, -0.35}, {0.35, 0.05}, {-0.05, 0.05}}};
  Polygon penta{{{-0.45, -0.1}, {-0.2, -0.25}, {-0.05, 0.0}, {-0.15, 0.25}, {-0.42, 0.2}}};
  std::vector<Case> cases = {
      {{{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting}}, 2.0,
       enclosure::Verdict::Superconducting, "super disk p=2"},
      {{{square, InclusionKind::Superconducting}}, 1.5, enclosure::Verdict::Superconducting,
       "super square p=1.5"},
      {{{penta, InclusionKind::Superconducting}}, 3.0, enclosure::Verdict::Superconducting,
       "super pentagon p=3"},
      {{{Circle{{-0.25, 0.15}, 0.28}, InclusionKind::Insulating}}, 3.0,
       enclosure::Verdict::Insulating, "insulating disk p=3"},
      {{{square, InclusionKind::Insulating}}, 2.0, enclosure::Verdict::Insulating,
       "insulating square p=2"},
      {{{penta, InclusionKind::Insulating}}, 1.5, enclosure::Verdict::Insulating,
       "insulating pentagon p=1.5"},
      {{}, 2.0, enclosure::Verdict::Empty, "empty p=2"},
  };
  for (const auto& cse : cases) {
    auto sc = disk_scenario(cse.incs, cse.p);
    enclosure::MeshFamily fam(sc);
    auto verdict = enclosure::classify_scenario(fam, 4, {-0.6, 0.0}, {6, 9, 12});
    SubCheck c;
    c.name = cse.name;
    c.pass = verdict.verdict == cse.expect;
    c.detail = verdict.notes;
    r.checks.push_back(c);
  }
  return r;
}

CriterionResult shift_identity() {
  CriterionResult r;
  r.id = 9;
  r.name = "shift-identity";
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> Ut(-0.4, 0.4), Utau(2.0, 6.0);
  for (double p : {1.5, 2.0, 3.0}) {
    auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting}}, p);
    enclosure::MeshFamily fam(sc, 0.06);
    enclosure::IndicatorOptions opts;
    opts.solver.newton_tol = 1e-13;
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      double tau = Utau(rng), t1 = Ut(rng), t2 = Ut(rng);
      const auto& m = fam.mesh_for(tau);
      auto* ws = fam.workspace_for(tau);
      auto s1 = enclosure::indicator(sc, m, {1, 0}, t1, tau, opts, ws);
      auto s2 = enclosure::indicator(sc, m, {1, 0}, t2, tau, opts, ws);
      double expected = p * tau * (t2 - t1);
      worst = std::max(worst, std::abs((s1.log_abs - s2.log_abs) - expected));
    }
    SubCheck c;
    c.name = "p=" + fmt(p);
    c.pass = worst <= 1e-9;
    c.detail = "worst |log-ratio error| = " + fmt(worst);
    r.checks.push_back(c);
  }
  return r;
}

CriterionResult bem_crosscheck() {
  CriterionResult r;
  r.id = 10;
  r.name = "bem-crosscheck";
  bem::LogScale scale{8.0};
  {
    double R = 0.7;
    auto c = bem::PanelCurve::from_shape(Circle{{0, 0}, R}, 128);
    auto eq = bem::equilibrium_density(c, scale);
    double expect = 1.0 / (2 * M_PI * R);
    double dev = 0.0;
    for (int i = 0; i < 128; ++i)
      dev = std::max(dev, std::abs(eq.density[i] - expect) / expect);
    SubCheck s1;
    s1.name = "circle equilibrium density uniform";
    s1.pass = dev <= 0.01;
    s1.detail = "max relative deviation " + fmt(dev);
    r.checks.push_back(s1);
    SubCheck s2;
    s2.name = "S psi_eq log value";
    double sexp = std::log(scale.r / R) / (2 * M_PI);
    s2.pass = std::abs(eq.s_value - sexp) <= 0.01 * sexp;
    s2.detail = "s=" + fmt(eq.s_value) + " expected=" + fmt(sexp);
    r.checks.push_back(s2);
  }
  {
    auto outer = bem::PanelCurve::from_shape(Circle{{0, 0}, 1.0}, 192);
    bool all = true;
    std::string det;
    for (double Rin : {0.2, 0.5, 0.8}) {
      bem::ReflectedSolver solver(outer, bem::PanelCurve::from_shape(Circle{{0, 0}, Rin}, 128),
                                  scale);
      auto n = solver.operator_norms();
      all = all && n.K < 1.0 && n.K_D_to_Omega < 1.0 && n.K_Omega_to_D < 1.0;
      det += "R=" + fmt(Rin) + ":|K|=" + fmt(n.K) + " ";
    }
    SubCheck s;
    s.name = "contraction norms < 1 on 3 geometries";
    s.pass = all;
    s.detail = det;
    r.checks.push_back(s);
  }
  {
    auto outer = bem::PanelCurve::from_shape(Circle{{0, 0}, 1.0}, 256);
    auto incl = bem::PanelCurve::from_shape(Circle{{0.2, 0}, 0.3}, 128);
    bem::ReflectedSolver solver(outer, incl, scale);
    std::vector<double> u0(incl.size()), f(outer.size());
    for (std::size_t i = 0; i < incl.size(); ++i) u0[i] = incl.mid[i].x;
    for (std::size_t i = 0; i < outer.size(); ++i) f[i] = outer.mid[i].x;
    double gap_bem = solver.dn_gap(solver.solve(u0), f);
    auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting}});
    auto m = mesh::triangulate(sc, 0.03);
    double gap_fem = dn::gap_difference_form(sc, m, coord_trace(m, {1, 0})).value;
    SubCheck s;
    s.name = "FEM vs BEM gap";
    double rel = std::abs(gap_bem - gap_fem) / std::abs(gap_fem);
    s.pass = rel <= 0.02;
    s.detail = "bem=" + fmt(gap_bem) + " fem=" + fmt(gap_fem) + " rel=" + fmt(rel);
    r.checks.push_back(s);

    std::vector<bem::HarmonicField> low = {
        {[](Vec2 x) { return x.x; }, [](Vec2) { return Vec2{1, 0}; }},
        {[](Vec2 x) { return x.y; }, [](Vec2) { return Vec2{0, 1}; }},
        {[](Vec2 x) { return x.x * x.x - x.y * x.y; },
         [](Vec2 x) { return Vec2{2 * x.x, -2 * x.y}; }},
        {[](Vec2 x) { return x.x * x.y; }, [](Vec2 x) { return Vec2{x.y, x.x}; }},
    };
    std::vector<bem::HarmonicField> cgo;
    for (double tau : {2.0, 4.0, 8.0})
      cgo.push_back(
          {[tau](Vec2 x) { return std::exp(tau * (x.x - 0.6)) * std::cos(tau * x.y); },
           [tau](Vec2 x) {
             double e = std::exp(tau * (x.x - 0.6));
             return Vec2{tau * e * std::cos(tau * x.y), -tau * e * std::sin(tau * x.y)};
           }});
    double low_ratio = solver.boundary_term_ratio(low);
    double cgo_ratio = solver.boundary_term_ratio(cgo);
    SubCheck s2;
    s2.name = "boundary-term ratio bounded over the CGO family";
    s2.pass = cgo_ratio <= 10.0 * low_ratio && cgo_ratio > 0;
    s2.detail = "low-order=" + fmt(low_ratio) + " cgo=" + fmt(cgo_ratio);
    r.checks.push_back(s2);
  }
  return r;
}

CriterionResult probe_fan(int threads) {
  CriterionResult r;
  r.id = 11;
  r.name = "probe-fan";
  Circle truth{{0.2, 0}, 0.3};
  auto sc = disk_scenario({{truth, InclusionKind::Superconducting}});
  auto m = mesh::triangulate(sc, 0.03);

  std::vector<probe::Needle> fan;
  const int K = 64;
  for (int k = 0; k < K; ++k) fan.push_back(probe::Needle::chord(sc.domain, 2 * M_PI * k / K));
  std::vector<double> grid;
  const int NT = 200;
  for (int i = 1; i <= NT; ++i) grid.push_back(static_cast<double>(i) / (NT + 1));

  probe::HitOptions opts;  // stock detector: far-field median x 50
  auto cloud = probe::reconstruct_boundary(sc, m, fan, grid, 3, opts, threads);

  int close_points = 0;
  for (const auto& bp : cloud)
    if (bp.hit && std::abs(dist(bp.point, truth.center) - truth.radius) <= 0.05) ++close_points;
  SubCheck s1;
  s1.name = "fan recovers >= 30 boundary points within 0.05";
  s1.pass = close_points >= 30;
  s1.detail = std::to_string(close_points) +
              "/64 (deep hits are not localizable at this discretization; see README"
              " 'Known limitations')";
  r.checks.push_back(s1);

  // The 10 needles with the shallowest geometric first hits.
  auto t_geo = [&](double th) {
    double ca = std::cos(th);
    double u = 0.2 * ca + std::sqrt(0.04 * ca * ca + 0.05);
    return (1.0 - u) / 2.0;
  };
  std::vector<int> order(K);
  for (int k = 0; k < K; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return t_geo(2 * M_PI * a / K) < t_geo(2 * M_PI * b / K);
  });
  int within = 0;
  for (int q = 0; q < 10; ++q) {
    int k = order[q];
    if (cloud[k].hit && std::abs(cloud[k].t_hat - t_geo(2 * M_PI * k / K)) <= 0.05) ++within;
  }
  SubCheck s2;
  s2.name = "t_hat within 0.05 on the 10 shallowest needles";
  s2.pass = within == 10;
  s2.detail = std::to_string(within) + "/10";
  r.checks.push_back(s2);

  {
    auto sc0 = disk_scenario({});
    auto m0 = mesh::triangulate(sc0, 0.05);
    std::vector<probe::Needle> fan0;
    for (int k = 0; k < 8; ++k) fan0.push_back(probe::Needle::chord(sc0.domain, 2 * M_PI * k / 8));
    std::vector<double> grid0;
    for (int i = 1; i <= 40; ++i) grid0.push_back(i / 41.0);
    auto cloud0 = probe::reconstruct_boundary(sc0, m0, fan0, grid0, 3, opts, threads);
    bool none = true;
    for (const auto& bp : cloud0) none = none && !bp.hit;
    SubCheck s3;
    s3.name = "empty scenario yields no hits";
    s3.pass = none;
    s3.detail = none ? "no false positives" : "false positive hit";
    r.checks.push_back(s3);
  }

  {
    // Far-field bracketing: needle points with clearance >= 0.2 from D.
    dn::P2Workspace ws(sc, m);
    bool ok = true;
    std::string det;
    auto needle = probe::Needle::chord(sc.domain, M_PI);
    for (double t : {0.1, 0.15, 0.2}) {
      auto fk = probe::build_runge_sequence(sc.domain, needle, t, 3);
      double I = probe::probe_indicator(sc, m, fk, &ws);
      Vec2 y = needle.at(t);
      double quad = 0.0;
      for (std::size_t tr = 0; tr < m.triangle_count(); ++tr) {
        if (m.region[tr] != 0) continue;
        quad += m.triangle_area(static_cast<int>(tr)) *
                probe::fundamental_gradient(m.centroid(static_cast<int>(tr)), y).norm2();
      }
      ok = ok && quad <= I * 1.1;
      det += "t=" + fmt(t) + ":quad=" + fmt(quad) + ",I=" + fmt(I) + " ";
    }
    SubCheck s4;
    s4.name = "far-field lower-bound bracketing (10% slack)";
    s4.pass = ok;
    s4.detail = det;
    r.checks.push_back(s4);
  }
  return r;
}

CriterionResult dn_structural() {
  CriterionResult r;
  r.id = 12;
  r.name = "dn-structural";
  auto sc0 = disk_scenario({});
  auto m0 = mesh::triangulate(sc0, 0.08);
  auto f0 = coord_trace(m0, {1, 0});
  {
    SubCheck c;
    c.name = "gap vanishes for empty D";
    double g = dn::gap(sc0, m0, f0);
    c.pass = std::abs(g) <= 1e-10;
    c.detail = "gap=" + fmt(g);
    r.checks.push_back(c);
  }
  auto sc = disk_scenario({{Circle{{0.2, 0}, 0.3}, InclusionKind::Superconducting}});
  auto m = mesh::triangulate(sc, 0.06);
  auto f = coord_trace(m, {1, 0});
  {
    SubCheck c;
    c.name = "pairing against constants vanishes";
    fem::BoundaryTrace ones(f.size(), 2.0);
    double v = dn::pair(sc, m, f, ones);
    c.pass = std::abs(v) <= 1e-10;
    c.detail = "pair(f,const)=" + fmt(v);
    r.checks.push_back(c);
  }
  {
    SubCheck c;
    c.name = "p=2 symmetry";
    auto g = coord_trace(m, {0, 1});
    double ab = dn::pair(sc, m, f, g), ba = dn::pair(sc, m, g, f);
    double rel = std::abs(ab - ba) / std::max(1e-30, std::abs(ab));
    c.pass = rel <= 1e-10;
    c.detail = "relative asymmetry " + fmt(rel);
    r.checks.push_back(c);
  }
  {
    SubCheck c;
    c.name = "extension independence";
    auto fbar = fem::solve_p2(sc, m, f);
    auto ext1 = fem::solve_p2(sc, m, coord_trace(m, {0, 1}));
    auto sc3 = sc;
    sc3.sigma_background = 3.0;
    auto ext2 = fem::solve_p2(sc3, m, coord_trace(m, {0, 1}));
    double v1 = dn::pairing_against(fbar, ext1.nodal_values);
    double v2 = dn::pairing_against(fbar, ext2.nodal_values);
    double rel = std::abs(v1 - v2) / std::max(1e-30, std::abs(v1));
    c.pass = rel <= 1e-9;
    c.detail = "relative extension dependence " + fmt(rel);
    r.checks.push_back(c);
  }
  {
    SubCheck c;
    c.name = "ellipticity over a 20-member family";
    std::mt19937 rng(7);
    std::vector<fem::BoundaryTrace> family;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      fem::BoundaryTrace t(m.outer_nodes.size());
      double a1 = U(rng), b1 = U(rng), a2 = U(rng), b2 = U(rng), a3 = U(rng);
      for (std::size_t i = 0; i < t.size(); ++i) {
        Vec2 x = m.nodes[m.outer_nodes[i]];
        double th = std::atan2(x.y, x.x);
        t[i] = a1 * std::cos(th) + b1 * std::sin(th) + a2 * std::cos(2 * th) / 2 +
               b2 * std::sin(2 * th) / 2 + a3 * std::cos(3 * th) / 3;
      }
      family.push_back(t);
    }
    auto rep = dn::ellipticity_report(sc, m, family);
    c.pass = rep.lambda_low > 0 && rep.lambda_high / rep.lambda_low < 1e3;
    c.detail = "lambda in [" + fmt(rep.lambda_low) + ", " + fmt(rep.lambda_high) + "]";
    r.checks.push_back(c);
  }
  return r;
}

}  // namespace

std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}; }

std::vector<int> criteria_for_method(io::Method m) {
  switch (m) {
    case io::Method::Forward: return {1, 2, 3, 4, 12};
    case io::Method::Enclose: return {5, 6, 7, 8, 9};
    case io::Method::Probe: return {11};
    case io::Method::BemCheck: return {10};
  }
  return {};
}

CriterionResult run_criterion(int id, int threads) {
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = annulus_oracle(true); break;
    case 2: r = annulus_oracle(false); break;
    case 3: r = monotonicity_suite(); break;
    case 4: r = flux_uniqueness(); break;
    case 5: r = wolff_suite(); break;
    case 6: r = indicator_regimes(); break;
    case 7: r = hull_recovery(); break;
    case 8: r = sign_classification(); break;
    case 9: r = shift_identity(); break;
    case 10: r = bem_crosscheck(); break;
    case 11: r = probe_fan(threads); break;
    case 12: r = dn_structural(); break;
    default: throw Error(ErrorCode::ValidationError, "unknown criterion id");
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, int threads) {
  std::vector<CriterionResult> out;
  for (int id : ids) out.push_back(run_criterion(id, threads));
  return out;
}

}  // namespace pcond::acceptance
