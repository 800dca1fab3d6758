#include "pcond/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "pcond/acceptance.hpp"
#include "pcond/dn_map.hpp"
#include "pcond/enclosure.hpp"
#include "pcond/layer_potential.hpp"
#include "pcond/parallel.hpp"
#include "pcond/probe.hpp"

namespace pcond::io {

namespace {

class StageClock {
public:
  explicit StageClock(RunReport& rep) : rep_(rep) {}
  void mark(const std::string& stage) {
    auto now = std::chrono::steady_clock::now();
    rep_.timings.push_back({stage, std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

private:
  RunReport& rep_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

fem::BoundaryTrace forward_trace(const mesh::Mesh& m, const ForwardParams& fp) {
  fem::BoundaryTrace f(m.outer_nodes.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    Vec2 x = m.nodes[m.outer_nodes[k]];
    if (fp.data_kind == "coordinate") {
      f[k] = x.dot(fp.direction);
    } else {
      double th = std::atan2(x.y, x.x);
      double v = 0.0;
      for (std::size_t q = 0; q < fp.cos_coeffs.size(); ++q)
        v += fp.cos_coeffs[q] * std::cos((q + 1) * th);
      for (std::size_t q = 0; q < fp.sin_coeffs.size(); ++q)
        v += fp.sin_coeffs[q] * std::sin((q + 1) * th);
      f[k] = v;
    }
  }
  return f;
}

void svg_scenario(Svg& svg, const geom::Scenario& sc) {
  svg.add_shape(sc.domain, "black", "none");
  for (const auto& inc : sc.inclusions)
    svg.add_shape(inc.shape, inc.kind == geom::InclusionKind::Superconducting ? "crimson" : "navy",
                  "none");
}

RunReport run_forward(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.method = "forward";
  StageClock clock(rep);
  auto m = mesh::triangulate(cfg.scenario, cfg.forward.h_max);
  auto stats = mesh::mesh_stats(m);
  rep.mesh_nodes = m.node_count();
  rep.mesh_triangles = m.triangle_count();
  rep.mesh_max_circumdiameter = stats.max_circumdiameter;
  clock.mark("mesh");

  auto f = forward_trace(m, cfg.forward);
  auto u = cfg.scenario.p == 2.0 ? fem::solve_p2(cfg.scenario, m, f)
                                 : fem::solve_p(cfg.scenario, m, f);
  if (!u.converged) rep.warn("NoConvergence", "solver returned the best iterate");
  fem::fill_insulator_interior(u);
  clock.mark("solve");

  Csv sol({"node", "x", "y", "u"});
  for (std::size_t v = 0; v < m.node_count(); ++v)
    sol.row_values({static_cast<double>(v), m.nodes[v].x, m.nodes[v].y, u.nodal_values[v]});
  auto sol_path = out_path(cfg, "solution.csv");
  sol.save(sol_path);
  rep.artifacts.push_back(sol_path);

  auto flux = fem::flux_field(u);
  Csv fx({"triangle", "fx", "fy"});
  for (std::size_t t = 0; t < m.triangle_count(); ++t)
    fx.row_values({static_cast<double>(t), flux.flux[t].x, flux.flux[t].y});
  auto flux_path = out_path(cfg, "flux.csv");
  fx.save(flux_path);
  rep.artifacts.push_back(flux_path);

  rep.notes.push_back("energy=" + format_double(fem::energy(u)));
  rep.notes.push_back("regularized_energy=" + format_double(fem::regularized_energy(u)));
  for (std::size_t i = 0; i < cfg.scenario.inclusions.size(); ++i)
    if (cfg.scenario.inclusions[i].kind == geom::InclusionKind::Superconducting)
      rep.notes.push_back("component_constant[" + std::to_string(i) +
                          "]=" + format_double(u.component_constants[i]));
  clock.mark("export");

  if (cfg.svg) {
    Svg svg(geom::bounding_radius(cfg.scenario.domain));
    svg_scenario(svg, cfg.scenario);
    auto path = out_path(cfg, "forward.svg");
    svg.save(path);
    rep.artifacts.push_back(path);
  }
  return rep;
}

RunReport run_enclose(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.method = "enclose";
  StageClock clock(rep);
  enclosure::MeshFamily family(cfg.scenario, cfg.enclosure.h_base, cfg.enclosure.tau_h);
  auto grid = cfg.enclosure.tau_grid.empty() ? enclosure::hull_tau_grid(cfg.scenario.p)
                                             : cfg.enclosure.tau_grid;

  enclosure::IndicatorOptions iopts;
  iopts.noise_sigma = cfg.enclosure.noise_sigma;
  iopts.noise_seed = cfg.seed;

  if (cfg.enclosure.classify_first) {
    std::vector<double> tgrid = {-0.6 * geom::bounding_radius(cfg.scenario.domain), 0.0};
    std::vector<double> class_taus(grid.begin(), grid.begin() + std::min<std::size_t>(3, grid.size()));
    auto verdict = enclosure::classify_scenario(family, 4, tgrid, class_taus, iopts);
    clock.mark("classify");
    rep.notes.push_back("classification=" +
                        std::string(verdict.verdict == enclosure::Verdict::Empty ? "empty"
                                    : verdict.verdict == enclosure::Verdict::Superconducting
                                        ? "superconducting"
                                        : "insulating"));
    if (verdict.verdict == enclosure::Verdict::Empty) {
      Csv hull({"rho_x", "rho_y", "h_hat", "stderr", "n_samples", "regime"});
      auto path = out_path(cfg, "hull.csv");
      hull.save(path);
      rep.artifacts.push_back(path);
      rep.notes.push_back("empty verdict: no hull reconstructed");
      return rep;
    }
  }

  if (cfg.scenario.p < 2.0)
    rep.warn("SupportUnderestimate",
             "support estimates from the 2 tau slope can undershoot for p < 2");

  enclosure::HullOptions hopts;
  hopts.indicator = iopts;
  hopts.t_ref = cfg.enclosure.t_ref;
  hopts.threads = cfg.threads;
  auto hull = enclosure::reconstruct_hull(family, cfg.enclosure.directions, grid, hopts);
  {
    const auto& finest = family.mesh_for(grid.back());
    rep.mesh_nodes = finest.node_count();
    rep.mesh_triangles = finest.triangle_count();
    rep.mesh_max_circumdiameter = mesh::mesh_stats(finest).max_circumdiameter;
  }
  clock.mark("sweep");

  Csv table({"rho_x", "rho_y", "h_hat", "stderr", "n_samples", "regime"});
  for (const auto& est : hull.directions) {
    if (!est.valid) {
      rep.warn("RegimeNotReached", "direction (" + format_double(est.rho.x) + "," +
                                       format_double(est.rho.y) + ") dropped: " + est.drop_reason);
      continue;
    }
    table.row({format_double(est.rho.x), format_double(est.rho.y), format_double(est.h_hat),
               format_double(est.slope_stderr), std::to_string(est.n_samples), est.regime_flags});
  }
  auto table_path = out_path(cfg, "hull.csv");
  table.save(table_path);
  rep.artifacts.push_back(table_path);

  Csv poly({"x", "y"});
  for (Vec2 v : hull.polygon.vertices) poly.row_values({v.x, v.y});
  auto poly_path = out_path(cfg, "hull_polygon.csv");
  poly.save(poly_path);
  rep.artifacts.push_back(poly_path);
  clock.mark("export");

  if (cfg.svg) {
    Svg svg(geom::bounding_radius(cfg.scenario.domain));
    svg_scenario(svg, cfg.scenario);
    svg.add_polygon(hull.polygon, "seagreen", "none");
    auto path = out_path(cfg, "hull.svg");
    svg.save(path);
    rep.artifacts.push_back(path);
  }
  return rep;
}

RunReport run_probe(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.method = "probe";
  StageClock clock(rep);
  if (cfg.scenario.p != 2.0)
    throw Error(ErrorCode::ValidationError, "the probe method requires p = 2");
  auto m = mesh::triangulate(cfg.scenario, cfg.probe.h_max);
  auto stats = mesh::mesh_stats(m);
  rep.mesh_nodes = m.node_count();
  rep.mesh_triangles = m.triangle_count();
  rep.mesh_max_circumdiameter = stats.max_circumdiameter;
  clock.mark("mesh");

  std::vector<probe::Needle> fan;
  for (int k = 0; k < cfg.probe.needles; ++k) {
    auto n = probe::Needle::chord(cfg.scenario.domain, 2 * M_PI * k / cfg.probe.needles);
    n.tube_radius = cfg.probe.tube_radius;
    fan.push_back(n);
  }
  std::vector<double> grid;
  for (int i = 1; i <= cfg.probe.t_grid; ++i)
    grid.push_back(static_cast<double>(i) / (cfg.probe.t_grid + 1));
  probe::HitOptions opts;
  opts.threshold_factor = cfg.probe.threshold_factor;
  auto cloud = probe::reconstruct_boundary(cfg.scenario, m, fan, grid, cfg.probe.k, opts,
                                           cfg.threads);
  clock.mark("needles");

  Csv csv({"needle_id", "entry_x", "entry_y", "t_hat", "hit", "hit_x", "hit_y"});
  int hits = 0;
  for (const auto& bp : cloud) {
    csv.row({std::to_string(bp.needle_id), format_double(bp.entry.x), format_double(bp.entry.y),
             format_double(bp.t_hat), bp.hit ? "1" : "0",
             bp.hit ? format_double(bp.point.x) : "", bp.hit ? format_double(bp.point.y) : ""});
    if (bp.hit) ++hits;
  }
  auto path = out_path(cfg, "cloud.csv");
  csv.save(path);
  rep.artifacts.push_back(path);
  rep.notes.push_back("hits=" + std::to_string(hits) + "/" + std::to_string(cfg.probe.needles));
  if (hits == 0 && !cfg.scenario.inclusions.empty())
    rep.warn("NoHits", "no needle crossed the blow-up threshold");
  clock.mark("export");

  if (cfg.svg) {
    Svg svg(geom::bounding_radius(cfg.scenario.domain));
    svg_scenario(svg, cfg.scenario);
    for (const auto& bp : cloud)
      if (bp.hit) svg.add_point(bp.point, 3.0, "seagreen");
    auto spath = out_path(cfg, "cloud.svg");
    svg.save(spath);
    rep.artifacts.push_back(spath);
  }
  return rep;
}

RunReport run_bem_check(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.method = "bem-check";
  StageClock clock(rep);
  auto supers = cfg.scenario.components_of(geom::InclusionKind::Superconducting);
  if (supers.size() != 1 || cfg.scenario.inclusions.size() != 1)
    throw Error(ErrorCode::ValidationError,
                "bem-check requires exactly one superconducting inclusion");
  if (cfg.scenario.p != 2.0)
    throw Error(ErrorCode::ValidationError, "bem-check requires p = 2");

  auto scale = bem::default_scale(cfg.scenario.domain);
  auto outer = bem::PanelCurve::from_shape(cfg.scenario.domain, cfg.bem.panels);
  auto incl = bem::PanelCurve::from_shape(cfg.scenario.inclusions[0].shape, cfg.bem.panels / 2);
  bem::ReflectedSolver solver(outer, incl, scale);
  clock.mark("assemble");

  auto eq_o = bem::equilibrium_density(outer, scale);
  auto eq_d = bem::equilibrium_density(incl, scale);
  Csv eq({"curve", "arclength", "density"});
  double s = 0.0;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    eq.row({"outer", format_double(s), format_double(eq_o.density[i])});
    s += outer.len[i];
  }
  s = 0.0;
  for (std::size_t i = 0; i < incl.size(); ++i) {
    eq.row({"inclusion", format_double(s), format_double(eq_d.density[i])});
    s += incl.len[i];
  }
  auto eq_path = out_path(cfg, "equilibrium.csv");
  eq.save(eq_path);
  rep.artifacts.push_back(eq_path);

  auto norms = solver.operator_norms();
  std::vector<double> u0(incl.size()), f(outer.size());
  for (std::size_t i = 0; i < incl.size(); ++i) u0[i] = incl.mid[i].x;
  for (std::size_t i = 0; i < outer.size(); ++i) f[i] = outer.mid[i].x;
  auto refl = solver.solve(u0);
  double gap_bem = solver.dn_gap(refl, f);
  clock.mark("solve");

  auto m = mesh::triangulate(cfg.scenario, cfg.bem.h_max);
  fem::BoundaryTrace ftr(m.outer_nodes.size());
  for (std::size_t k = 0; k < ftr.size(); ++k) ftr[k] = m.nodes[m.outer_nodes[k]].x;
  double gap_fem = dn::gap_difference_form(cfg.scenario, m, ftr).value;
  double rel = std::abs(gap_bem - gap_fem) / std::max(1e-30, std::abs(gap_fem));
  clock.mark("fem-crosscheck");

  Csv table({"quantity", "value"});
  table.row({"capacity_outer", format_double(bem::capacity(outer, scale))});
  table.row({"capacity_inclusion", format_double(bem::capacity(incl, scale))});
  table.row({"s_value_outer", format_double(eq_o.s_value)});
  table.row({"s_value_inclusion", format_double(eq_d.s_value)});
  table.row({"norm_K_Omega_to_D", format_double(norms.K_Omega_to_D)});
  table.row({"norm_K_D_to_Omega", format_double(norms.K_D_to_Omega)});
  table.row({"norm_K", format_double(norms.K)});
  table.row({"c_f", format_double(refl.c_f)});
  table.row({"gap_bem", format_double(gap_bem)});
  table.row({"gap_fem", format_double(gap_fem)});
  table.row({"gap_relative_difference", format_double(rel)});
  auto path = out_path(cfg, "bem.csv");
  table.save(path);
  rep.artifacts.push_back(path);

  if (norms.K >= 1.0) rep.warn("ContractionMargin", "operator norm reached 1");
  if (norms.K >= 0.9)
    rep.warn("ContractionMargin", "operator norm close to 1; direct solve used");
  if (rel > 0.02) rep.warn("CrossCheckMismatch", "FEM and BEM gaps differ by more than 2%");
  rep.notes.push_back("gap_relative_difference=" + format_double(rel));
  return rep;
}

}  // namespace

RunReport run(const ExperimentConfig& cfg) {
  set_threads(cfg.threads);
  switch (cfg.method) {
    case Method::Forward: return run_forward(cfg);
    case Method::Enclose: return run_enclose(cfg);
    case Method::Probe: return run_probe(cfg);
    case Method::BemCheck: return run_bem_check(cfg);
  }
  throw Error(ErrorCode::ValidationError, "unknown method");
}

RunReport verify(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.method = "verify(" + method_name(cfg.method) + ")";
  auto results = acceptance::run_criteria(acceptance::criteria_for_method(cfg.method), cfg.threads);
  int failed = 0;
  for (const auto& res : results) {
    std::string line = std::string(res.pass() ? "[PASS] " : "[FAIL] ") +
                       std::to_string(res.id) + " " + res.name;
    for (const auto& c : res.checks)
      if (!c.pass) line += " | " + c.name + ": " + c.detail;
    rep.notes.push_back(line);
    if (!res.pass()) ++failed;
  }
  if (failed > 0) rep.exit_code = 1;
  return rep;
}

}  // namespace pcond::io
