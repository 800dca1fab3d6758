#include "pcond/enclosure.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pcond/parallel.hpp"

namespace pcond::enclosure {

std::vector<double> default_tau_grid() { return {8, 12, 16, 24, 32, 40}; }

std::vector<double> hull_tau_grid(double p) {
  if (p == 2.0) return {5, 6.5, 8, 10, 12.5, 16, 20, 25};
  return {3, 4, 5, 6.5, 8, 10};
}

MeshFamily::MeshFamily(const geom::Scenario& sc, double h_base, double tau_h)
    : sc_(sc), h_base_(h_base), tau_h_(tau_h) {}

double MeshFamily::h_for(double tau) const { return std::min(h_base_, tau_h_ / tau); }

MeshFamily::Entry& MeshFamily::entry_for(double tau) {
  double h = h_for(tau);
  long long key = static_cast<long long>(std::llround(1e9 * h));
  auto& e = cache_[key];
  if (!e.mesh) e.mesh = std::make_unique<mesh::Mesh>(mesh::triangulate(sc_, h));
  return e;
}

const mesh::Mesh& MeshFamily::mesh_for(double tau) { return *entry_for(tau).mesh; }

dn::P2Workspace* MeshFamily::workspace_for(double tau) {
  if (sc_.p != 2.0) return nullptr;
  auto& e = entry_for(tau);
  if (!e.ws) e.ws = std::make_unique<dn::P2Workspace>(sc_, *e.mesh);
  return e.ws.get();
}

IndicatorSample indicator(const geom::Scenario& sc, const mesh::Mesh& m, Vec2 rho, double t,
                          double tau, const IndicatorOptions& opts, dn::P2Workspace* ws,
                          const wolff::WolffProfile* prof) {
  IndicatorSample s;
  s.rho = rho;
  s.t = t;
  s.tau = tau;
  if (tau * m.h_max > opts.tau_h_cap)
    throw Error(ErrorCode::MeshResolutionExceeded,
                "tau " + std::to_string(tau) + " needs h <= " + std::to_string(opts.tau_h_cap / tau));

  auto prm = wolff::CgoParams::make(rho, tau, t);
  double gap_shifted = 0.0;
  double free_ref = 0.0;
  double log_scale = 0.0;
  if (sc.p == 2.0) {
    auto tr = wolff::boundary_trace(prm, m, nullptr);
    log_scale = tr.log_scale;
    auto gre = dn::gap_difference_form(sc, m, tr.re, opts.solver, ws);
    auto gim = dn::gap_difference_form(sc, m, tr.im, opts.solver, ws);
    gap_shifted = gre.value + gim.value;
    free_ref = gre.free_pairing + gim.free_pairing;
  } else {
    wolff::WolffProfile local;
    if (prof == nullptr) {
      local = wolff::integrate_wolff(sc.p, 1.0, 0.0);
      prof = &local;
    }
    auto tr = wolff::boundary_trace(prm, m, prof);
    log_scale = tr.log_scale;
    auto g = dn::gap_difference_form(sc, m, tr.re, opts.solver);
    gap_shifted = g.value;
    free_ref = g.free_pairing;
  }

  if (opts.noise_sigma > 0.0) {
    // Relative measurement noise on the pairing difference; seeded per sample
    // so sweeps remain deterministic under any execution order.
    std::seed_seq seq{opts.noise_seed, static_cast<unsigned>(std::llround(tau * 256)),
                      static_cast<unsigned>(std::llround((t + 64) * 4096)),
                      static_cast<unsigned>(std::llround((rho.x + 2) * 1e6)),
                      static_cast<unsigned>(std::llround((rho.y + 2) * 1e6))};
    std::mt19937 rng(seq);
    std::normal_distribution<double> N(0.0, opts.noise_sigma);
    gap_shifted *= (1.0 + N(rng));
  }

  s.sign = gap_shifted > 0 ? 1 : (gap_shifted < 0 ? -1 : 0);
  s.rel_magnitude = free_ref > 0 ? std::abs(gap_shifted) / free_ref : std::abs(gap_shifted);
  const double n = 2.0;
  double log_prefactor = (n - sc.p) * std::log(tau);
  if (gap_shifted == 0.0) {
    s.value = 0.0;
    s.log_abs = -std::numeric_limits<double>::infinity();
  } else {
    s.log_abs = log_prefactor + sc.p * log_scale + std::log(std::abs(gap_shifted));
    double mag = std::exp(s.log_abs);  // may overflow to inf; log_abs stays exact
    s.value = s.sign * mag;
  }
  double floor = opts.snr_floor > 0 ? opts.snr_floor : (sc.p == 2.0 ? 1e-10 : 1e-8);
  if (s.rel_magnitude <= floor) {
    s.valid = false;
    s.drop_reason = "below the measurement floor";
  } else {
    s.valid = true;
  }
  return s;
}

std::vector<IndicatorSample> tau_sweep(MeshFamily& family, Vec2 rho, double t,
                                       const std::vector<double>& tau_grid,
                                       const IndicatorOptions& opts) {
  for (std::size_t i = 1; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] > tau_grid[i - 1]))
      throw Error(ErrorCode::ValidationError, "tau grid must be increasing");
  const auto& sc = family.scenario();
  wolff::WolffProfile prof;
  if (sc.p != 2.0) prof = wolff::integrate_wolff(sc.p, 1.0, 0.0);
  std::vector<IndicatorSample> out;
  out.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const auto& m = family.mesh_for(tau);
    auto* ws = family.workspace_for(tau);
    out.push_back(indicator(sc, m, rho, t, tau, opts, ws, sc.p != 2.0 ? &prof : nullptr));
  }
  return out;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  LineFit f;
  f.slope = sxy / sxx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - ym - f.slope * (x[i] - xm);
      ss += r * r;
    }
    f.stderr_slope = std::sqrt(ss / (static_cast<double>(n) - 2.0) / sxx);
  }
  return f;
}

}  // namespace

SupportEstimate estimate_support(const std::vector<IndicatorSample>& sweep, double t_ref) {
  SupportEstimate est;
  if (!sweep.empty()) est.rho = sweep.front().rho;
  std::vector<double> x, y;
  for (const auto& s : sweep) {
    if (!s.valid || !std::isfinite(s.log_abs)) continue;
    x.push_back(2.0 * s.tau);
    y.push_back(s.log_abs);
  }
  est.n_samples = static_cast<int>(x.size());
  if (x.size() < 4) {
    est.drop_reason = "fewer than 4 usable samples";
    return est;
  }
  // Regime flag per consecutive pair.
  for (std::size_t i = 1; i < x.size(); ++i) {
    double local = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    est.regime_flags += local > 0.025 ? '+' : (local < -0.025 ? '-' : '0');
  }
  std::size_t half = x.size() - std::max<std::size_t>(4, (x.size() + 1) / 2);
  std::vector<double> xt(x.begin() + half, x.end());
  std::vector<double> yt(y.begin() + half, y.end());
  LineFit top = fit_line(xt, yt);
  LineFit full = fit_line(x, y);
  est.h_hat = t_ref + top.slope;
  est.slope_stderr = top.stderr_slope;
  double instab = std::abs(top.slope - full.slope);
  if (instab > std::max(0.1 * std::max(std::abs(top.slope), std::abs(full.slope)), 0.01)) {
    est.drop_reason = "slope unstable between the full grid and its top half";
    return est;
  }
  est.valid = true;
  return est;
}

ClassificationResult classify(const std::vector<std::vector<IndicatorSample>>& sweeps) {
  // Noise floor on the relative magnitude |gap| / free pairing.
  const double floor = 1e-8;
  bool any_signal = false;
  int pos = 0, neg = 0;
  int growth = 0, decay = 0, flat = 0;
  for (const auto& sweep : sweeps) {
    std::vector<double> x, y;
    for (const auto& s : sweep) {
      if (!s.valid) continue;
      if (s.rel_magnitude <= floor) continue;
      any_signal = true;
      if (s.sign > 0) ++pos;
      if (s.sign < 0) ++neg;
      x.push_back(2.0 * s.tau);
      y.push_back(s.log_abs);
    }
    if (x.size() >= 2) {
      double slope = fit_line(x, y).slope;
      if (slope > 0.025)
        ++growth;
      else if (slope < -0.025)
        ++decay;
      else
        ++flat;
    }
  }
  ClassificationResult res;
  if (!any_signal) {
    res.verdict = Verdict::Empty;
    res.notes = "all indicator samples at the solver noise floor";
    return res;
  }
  if (pos > 0 && neg > 0)
    throw Error(ErrorCode::MixedSigns,
                "indicator signs disagree (" + std::to_string(pos) + " positive, " +
                    std::to_string(neg) + " negative): both material types present?");
  res.verdict = pos > 0 ? Verdict::Superconducting : Verdict::Insulating;
  res.notes = "growth/flat/decay sweeps: " + std::to_string(growth) + "/" + std::to_string(flat) +
              "/" + std::to_string(decay);
  return res;
}

ClassificationResult classify_scenario(MeshFamily& family, int n_directions,
                                       const std::vector<double>& t_grid,
                                       const std::vector<double>& tau_grid,
                                       const IndicatorOptions& opts) {
  std::vector<std::vector<IndicatorSample>> sweeps;
  for (int k = 0; k < n_directions; ++k) {
    double th = 2.0 * M_PI * k / n_directions;
    Vec2 rho{std::cos(th), std::sin(th)};
    for (double t : t_grid) sweeps.push_back(tau_sweep(family, rho, t, tau_grid, opts));
  }
  return classify(sweeps);
}

HullEstimate reconstruct_hull(MeshFamily& family, int n_directions,
                              const std::vector<double>& tau_grid, const HullOptions& opts) {
  const auto& sc = family.scenario();
  double R = geom::bounding_radius(sc.domain);
  double t_ref = std::isnan(opts.t_ref) ? -R : opts.t_ref;

  // Meshes and factorizations are built once up front so the direction sweep
  // can run as independent read-only jobs.
  for (double tau : tau_grid) {
    family.mesh_for(tau);
    family.workspace_for(tau);
  }

  HullEstimate hull;
  hull.directions.resize(n_directions);
  std::vector<std::vector<IndicatorSample>> sweeps(n_directions);
  wolff::WolffProfile prof;
  if (sc.p != 2.0) prof = wolff::integrate_wolff(sc.p, 1.0, 0.0);

  // Snapshot the per-tau resources so the jobs only read.
  std::vector<const mesh::Mesh*> meshes;
  std::vector<dn::P2Workspace*> workspaces;
  for (double tau : tau_grid) {
    meshes.push_back(&family.mesh_for(tau));
    workspaces.push_back(family.workspace_for(tau));
  }

  parallel_for(static_cast<std::size_t>(n_directions), opts.threads, [&](std::size_t k) {
    double th = 2.0 * M_PI * static_cast<double>(k) / n_directions;
    Vec2 rho{std::cos(th), std::sin(th)};
    std::vector<IndicatorSample> sweep;
    for (std::size_t j = 0; j < tau_grid.size(); ++j)
      sweep.push_back(indicator(sc, *meshes[j], rho, t_ref, tau_grid[j], opts.indicator,
                                workspaces[j], sc.p != 2.0 ? &prof : nullptr));
    hull.directions[k] = estimate_support(sweep, t_ref);
    sweeps[k] = std::move(sweep);
  });

  std::vector<geom::HalfplaneSample> samples;
  for (const auto& est : hull.directions) {
    if (est.valid)
      samples.push_back({est.rho, est.h_hat});
    else
      ++hull.dropped;
  }
  if (samples.size() < 3)
    throw Error(ErrorCode::RegimeNotReached, "fewer than 3 directions produced support estimates");
  geom::HalfplaneOptions hopts;
  hopts.clip_to_bbox = true;
  hopts.bbox_radius = R;
  hull.polygon = geom::halfplane_intersection(samples, hopts);
  return hull;
}

}  // namespace pcond::enclosure
