#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pcond/dn_map.hpp"
#include "pcond/geometry.hpp"
#include "pcond/wolff.hpp"

namespace pcond::enclosure {

struct IndicatorSample {
  Vec2 rho;
  double t = 0.0;
  double tau = 0.0;
  double value = 0.0;    // tau^{2-p} <(Lambda_sigma - Lambda_empty) f, f>; +-inf if unrepresentable
  double log_abs = 0.0;  // log |value|, assembled in shifted form, finite unless value == 0
  int sign = 0;
  /// |gap| relative to the free pairing at the same (shifted) data; values at
  /// the solver noise floor mean "no inclusion visible".
  double rel_magnitude = 0.0;
  bool valid = false;
  std::string drop_reason;
};

struct IndicatorOptions {
  double tau_h_cap = 0.5;  // require tau * h_max <= cap
  fem::SolverOptions solver;
  double noise_sigma = 0.0;  // optional relative Gaussian noise on the pairing
  unsigned noise_seed = 0;
  /// Samples whose |gap| falls below this fraction of the free pairing are
  /// below the measurement floor (solver noise and mesh pollution) and are
  /// flagged invalid. 0 selects the default: 1e-10 at p=2, 1e-8 otherwise.
  double snr_floor = 0.0;
};

/// Per-tau meshes refined so the probing oscillation is resolved
/// (h = min(h_base, tau_h / tau)), with cached p=2 factorizations.
class MeshFamily {
public:
  explicit MeshFamily(const geom::Scenario& sc, double h_base = 0.08, double tau_h = 0.4);
  const geom::Scenario& scenario() const { return sc_; }
  double h_for(double tau) const;
  const mesh::Mesh& mesh_for(double tau);
  dn::P2Workspace* workspace_for(double tau);  // p = 2 only

private:
  geom::Scenario sc_;
  double h_base_, tau_h_;
  struct Entry {
    std::unique_ptr<mesh::Mesh> mesh;
    std::unique_ptr<dn::P2Workspace> ws;
  };
  std::map<long long, Entry> cache_;  // keyed by rounded h
  Entry& entry_for(double tau);
};

/// One indicator sample. For p=2 the CGO data is handled as two real solves
/// (real + imaginary traces) and the pairings are summed; for general p the
/// Wolff trace drives a single solve. The exponential data scaling is kept in
/// log space throughout.
IndicatorSample indicator(const geom::Scenario& sc, const mesh::Mesh& m, Vec2 rho, double t,
                          double tau, const IndicatorOptions& opts = {},
                          dn::P2Workspace* ws = nullptr, const wolff::WolffProfile* prof = nullptr);

/// Sweep over an increasing tau grid with meshes matched to each tau.
std::vector<IndicatorSample> tau_sweep(MeshFamily& family, Vec2 rho, double t,
                                       const std::vector<double>& tau_grid,
                                       const IndicatorOptions& opts = {});

struct SupportEstimate {
  Vec2 rho;
  double h_hat = 0.0;
  double slope_stderr = 0.0;
  int n_samples = 0;
  std::string regime_flags;  // one of +,-,0 per sample
  bool valid = false;
  std::string drop_reason;
};

/// Least-squares slope of log|I| against 2 tau over the top half of the grid
/// gives h_hat - t_ref; instability against the full-grid slope beyond 10%
/// reports RegimeNotReached.
SupportEstimate estimate_support(const std::vector<IndicatorSample>& sweep, double t_ref);

enum class Verdict { Empty, Insulating, Superconducting };

struct ClassificationResult {
  Verdict verdict = Verdict::Empty;
  std::string notes;
};

/// Empty when every sweep stays at the solver noise floor or decays; else the
/// common sign of the indicator decides. Mixed signs violate the one-material
/// hypothesis and are reported as an error.
ClassificationResult classify(const std::vector<std::vector<IndicatorSample>>& sweeps);

/// Convenience driver: sweeps a direction/t grid and classifies.
ClassificationResult classify_scenario(MeshFamily& family, int n_directions,
                                       const std::vector<double>& t_grid,
                                       const std::vector<double>& tau_grid,
                                       const IndicatorOptions& opts = {});

struct HullEstimate {
  geom::Polygon polygon;
  std::vector<SupportEstimate> directions;  // including dropped ones
  int dropped = 0;
};

struct HullOptions {
  IndicatorOptions indicator;
  double t_ref = std::numeric_limits<double>::quiet_NaN();  // default: -bounding radius
  int threads = 1;
};

/// Per-direction support estimation followed by the half-plane intersection,
/// clipped to the domain's bounding box. Dropped directions are kept in the
/// report. Tight recovery holds at p=2; for p > 2 the slope convention
/// overestimates the support values, so the polygon is a guaranteed superset
/// only; for p < 2 it can undershoot (reported, out of the recovery scope).
HullEstimate reconstruct_hull(MeshFamily& family, int n_directions,
                              const std::vector<double>& tau_grid, const HullOptions& opts = {});

/// Default tau grid {8, 12, 16, 24, 32, 40}.
std::vector<double> default_tau_grid();
/// Hull-recovery grid: extended downward so directions with a small support
/// value keep enough samples above the measurement floor.
std::vector<double> hull_tau_grid(double p);

}  // namespace pcond::enclosure
