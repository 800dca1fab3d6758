#pragma once

#include <vector>

#include "pcond/fem.hpp"
#include "pcond/mesh.hpp"

namespace pcond::wolff {

/// Probing-direction parameters: unit vectors rho, rho_perp, frequency tau
/// and level offset t. The probing solutions grow like exp(tau (x.rho - t)).
struct CgoParams {
  Vec2 rho{1, 0};
  Vec2 rho_perp{0, 1};
  double tau = 1.0;
  double t = 0.0;

  static CgoParams make(Vec2 rho, double tau, double t);
  void validate() const;
};

/// One period of the oscillator w'' + V(w, w') w = 0 with
/// V = ((2p-3) w'^2 + (p-1) w^2) / ((p-1) w'^2 + w^2), sampled uniformly,
/// with Hermite data (w, w', w'') for C1 periodic interpolation.
struct WolffProfile {
  double p = 2.0;
  double a0 = 1.0, b0 = 0.0;
  double step = 0.0;     // RK4 step used for the period search
  double lambda = 0.0;   // detected period
  std::vector<double> w, wp, wpp;  // N uniform samples over [0, lambda)
  double bound_low = 0.0;   // min of w^2 + w'^2 over the period
  double bound_high = 0.0;  // max of w^2 + w'^2
  double mean = 0.0;        // (1/lambda) int w ds, measured
  double amplitude = 0.0;   // max |w|

  double eval(double s) const;
  double eval_deriv(double s) const;
};

/// Integrates the profile ODE with classical RK4 and detects the period as
/// the first clockwise return of the phase angle (Poincare section through
/// the initial ray). step_hint <= 0 selects period-estimate / 2000.
WolffProfile integrate_wolff(double p, double a0, double b0, double step_hint = 0.0);

double mean_over_period(const WolffProfile& prof);

// --- probing solutions ------------------------------------------------------

struct Complex2 {
  double re = 0.0, im = 0.0;
};

/// exp(tau (x.rho - t)) (cos(tau x.rho_perp), sin(tau x.rho_perp)); harmonic.
Complex2 cgo_p2(Vec2 x, const CgoParams& prm);
/// Same with the exponent shifted by log_shift (value * exp(-log_shift)).
Complex2 cgo_p2_scaled(Vec2 x, const CgoParams& prm, double log_shift);

double wolff_eval(Vec2 x, const CgoParams& prm, const WolffProfile& prof);
double wolff_eval_scaled(Vec2 x, const CgoParams& prm, const WolffProfile& prof, double log_shift);
/// grad u = tau exp(tau(x.rho - t)) (rho w + rho_perp w').
Vec2 wolff_grad(Vec2 x, const CgoParams& prm, const WolffProfile& prof);

/// Traces at the outer boundary nodes, scaled by exp(-log_scale) with
/// log_scale = tau (max_i x_i.rho - t) so the stored values stay O(1) for any
/// tau. For p = 2 both real and imaginary traces are filled; for general p
/// the Wolff trace goes into re and im stays empty.
struct ShiftedTraces {
  fem::BoundaryTrace re;
  fem::BoundaryTrace im;
  double log_scale = 0.0;
};

ShiftedTraces boundary_trace(const CgoParams& prm, const mesh::Mesh& m,
                             const WolffProfile* prof /* null for p=2 CGO */);

/// CSV text of one period: columns s, w, w'.
std::string profile_csv(const WolffProfile& prof);

}  // namespace pcond::wolff
