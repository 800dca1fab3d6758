#include "pcond/wolff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace pcond::wolff {

CgoParams CgoParams::make(Vec2 rho, double tau, double t) {
  CgoParams p;
  p.rho = rho.normalized();
  p.rho_perp = p.rho.perp();
  p.tau = tau;
  p.t = t;
  p.validate();
  return p;
}

void CgoParams::validate() const {
  if (!(tau > 0.0)) throw Error(ErrorCode::ValidationError, "tau must be positive");
  if (std::abs(rho.norm() - 1.0) > 1e-12 || std::abs(rho_perp.norm() - 1.0) > 1e-12 ||
      std::abs(rho.dot(rho_perp)) > 1e-14)
    throw Error(ErrorCode::ValidationError, "rho, rho_perp must be orthonormal");
}

namespace {

struct State {
  double w, wp;
};

double potential(double p, double w, double wp) {
  return ((2 * p - 3) * wp * wp + (p - 1) * w * w) / ((p - 1) * wp * wp + w * w);
}

State rhs(double p, State y) { return {y.wp, -potential(p, y.w, y.wp) * y.w}; }

State rk4_step(double p, State y, double h) {
  State k1 = rhs(p, y);
  State k2 = rhs(p, {y.w + 0.5 * h * k1.w, y.wp + 0.5 * h * k1.wp});
  State k3 = rhs(p, {y.w + 0.5 * h * k2.w, y.wp + 0.5 * h * k2.wp});
  State k4 = rhs(p, {y.w + h * k3.w, y.wp + h * k3.wp});
  return {y.w + h / 6.0 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w),
          y.wp + h / 6.0 * (k1.wp + 2 * k2.wp + 2 * k3.wp + k4.wp)};
}

double angle_delta(State a, State b) {
  // Rotation from a to b in the (w, w') phase plane, in (-pi, pi].
  double cross = a.w * b.wp - a.wp * b.w;
  double dot = a.w * b.w + a.wp * b.wp;
  return std::atan2(cross, dot);
}

/// Integrates until the accumulated phase reaches -2*pi; returns the period.
/// The phase rotates strictly clockwise for every p in (1, inf).
double find_period(double p, State y0, double h, double horizon) {
  State y = y0;
  double s = 0.0, winding = 0.0;
  const double r0 = y0.w * y0.w + y0.wp * y0.wp;
  while (s < horizon) {
    State yn = rk4_step(p, y, h);
    double d = angle_delta(y, yn);
    double rn = yn.w * yn.w + yn.wp * yn.wp;
    if (rn < 1e-12 * r0) throw Error(ErrorCode::OriginApproach, "phase point approached the origin");
    if (winding + d <= -2.0 * M_PI) {
      // Bisect the final partial step to land on winding == -2*pi.
      double lo = 0.0, hi = h;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        State ym = rk4_step(p, y, mid);
        if (winding + angle_delta(y, ym) <= -2.0 * M_PI)
          hi = mid;
        else
          lo = mid;
      }
      return s + 0.5 * (lo + hi);
    }
    winding += d;
    y = yn;
    s += h;
  }
  throw Error(ErrorCode::PeriodNotFound, "no return to the Poincare section within the horizon");
}

}  // namespace

WolffProfile integrate_wolff(double p, double a0, double b0, double step_hint) {
  if (!(p > 1.0)) throw Error(ErrorCode::BadExponent, "p must exceed 1");
  if (a0 == 0.0 && b0 == 0.0)
    throw Error(ErrorCode::ValidationError, "initial conditions must not both vanish");

  State y0{a0, b0};
  // The phase speed lies between min(p-1,1) and max(p-1,1), so a coarse pass
  // with a conservative horizon always finds the section crossing.
  double horizon = 4.0 * 2.0 * M_PI / std::min(p - 1.0, 1.0);
  double lambda_est = find_period(p, y0, horizon / 4000.0, horizon);
  double h = step_hint > 0.0 ? step_hint : lambda_est / 2000.0;
  double lambda = find_period(p, y0, h, horizon);

  WolffProfile prof;
  prof.p = p;
  prof.a0 = a0;
  prof.b0 = b0;
  prof.step = h;
  prof.lambda = lambda;

  // Resample one exact period on a uniform grid, accumulating int w ds as an
  // extra quadrature state integrated with the same RK4 scheme.
  const int N = 2048;
  double hh = lambda / N;
  prof.w.resize(N);
  prof.wp.resize(N);
  prof.wpp.resize(N);
  State y = y0;
  double integral = 0.0;
  double blo = 1e300, bhi = 0.0, amp = 0.0;
  for (int k = 0; k < N; ++k) {
    prof.w[k] = y.w;
    prof.wp[k] = y.wp;
    prof.wpp[k] = -potential(p, y.w, y.wp) * y.w;
    double E = y.w * y.w + y.wp * y.wp;
    blo = std::min(blo, E);
    bhi = std::max(bhi, E);
    amp = std::max(amp, std::abs(y.w));
    // Simpson increment for the integral over [s_k, s_k + hh].
    State ym = rk4_step(p, y, 0.5 * hh);
    State yn = rk4_step(p, ym, 0.5 * hh);
    integral += hh / 6.0 * (y.w + 4.0 * ym.w + yn.w);
    y = yn;
  }
  double closure = std::abs(y.w - a0) + std::abs(y.wp - b0);
  if (closure > 1e-8)
    throw Error(ErrorCode::PeriodNotFound,
                "periodic closure failed: |y(lambda)-y0| = " + std::to_string(closure));
  prof.bound_low = blo;
  prof.bound_high = bhi;
  prof.amplitude = amp;
  prof.mean = integral / lambda;
  return prof;
}

namespace {

/// C1 periodic Hermite interpolation on the uniform grid (values v, slopes d).
double hermite(const std::vector<double>& v, const std::vector<double>& d, double lambda,
               double s) {
  int N = static_cast<int>(v.size());
  double hh = lambda / N;
  double u = s / lambda;
  u -= std::floor(u);
  double x = u * N;
  int k = static_cast<int>(x);
  if (k >= N) k = N - 1;
  double tt = x - k;
  int k1 = (k + 1) % N;
  double h00 = (1 + 2 * tt) * (1 - tt) * (1 - tt);
  double h10 = tt * (1 - tt) * (1 - tt);
  double h01 = tt * tt * (3 - 2 * tt);
  double h11 = tt * tt * (tt - 1);
  return h00 * v[k] + h10 * hh * d[k] + h01 * v[k1] + h11 * hh * d[k1];
}

}  // namespace

double WolffProfile::eval(double s) const { return hermite(w, wp, lambda, s); }
double WolffProfile::eval_deriv(double s) const { return hermite(wp, wpp, lambda, s); }

double mean_over_period(const WolffProfile& prof) { return prof.mean * prof.lambda; }

Complex2 cgo_p2(Vec2 x, const CgoParams& prm) { return cgo_p2_scaled(x, prm, 0.0); }

Complex2 cgo_p2_scaled(Vec2 x, const CgoParams& prm, double log_shift) {
  double e = std::exp(prm.tau * (x.dot(prm.rho) - prm.t) - log_shift);
  double phase = prm.tau * x.dot(prm.rho_perp);
  return {e * std::cos(phase), e * std::sin(phase)};
}

double wolff_eval(Vec2 x, const CgoParams& prm, const WolffProfile& prof) {
  return wolff_eval_scaled(x, prm, prof, 0.0);
}

double wolff_eval_scaled(Vec2 x, const CgoParams& prm, const WolffProfile& prof,
                         double log_shift) {
  double e = std::exp(prm.tau * (x.dot(prm.rho) - prm.t) - log_shift);
  return e * prof.eval(prm.tau * x.dot(prm.rho_perp));
}

Vec2 wolff_grad(Vec2 x, const CgoParams& prm, const WolffProfile& prof) {
  double e = std::exp(prm.tau * (x.dot(prm.rho) - prm.t));
  double s = prm.tau * x.dot(prm.rho_perp);
  return prm.tau * e * (prof.eval(s) * prm.rho + prof.eval_deriv(s) * prm.rho_perp);
}

ShiftedTraces boundary_trace(const CgoParams& prm, const mesh::Mesh& m,
                             const WolffProfile* prof) {
  prm.validate();
  ShiftedTraces out;
  double mx = -std::numeric_limits<double>::infinity();
  for (int v : m.outer_nodes) mx = std::max(mx, m.nodes[v].dot(prm.rho));
  out.log_scale = prm.tau * (mx - prm.t);
  out.re.resize(m.outer_nodes.size());
  if (prof == nullptr) out.im.resize(m.outer_nodes.size());
  for (std::size_t k = 0; k < m.outer_nodes.size(); ++k) {
    Vec2 x = m.nodes[m.outer_nodes[k]];
    if (prof == nullptr) {
      Complex2 c = cgo_p2_scaled(x, prm, out.log_scale);
      out.re[k] = c.re;
      out.im[k] = c.im;
    } else {
      out.re[k] = wolff_eval_scaled(x, prm, *prof, out.log_scale);
    }
  }
  return out;
}

std::string profile_csv(const WolffProfile& prof) {
  std::string out = "s,w,wprime\n";
  char buf[96];
  int N = static_cast<int>(prof.w.size());
  for (int k = 0; k < N; ++k) {
    double s = prof.lambda * k / N;
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s, prof.w[k], prof.wp[k]);
    out += buf;
  }
  return out;
}

}  // namespace pcond::wolff
