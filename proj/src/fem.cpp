#include "pcond/fem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pcond/parallel.hpp"

namespace pcond::fem {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

bool is_super(const geom::Scenario& sc, int region) {
  return region >= 0 && sc.inclusions[region].kind == geom::InclusionKind::Superconducting;
}
bool is_insul(const geom::Scenario& sc, int region) {
  return region >= 0 && sc.inclusions[region].kind == geom::InclusionKind::Insulating;
}

}  // namespace

DofMap build_dofs(const geom::Scenario& sc, const mesh::Mesh& m, bool free_variant) {
  DofMap d;
  d.free_variant = free_variant;
  d.node_dof.assign(m.node_count(), DofMap::kUnused);
  d.comp_dof.assign(sc.inclusions.size(), -1);
  d.active_tri.assign(m.triangle_count(), 0);

  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (!free_variant && m.region[t] >= static_cast<int>(sc.inclusions.size()))
      throw Error(ErrorCode::ValidationError, "mesh was triangulated for a different scenario");
    d.active_tri[t] = free_variant ? 1 : (m.region[t] == mesh::kBackground ? 1 : 0);
  }

  std::vector<char> dirichlet(m.node_count(), 0);
  for (int v : m.outer_nodes) dirichlet[v] = 1;

  int next = 0;
  if (!free_variant) {
    // One tied dof per superconductor component, shared by all of its nodes.
    for (std::size_t i = 0; i < sc.inclusions.size(); ++i) {
      if (sc.inclusions[i].kind != geom::InclusionKind::Superconducting) continue;
      d.comp_dof[i] = next++;
      for (int v : m.inclusion_nodes[i]) d.node_dof[v] = d.comp_dof[i];
    }
  }
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (!d.active_tri[t]) continue;
    for (int v : m.triangles[t]) {
      if (dirichlet[v])
        d.node_dof[v] = DofMap::kDirichlet;
      else if (d.node_dof[v] == DofMap::kUnused)
        d.node_dof[v] = next++;
    }
  }
  for (int v : m.outer_nodes) d.node_dof[v] = DofMap::kDirichlet;
  d.n_dofs = next;
  return d;
}

namespace {

std::vector<double> expand(const mesh::Mesh& m, const DofMap& d, const Eigen::VectorXd& x,
                           const std::vector<double>& dirichlet_by_node) {
  std::vector<double> u(m.node_count(), 0.0);
  for (std::size_t v = 0; v < m.node_count(); ++v) {
    int dof = d.node_dof[v];
    if (dof >= 0)
      u[v] = x[dof];
    else if (dof == DofMap::kDirichlet)
      u[v] = dirichlet_by_node[v];
  }
  return u;
}

std::vector<double> trace_by_node(const mesh::Mesh& m, const BoundaryTrace& f) {
  if (f.size() != m.outer_nodes.size())
    throw Error(ErrorCode::ValidationError, "trace length does not match outer boundary node count");
  std::vector<double> by_node(m.node_count(), 0.0);
  for (std::size_t k = 0; k < m.outer_nodes.size(); ++k) by_node[m.outer_nodes[k]] = f[k];
  return by_node;
}

struct EnergyGrad {
  double energy = 0.0;
  Eigen::VectorXd grad;  // by dof
};

/// Regularized energy and gradient over active triangles. Per-triangle work is
/// a data-parallel kernel; the scatter runs serially in triangle order, so the
/// result is bitwise identical for any thread count.
EnergyGrad energy_and_gradient(const geom::Scenario& sc, const mesh::Mesh& m, const DofMap& d,
                               const std::vector<double>& u, double p, double eps, int threads) {
  const std::size_t nt = m.triangle_count();
  struct TriOut {
    double e = 0.0;
    double g[3] = {0, 0, 0};
  };
  std::vector<TriOut> out(nt);
  const double sigma = sc.sigma_background;
  parallel_for(nt, threads, [&](std::size_t t) {
    if (!d.active_tri[t]) return;
    auto grads = m.p1_gradients(static_cast<int>(t));
    const auto& tri = m.triangles[t];
    Vec2 g = grads[0] * u[tri[0]] + grads[1] * u[tri[1]] + grads[2] * u[tri[2]];
    double A = m.triangle_area(static_cast<int>(t));
    double q = g.norm2() + eps * eps;
    double w = sigma * A;
    out[t].e = w * std::pow(q, 0.5 * p);
    double c = w * p * std::pow(q, 0.5 * p - 1.0);
    for (int k = 0; k < 3; ++k) out[t].g[k] = c * g.dot(grads[k]);
  });
  EnergyGrad r;
  r.grad = Eigen::VectorXd::Zero(d.n_dofs);
  for (std::size_t t = 0; t < nt; ++t) {
    if (!d.active_tri[t]) continue;
    r.energy += out[t].e;
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int dof = d.node_dof[tri[k]];
      if (dof >= 0) r.grad[dof] += out[t].g[k];
    }
  }
  return r;
}

SpMat hessian(const geom::Scenario& sc, const mesh::Mesh& m, const DofMap& d,
              const std::vector<double>& u, double p, double eps, int threads) {
  const std::size_t nt = m.triangle_count();
  struct TriH {
    double h[9];
  };
  std::vector<TriH> out(nt);
  const double sigma = sc.sigma_background;
  parallel_for(nt, threads, [&](std::size_t t) {
    if (!d.active_tri[t]) return;
    auto grads = m.p1_gradients(static_cast<int>(t));
    const auto& tri = m.triangles[t];
    Vec2 g = grads[0] * u[tri[0]] + grads[1] * u[tri[1]] + grads[2] * u[tri[2]];
    double A = m.triangle_area(static_cast<int>(t));
    double q = g.norm2() + eps * eps;
    double w = sigma * A * p;
    double c1 = w * std::pow(q, 0.5 * p - 1.0);
    double c2 = w * (p - 2.0) * std::pow(q, 0.5 * p - 2.0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        out[t].h[3 * a + b] = c1 * grads[a].dot(grads[b]) + c2 * g.dot(grads[a]) * g.dot(grads[b]);
  });
  std::vector<Triplet> trips;
  trips.reserve(9 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    if (!d.active_tri[t]) continue;
    const auto& tri = m.triangles[t];
    for (int a = 0; a < 3; ++a) {
      int da = d.node_dof[tri[a]];
      if (da < 0) continue;
      for (int b = 0; b < 3; ++b) {
        int db = d.node_dof[tri[b]];
        if (db >= 0) trips.emplace_back(da, db, out[t].h[3 * a + b]);
      }
    }
  }
  SpMat H(d.n_dofs, d.n_dofs);
  H.setFromTriplets(trips.begin(), trips.end());
  return H;
}

}  // namespace

LinearP2System::LinearP2System(const geom::Scenario& sc, const mesh::Mesh& m, bool free_variant)
    : sc_(&sc), m_(&m), dofs_(build_dofs(sc, m, free_variant)) {
  std::vector<Triplet> ff, fd;
  const double sigma = sc.sigma_background;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (!dofs_.active_tri[t]) continue;
    auto grads = m.p1_gradients(static_cast<int>(t));
    double A = m.triangle_area(static_cast<int>(t));
    const auto& tri = m.triangles[t];
    for (int a = 0; a < 3; ++a) {
      int da = dofs_.node_dof[tri[a]];
      if (da < 0) continue;
      for (int b = 0; b < 3; ++b) {
        double kab = sigma * A * grads[a].dot(grads[b]);
        int db = dofs_.node_dof[tri[b]];
        if (db >= 0)
          ff.emplace_back(da, db, kab);
        else if (db == DofMap::kDirichlet)
          fd.emplace_back(da, tri[b], kab);
      }
    }
  }
  K_ff_.resize(dofs_.n_dofs, dofs_.n_dofs);
  K_ff_.setFromTriplets(ff.begin(), ff.end());
  K_fd_.resize(dofs_.n_dofs, static_cast<int>(m.node_count()));
  K_fd_.setFromTriplets(fd.begin(), fd.end());
  ldlt_.compute(K_ff_);
  if (ldlt_.info() != Eigen::Success)
    throw Error(ErrorCode::SingularSystem, "p=2 stiffness factorization failed");
}

std::vector<double> LinearP2System::solve_nodal(const BoundaryTrace& trace) const {
  auto by_node = trace_by_node(*m_, trace);
  Eigen::VectorXd ud = Eigen::Map<const Eigen::VectorXd>(by_node.data(), by_node.size());
  Eigen::VectorXd b = -(K_fd_ * ud);
  Eigen::VectorXd x = ldlt_.solve(b);
  if (ldlt_.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "p=2 solve failed");
  // One step of iterative refinement keeps the relative residual near 1e-15.
  Eigen::VectorXd r = b - K_ff_ * x;
  x += ldlt_.solve(r);
  return expand(*m_, dofs_, x, by_node);
}

Eigen::VectorXd LinearP2System::solve_rhs_dofs(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = ldlt_.solve(b);
  if (ldlt_.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "p=2 solve failed");
  Eigen::VectorXd r = b - K_ff_ * x;
  x += ldlt_.solve(r);
  return x;
}

DiscreteSolution LinearP2System::solve(const BoundaryTrace& trace) const {
  DiscreteSolution sol;
  sol.nodal_values = solve_nodal(trace);
  sol.p = 2.0;
  sol.epsilon = 0.0;
  sol.scenario = *sc_;
  sol.mesh = m_;
  sol.free_variant = dofs_.free_variant;
  sol.component_constants.assign(sc_->inclusions.size(), 0.0);
  for (std::size_t i = 0; i < sc_->inclusions.size(); ++i)
    if (dofs_.comp_dof[i] >= 0 && !m_->inclusion_nodes[i].empty())
      sol.component_constants[i] = sol.nodal_values[m_->inclusion_nodes[i][0]];
  return sol;
}

DiscreteSolution solve_p2(const geom::Scenario& sc, const mesh::Mesh& m, const BoundaryTrace& f,
                          bool free_variant) {
  return LinearP2System(sc, m, free_variant).solve(f);
}

DiscreteSolution solve_p(const geom::Scenario& sc, const mesh::Mesh& m, const BoundaryTrace& f,
                         const SolverOptions& opts, NewtonInit init, unsigned rng_seed,
                         bool free_variant) {
  if (!(sc.p > 1.0)) throw Error(ErrorCode::BadExponent, "p must exceed 1");
  const double p = sc.p;
  const int threads = 1;  // each solve is single-threaded; sweeps parallelize across solves

  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  DiscreteSolution sol;
  sol.p = p;
  sol.scenario = sc;
  sol.mesh = &m;
  sol.free_variant = free_variant;
  sol.component_constants.assign(sc.inclusions.size(), 0.0);
  if (scale == 0.0) {
    sol.nodal_values.assign(m.node_count(), 0.0);
    return sol;
  }

  // The data is normalized to max 1 and eps is scaled with it, so the
  // discrete problem is exactly p-homogeneous in the boundary data.
  BoundaryTrace fn(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fn[i] = f[i] / scale;
  double lo = fn[0], hi = fn[0];
  for (double v : fn) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double eps = opts.epsilon_override ? *opts.epsilon_override / scale
                                     : opts.epsilon_scale * std::max(hi - lo, 1e-30);

  DofMap d = build_dofs(sc, m, free_variant);
  auto by_node = trace_by_node(m, fn);

  Eigen::VectorXd x(d.n_dofs);
  switch (init) {
    case NewtonInit::Harmonic: {
      auto u0 = LinearP2System(sc, m, free_variant).solve_nodal(fn);
      for (std::size_t v = 0; v < m.node_count(); ++v)
        if (d.node_dof[v] >= 0) x[d.node_dof[v]] = u0[v];
      break;
    }
    case NewtonInit::Zero:
      x.setZero();
      break;
    case NewtonInit::Random: {
      std::mt19937 rng(rng_seed);
      std::uniform_real_distribution<double> U(-1.0, 1.0);
      for (int i = 0; i < d.n_dofs; ++i) x[i] = U(rng);
      break;
    }
  }

  // Regularization continuation: the energy is increasingly nonsmooth as eps
  // shrinks (severely so for p < 2), and damped Newton from a cold start can
  // stall. Each stage warm-starts the next.
  std::vector<double> stages;
  double osc = std::max(hi - lo, 1e-30);
  // Cold starts need a heavier initial smoothing than the harmonic one: with
  // eps >> |grad u| the first Newton step is a near-linear solve that pulls
  // any rough iterate close to the harmonic solution.
  double first = (init == NewtonInit::Harmonic ? 1e-3 : 1e2) * osc;
  for (double e = first; e > eps * 10.0; e *= 1e-2) stages.push_back(e);
  stages.push_back(eps);

  auto nodal = expand(m, d, x, by_node);
  EnergyGrad eg = energy_and_gradient(sc, m, d, nodal, p, eps, threads);
  double g0 = eg.grad.norm();
  sol.gradient_norm0 = g0;
  double gnorm = g0;
  // Absolute floor: the initial iterate may already be the minimizer (p=2
  // data, affine data), in which case the relative test can never fire.
  auto is_converged = [&](double gn, double E) {
    return gn <= opts.newton_tol * g0 || gn <= 1e-13 * (1.0 + std::abs(E));
  };
  bool converged = is_converged(gnorm, eg.energy);
  int it = 0;
  for (double stage_eps : stages) {
    if (converged) break;
    bool final_stage = stage_eps == eps;
    eg = energy_and_gradient(sc, m, d, nodal, p, stage_eps, threads);
    double stage_g0 = eg.grad.norm();
    for (; it < opts.max_iters; ++it) {
      bool stage_done = final_stage
                            ? is_converged(eg.grad.norm(), eg.energy)
                            : eg.grad.norm() <= 1e-8 * std::max(stage_g0, 1e-300) ||
                                  eg.grad.norm() <= 1e-13 * (1.0 + std::abs(eg.energy));
      if (stage_done) break;
      SpMat H = hessian(sc, m, d, nodal, p, stage_eps, threads);
      Eigen::SimplicialLDLT<SpMat> ldlt(H);
      if (ldlt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularSystem, "Newton Hessian factorization failed");
      Eigen::VectorXd delta = ldlt.solve(-eg.grad);
      double slope = eg.grad.dot(delta);
      if (slope > 0) {
        delta = -eg.grad;
        slope = -eg.grad.squaredNorm();
      }
      double alpha = 1.0;
      bool accepted = false;
      // Once the predicted decrement falls below the fp resolution of the
      // energy sum, the Armijo comparison is pure noise; take the Newton step.
      bool energy_resolved = -slope > 1e-12 * (1.0 + std::abs(eg.energy));
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        Eigen::VectorXd xt = x + alpha * delta;
        auto nodal_t = expand(m, d, xt, by_node);
        EnergyGrad egt = energy_and_gradient(sc, m, d, nodal_t, p, stage_eps, threads);
        if (!energy_resolved || egt.energy <= eg.energy + opts.armijo_c * alpha * slope) {
          x = xt;
          nodal = std::move(nodal_t);
          eg = std::move(egt);
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // line search exhausted at this stage
    }
    if (final_stage) {
      gnorm = eg.grad.norm();
      converged = is_converged(gnorm, eg.energy);
    }
  }

  sol.converged = converged;
  sol.newton_iterations = it;
  sol.gradient_norm = gnorm;
  sol.epsilon = eps * scale;
  sol.nodal_values.resize(m.node_count());
  for (std::size_t v = 0; v < m.node_count(); ++v) sol.nodal_values[v] = nodal[v] * scale;
  for (std::size_t i = 0; i < sc.inclusions.size(); ++i)
    if (d.comp_dof[i] >= 0 && !m.inclusion_nodes[i].empty())
      sol.component_constants[i] = sol.nodal_values[m.inclusion_nodes[i][0]];
  return sol;
}

Vec2 triangle_gradient(const mesh::Mesh& m, const std::vector<double>& nodal, int t) {
  auto grads = m.p1_gradients(t);
  const auto& tri = m.triangles[t];
  return grads[0] * nodal[tri[0]] + grads[1] * nodal[tri[1]] + grads[2] * nodal[tri[2]];
}

double energy(const DiscreteSolution& u) {
  const auto& m = *u.mesh;
  const auto& sc = u.scenario;
  double E = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (!(u.free_variant || m.region[t] == mesh::kBackground)) continue;
    Vec2 g = triangle_gradient(m, u.nodal_values, static_cast<int>(t));
    E += sc.sigma_background * m.triangle_area(static_cast<int>(t)) * std::pow(g.norm2(), 0.5 * u.p);
  }
  return E;
}

double regularized_energy(const DiscreteSolution& u) {
  const auto& m = *u.mesh;
  const auto& sc = u.scenario;
  double E = 0.0;
  double e2 = u.epsilon * u.epsilon;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (!(u.free_variant || m.region[t] == mesh::kBackground)) continue;
    Vec2 g = triangle_gradient(m, u.nodal_values, static_cast<int>(t));
    E += sc.sigma_background * m.triangle_area(static_cast<int>(t)) *
         std::pow(g.norm2() + e2, 0.5 * u.p);
  }
  return E;
}

double el_residual(const DiscreteSolution& u) {
  const auto& m = *u.mesh;
  const auto& sc = u.scenario;
  DofMap d = build_dofs(sc, m, u.free_variant);
  double e2 = u.epsilon * u.epsilon;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(d.n_dofs);
  Eigen::VectorXd phinorm = Eigen::VectorXd::Zero(d.n_dofs);
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (!d.active_tri[t]) continue;
    auto grads = m.p1_gradients(static_cast<int>(t));
    const auto& tri = m.triangles[t];
    Vec2 g = triangle_gradient(m, u.nodal_values, static_cast<int>(t));
    double A = m.triangle_area(static_cast<int>(t));
    double c = sc.sigma_background * A * std::pow(g.norm2() + e2, 0.5 * u.p - 1.0);
    for (int k = 0; k < 3; ++k) {
      int dof = d.node_dof[tri[k]];
      if (dof < 0) continue;
      r[dof] += c * g.dot(grads[k]);
      phinorm[dof] += A * std::pow(grads[k].norm(), u.p);
    }
  }
  double worst = 0.0;
  for (int i = 0; i < d.n_dofs; ++i) {
    double n = std::pow(phinorm[i], 1.0 / u.p);
    if (n > 0) worst = std::max(worst, std::abs(r[i]) / n);
  }
  return worst;
}

FluxField flux_field(const DiscreteSolution& u) {
  const auto& m = *u.mesh;
  const auto& sc = u.scenario;
  FluxField F;
  F.flux.assign(m.triangle_count(), Vec2{0, 0});
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    int reg = m.region[t];
    if (!u.free_variant && (is_insul(sc, reg) || is_super(sc, reg))) continue;
    Vec2 g = triangle_gradient(m, u.nodal_values, static_cast<int>(t));
    double gn = g.norm();
    if (gn == 0.0) continue;
    F.flux[t] = sc.sigma_background * std::pow(gn, u.p - 2.0) * g;
  }
  return F;
}

double component_flux(const DiscreteSolution& u, int inclusion_index) {
  const auto& m = *u.mesh;
  const auto& sc = u.scenario;
  if (!is_super(sc, inclusion_index))
    throw Error(ErrorCode::ValidationError, "component_flux requires a superconductor component");
  // Weak residual of the tied dof: the flux paired with the sum of hats over
  // the component's nodes.
  std::vector<char> in_comp(m.node_count(), 0);
  for (int v : m.inclusion_nodes[inclusion_index]) in_comp[v] = 1;
  double e2 = u.epsilon * u.epsilon;
  double total = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    if (m.region[t] != mesh::kBackground) continue;
    auto grads = m.p1_gradients(static_cast<int>(t));
    const auto& tri = m.triangles[t];
    Vec2 g = triangle_gradient(m, u.nodal_values, static_cast<int>(t));
    double c = sc.sigma_background * m.triangle_area(static_cast<int>(t)) *
               std::pow(g.norm2() + e2, 0.5 * u.p - 1.0);
    for (int k = 0; k < 3; ++k)
      if (in_comp[tri[k]]) total += c * g.dot(grads[k]);
  }
  return total;
}

void fill_insulator_interior(DiscreteSolution& u) {
  const auto& m = *u.mesh;
  const auto& sc = u.scenario;
  if (u.free_variant) return;
  for (std::size_t i = 0; i < sc.inclusions.size(); ++i) {
    if (sc.inclusions[i].kind != geom::InclusionKind::Insulating) continue;
    std::vector<char> on_interface(m.node_count(), 0);
    for (const auto& be : m.boundary_edges)
      if (be.curve == static_cast<int>(i)) on_interface[be.a] = on_interface[be.b] = 1;
    std::vector<int> dof(m.node_count(), -1);
    int n = 0;
    for (std::size_t t = 0; t < m.triangle_count(); ++t)
      if (m.region[t] == static_cast<int>(i))
        for (int v : m.triangles[t])
          if (!on_interface[v] && dof[v] < 0) dof[v] = n++;
    if (n == 0) continue;
    std::vector<Triplet> ff;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
      if (m.region[t] != static_cast<int>(i)) continue;
      auto grads = m.p1_gradients(static_cast<int>(t));
      double A = m.triangle_area(static_cast<int>(t));
      const auto& tri = m.triangles[t];
      for (int a = 0; a < 3; ++a) {
        if (dof[tri[a]] < 0) continue;
        for (int bb = 0; bb < 3; ++bb) {
          double kab = A * grads[a].dot(grads[bb]);
          if (dof[tri[bb]] >= 0)
            ff.emplace_back(dof[tri[a]], dof[tri[bb]], kab);
          else
            b[dof[tri[a]]] -= kab * u.nodal_values[tri[bb]];
        }
      }
    }
    SpMat K(n, n);
    K.setFromTriplets(ff.begin(), ff.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(K);
    if (ldlt.info() != Eigen::Success)
      throw Error(ErrorCode::SingularSystem, "insulator gauge fill failed");
    Eigen::VectorXd x = ldlt.solve(b);
    for (std::size_t v = 0; v < m.node_count(); ++v)
      if (dof[v] >= 0) u.nodal_values[v] = x[dof[v]];
  }
}

std::vector<double> free_energy_gradient(const geom::Scenario& sc, const mesh::Mesh& m,
                                         const std::vector<double>& nodal, double p, double eps) {
  std::vector<double> g(m.node_count(), 0.0);
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    auto grads = m.p1_gradients(static_cast<int>(t));
    const auto& tri = m.triangles[t];
    Vec2 gv = triangle_gradient(m, nodal, static_cast<int>(t));
    double A = m.triangle_area(static_cast<int>(t));
    double c = sc.sigma_background * A * p * std::pow(gv.norm2() + eps * eps, 0.5 * p - 1.0);
    for (int k = 0; k < 3; ++k) g[tri[k]] += c * gv.dot(grads[k]);
  }
  return g;
}

double h1_norm_sq(const mesh::Mesh& m, const std::vector<double>& nodal) {
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    double A = m.triangle_area(static_cast<int>(t));
    Vec2 g = triangle_gradient(m, nodal, static_cast<int>(t));
    const auto& tri = m.triangles[t];
    double umean = (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / 3.0;
    s += A * (g.norm2() + umean * umean);
  }
  return s;
}

}  // namespace pcond::fem
