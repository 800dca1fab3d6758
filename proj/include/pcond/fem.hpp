#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <optional>
#include <vector>

#include "pcond/mesh.hpp"

namespace pcond::fem {

/// Dirichlet values at mesh.outer_nodes, in that order.
using BoundaryTrace = std::vector<double>;

struct SolverOptions {
  /// Regularization eps = epsilon_scale * oscillation(normalized trace);
  /// epsilon_override wins when set (given for the unnormalized data).
  double epsilon_scale = 1e-8;
  std::optional<double> epsilon_override;
  double newton_tol = 1e-10;  // relative energy-gradient tolerance
  int max_iters = 200;
  double armijo_c = 1e-4;
  int max_backtracks = 48;
};

struct DofMap {
  static constexpr int kDirichlet = -1;
  static constexpr int kUnused = -2;
  std::vector<int> node_dof;  // per node: dof id, kDirichlet or kUnused
  std::vector<int> comp_dof;  // per inclusion: tied dof for superconductors, -1 otherwise
  std::vector<char> active_tri;
  int n_dofs = 0;
  bool free_variant = false;
};

/// free_variant treats the mesh as carrying no inclusions (sigma = sigma_bg
/// everywhere); used for the free Dirichlet-to-Neumann map on the same mesh.
DofMap build_dofs(const geom::Scenario& sc, const mesh::Mesh& m, bool free_variant);

struct DiscreteSolution {
  std::vector<double> nodal_values;         // all mesh nodes
  std::vector<double> component_constants;  // per inclusion; superconductors only
  double p = 2.0;
  double epsilon = 0.0;  // regularization in unnormalized units (0 for the p=2 path)
  bool converged = true;
  int newton_iterations = 0;
  double gradient_norm0 = 0.0;
  double gradient_norm = 0.0;
  geom::Scenario scenario;  // value copy; mesh must outlive the solution
  const mesh::Mesh* mesh = nullptr;
  bool free_variant = false;
};

/// Piecewise-constant flux sigma |grad u|^{p-2} grad u per triangle; zero on
/// insulator and superconductor triangles.
struct FluxField {
  std::vector<Vec2> flux;
};

/// Factorized p=2 system for repeated solves with different traces.
class LinearP2System {
public:
  LinearP2System(const geom::Scenario& sc, const mesh::Mesh& m, bool free_variant);
  /// Nodal solution field for the given outer trace.
  std::vector<double> solve_nodal(const BoundaryTrace& trace) const;
  DiscreteSolution solve(const BoundaryTrace& trace) const;
  /// Solves K_ff x = b with homogeneous Dirichlet data; returns dof values.
  Eigen::VectorXd solve_rhs_dofs(const Eigen::VectorXd& b) const;
  const DofMap& dofs() const { return dofs_; }

private:
  const geom::Scenario* sc_;
  const mesh::Mesh* m_;
  DofMap dofs_;
  Eigen::SparseMatrix<double> K_ff_;
  Eigen::SparseMatrix<double> K_fd_;  // coupling free dofs <- outer boundary nodes
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

DiscreteSolution solve_p2(const geom::Scenario& sc, const mesh::Mesh& m, const BoundaryTrace& f,
                          bool free_variant = false);

enum class NewtonInit { Harmonic, Zero, Random };

DiscreteSolution solve_p(const geom::Scenario& sc, const mesh::Mesh& m, const BoundaryTrace& f,
                         const SolverOptions& opts = {}, NewtonInit init = NewtonInit::Harmonic,
                         unsigned rng_seed = 0, bool free_variant = false);

/// Raw energy sum over background triangles of sigma A |grad u|^p (the
/// regularization is excluded from reporting).
double energy(const DiscreteSolution& u);
/// Same sum with the (|g|^2 + eps^2)^{p/2} integrand actually minimized.
double regularized_energy(const DiscreteSolution& u);

/// Max over admissible discrete test hats of the weak Euler-Lagrange residual
/// |int sigma |grad u|^{p-2} grad u . grad phi| / ||grad phi||_{L^p}.
double el_residual(const DiscreteSolution& u);

FluxField flux_field(const DiscreteSolution& u);
/// Total weak flux through the boundary of superconductor component i.
double component_flux(const DiscreteSolution& u, int inclusion_index);

/// Replaces the (arbitrary) nodal values strictly inside insulator components
/// by the harmonic extension of their interface values. Gauge fixing for
/// reporting and for the stable gap assembly; the energy is unchanged.
void fill_insulator_interior(DiscreteSolution& u);

/// Gradient of the free-variant regularized energy at the given nodal field,
/// as a per-node vector (including the p factor). Rows of Dirichlet nodes are
/// included; callers pair it against zero-trace increments.
std::vector<double> free_energy_gradient(const geom::Scenario& sc, const mesh::Mesh& m,
                                         const std::vector<double>& nodal, double p, double eps);

Vec2 triangle_gradient(const mesh::Mesh& m, const std::vector<double>& nodal, int t);

/// Discrete H1 norm^2 of a nodal field over the whole mesh.
double h1_norm_sq(const mesh::Mesh& m, const std::vector<double>& nodal);

}  // namespace pcond::fem
