#pragma once

#include <string>
#include <vector>

#include "pcond/fem.hpp"

namespace pcond::dn {

/// Dirichlet datum at the outer boundary nodes, optionally labeled with the
/// analytic family it was sampled from (kept for refinement-consistent
/// regeneration and CSV exports).
struct BoundaryData {
  fem::BoundaryTrace values;
  std::string label;
};

/// <Lambda_sigma f, g>: the forward solution for trace f paired against an
/// extension of g with vanishing gradient on superconductors (harmonic
/// extension; pairing is extension-independent up to solver tolerance).
double pair(const geom::Scenario& sc, const mesh::Mesh& m, const fem::BoundaryTrace& f,
            const fem::BoundaryTrace& g, const fem::SolverOptions& opts = {});

/// Pairing of an already-computed forward solution against an explicit
/// extension (nodal field with the trace of g). Used by the
/// extension-independence tests.
double pairing_against(const fem::DiscreteSolution& fbar, const std::vector<double>& gbar_nodal);

/// Free pairing <Lambda_empty f, g> with sigma == 1 and no inclusions, on the
/// same mesh.
double free_pair(const mesh::Mesh& m, const fem::BoundaryTrace& f, const fem::BoundaryTrace& g,
                 double p, const fem::SolverOptions& opts = {});

/// <(Lambda_D - Lambda_empty) f, f>. The free map uses the scenario's
/// background conductivity so that gap == 0 exactly when D is empty.
double gap(const geom::Scenario& sc, const mesh::Mesh& m, const fem::BoundaryTrace& f,
           const fem::SolverOptions& opts = {});

struct GapResult {
  double value = 0.0;
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;
  /// Free pairing <Lambda_empty f, f> (with the scenario's sigma) at the same
  /// data; the natural reference scale for |value|.
  double free_pairing = 0.0;
};

/// Factorized p=2 systems for repeated pairings on one mesh.
class P2Workspace {
public:
  P2Workspace(const geom::Scenario& sc, const mesh::Mesh& m)
      : scenario(&sc), mesh(&m), incl(sc, m, false), free(sc, m, true) {}
  const geom::Scenario* scenario;
  const mesh::Mesh* mesh;
  fem::LinearP2System incl;
  fem::LinearP2System free;
};

/// Difference-form gap assembly: instead of subtracting two nearly equal
/// energies, expands E_D(u_D) - E_0(u_0) through the Taylor identity around
/// u_0, so the result is accurate relative to its own scale even when the
/// pairings are exponentially larger than their difference (CGO data).
GapResult gap_difference_form(const geom::Scenario& sc, const mesh::Mesh& m,
                              const fem::BoundaryTrace& f, const fem::SolverOptions& opts = {},
                              const P2Workspace* ws = nullptr);

struct EstimateReport {
  double grad_u0_sq_D = 0.0;   // sigma int_D |grad u0|^2
  double gap = 0.0;            // <(Lambda_D - Lambda_empty) f, f>
  double boundary_term = 0.0;  // int_{dD} (dw/dnu) u0 dS, nu out of the annulus
  double ratio = 0.0;          // |boundary_term| / ||u0||_{H1(D)}^2
  bool estimate_i_ok = false;
  bool estimate_ii_ok = false;
};

/// p=2, superconducting-only: checks
///   int_D |grad u0|^2 <= gap <= int_D |grad u0|^2 - 2 int_{dD} (dw/dnu) u0
/// with the given relative discretization slack.
EstimateReport check_estimates_p2(const geom::Scenario& sc, const mesh::Mesh& m,
                                  const fem::BoundaryTrace& f, double slack = 0.02);

struct EllipticityReport {
  double lambda_low = 0.0;
  double lambda_high = 0.0;
  std::vector<double> ratios;
  int excluded = 0;  // near-constant members (gauge direction)
};

/// Rayleigh-type ratios <Lambda_sigma f, f> / |f|_{H^{1/2}}^2 over a family,
/// with the discrete H^{1/2} seminorm realized as the Dirichlet energy of the
/// free harmonic extension.
EllipticityReport ellipticity_report(const geom::Scenario& sc, const mesh::Mesh& m,
                                     const std::vector<fem::BoundaryTrace>& family);

/// Squared discrete H^{1/2} seminorm of a trace (free harmonic extension
/// energy at sigma == 1).
double h_half_seminorm_sq(const mesh::Mesh& m, const fem::BoundaryTrace& f);

/// CSV text of all pairings of a labeled family: columns f_id, g_id, value.
std::string pairing_matrix_csv(const geom::Scenario& sc, const mesh::Mesh& m,
                               const std::vector<BoundaryData>& family);

}  // namespace pcond::dn
