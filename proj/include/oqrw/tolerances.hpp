#pragma once

#include <cstddef>

namespace oqrw {

// Central tolerance record. Every numerical gate in the library reads from
// one of these instead of a local constant, so a run is reproducible from the
// profile name alone. OQRW_TOLERANCE_PROFILE=default|strict selects a profile
// at CLI startup.
struct Tolerances {
  double theta_snap = 1e-9;           // snap arc translations to integer basis coords
  double kraus_completeness = 1e-10;  // per-vertex completeness defect (Frobenius)
  double invariant_residual = 1e-10;  // ||L(rho_inf) - rho_inf||_F
  double eigenvalue_one = 1e-8;       // |lambda - 1| window when counting fixed points
  double cesaro_tol = 1e-12;          // averaged-iteration stopping tolerance
  std::size_t cesaro_budget = 100000; // averaged-iteration step budget
  double stochastic_row = 1e-10;      // row-sum defect for stochastic matrices
  double irreducible_edge = 1e-12;    // P_ij > threshold counts as a directed edge
  double rhs_orthogonality = 1e-8;    // operator-equation solvability check
  double hermitian_defect = 1e-10;    // RHS hermiticity gate before solving
  double operator_residual = 1e-9;    // (I - L*)(L_l) = RHS residual
  double covariance_asymmetry = 1e-8; // covariance symmetrization defect gate
  double trace_imag = 1e-12;          // imaginary part allowed when taking real traces
  double prune_threshold = 1e-15;     // lattice-state block trace prune
  double unitary_defect = 1e-10;      // ||U*U - I|| for unitary inputs

  static Tolerances defaults() { return {}; }
  static Tolerances strict();
  // Reads OQRW_TOLERANCE_PROFILE; unknown values fall back to defaults.
  static Tolerances from_env();
};

}  // namespace oqrw
