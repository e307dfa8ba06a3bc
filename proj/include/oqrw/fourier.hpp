#pragma once

#include "oqrw/walk.hpp"

namespace oqrw {

// One-step dual multiplier at momentum k:
//   X -> sum_e e^{-i<k,theta(e)>} B(e)* X B(e),
// applied blockwise (B(e)* X B(e) maps the t(e)-block of X to the o(e)-block).
// At k = 0 the identity is fixed by Kraus completeness.
struct DualSymbol {
  const KrausFamily* kraus = nullptr;

  explicit DualSymbol(const KrausFamily& K) : kraus(&K) {}
  BlockOperator apply(const Vector& k, const BlockOperator& x) const;
};

// Y_n(k): n applications of the dual multiplier to the identity.
BlockOperator dual_iterate(const KrausFamily& K, const Vector& k, int n);

// rho_hat(k) = sum_x e^{-i<k,x>} rho_x over the finite support.
BlockOperator state_fourier(const CrystalLattice& lat, const LatticeState& s, const Vector& k);

// p_hat^(n)(k) = Tr(rho_hat^(0)(k) Y_n(k)).
Complex characteristic_function(const KrausFamily& K, const LatticeState& initial,
                                const Vector& k, int n);

// Uniform grid in q on [0,2pi)^d, mapped through k = Theta q so integrands
// are trigonometric polynomials in q and the trapezoid rule is exact below
// the aliasing bound.
struct MomentumGrid {
  int points_per_dim = 1;

  std::vector<Vector> nodes(const CrystalLattice& lat) const;  // row-major over q indices
};

// Inverse transform p_x = |det Theta|^{-1} (2pi)^{-d} int e^{i<k,x>} p_hat(k) dk
// on the support box |x_i| <= radius(n, initial). Requires N > 2*radius;
// otherwise throws an aliasing error naming the needed N. Probabilities below
// 1e-12 are dropped; the largest discarded imaginary part is written to
// *imag_residue when given.
std::map<LatticeCoord, double> invert(const KrausFamily& K, const LatticeState& initial, int n,
                                      const MomentumGrid& grid,
                                      const Tolerances& tol = Tolerances::defaults(),
                                      double* imag_residue = nullptr, int threads = 1);

// p_hat^(n) evaluated at k = -t/sqrt(n); probes the CLT limit along the dual
// process at O(n) cost.
Complex scaled_cf_limit_probe(const KrausFamily& K, const LatticeState& initial,
                              const Vector& t, int n);

}  // namespace oqrw
