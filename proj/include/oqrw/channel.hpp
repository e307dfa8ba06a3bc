#pragma once

#include <memory>
#include <utility>

#include "oqrw/block_operator.hpp"
#include "oqrw/lattice.hpp"
#include "oqrw/tolerances.hpp"

namespace oqrw {

// Per-arc Kraus operators B(e): H_{o(e)} -> H_{t(e)} over a crystal lattice,
// satisfying per-vertex completeness sum_{o(e)=u} B(e)*B(e) = I_{H_u}.
struct KrausFamily {
  std::shared_ptr<const CrystalLattice> lattice;
  std::vector<int> dims;    // internal dimension per vertex
  std::vector<Matrix> ops;  // B(e) per arc, shape dims[t(e)] x dims[o(e)]

  int total_dim() const;
  // Dimension of the vectorized block space, sum of dims[u]^2.
  int superoperator_dim() const;
};

std::vector<Violation> validate_kraus(const KrausFamily& K,
                                      const Tolerances& tol = Tolerances::defaults());

// Internal CP map L(rho): block u of the result is
// sum_{t(e)=u} B(e) rho_{o(e)} B(e)*.
BlockOperator cp_apply(const KrausFamily& K, const BlockOperator& rho);

// Adjoint map L*(X): block u is sum_{o(e)=u} B(e)* X_{t(e)} B(e).
BlockOperator cp_apply_adjoint(const KrausFamily& K, const BlockOperator& x);

// Column-stacked matrix of the CP map on the block space. Layout: blocks in
// vertex order, vec index = offset[u] + col*dims[u] + row.
Matrix cp_superoperator(const KrausFamily& K);
Matrix vectorize(const KrausFamily& K, const BlockOperator& x);
BlockOperator unvectorize(const KrausFamily& K, const Matrix& v);

struct InvariantStateReport {
  BlockOperator state;  // Hermitian, positive semidefinite, trace 1
  bool unique = false;
  int eigenvalue_one_multiplicity = 0;
  double residual = 0.0;  // ||L(state) - state||_F
};

// Fixed point of the internal CP map via the eigen-decomposition of the
// vectorized superoperator. When the eigenvalue-1 space is degenerate the
// state is the ergodic limit from the maximally mixed start.
InvariantStateReport invariant_state(const KrausFamily& K,
                                     const Tolerances& tol = Tolerances::defaults());

// Ergodic-average fallback and test oracle: power iteration of the averaged
// map (L + L^2)/2, which has the same fixed points as L, converges to the
// same time-average limit, and kills the period-2 oscillation of bipartite
// models. Throws if the budget is exhausted, carrying the last residual.
BlockOperator cesaro_invariant_state(const KrausFamily& K, const BlockOperator& start,
                                     const Tolerances& tol = Tolerances::defaults());

// The row-stochastic matrices P_u, P_v of the two-vertex unitary-column
// families: each B(e) out of u must be a single nonzero column slice of a
// unitary U. P_u[i][j] = |u_{ji}|^2. Throws if the family is not of this
// shape.
std::pair<RealMatrix, RealMatrix> stochastic_matrices(
    const KrausFamily& K, int u, int v, const Tolerances& tol = Tolerances::defaults());

// True iff the directed graph with edge i->j whenever P_ij exceeds the edge
// threshold is strongly connected. Throws on non-stochastic input.
bool is_irreducible(const RealMatrix& P, const Tolerances& tol = Tolerances::defaults());

}  // namespace oqrw
