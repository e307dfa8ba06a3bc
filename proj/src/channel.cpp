#include "oqrw/channel.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace oqrw {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void check_shapes(const KrausFamily& K) {
  const auto& arcs = K.lattice->base().arcs;
  if (K.ops.size() != arcs.size()) throw std::invalid_argument("one Kraus operator per arc required");
  if (K.dims.size() != K.lattice->base().vertices.size())
    throw std::invalid_argument("one internal dimension per vertex required");
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (K.ops[a].rows() != K.dims[arcs[a].to] || K.ops[a].cols() != K.dims[arcs[a].from])
      throw std::invalid_argument("B(" + arcs[a].id + ") has shape " +
                                  std::to_string(K.ops[a].rows()) + "x" +
                                  std::to_string(K.ops[a].cols()) + ", expected " +
                                  std::to_string(K.dims[arcs[a].to]) + "x" +
                                  std::to_string(K.dims[arcs[a].from]));
  }
}

void check_block_shape(const KrausFamily& K, const BlockOperator& x, const char* what) {
  if (x.blocks.size() != K.dims.size())
    throw std::invalid_argument(std::string(what) + ": block count mismatch");
  for (std::size_t u = 0; u < K.dims.size(); ++u) {
    if (x.blocks[u].rows() != K.dims[u] || x.blocks[u].cols() != K.dims[u])
      throw std::invalid_argument(std::string(what) + ": block at vertex " +
                                  K.lattice->base().vertices[u] + " has wrong shape");
  }
}

}  // namespace

int KrausFamily::total_dim() const {
  int n = 0;
  for (int d : dims) n += d;
  return n;
}

int KrausFamily::superoperator_dim() const {
  int n = 0;
  for (int d : dims) n += d * d;
  return n;
}

std::vector<Violation> validate_kraus(const KrausFamily& K, const Tolerances& tol) {
  check_shapes(K);
  std::vector<Violation> out;
  const BaseGraph& g = K.lattice->base();
  for (std::size_t u = 0; u < g.vertices.size(); ++u) {
    Matrix acc = Matrix::Zero(K.dims[u], K.dims[u]);
    for (int a : g.arcs_from(static_cast<int>(u))) acc += K.ops[a].adjoint() * K.ops[a];
    const double defect = (acc - Matrix::Identity(K.dims[u], K.dims[u])).norm();
    if (defect > tol.kraus_completeness)
      out.push_back({Violation::Severity::error, g.vertices[u],
                     "completeness defect " + std::to_string(defect) + " at vertex " + g.vertices[u]});
  }
  return out;
}

BlockOperator cp_apply(const KrausFamily& K, const BlockOperator& rho) {
  check_block_shape(K, rho, "cp_apply");
  BlockOperator out = BlockOperator::zero(K.dims);
  const auto& arcs = K.lattice->base().arcs;
  for (std::size_t a = 0; a < arcs.size(); ++a)
    out.blocks[arcs[a].to] += K.ops[a] * rho.blocks[arcs[a].from] * K.ops[a].adjoint();
  return out;
}

BlockOperator cp_apply_adjoint(const KrausFamily& K, const BlockOperator& x) {
  check_block_shape(K, x, "cp_apply_adjoint");
  BlockOperator out = BlockOperator::zero(K.dims);
  const auto& arcs = K.lattice->base().arcs;
  for (std::size_t a = 0; a < arcs.size(); ++a)
    out.blocks[arcs[a].from] += K.ops[a].adjoint() * x.blocks[arcs[a].to] * K.ops[a];
  return out;
}

Matrix vectorize(const KrausFamily& K, const BlockOperator& x) {
  Matrix v(K.superoperator_dim(), 1);
  int off = 0;
  for (std::size_t u = 0; u < K.dims.size(); ++u) {
    const int d = K.dims[u];
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < d; ++r) v(off + c * d + r, 0) = x.blocks[u](r, c);
    off += d * d;
  }
  return v;
}

BlockOperator unvectorize(const KrausFamily& K, const Matrix& v) {
  BlockOperator x = BlockOperator::zero(K.dims);
  int off = 0;
  for (std::size_t u = 0; u < K.dims.size(); ++u) {
    const int d = K.dims[u];
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < d; ++r) x.blocks[u](r, c) = v(off + c * d + r, 0);
    off += d * d;
  }
  return x;
}

Matrix cp_superoperator(const KrausFamily& K) {
  check_shapes(K);
  const int n = K.superoperator_dim();
  std::vector<int> off(K.dims.size() + 1, 0);
  for (std::size_t u = 0; u < K.dims.size(); ++u) off[u + 1] = off[u] + K.dims[u] * K.dims[u];
  Matrix M = Matrix::Zero(n, n);
  const auto& arcs = K.lattice->base().arcs;
  // Column stacking: vec(B X B*) = (conj(B) (x) B) vec(X).
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const Matrix k = kron(K.ops[a].conjugate(), K.ops[a]);
    M.block(off[arcs[a].to], off[arcs[a].from], k.rows(), k.cols()) += k;
  }
  return M;
}

BlockOperator cesaro_invariant_state(const KrausFamily& K, const BlockOperator& start,
                                     const Tolerances& tol) {
  BlockOperator x = start;
  double step = 0.0;
  for (std::size_t it = 0; it < tol.cesaro_budget; ++it) {
    const BlockOperator lx = cp_apply(K, x);
    BlockOperator next = 0.5 * (lx + cp_apply(K, lx));
    step = distance(next, x);
    x = std::move(next);
    if (step <= tol.cesaro_tol) {
      x = x.hermitian_part();
      const double tr = x.trace().real();
      if (std::abs(tr) > 1e-14) x *= Complex(1.0 / tr, 0.0);
      return x;
    }
  }
  throw std::runtime_error("ergodic averaging did not converge within " +
                           std::to_string(tol.cesaro_budget) +
                           " steps; last increment " + std::to_string(step));
}

InvariantStateReport invariant_state(const KrausFamily& K, const Tolerances& tol) {
  const Matrix M = cp_superoperator(K);
  Eigen::ComplexEigenSolver<Matrix> es(M);
  if (es.info() != Eigen::Success) throw std::runtime_error("superoperator eigen-solve failed");

  int multiplicity = 0;
  int best = -1;
  double best_dist = 1e300;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double dist = std::abs(es.eigenvalues()[i] - Complex(1.0, 0.0));
    if (dist <= tol.eigenvalue_one) ++multiplicity;
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(i);
    }
  }

  InvariantStateReport report;
  report.eigenvalue_one_multiplicity = multiplicity;
  report.unique = (multiplicity == 1);

  if (report.unique) {
    BlockOperator rho = unvectorize(K, es.eigenvectors().col(best));
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12) throw std::runtime_error("invariant eigenvector has vanishing trace");
    rho *= 1.0 / tr;
    rho = rho.hermitian_part().positive_part();
    rho *= Complex(1.0 / rho.trace().real(), 0.0);
    report.state = std::move(rho);
    report.residual = distance(cp_apply(K, report.state), report.state);
    if (report.residual > tol.invariant_residual) {
      // Eigenvector was too noisy; fall back to the ergodic average.
      report.state = cesaro_invariant_state(K, report.state, tol);
      report.residual = distance(cp_apply(K, report.state), report.state);
      if (report.residual > tol.invariant_residual)
        throw std::runtime_error("invariant state residual " + std::to_string(report.residual) +
                                 " above tolerance");
    }
  } else {
    // Degenerate fixed space: report the ergodic limit from the maximally
    // mixed start along with the multiplicity.
    BlockOperator mixed = BlockOperator::identity(K.dims);
    mixed *= Complex(1.0 / K.total_dim(), 0.0);
    report.state = cesaro_invariant_state(K, mixed, tol);
    report.residual = distance(cp_apply(K, report.state), report.state);
  }
  return report;
}

std::pair<RealMatrix, RealMatrix> stochastic_matrices(const KrausFamily& K, int u, int v,
                                                      const Tolerances& tol) {
  check_shapes(K);
  const BaseGraph& g = K.lattice->base();
  if (u < 0 || v < 0 || u >= static_cast<int>(g.vertices.size()) ||
      v >= static_cast<int>(g.vertices.size()) || u == v)
    throw std::invalid_argument("stochastic_matrices needs two distinct vertices");
  const int n = K.dims[u];
  if (K.dims[v] != n)
    throw std::invalid_argument("stochastic_matrices: internal dimensions differ");

  auto unitary_from_columns = [&](int from, int to) {
    const auto arcs = g.arcs_from(from);
    if (static_cast<int>(arcs.size()) != n)
      throw std::invalid_argument("vertex " + g.vertices[from] + " must have exactly " +
                                  std::to_string(n) + " outgoing arcs");
    Matrix U = Matrix::Zero(n, n);
    std::vector<bool> used(n, false);
    for (int a : arcs) {
      if (g.arcs[a].to != to)
        throw std::invalid_argument("arc " + g.arcs[a].id + " does not go to vertex " +
                                    g.vertices[to]);
      const Matrix& B = K.ops[a];
      int col = -1;
      for (int j = 0; j < n; ++j) {
        if (B.col(j).norm() > 1e-12) {
          if (col >= 0)
            throw std::invalid_argument("B(" + g.arcs[a].id + ") is not a single column slice");
          col = j;
        }
      }
      if (col < 0) throw std::invalid_argument("B(" + g.arcs[a].id + ") is zero");
      if (used[col])
        throw std::invalid_argument("two arcs out of " + g.vertices[from] +
                                    " occupy the same unitary column");
      used[col] = true;
      U.col(col) = B.col(col);
    }
    if ((U.adjoint() * U - Matrix::Identity(n, n)).norm() > tol.unitary_defect)
      throw std::invalid_argument("column slices out of " + g.vertices[from] +
                                  " do not assemble into a unitary");
    return U;
  };

  const Matrix U = unitary_from_columns(u, v);
  const Matrix V = unitary_from_columns(v, u);
  RealMatrix Pu(n, n), Pv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Pu(i, j) = std::norm(U(j, i));
      Pv(i, j) = std::norm(V(j, i));
    }
  return {Pu, Pv};
}

bool is_irreducible(const RealMatrix& P, const Tolerances& tol) {
  const int n = static_cast<int>(P.rows());
  if (P.cols() != n) throw std::invalid_argument("stochastic matrix must be square");
  for (int i = 0; i < n; ++i) {
    if (std::abs(P.row(i).sum() - 1.0) > tol.stochastic_row)
      throw std::invalid_argument("row " + std::to_string(i) + " does not sum to 1");
  }
  if (n <= 1) return true;

  auto reaches_all = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j) {
        const double w = transpose ? P(j, i) : P(i, j);
        if (w > tol.irreducible_edge && !seen[j]) {
          seen[j] = true;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

}  // namespace oqrw
