#include "oqrw/asymptotics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace oqrw {

namespace {

double real_trace(const Complex& t, double imag_tol, const char* what) {
  if (std::abs(t.imag()) > imag_tol)
    throw std::runtime_error(std::string(what) + ": trace has imaginary part " +
                             std::to_string(t.imag()));
  return t.real();
}

// sum_e B(e)*B(e) (theta(e).l) - (m.l) I, the right-hand side of the
// operator equation, assembled blockwise on the origin vertices.
BlockOperator operator_equation_rhs(const KrausFamily& K, const Vector& l, double m_dot_l) {
  BlockOperator rhs = BlockOperator::identity(K.dims);
  rhs *= Complex(-m_dot_l, 0.0);
  const auto& arcs = K.lattice->base().arcs;
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const double w = arcs[a].theta.dot(l);
    if (w == 0.0) continue;
    rhs.blocks[arcs[a].from] += Complex(w, 0.0) * (K.ops[a].adjoint() * K.ops[a]);
  }
  return rhs;
}

}  // namespace

Vector mean_vector(const KrausFamily& K, const BlockOperator& rho_inf, const Tolerances& tol) {
  const int d = K.lattice->dimension();
  Vector m = Vector::Zero(d);
  const auto& arcs = K.lattice->base().arcs;
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const Complex t = (K.ops[a] * rho_inf.blocks[arcs[a].from] * K.ops[a].adjoint()).trace();
    m += real_trace(t, tol.trace_imag, "mean_vector") * arcs[a].theta;
  }
  return m;
}

BlockOperator solve_operator_equation(const KrausFamily& K, const BlockOperator& rho_inf,
                                      const Vector& l, const Tolerances& tol) {
  const Vector m = mean_vector(K, rho_inf, tol);
  BlockOperator rhs = operator_equation_rhs(K, l, m.dot(l));
  const double hdefect = rhs.hermitian_defect();
  if (hdefect > tol.hermitian_defect)
    throw std::runtime_error("operator-equation RHS has hermiticity defect " +
                             std::to_string(hdefect));
  rhs = rhs.hermitian_part();

  const int n = K.superoperator_dim();
  const Matrix A = Matrix::Identity(n, n) - cp_superoperator(K).adjoint();
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  // Minimal-norm least-squares solution; it is orthogonal to the kernel
  // span{vec(I)}, hence traceless, which fixes the identity-shift gauge.
  BlockOperator L = unvectorize(K, svd.solve(vectorize(K, rhs)));
  L = L.hermitian_part();

  BlockOperator lhs = L;
  lhs -= cp_apply_adjoint(K, L);
  const double residual = distance(lhs, rhs);
  // The least-squares residual is the component of the RHS along the kernel
  // of I - L, i.e. along the true invariant state; a large value means the
  // supplied rho_inf is wrong or not unique.
  if (residual > tol.rhs_orthogonality)
    throw std::runtime_error(
        "operator-equation RHS is not orthogonal to the invariant state (residual " +
        std::to_string(residual) + "); the invariant state is wrong or not unique");
  if (residual > tol.operator_residual)
    throw std::runtime_error("operator-equation residual " + std::to_string(residual) +
                             " above tolerance");
  return L;
}

std::vector<BlockOperator> canonical_L(const CrystalLattice& lat,
                                       const std::vector<BlockOperator>& L_basis) {
  const int d = lat.dimension();
  if (static_cast<int>(L_basis.size()) != d)
    throw std::invalid_argument("need one solved L per basis direction");
  std::vector<BlockOperator> out;
  out.reserve(d);
  for (int i = 0; i < d; ++i) {
    BlockOperator Li = L_basis[0];
    Li *= Complex(lat.theta_matrix()(i, 0), 0.0);
    for (int j = 1; j < d; ++j) {
      BlockOperator term = L_basis[j];
      term *= Complex(lat.theta_matrix()(i, j), 0.0);
      Li += term;
    }
    out.push_back(std::move(Li));
  }
  return out;
}

RealMatrix covariance_matrix(const KrausFamily& K, const BlockOperator& rho_inf, const Vector& m,
                             const std::vector<BlockOperator>& L_canonical, const Tolerances& tol,
                             double* asymmetry) {
  const int d = K.lattice->dimension();
  if (static_cast<int>(L_canonical.size()) != d)
    throw std::invalid_argument("need one canonical L per dimension");
  const auto& arcs = K.lattice->base().arcs;

  RealMatrix C = -m * m.transpose();
  // Per-arc transported states B(e) rho_inf B(e)* shared by both sums.
  std::vector<Matrix> transported(arcs.size());
  for (std::size_t a = 0; a < arcs.size(); ++a)
    transported[a] = K.ops[a] * rho_inf.blocks[arcs[a].from] * K.ops[a].adjoint();

  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const double p = real_trace(transported[a].trace(), tol.trace_imag, "covariance_matrix");
    C += p * arcs[a].theta * arcs[a].theta.transpose();
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double cross = 0.0;
      for (std::size_t a = 0; a < arcs.size(); ++a) {
        if (arcs[a].theta[j] == 0.0) continue;
        const Complex t = (transported[a] * L_canonical[i].blocks[arcs[a].to]).trace();
        cross += 2.0 * t.real() * arcs[a].theta[j];
      }
      C(i, j) += cross;
      C(i, j) -= 2.0 * m[i] * hs_inner(rho_inf, L_canonical[j]).real();
    }
  }

  // The displayed formula polarizes the quadratic form sigma_l^2 with L on
  // one slot and theta on the other; entrywise it is asymmetric for
  // non-reversible models, and only the symmetric part is the covariance.
  // The defect is reported as a diagnostic; the Gamma-form cross-check is
  // the consistency gate.
  const double defect = (C - C.transpose()).norm();
  if (asymmetry) *asymmetry = defect;
  return 0.5 * (C + C.transpose());
}

double sigma_squared_gamma(const KrausFamily& K, const BlockOperator& rho_inf, const Vector& m,
                           const BlockOperator& L_l, const Vector& l) {
  const auto& arcs = K.lattice->base().arcs;
  const double ml = m.dot(l);
  BlockOperator gamma = BlockOperator::zero(K.dims);
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const double w = arcs[a].theta.dot(l) - ml;
    if (w == 0.0) continue;
    const Matrix& B = K.ops[a];
    gamma.blocks[arcs[a].from] +=
        Complex(w * w, 0.0) * (B.adjoint() * B) +
        Complex(2.0 * w, 0.0) * (B.adjoint() * L_l.blocks[arcs[a].to] * B);
  }
  return hs_inner(rho_inf, gamma.hermitian_part()).real();
}

double verify_poisson(const KrausFamily& K, const BlockOperator& rho, int arc, const Vector& l,
                      const BlockOperator& L_l, const Vector& m, const Tolerances& tol) {
  const auto& arcs = K.lattice->base().arcs;
  auto f = [&](const BlockOperator& state, int e) {
    return hs_inner(state, L_l).real() + arcs[e].theta.dot(l);
  };
  // Pf(rho,e) through the explicit kernel, skipping zero-probability jumps.
  double pf = 0.0;
  for (std::size_t e = 0; e < arcs.size(); ++e) {
    const Matrix jumped = K.ops[e] * rho.blocks[arcs[e].from] * K.ops[e].adjoint();
    const double p = jumped.trace().real();
    if (p < tol.prune_threshold) continue;
    BlockOperator next = BlockOperator::zero(K.dims);
    next.blocks[arcs[e].to] = jumped / p;
    pf += p * f(next, static_cast<int>(e));
  }
  const double lhs = f(rho, arc) - pf;
  return std::abs(lhs - (arcs[arc].theta.dot(l) - m.dot(l)));
}

CltParameters compute_clt_parameters(const KrausFamily& K, const InvariantStateReport& report,
                                     const Tolerances& tol) {
  if (!report.unique)
    throw std::runtime_error("hypothesis (H) violated: the invariant state is not unique "
                             "(eigenvalue-1 multiplicity " +
                             std::to_string(report.eigenvalue_one_multiplicity) + ")");
  const CrystalLattice& lat = *K.lattice;
  const int d = lat.dimension();

  CltParameters out;
  out.mean = mean_vector(K, report.state, tol);
  out.L_basis.reserve(d);
  for (int i = 0; i < d; ++i)
    out.L_basis.push_back(solve_operator_equation(K, report.state, lat.basis().col(i), tol));
  out.L_canonical = canonical_L(lat, out.L_basis);

  for (int i = 0; i < d; ++i) {
    BlockOperator lhs = out.L_basis[i];
    lhs -= cp_apply_adjoint(K, out.L_basis[i]);
    const BlockOperator rhs =
        operator_equation_rhs(K, lat.basis().col(i), out.mean.dot(lat.basis().col(i)));
    out.max_operator_residual = std::max(out.max_operator_residual, distance(lhs, rhs.hermitian_part()));
  }

  out.covariance = covariance_matrix(K, report.state, out.mean, out.L_canonical, tol,
                                     &out.covariance_asymmetry);

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(out.covariance);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::runtime_error("covariance is not positive semidefinite (min eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()) + ")");

  // Quadratic-form cross-check along e_i and e_i + e_j.
  for (int i = 0; i < d; ++i) {
    Vector ei = Vector::Zero(d);
    ei[i] = 1.0;
    const double quad = ei.dot(out.covariance * ei);
    const double gamma = sigma_squared_gamma(K, report.state, out.mean, out.L_canonical[i], ei);
    out.gamma_crosscheck_max_error = std::max(out.gamma_crosscheck_max_error, std::abs(quad - gamma));
    for (int j = i + 1; j < d; ++j) {
      Vector eij = ei;
      eij[j] = 1.0;
      BlockOperator Lij = out.L_canonical[i];
      Lij += out.L_canonical[j];
      const double quad2 = eij.dot(out.covariance * eij);
      const double gamma2 = sigma_squared_gamma(K, report.state, out.mean, Lij, eij);
      out.gamma_crosscheck_max_error =
          std::max(out.gamma_crosscheck_max_error, std::abs(quad2 - gamma2));
    }
  }
  return out;
}

HexagonalLimit HexagonalLimit::standard() {
  const double s = 1.0 / std::sqrt(2.0);
  HexagonalLimit h;
  h.theta1 = Vector(2);
  h.theta2 = Vector(2);
  h.theta1 << s, s;
  h.theta2 << -s, s;
  return h;
}

double HexagonalLimit::epsilon_squared(const Vector& t) const {
  const double a = t.dot(theta1);
  const double b = t.dot(theta2);
  return a * a + b * b - a * b;
}

double HexagonalLimit::limit_cf(const Vector& t) const {
  return std::exp(-(2.0 / 9.0) * epsilon_squared(t));
}

double hexagonal_limit_cf(const Vector& t) { return HexagonalLimit::standard().limit_cf(t); }

DualEigensystem hexagonal_dual_eigensystem(double theta1_phase, double theta2_phase) {
  const Complex z = Complex(1.0, 0.0) + std::exp(Complex(0.0, theta1_phase)) +
                    std::exp(Complex(0.0, theta2_phase));
  const double mu = std::abs(z) / 3.0;
  const Complex root = std::sqrt(Complex(4.0 * mu * mu - 3.0, 0.0));
  DualEigensystem out;
  out.mu = mu;
  const Complex base((8.0 / 9.0) * mu * mu - 1.0 / 3.0, 0.0);
  out.lambda_plus = base + (4.0 / 9.0) * mu * root;
  out.lambda_minus = base - (4.0 / 9.0) * mu * root;
  return out;
}

}  // namespace oqrw
