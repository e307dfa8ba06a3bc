#pragma once

#include "oqrw/channel.hpp"

namespace oqrw {

// m = sum_e Tr(B(e) rho_inf B(e)*) theta(e).
Vector mean_vector(const KrausFamily& K, const BlockOperator& rho_inf,
                   const Tolerances& tol = Tolerances::defaults());

// Solve (I - L*)(L_l) = sum_e B(e)*B(e) (theta(e).l) - (m.l) I for the
// minimal-Frobenius-norm Hermitian solution (which is traceless: the kernel
// of I - L* is spanned by the identity). Throws if the right-hand side is not
// orthogonal to rho_inf, which signals a wrong or non-unique invariant state.
BlockOperator solve_operator_equation(const KrausFamily& K, const BlockOperator& rho_inf,
                                      const Vector& l,
                                      const Tolerances& tol = Tolerances::defaults());

// L_{e_i} = sum_j Theta_ij L_j for the canonical directions of R^d.
std::vector<BlockOperator> canonical_L(const CrystalLattice& lat,
                                       const std::vector<BlockOperator>& L_basis);

// CLT covariance matrix. The textbook polarization is entrywise
// asymmetric for non-reversible models; the returned matrix is the symmetric
// part and the defect is written to *asymmetry when given.
RealMatrix covariance_matrix(const KrausFamily& K, const BlockOperator& rho_inf,
                             const Vector& m, const std::vector<BlockOperator>& L_canonical,
                             const Tolerances& tol = Tolerances::defaults(),
                             double* asymmetry = nullptr);

// sigma_l^2 = Tr(rho_inf Gamma_l) with
// Gamma_l = sum_e [ B(e)*B(e) (theta(e).l - m.l)^2 + 2 B(e)* L_l B(e) (theta(e).l - m.l) ].
double sigma_squared_gamma(const KrausFamily& K, const BlockOperator& rho_inf,
                           const Vector& m, const BlockOperator& L_l, const Vector& l);

// Residual |(I-P)f(rho,e) - (theta(e).l - m.l)| of the Poisson equation for
// f(rho,e) = Tr(rho L_l) + theta(e).l, evaluated through the explicit
// transition kernel; zero-probability jumps are skipped.
double verify_poisson(const KrausFamily& K, const BlockOperator& rho, int arc,
                      const Vector& l, const BlockOperator& L_l, const Vector& m,
                      const Tolerances& tol = Tolerances::defaults());

struct CltParameters {
  Vector mean;
  RealMatrix covariance;
  std::vector<BlockOperator> L_basis;      // L_{theta_i}
  std::vector<BlockOperator> L_canonical;  // L_{e_i}
  double max_operator_residual = 0.0;
  double covariance_asymmetry = 0.0;
  double gamma_crosscheck_max_error = 0.0;
};

// Full CLT pipeline. Refuses with "hypothesis (H) violated" when the
// invariant state is not unique.
CltParameters compute_clt_parameters(const KrausFamily& K, const InvariantStateReport& report,
                                     const Tolerances& tol = Tolerances::defaults());

// Closed forms for the hexagonal walk limit: eps^2(t) =
// <t,theta1>^2 + <t,theta2>^2 - <t,theta1><t,theta2> and the limiting
// characteristic function exp(-(2/9) eps^2(t)).
struct HexagonalLimit {
  Vector theta1, theta2;

  static HexagonalLimit standard();  // (1,1)/sqrt2 and (-1,1)/sqrt2
  double epsilon_squared(const Vector& t) const;
  double limit_cf(const Vector& t) const;
};

double hexagonal_limit_cf(const Vector& t);

struct DualEigensystem {
  double mu = 0.0;
  Complex lambda_plus, lambda_minus;
};

// mu = |1 + e^{i th1} + e^{i th2}|/3 and
// lambda_pm = (8/9) mu^2 - 1/3 +- (4/9) mu sqrt(4 mu^2 - 3), principal branch.
DualEigensystem hexagonal_dual_eigensystem(double theta1_phase, double theta2_phase);

}  // namespace oqrw
