#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace oqrw {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Element of the direct sum over base vertices: one square complex block per
// vertex of G0. Internal states rho, the operator-equation solutions L_l and
// the Gamma_l forms all live here.
struct BlockOperator {
  std::vector<Matrix> blocks;

  BlockOperator() = default;
  explicit BlockOperator(std::vector<Matrix> b) : blocks(std::move(b)) {}

  static BlockOperator zero(const std::vector<int>& dims);
  static BlockOperator identity(const std::vector<int>& dims);

  std::size_t num_blocks() const { return blocks.size(); }
  int total_dim() const;

  Complex trace() const;
  double norm() const;  // Frobenius over all blocks
  BlockOperator adjoint() const;
  BlockOperator hermitian_part() const;
  double hermitian_defect() const;  // ||X - X*||_F
  double min_eigenvalue() const;    // over the Hermitian part of every block
  // Clamp negative eigenvalues of the Hermitian part to zero, blockwise.
  BlockOperator positive_part() const;

  BlockOperator& operator+=(const BlockOperator& o);
  BlockOperator& operator-=(const BlockOperator& o);
  BlockOperator& operator*=(Complex c);
};

BlockOperator operator+(BlockOperator a, const BlockOperator& b);
BlockOperator operator-(BlockOperator a, const BlockOperator& b);
BlockOperator operator*(Complex c, BlockOperator a);

// Frobenius distance.
double distance(const BlockOperator& a, const BlockOperator& b);
// Hilbert-Schmidt inner product Tr(a* b).
Complex hs_inner(const BlockOperator& a, const BlockOperator& b);
// Subtract (Tr X / dim) I; removes the identity-shift gauge of the L_l's.
BlockOperator traceless_part(const BlockOperator& x);

}  // namespace oqrw
