#include "oqrw/block_operator.hpp"

#include <stdexcept>

namespace oqrw {

BlockOperator BlockOperator::zero(const std::vector<int>& dims) {
  BlockOperator x;
  x.blocks.reserve(dims.size());
  for (int d : dims) x.blocks.push_back(Matrix::Zero(d, d));
  return x;
}

BlockOperator BlockOperator::identity(const std::vector<int>& dims) {
  BlockOperator x;
  x.blocks.reserve(dims.size());
  for (int d : dims) x.blocks.push_back(Matrix::Identity(d, d));
  return x;
}

int BlockOperator::total_dim() const {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.rows());
  return n;
}

Complex BlockOperator::trace() const {
  Complex t = 0.0;
  for (const auto& b : blocks) t += b.trace();
  return t;
}

double BlockOperator::norm() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return std::sqrt(s);
}

BlockOperator BlockOperator::adjoint() const {
  BlockOperator x;
  x.blocks.reserve(blocks.size());
  for (const auto& b : blocks) x.blocks.push_back(b.adjoint());
  return x;
}

BlockOperator BlockOperator::hermitian_part() const {
  BlockOperator x;
  x.blocks.reserve(blocks.size());
  for (const auto& b : blocks) x.blocks.push_back(0.5 * (b + b.adjoint()));
  return x;
}

double BlockOperator::hermitian_defect() const {
  double s = 0.0;
  for (const auto& b : blocks) s += (b - b.adjoint().eval()).squaredNorm();
  return std::sqrt(s);
}

double BlockOperator::min_eigenvalue() const {
  double m = 0.0;
  bool first = true;
  for (const auto& b : blocks) {
    if (b.rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.adjoint()));
    const double v = es.eigenvalues().minCoeff();
    m = first ? v : std::min(m, v);
    first = false;
  }
  return m;
}

BlockOperator BlockOperator::positive_part() const {
  BlockOperator x;
  x.blocks.reserve(blocks.size());
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    x.blocks.push_back(es.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<Complex>() *
                       es.eigenvectors().adjoint());
  }
  return x;
}

BlockOperator& BlockOperator::operator+=(const BlockOperator& o) {
  if (blocks.size() != o.blocks.size()) throw std::invalid_argument("block count mismatch");
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] += o.blocks[i];
  return *this;
}

BlockOperator& BlockOperator::operator-=(const BlockOperator& o) {
  if (blocks.size() != o.blocks.size()) throw std::invalid_argument("block count mismatch");
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] -= o.blocks[i];
  return *this;
}

BlockOperator& BlockOperator::operator*=(Complex c) {
  for (auto& b : blocks) b *= c;
  return *this;
}

BlockOperator operator+(BlockOperator a, const BlockOperator& b) { return a += b; }
BlockOperator operator-(BlockOperator a, const BlockOperator& b) { return a -= b; }
BlockOperator operator*(Complex c, BlockOperator a) { return a *= c; }

double distance(const BlockOperator& a, const BlockOperator& b) {
  BlockOperator d = a;
  d -= b;
  return d.norm();
}

Complex hs_inner(const BlockOperator& a, const BlockOperator& b) {
  if (a.blocks.size() != b.blocks.size()) throw std::invalid_argument("block count mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    s += (a.blocks[i].adjoint() * b.blocks[i]).trace();
  return s;
}

BlockOperator traceless_part(const BlockOperator& x) {
  const int n = x.total_dim();
  if (n == 0) return x;
  const Complex shift = x.trace() / static_cast<double>(n);
  BlockOperator y = x;
  for (auto& b : y.blocks) b -= shift * Matrix::Identity(b.rows(), b.cols());
  return y;
}

}  // namespace oqrw
