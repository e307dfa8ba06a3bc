#include "oqrw/lattice.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oqrw {

int BaseGraph::vertex_index(const std::string& id) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == id) return static_cast<int>(i);
  return -1;
}

int BaseGraph::arc_index(const std::string& id) const {
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (arcs[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<int> BaseGraph::arcs_from(int vertex) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (arcs[i].from == vertex) out.push_back(static_cast<int>(i));
  return out;
}

std::string LatticeCoord::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) os << ',';
    os << c[i];
  }
  os << ')';
  return os.str();
}

bool has_errors(const std::vector<Violation>& v) {
  for (const auto& x : v)
    if (x.severity == Violation::Severity::error) return true;
  return false;
}

CrystalLattice::CrystalLattice(BaseGraph base, RealMatrix basis_columns)
    : base_(std::move(base)), basis_(std::move(basis_columns)) {
  const Tolerances tol;
  snap_tol_ = tol.theta_snap;
  const int d = static_cast<int>(basis_.cols());
  if (basis_.rows() != d) throw std::invalid_argument("lattice basis must be square");

  Eigen::FullPivLU<RealMatrix> lu(basis_);
  basis_invertible_ = lu.isInvertible();
  if (basis_invertible_) {
    const RealMatrix inv = lu.inverse();
    Theta_ = inv.transpose();
    det_theta_ = Theta_.determinant();
  } else {
    Theta_ = RealMatrix::Zero(d, d);
  }

  coords_.resize(base_.arcs.size());
  snapped_.assign(base_.arcs.size(), false);
  for (std::size_t a = 0; a < base_.arcs.size(); ++a) {
    const Vector& th = base_.arcs[a].theta;
    coords_[a] = Eigen::VectorXi::Zero(d);
    if (!basis_invertible_ || th.size() != d) continue;
    const Vector raw = basis_.fullPivLu().solve(th);
    bool ok = true;
    Eigen::VectorXi snapped(d);
    for (int i = 0; i < d; ++i) {
      const double r = std::round(raw[i]);
      if (std::abs(raw[i] - r) > snap_tol_) ok = false;
      snapped[i] = static_cast<int>(r);
    }
    if (ok) {
      coords_[a] = snapped;
      snapped_[a] = true;
    }
  }
}

const Eigen::VectorXi& CrystalLattice::arc_coords(int arc) const {
  if (!snapped_[arc])
    throw std::runtime_error("arc " + base_.arcs[arc].id +
                             " has no integer coordinates in the lattice basis");
  return coords_[arc];
}

int CrystalLattice::max_step_radius() const {
  int r = 0;
  for (std::size_t a = 0; a < base_.arcs.size(); ++a) {
    if (!snapped_[a]) continue;
    for (int i = 0; i < coords_[a].size(); ++i) r = std::max(r, std::abs(coords_[a][i]));
  }
  return r;
}

std::vector<Violation> validate_lattice(const CrystalLattice& lat, const Tolerances& tol) {
  std::vector<Violation> out;
  const BaseGraph& g = lat.base();
  const int d = lat.dimension();
  auto err = [&out](const std::string& subject, const std::string& msg) {
    out.push_back({Violation::Severity::error, subject, msg});
  };

  const int n_arcs = static_cast<int>(g.arcs.size());
  for (int a = 0; a < n_arcs; ++a) {
    const Arc& e = g.arcs[a];
    if (e.from < 0 || e.from >= static_cast<int>(g.vertices.size()) || e.to < 0 ||
        e.to >= static_cast<int>(g.vertices.size())) {
      err(e.id, "arc endpoints out of range");
      continue;
    }
    if (e.reverse < 0 || e.reverse >= n_arcs) {
      err(e.id, "reverse arc index out of range");
      continue;
    }
    const Arc& r = g.arcs[e.reverse];
    if (r.reverse != a) err(e.id, "involution is not self-inverse: reverse of " + r.id + " is not " + e.id);
    if (r.from != e.to || r.to != e.from)
      err(e.id, "reverse arc " + r.id + " does not swap origin and terminal");
    if (e.theta.size() != d) {
      err(e.id, "translation vector has wrong dimension");
      continue;
    }
    // Exact negation of the stored components, not within tolerance; each
    // involution pair is checked once.
    if (a <= e.reverse && r.theta.size() == d) {
      bool exact = true;
      for (int i = 0; i < d; ++i)
        if (r.theta[i] != -e.theta[i]) exact = false;
      if (!exact) err(r.id, "theta(" + r.id + ") is not the exact negation of theta(" + e.id + ")");
    }
  }

  for (std::size_t u = 0; u < g.vertices.size(); ++u) {
    if (g.arcs_from(static_cast<int>(u)).empty())
      err(g.vertices[u], "vertex has out-degree 0");
  }

  if (!lat.basis_invertible()) {
    err("basis", "basis vectors are linearly dependent");
    return out;
  }

  // Theta = (basis^{-1})^T, checked through the canonical-basis relation
  // e_i = sum_j Theta_ij theta_j.
  const RealMatrix recon = lat.theta_matrix() * lat.basis().transpose();
  if ((recon - RealMatrix::Identity(d, d)).norm() > 1e-12)
    err("basis", "Theta is not the inverse-transpose of the basis matrix");

  for (int a = 0; a < n_arcs; ++a) {
    if (!lat.arc_snapped(a))
      err(g.arcs[a].id, "translation vector does not have integer coordinates in the basis (snap tolerance " +
                            std::to_string(tol.theta_snap) + ")");
  }

  // Pairwise linear independence between distinct non-reverse nonzero labels;
  // the construction assumes it but no downstream formula is known to break,
  // is a warning.
  for (int a = 0; a < n_arcs; ++a) {
    for (int b = a + 1; b < n_arcs; ++b) {
      if (g.arcs[a].reverse == b) continue;
      const Vector& x = g.arcs[a].theta;
      const Vector& y = g.arcs[b].theta;
      if (x.size() != d || y.size() != d) continue;
      const double nx = x.norm(), ny = y.norm();
      if (nx < 1e-14 || ny < 1e-14) continue;
      const RealMatrix pair = (RealMatrix(d, 2) << x, y).finished();
      Eigen::JacobiSVD<RealMatrix> svd(pair);
      if (svd.singularValues().size() < 2 || svd.singularValues()[1] < 1e-12 * nx) {
        out.push_back({Violation::Severity::warning, g.arcs[a].id,
                       "theta(" + g.arcs[a].id + ") and theta(" + g.arcs[b].id +
                           ") are linearly dependent but not mutually reverse"});
      }
    }
  }
  return out;
}

Vector embed(const CrystalLattice& lat, const LatticeCoord& x) {
  const int d = lat.dimension();
  if (x.dim() != d) throw std::invalid_argument("coordinate dimension mismatch");
  Vector v = Vector::Zero(d);
  for (int i = 0; i < d; ++i) v += static_cast<double>(x[i]) * lat.basis().col(i);
  return v;
}

LatticeCoord arc_step(const CrystalLattice& lat, const LatticeCoord& x, int arc) {
  const Eigen::VectorXi& dx = lat.arc_coords(arc);
  LatticeCoord y = x;
  for (int i = 0; i < dx.size(); ++i) y[i] += dx[i];
  return y;
}

}  // namespace oqrw
