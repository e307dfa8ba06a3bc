#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "oqrw/block_operator.hpp"
#include "oqrw/tolerances.hpp"

namespace oqrw {

// Arc of the finite base graph G0. `reverse` indexes the arc with origin and
// terminal swapped; theta is the translation label in R^d.
struct Arc {
  std::string id;
  int from = -1;
  int to = -1;
  int reverse = -1;
  Vector theta;
};

struct BaseGraph {
  std::vector<std::string> vertices;
  std::vector<Arc> arcs;

  int vertex_index(const std::string& id) const;  // -1 if absent
  int arc_index(const std::string& id) const;
  std::vector<int> arcs_from(int vertex) const;
};

// Integer coordinates of a lattice point in the {theta_1..theta_d} basis.
// Walk positions stay integral; embedding to R^d happens only on output.
struct LatticeCoord {
  std::vector<std::int64_t> c;

  LatticeCoord() = default;
  explicit LatticeCoord(std::vector<std::int64_t> v) : c(std::move(v)) {}
  static LatticeCoord origin(int d) { return LatticeCoord(std::vector<std::int64_t>(d, 0)); }

  int dim() const { return static_cast<int>(c.size()); }
  std::int64_t operator[](int i) const { return c[i]; }
  std::int64_t& operator[](int i) { return c[i]; }

  friend bool operator==(const LatticeCoord& a, const LatticeCoord& b) { return a.c == b.c; }
  friend bool operator!=(const LatticeCoord& a, const LatticeCoord& b) { return a.c != b.c; }
  friend bool operator<(const LatticeCoord& a, const LatticeCoord& b) { return a.c < b.c; }

  std::string to_string() const;
};

struct Violation {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string subject;  // arc / vertex / basis element the check failed on
  std::string message;
};

bool has_errors(const std::vector<Violation>& v);

// Crystal lattice: base graph, per-arc translation vectors, the generating
// basis theta_1..theta_d (stored as matrix columns) and the matrix
// Theta = ([theta_1 ... theta_d]^{-1})^T used for coordinate changes and for
// the Fourier domain Theta(T^d).
class CrystalLattice {
 public:
  CrystalLattice(BaseGraph base, RealMatrix basis_columns);

  const BaseGraph& base() const { return base_; }
  int dimension() const { return static_cast<int>(basis_.cols()); }
  const RealMatrix& basis() const { return basis_; }  // column i = theta_{i+1}
  bool basis_invertible() const { return basis_invertible_; }
  const RealMatrix& theta_matrix() const { return Theta_; }
  double det_theta() const { return det_theta_; }

  const Vector& arc_theta(int arc) const { return base_.arcs[arc].theta; }
  // Integer coordinates of theta(e) in the basis; only meaningful for arcs
  // whose label snapped within the tolerance (see validate_lattice).
  bool arc_snapped(int arc) const { return snapped_[arc]; }
  const Eigen::VectorXi& arc_coords(int arc) const;

  // Largest |coordinate| over all arcs; bounds the support growth per step.
  int max_step_radius() const;

 private:
  BaseGraph base_;
  RealMatrix basis_;
  RealMatrix Theta_;
  double det_theta_ = 0.0;
  bool basis_invertible_ = false;
  std::vector<Eigen::VectorXi> coords_;
  std::vector<bool> snapped_;
  double snap_tol_;
};

// Checks every structural and numeric invariant; violations are data, not
// failures. Pairwise linear dependence between distinct non-reverse arc
// labels is reported as a warning.
std::vector<Violation> validate_lattice(const CrystalLattice& lat,
                                        const Tolerances& tol = Tolerances::defaults());

// Sum_i x_i theta_i = (Theta^{-1})^T x.
Vector embed(const CrystalLattice& lat, const LatticeCoord& x);

// x plus the integer coordinates of theta(e).
LatticeCoord arc_step(const CrystalLattice& lat, const LatticeCoord& x, int arc);

}  // namespace oqrw
