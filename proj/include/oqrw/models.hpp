#pragma once

#include <filesystem>
#include <string>

#include "oqrw/walk.hpp"

namespace oqrw {

// A loadable model: lattice + Kraus family + initial state. The unitary-pair
// shorthand of the two-vertex hexagonal construction keeps U and V so that a
// save/load round trip is lossless.
struct ModelSpec {
  enum class KrausMode { explicit_ops, unitary_pair };

  std::string name;
  std::shared_ptr<const CrystalLattice> lattice;
  KrausFamily kraus;
  LatticeCoord initial_site;
  BlockOperator initial_block;
  KrausMode mode = KrausMode::explicit_ops;
  Matrix U, V;  // populated when mode == unitary_pair

  LatticeState initial_state() const { return delta_state(initial_site, initial_block); }
};

bool operator==(const ModelSpec& a, const ModelSpec& b);

// (1/3) [[-1,2,2],[2,-1,2],[2,2,-1]].
Matrix grover_unitary();
// 2x2 Hadamard block plus a fixed third direction.
Matrix hadamard3_unitary();

// Two-vertex hexagonal lattice with theta(e1)=(1,1)/sqrt2, theta(e2)=(-1,1)/sqrt2,
// theta(e3)=0 and the six column-slice Kraus operators B(e_i)=U_i, B(er_i)=V_i.
// Default initial state ((1/6)I (+) (1/6)I) at the origin. Throws on
// non-unitary input.
ModelSpec hexagonal_model(const Matrix& U, const Matrix& V,
                          const Tolerances& tol = Tolerances::defaults());

// Z^d: one base vertex, arc pairs +-e_i with the given operators
// (B(+e_i), B(-e_i)). Theta is the identity. Initial state is maximally mixed
// at the origin. Throws if completeness fails.
ModelSpec integer_lattice_model(const std::vector<std::pair<Matrix, Matrix>>& step_ops,
                                const std::string& name = "integer-lattice",
                                const Tolerances& tol = Tolerances::defaults());

// Models referenced by name on the CLI: grover-hexagonal, ug-uh, uh-uh,
// ug-identity, z1-biased-07. Throws on unknown names.
ModelSpec builtin_model(const std::string& name,
                        const Tolerances& tol = Tolerances::defaults());
bool is_builtin_model(const std::string& name);

// JSON model files. Schema violations throw std::runtime_error whose message
// starts with the JSON-pointer-style location of the offending field; unknown
// fields are rejected.
ModelSpec load_model(const std::filesystem::path& path,
                     const Tolerances& tol = Tolerances::defaults());
void save_model(const ModelSpec& spec, const std::filesystem::path& path);

}  // namespace oqrw
