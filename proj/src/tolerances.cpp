#include "oqrw/tolerances.hpp"

#include <cstdlib>
#include <string>

namespace oqrw {

Tolerances Tolerances::strict() {
  Tolerances t;
  t.theta_snap = 1e-11;
  t.kraus_completeness = 1e-11;
  t.invariant_residual = 1e-11;
  t.operator_residual = 1e-10;
  t.covariance_asymmetry = 1e-9;
  t.unitary_defect = 1e-11;
  return t;
}

Tolerances Tolerances::from_env() {
  const char* p = std::getenv("OQRW_TOLERANCE_PROFILE");
  if (p && std::string(p) == "strict") return strict();
  return defaults();
}

}  // namespace oqrw
