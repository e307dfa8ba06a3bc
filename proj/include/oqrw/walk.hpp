#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "oqrw/channel.hpp"

namespace oqrw {

// Finitely supported block state: coordinate -> positive block operator,
// total trace 1. Sparse by construction; pruning keeps it that way and the
// removed mass is tracked as a diagnostic.
struct LatticeState {
  std::map<LatticeCoord, BlockOperator> support;
  double pruned_mass = 0.0;

  double total_trace() const;
};

LatticeState delta_state(const LatticeCoord& site, const BlockOperator& block);

// One application of the OQRW map: block u at x receives
// sum_{t(e)=u} B(e) rho_{(x - theta(e), o(e))} B(e)*.
// Sites whose trace falls below the prune threshold are dropped and the total
// trace renormalized to 1.
LatticeState oqrw_step(const KrausFamily& K, const LatticeState& s,
                       const Tolerances& tol = Tolerances::defaults());

// p(x) = sum_u Tr rho_{(x,u)}.
std::map<LatticeCoord, double> distribution(const LatticeState& s);

// SplitMix64; cheap, portable, and splittable. Per-trajectory streams are
// derived from the root seed by a counter so parallel and serial runs agree
// bit for bit.
struct SplitMix64 {
  std::uint64_t state = 0;
  std::uint64_t next();
  double uniform();  // in [0,1)
};
SplitMix64 trajectory_stream(std::uint64_t root_seed, std::uint64_t index);

struct SampleOptions {
  int threads = 1;
  bool record_paths = false;
  bool record_internal = false;
};

struct TrajectoryBatch {
  std::vector<LatticeCoord> final_coords;           // per trajectory
  std::vector<std::vector<LatticeCoord>> paths;     // when record_paths
  std::vector<BlockOperator> final_internal;        // when record_internal
  std::uint64_t seed = 0;
  int n_steps = 0;
};

// Quantum trajectory chain: from (rho, x) jump along arc e with probability
// p(e) = Tr(B(e) rho B(e)*) to (B(e) rho B(e)*/p(e), x + theta(e)). Arcs with
// p(e) below the prune threshold are never selected. Throws if every arc
// probability collapses, naming the step.
TrajectoryBatch sample_trajectories(const KrausFamily& K, const BlockOperator& initial_internal,
                                    const LatticeCoord& initial_site, int n_steps, int n_traj,
                                    std::uint64_t seed, const SampleOptions& opts = {},
                                    const Tolerances& tol = Tolerances::defaults());

struct CltSamples {
  RealMatrix samples;  // n_traj x d rows of (X_n - n m)/sqrt(n), embedded
  Vector empirical_mean;
  RealMatrix empirical_cov;
};

CltSamples clt_statistic(const CrystalLattice& lat, const TrajectoryBatch& batch,
                         const Vector& m);

}  // namespace oqrw
