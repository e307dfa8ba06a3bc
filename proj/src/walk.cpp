#include "oqrw/walk.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace oqrw {

double LatticeState::total_trace() const {
  double t = 0.0;
  for (const auto& [x, b] : support) t += b.trace().real();
  return t;
}

LatticeState delta_state(const LatticeCoord& site, const BlockOperator& block) {
  LatticeState s;
  s.support.emplace(site, block);
  return s;
}

LatticeState oqrw_step(const KrausFamily& K, const LatticeState& s, const Tolerances& tol) {
  const auto& arcs = K.lattice->base().arcs;
  LatticeState out;
  out.pruned_mass = s.pruned_mass;
  for (const auto& [x, rho] : s.support) {
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      const Matrix& src = rho.blocks[arcs[a].from];
      if (src.size() == 0 || src.squaredNorm() == 0.0) continue;
      const LatticeCoord y = arc_step(*K.lattice, x, static_cast<int>(a));
      auto it = out.support.find(y);
      if (it == out.support.end())
        it = out.support.emplace(y, BlockOperator::zero(K.dims)).first;
      it->second.blocks[arcs[a].to] += K.ops[a] * src * K.ops[a].adjoint();
    }
  }
  // Prune sites below threshold, then renormalize the total trace.
  double pruned = 0.0;
  for (auto it = out.support.begin(); it != out.support.end();) {
    const double t = it->second.trace().real();
    if (t < tol.prune_threshold) {
      pruned += t;
      it = out.support.erase(it);
    } else {
      ++it;
    }
  }
  out.pruned_mass += pruned;
  const double total = out.total_trace();
  if (total > 0.0 && pruned > 0.0) {
    const Complex scale(1.0 / total, 0.0);
    for (auto& [x, b] : out.support) b *= scale;
  }
  return out;
}

std::map<LatticeCoord, double> distribution(const LatticeState& s) {
  std::map<LatticeCoord, double> p;
  for (const auto& [x, b] : s.support) p[x] = b.trace().real();
  return p;
}

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SplitMix64 trajectory_stream(std::uint64_t root_seed, std::uint64_t index) {
  // Decorrelate the per-trajectory streams by running the root through one
  // mixing round per counter value.
  SplitMix64 seeder{root_seed ^ (0xA0761D6478BD642FULL * (index + 1))};
  seeder.next();
  return SplitMix64{seeder.next()};
}

namespace {

struct ArcPlan {
  int from, to;
  Eigen::VectorXi step;
  Matrix B;
  Matrix BtB;  // B(e)*B(e); p(e) = Tr(BtB rho) on the origin block
};

double weight(const ArcPlan& arc, const Matrix& rho) {
  // Re Tr(BtB * rho) without temporaries.
  double s = 0.0;
  for (Eigen::Index i = 0; i < arc.BtB.rows(); ++i)
    for (Eigen::Index j = 0; j < arc.BtB.cols(); ++j)
      s += (arc.BtB(i, j) * rho(j, i)).real();
  return s;
}

}  // namespace

TrajectoryBatch sample_trajectories(const KrausFamily& K, const BlockOperator& initial_internal,
                                    const LatticeCoord& initial_site, int n_steps, int n_traj,
                                    std::uint64_t seed, const SampleOptions& opts,
                                    const Tolerances& tol) {
  if (n_steps < 0 || n_traj < 0) throw std::invalid_argument("negative step or trajectory count");
  const double tr = initial_internal.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) throw std::invalid_argument("initial internal state must have trace 1");
  if (initial_internal.min_eigenvalue() < -1e-10)
    throw std::invalid_argument("initial internal state must be positive semidefinite");

  const auto& arcs = K.lattice->base().arcs;
  std::vector<ArcPlan> plan;
  plan.reserve(arcs.size());
  for (std::size_t a = 0; a < arcs.size(); ++a)
    plan.push_back({arcs[a].from, arcs[a].to, K.lattice->arc_coords(static_cast<int>(a)),
                    K.ops[a], (K.ops[a].adjoint() * K.ops[a]).eval()});

  TrajectoryBatch batch;
  batch.seed = seed;
  batch.n_steps = n_steps;
  batch.final_coords.assign(n_traj, initial_site);
  if (opts.record_paths) batch.paths.assign(n_traj, {});
  if (opts.record_internal) batch.final_internal.assign(n_traj, BlockOperator{});

  std::atomic<int> failed_step{-1};

  auto run_range = [&](int lo, int hi) {
    const int d = K.lattice->dimension();
    const int n_arcs = static_cast<int>(plan.size());
    std::vector<double> weights(n_arcs);
    Matrix jump_tmp, rho_next;
    for (int t = lo; t < hi; ++t) {
      SplitMix64 rng = trajectory_stream(seed, static_cast<std::uint64_t>(t));
      // After the first jump the internal state lives on a single vertex
      // block; vertex == -1 marks the (possibly multi-block) initial state.
      int vertex = -1;
      BlockOperator full = initial_internal;
      Matrix rho;
      std::vector<std::int64_t> pos = initial_site.c;
      std::vector<LatticeCoord>* path = opts.record_paths ? &batch.paths[t] : nullptr;
      if (path) {
        path->reserve(n_steps + 1);
        path->push_back(LatticeCoord(pos));
      }
      for (int step = 0; step < n_steps; ++step) {
        double total = 0.0;
        for (int a = 0; a < n_arcs; ++a) {
          const ArcPlan& arc = plan[a];
          if (vertex >= 0 && arc.from != vertex) {
            weights[a] = 0.0;
            continue;
          }
          const Matrix& src = vertex >= 0 ? rho : full.blocks[arc.from];
          const double w = weight(arc, src);
          weights[a] = (w >= tol.prune_threshold) ? w : 0.0;
          total += weights[a];
        }
        if (total < 1e-12) {
          failed_step.store(step, std::memory_order_relaxed);
          return;
        }
        const double r = rng.uniform() * total;
        double acc = 0.0;
        int chosen = -1;
        for (int a = 0; a < n_arcs; ++a) {
          if (weights[a] <= 0.0) continue;
          acc += weights[a];
          chosen = a;
          if (acc > r) break;
        }
        const ArcPlan& arc = plan[chosen];
        const Matrix& src = vertex >= 0 ? rho : full.blocks[arc.from];
        jump_tmp.noalias() = arc.B * src;
        rho_next.noalias() = jump_tmp * arc.B.adjoint();
        rho_next *= 1.0 / weights[chosen];
        rho.swap(rho_next);
        vertex = arc.to;
        for (int i = 0; i < d; ++i) pos[i] += arc.step[i];
        if (path) path->push_back(LatticeCoord(pos));
      }
      batch.final_coords[t] = LatticeCoord(pos);
      if (opts.record_internal) {
        if (vertex >= 0) {
          BlockOperator b = BlockOperator::zero(K.dims);
          b.blocks[vertex] = rho;
          batch.final_internal[t] = std::move(b);
        } else {
          batch.final_internal[t] = full;
        }
      }
    }
  };

  const int threads = std::max(1, opts.threads);
  if (threads == 1 || n_traj < 2) {
    run_range(0, n_traj);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_traj + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(n_traj, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  if (failed_step.load() >= 0)
    throw std::runtime_error("all arc probabilities vanished at step " +
                             std::to_string(failed_step.load()));
  return batch;
}

CltSamples clt_statistic(const CrystalLattice& lat, const TrajectoryBatch& batch,
                         const Vector& m) {
  const int d = lat.dimension();
  const int n = static_cast<int>(batch.final_coords.size());
  const double scale = batch.n_steps > 0 ? 1.0 / std::sqrt(static_cast<double>(batch.n_steps)) : 0.0;
  CltSamples out;
  out.samples.resize(n, d);
  for (int t = 0; t < n; ++t) {
    const Vector x = embed(lat, batch.final_coords[t]);
    out.samples.row(t) = (scale * (x - batch.n_steps * m)).transpose();
  }
  out.empirical_mean = out.samples.colwise().mean();
  RealMatrix centered = out.samples.rowwise() - out.empirical_mean.transpose();
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  out.empirical_cov = (centered.transpose() * centered) / denom;
  return out;
}

}  // namespace oqrw
