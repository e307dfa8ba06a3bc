#include "oqrw/fourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace oqrw {

BlockOperator DualSymbol::apply(const Vector& k, const BlockOperator& x) const {
  const KrausFamily& K = *kraus;
  const auto& arcs = K.lattice->base().arcs;
  BlockOperator out = BlockOperator::zero(K.dims);
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const Complex phase = std::exp(Complex(0.0, -k.dot(arcs[a].theta)));
    out.blocks[arcs[a].from] += phase * (K.ops[a].adjoint() * x.blocks[arcs[a].to] * K.ops[a]);
  }
  return out;
}

BlockOperator dual_iterate(const KrausFamily& K, const Vector& k, int n) {
  if (n < 0) throw std::invalid_argument("negative step count");
  const DualSymbol symbol(K);
  BlockOperator y = BlockOperator::identity(K.dims);
  for (int i = 0; i < n; ++i) y = symbol.apply(k, y);
  return y;
}

BlockOperator state_fourier(const CrystalLattice& lat, const LatticeState& s, const Vector& k) {
  BlockOperator out;
  bool first = true;
  for (const auto& [x, b] : s.support) {
    const Complex phase = std::exp(Complex(0.0, -k.dot(embed(lat, x))));
    if (first) {
      out = b;
      out *= phase;
      first = false;
    } else {
      BlockOperator term = b;
      term *= phase;
      out += term;
    }
  }
  if (first) throw std::invalid_argument("state has empty support");
  return out;
}

Complex characteristic_function(const KrausFamily& K, const LatticeState& initial, const Vector& k,
                                int n) {
  const BlockOperator rho_hat = state_fourier(*K.lattice, initial, k);
  const BlockOperator y = dual_iterate(K, k, n);
  Complex t = 0.0;
  for (std::size_t u = 0; u < y.blocks.size(); ++u) t += (rho_hat.blocks[u] * y.blocks[u]).trace();
  return t;
}

std::vector<Vector> MomentumGrid::nodes(const CrystalLattice& lat) const {
  if (points_per_dim < 1) throw std::invalid_argument("grid needs at least one point per dimension");
  const int d = lat.dimension();
  const int N = points_per_dim;
  const double step = 2.0 * std::numbers::pi / N;
  std::vector<Vector> out;
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(N);
  out.reserve(count);
  std::vector<int> idx(d, 0);
  Vector q(d);
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t rem = flat;
    for (int i = d - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % N);
      rem /= N;
    }
    for (int i = 0; i < d; ++i) q[i] = step * idx[i];
    out.push_back(lat.theta_matrix() * q);
  }
  return out;
}

std::map<LatticeCoord, double> invert(const KrausFamily& K, const LatticeState& initial, int n,
                                      const MomentumGrid& grid, const Tolerances& tol,
                                      double* imag_residue, int threads) {
  const CrystalLattice& lat = *K.lattice;
  const int d = lat.dimension();
  const int N = grid.points_per_dim;

  // Support bound: initial support radius plus n steps of the largest arc
  // translation, in integer coordinates. The trapezoid rule is exact below
  // this bound and aliases above it.
  std::int64_t x0_radius = 0;
  for (const auto& [x, b] : initial.support)
    for (int i = 0; i < d; ++i) x0_radius = std::max(x0_radius, std::abs(x[i]));
  const std::int64_t radius = x0_radius + static_cast<std::int64_t>(n) * lat.max_step_radius();
  if (N <= 2 * radius)
    throw std::runtime_error("aliasing: grid size " + std::to_string(N) +
                             " cannot resolve support radius " + std::to_string(radius) +
                             " after " + std::to_string(n) + " steps; need N >= " +
                             std::to_string(2 * radius + 1));

  // Characteristic function over the grid; node evaluations are independent.
  const std::vector<Vector> ks = grid.nodes(lat);
  std::vector<Complex> cf(ks.size());
  const int workers = std::max(1, threads);
  if (workers == 1 || ks.size() < 2) {
    for (std::size_t i = 0; i < ks.size(); ++i)
      cf[i] = characteristic_function(K, initial, ks[i], n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (ks.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(ks.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i)
          cf[i] = characteristic_function(K, initial, ks[i], n);
      });
    }
    for (auto& t : pool) t.join();
  }

  // p_x = N^{-d} sum_q e^{i<q,x>} p_hat(Theta q); the |det Theta| factor is
  // absorbed by the change of variables k = Theta q.
  std::map<LatticeCoord, double> out;
  double max_imag = 0.0;
  const double step = 2.0 * std::numbers::pi / N;
  std::vector<std::int64_t> x(d, -radius);
  const double inv_count = 1.0 / static_cast<double>(cf.size());
  while (true) {
    Complex p = 0.0;
    for (std::size_t flat = 0; flat < cf.size(); ++flat) {
      std::size_t rem = flat;
      double phase = 0.0;
      for (int i = d - 1; i >= 0; --i) {
        phase += step * static_cast<double>(rem % N) * static_cast<double>(x[i]);
        rem /= N;
      }
      p += cf[flat] * std::exp(Complex(0.0, phase));
    }
    p *= inv_count;
    max_imag = std::max(max_imag, std::abs(p.imag()));
    if (p.real() > 1e-12) out.emplace(LatticeCoord(x), p.real());

    int i = d - 1;
    for (; i >= 0; --i) {
      if (++x[i] <= radius) break;
      x[i] = -radius;
    }
    if (i < 0) break;
  }
  if (imag_residue) *imag_residue = max_imag;
  if (max_imag > 1e-10)
    throw std::runtime_error("inversion produced imaginary residue " + std::to_string(max_imag));
  return out;
}

Complex scaled_cf_limit_probe(const KrausFamily& K, const LatticeState& initial, const Vector& t,
                              int n) {
  if (n < 1) throw std::invalid_argument("need at least one step");
  const Vector k = -t / std::sqrt(static_cast<double>(n));
  return characteristic_function(K, initial, k, n);
}

}  // namespace oqrw
