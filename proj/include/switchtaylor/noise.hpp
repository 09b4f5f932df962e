#pragma once

// Brownian driving data on a merged grid: the finest dyadic grid plus every
// Markov-chain jump time. Each interval carries the pair
//   dW = W(t_{i+1}) - W(t_i),   dZ = int_{t_i}^{t_{i+1}} (W(u) - W(t_i)) du
// per Wiener dimension, drawn from their exact joint Gaussian law, so any
// nested coarser grid can be aggregated without discretisation error.

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "switchtaylor/markov_chain.hpp"
#include "switchtaylor/random.hpp"

namespace switchtaylor {

/// Dyadic family of uniform grids on [t0, t_end]: level k has
/// base_steps * 2^refinements[k] steps. The base grid is always a level.
struct GridSpec {
  double t0 = 0.0;
  double t_end = 1.0;
  std::size_t base_steps = 1;
  std::vector<unsigned> refinements;

  /// Build from explicit step counts; each must be the smallest count times a
  /// power of two (InvalidGrid otherwise).
  static GridSpec from_levels(double t0, double t_end, std::vector<std::size_t> steps);

  void validate() const;
  std::size_t finest_steps() const;
  std::vector<std::size_t> level_steps() const;
  double step_size(std::size_t steps) const { return (t_end - t0) / static_cast<double>(steps); }
  /// Grid point i of the uniform grid with `steps` steps. Coarse and fine
  /// grids agree bitwise on shared points because i/steps is evaluated as a
  /// correctly rounded ratio.
  double time(std::size_t i, std::size_t steps) const;
};

/// Increments (dW, dZ) of one interval of length delta for m dimensions.
struct IntervalNoise {
  double delta;
  std::span<const double> dW;
  std::span<const double> dZ;
};

class NoisePath {
 public:
  NoisePath(GridSpec grid, unsigned m, std::vector<double> times, std::vector<double> dW,
            std::vector<double> dZ);

  const GridSpec& grid() const noexcept { return grid_; }
  unsigned wiener_dim() const noexcept { return m_; }
  std::span<const double> times() const noexcept { return times_; }
  std::size_t intervals() const noexcept { return times_.size() - 1; }
  IntervalNoise interval(std::size_t i) const;

  /// Merged-grid position of an exact grid time (NotAGridTime otherwise).
  std::size_t index_of(double t) const;
  /// Merged-grid position of point n on the uniform grid with `steps` steps.
  std::size_t level_index(std::size_t n, std::size_t steps) const;

  double aggregate_W(double s, double t, unsigned j) const;
  double aggregate_Z(double s, double t, unsigned j) const;
  /// W(t) - W(t0).
  double W_at(double t, unsigned j) const;

  /// Index-based aggregation over merged positions a < b; j is 0-based.
  double aggregate_W_between(std::size_t a, std::size_t b, unsigned j) const;
  double aggregate_Z_between(std::size_t a, std::size_t b, unsigned j) const;

  /// Little-endian binary dump: uint64 point count, uint64 m, the times, then
  /// row-major dW (intervals x m), then row-major dZ.
  void write_binary(std::ostream& out) const;

 private:
  GridSpec grid_;
  unsigned m_;
  std::size_t finest_;
  std::vector<double> times_;
  std::vector<double> dW_;
  std::vector<double> dZ_;
  std::vector<std::size_t> dyadic_pos_;
};

/// Dyadic intervals are sampled in (interval, dimension) order from
/// `brownian`; intervals split by chain jump times are refined by conditional
/// (bridge) sampling from `bridge`. The dyadic aggregates therefore do not
/// depend on the chain path.
NoisePath build_noise(const GridSpec& grid, const ChainPath& chain, unsigned m, Engine& brownian,
                      Engine& bridge);
/// Single-stream variant: bridge draws follow all dyadic draws.
NoisePath build_noise(const GridSpec& grid, const ChainPath& chain, unsigned m, Engine& rng);

/// Draw (dW, dZ) for an interval of length delta from two standard normals.
inline void joint_increment(double delta, double g1, double g2, double& dW, double& dZ) {
  const double root = std::sqrt(delta);
  dW = root * g1;
  dZ = delta * root * (0.5 * g1 + g2 / (2.0 * std::sqrt(3.0)));
}

}  // namespace switchtaylor
