#pragma once

// Continuous-time Markov chain sampling and the jump-counting processes
// built on a realised path. Regimes are 0-based in this API.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "switchtaylor/random.hpp"

namespace switchtaylor {

class GeneratorMatrix {
 public:
  /// Throws InvalidGenerator unless q is square, off-diagonal entries are
  /// non-negative and finite, and every row sums to zero within 1e-12.
  explicit GeneratorMatrix(Eigen::MatrixXd q);

  /// Symmetric two-state chain with switching rate `rate`.
  static GeneratorMatrix two_state(double rate);
  /// 1x1 zero generator.
  static GeneratorMatrix singleton();

  std::size_t states() const noexcept { return static_cast<std::size_t>(q_.rows()); }
  double rate(std::size_t from, std::size_t to) const { return q_(from, to); }
  /// Total exit rate -q_ii.
  double exit_rate(std::size_t state) const { return -q_(state, state); }
  /// max_i(-q_ii).
  double qmax() const noexcept { return qmax_; }
  const Eigen::MatrixXd& matrix() const noexcept { return q_; }

 private:
  Eigen::MatrixXd q_;
  double qmax_ = 0.0;
};

struct JumpEvent {
  double time;
  std::size_t state;  // state entered at `time`
};

/// Right-continuous piecewise-constant trajectory on [t0, t_end].
class ChainPath {
 public:
  ChainPath(double t0, double t_end, std::size_t initial_state, std::vector<JumpEvent> jumps);

  double t0() const noexcept { return t0_; }
  double t_end() const noexcept { return t_end_; }
  std::size_t initial_state() const noexcept { return initial_; }
  std::span<const JumpEvent> jumps() const noexcept { return jumps_; }

  /// alpha(t), right-continuous.
  std::size_t state_at(double t) const;
  /// alpha(t-).
  std::size_t state_before(double t) const;

  /// N^(s,t]: number of jumps in the half-open interval. Requires
  /// t0 <= s < t <= t_end (IntervalOutOfRange otherwise).
  std::size_t count_jumps(double s, double t) const;
  std::span<const JumpEvent> jumps_in(double s, double t) const;
  std::vector<double> jump_times_in(double s, double t) const;

  /// Rows "time,state" with 1-based states: the initial point, every jump,
  /// and the terminal point.
  void write_csv(std::ostream& out) const;

 private:
  void check_interval(double s, double t) const;

  double t0_;
  double t_end_;
  std::size_t initial_;
  std::vector<JumpEvent> jumps_;
};

/// Holding times are exponential with rate -q_ii, drawn by inverse CDF;
/// absorbing states never jump.
ChainPath sample_path(const GeneratorMatrix& gen, std::size_t initial, double t0, double t_end,
                      Engine& rng);

/// [M_{i0 k0}] over (s, t]: direct i0 -> k0 transitions. Zero when i0 == k0.
std::size_t bracket_M(const ChainPath& path, std::size_t i0, std::size_t k0, double s, double t);
/// <M_{i0 k0}> over (s, t]: q_{i0 k0} times occupation time of i0 (left limits).
double angle_M(const GeneratorMatrix& gen, const ChainPath& path, std::size_t i0, std::size_t k0,
               double s, double t);
/// M_{i0 k0} = [M] - <M> over (s, t].
double martingale_M(const GeneratorMatrix& gen, const ChainPath& path, std::size_t i0,
                    std::size_t k0, double s, double t);
/// Time spent in `state` during (s, t].
double occupation_time(const ChainPath& path, std::size_t state, double s, double t);

}  // namespace switchtaylor
