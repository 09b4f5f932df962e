#include "switchtaylor/noise.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <ostream>
#include <string>

#include "switchtaylor/error.hpp"

namespace switchtaylor {

GridSpec GridSpec::from_levels(double t0, double t_end, std::vector<std::size_t> steps) {
  if (steps.empty()) throw Error(ErrorCode::InvalidGrid, "at least one level is required");
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  GridSpec g;
  g.t0 = t0;
  g.t_end = t_end;
  g.base_steps = steps.front();
  if (g.base_steps == 0) throw Error(ErrorCode::InvalidGrid, "levels need at least one step");
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const std::size_t ratio = steps[i] / g.base_steps;
    if (steps[i] % g.base_steps != 0 || !std::has_single_bit(ratio)) {
      throw Error(ErrorCode::InvalidGrid, "level with " + std::to_string(steps[i]) +
                                              " steps is not a dyadic refinement of " +
                                              std::to_string(g.base_steps));
    }
    g.refinements.push_back(static_cast<unsigned>(std::countr_zero(ratio)));
  }
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (!(t0 < t_end) || !std::isfinite(t0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::InvalidGrid, "grid needs finite t0 < T");
  }
  if (base_steps == 0) throw Error(ErrorCode::InvalidGrid, "grid needs at least one step");
  for (unsigned r : refinements) {
    if (r > 40) throw Error(ErrorCode::InvalidGrid, "refinement exponent too large");
  }
}

std::size_t GridSpec::finest_steps() const {
  unsigned top = 0;
  for (unsigned r : refinements) top = std::max(top, r);
  return base_steps << top;
}

std::vector<std::size_t> GridSpec::level_steps() const {
  std::vector<std::size_t> out{base_steps};
  for (unsigned r : refinements) out.push_back(base_steps << r);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double GridSpec::time(std::size_t i, std::size_t steps) const {
  if (i == steps) return t_end;
  return t0 + (t_end - t0) * (static_cast<double>(i) / static_cast<double>(steps));
}

NoisePath::NoisePath(GridSpec grid, unsigned m, std::vector<double> times, std::vector<double> dW,
                     std::vector<double> dZ)
    : grid_(std::move(grid)),
      m_(m),
      finest_(grid_.finest_steps()),
      times_(std::move(times)),
      dW_(std::move(dW)),
      dZ_(std::move(dZ)) {
  if (times_.size() < 2 || dW_.size() != (times_.size() - 1) * m_ || dZ_.size() != dW_.size()) {
    throw Error(ErrorCode::InvalidGrid, "noise path arrays have inconsistent sizes");
  }
  dyadic_pos_.resize(finest_ + 1);
  std::size_t pos = 0;
  for (std::size_t i = 0; i <= finest_; ++i) {
    const double t = grid_.time(i, finest_);
    while (pos < times_.size() && times_[pos] < t) ++pos;
    if (pos == times_.size() || times_[pos] != t) {
      throw Error(ErrorCode::InvalidGrid, "merged grid is missing a dyadic point");
    }
    dyadic_pos_[i] = pos;
  }
}

IntervalNoise NoisePath::interval(std::size_t i) const {
  return {times_[i + 1] - times_[i], std::span<const double>(dW_).subspan(i * m_, m_),
          std::span<const double>(dZ_).subspan(i * m_, m_)};
}

std::size_t NoisePath::index_of(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t) {
    throw Error(ErrorCode::NotAGridTime, "time " + std::to_string(t) + " is not a grid time");
  }
  return static_cast<std::size_t>(it - times_.begin());
}

std::size_t NoisePath::level_index(std::size_t n, std::size_t steps) const {
  if (steps == 0 || finest_ % steps != 0 || n > steps) {
    throw Error(ErrorCode::NotAGridTime, "level with " + std::to_string(steps) +
                                             " steps is not nested in the noise grid");
  }
  return dyadic_pos_[n * (finest_ / steps)];
}

double NoisePath::aggregate_W_between(std::size_t a, std::size_t b, unsigned j) const {
  double w = 0.0;
  for (std::size_t i = a; i < b; ++i) w += dW_[i * m_ + j];
  return w;
}

double NoisePath::aggregate_Z_between(std::size_t a, std::size_t b, unsigned j) const {
  double z = 0.0;
  double offset = 0.0;
  for (std::size_t i = a; i < b; ++i) {
    z += dZ_[i * m_ + j] + offset * (times_[i + 1] - times_[i]);
    offset += dW_[i * m_ + j];
  }
  return z;
}

namespace {

void check_pair(double s, double t) {
  if (!(s < t)) throw Error(ErrorCode::NotAGridTime, "aggregation needs s < t");
}

void check_dim(unsigned j, unsigned m) {
  if (j >= m) throw Error(ErrorCode::NotAGridTime, "Wiener dimension out of range");
}

}  // namespace

double NoisePath::aggregate_W(double s, double t, unsigned j) const {
  check_pair(s, t);
  check_dim(j, m_);
  return aggregate_W_between(index_of(s), index_of(t), j);
}

double NoisePath::aggregate_Z(double s, double t, unsigned j) const {
  check_pair(s, t);
  check_dim(j, m_);
  return aggregate_Z_between(index_of(s), index_of(t), j);
}

double NoisePath::W_at(double t, unsigned j) const {
  check_dim(j, m_);
  return aggregate_W_between(0, index_of(t), j);
}

namespace {

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

void NoisePath::write_binary(std::ostream& out) const {
  put<std::uint64_t>(out, times_.size());
  put<std::uint64_t>(out, m_);
  for (double t : times_) put(out, t);
  for (double v : dW_) put(out, v);
  for (double v : dZ_) put(out, v);
}

namespace {

// Sample (W1, Z1) on [s, u] given the totals (W, Z) on [s, e], with
// f = (u - s) / (e - s). Works in units where e - s = 1.
void bridge_split(double delta, double f, double w_total, double z_total, double g1, double g2,
                  double& w1, double& z1) {
  const double root = std::sqrt(delta);
  const double w = w_total / root;
  const double z = z_total / (delta * root);
  const double g = 1.0 - f;
  // Cross covariance of (W1, Z1) with (W, Z) and inverse of the unit covariance.
  const double s11 = f, s12 = 0.5 * f * f + f * g;
  const double s21 = 0.5 * f * f, s22 = f * f * f / 3.0 + 0.5 * f * f * g;
  const double i11 = 4.0, i12 = -6.0, i22 = 12.0;
  const double k11 = s11 * i11 + s12 * i12, k12 = s11 * i12 + s12 * i22;
  const double k21 = s21 * i11 + s22 * i12, k22 = s21 * i12 + s22 * i22;
  const double mean_w = k11 * w + k12 * z;
  const double mean_z = k21 * w + k22 * z;
  const double c11 = f - (k11 * s11 + k12 * s12);
  const double c12 = 0.5 * f * f - (k11 * s21 + k12 * s22);
  const double c22 = f * f * f / 3.0 - (k21 * s21 + k22 * s22);
  const double l11 = std::sqrt(std::max(c11, 0.0));
  const double l21 = l11 > 0.0 ? c12 / l11 : 0.0;
  const double l22 = std::sqrt(std::max(c22 - l21 * l21, 0.0));
  w1 = root * (mean_w + l11 * g1);
  z1 = delta * root * (mean_z + l21 * g1 + l22 * g2);
}

}  // namespace

NoisePath build_noise(const GridSpec& grid, const ChainPath& chain, unsigned m, Engine& brownian,
                      Engine& bridge) {
  grid.validate();
  if (m == 0) throw Error(ErrorCode::InvalidGrid, "Wiener dimension must be at least 1");
  if (chain.t0() != grid.t0 || chain.t_end() != grid.t_end) {
    throw Error(ErrorCode::InvalidGrid, "chain path and grid cover different horizons");
  }
  const std::size_t n = grid.finest_steps();
  std::normal_distribution<double> normal;
  std::normal_distribution<double> bridge_normal;

  std::vector<double> dyadic_w(n * m), dyadic_z(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = grid.time(i + 1, n) - grid.time(i, n);
    for (unsigned j = 0; j < m; ++j) {
      const double g1 = normal(brownian);
      const double g2 = normal(brownian);
      joint_increment(delta, g1, g2, dyadic_w[i * m + j], dyadic_z[i * m + j]);
    }
  }

  const auto jumps = chain.jumps();
  std::vector<double> times;
  std::vector<double> dW, dZ;
  times.reserve(n + 1 + jumps.size());
  dW.reserve((n + jumps.size()) * m);
  dZ.reserve((n + jumps.size()) * m);
  times.push_back(grid.time(0, n));

  std::size_t next_jump = 0;
  std::vector<double> w_rest(m), z_rest(m);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = grid.time(i, n);
    const double right = grid.time(i + 1, n);
    while (next_jump < jumps.size() && jumps[next_jump].time <= left) ++next_jump;
    if (next_jump == jumps.size() || jumps[next_jump].time >= right) {
      times.push_back(right);
      for (unsigned j = 0; j < m; ++j) {
        dW.push_back(dyadic_w[i * m + j]);
        dZ.push_back(dyadic_z[i * m + j]);
      }
      continue;
    }
    // Split the interval at each interior jump time, peeling off the left
    // piece conditionally on what remains.
    for (unsigned j = 0; j < m; ++j) {
      w_rest[j] = dyadic_w[i * m + j];
      z_rest[j] = dyadic_z[i * m + j];
    }
    double start = left;
    while (next_jump < jumps.size() && jumps[next_jump].time < right) {
      const double cut = jumps[next_jump].time;
      const double delta = right - start;
      const double f = (cut - start) / delta;
      const double tail = right - cut;
      for (unsigned j = 0; j < m; ++j) {
        double w1 = 0.0, z1 = 0.0;
        const double g1 = bridge_normal(bridge);
        const double g2 = bridge_normal(bridge);
        bridge_split(delta, f, w_rest[j], z_rest[j], g1, g2, w1, z1);
        dW.push_back(w1);
        dZ.push_back(z1);
        z_rest[j] = z_rest[j] - z1 - w1 * tail;
        w_rest[j] = w_rest[j] - w1;
      }
      times.push_back(cut);
      start = cut;
      ++next_jump;
    }
    times.push_back(right);
    for (unsigned j = 0; j < m; ++j) {
      dW.push_back(w_rest[j]);
      dZ.push_back(z_rest[j]);
    }
  }
  return NoisePath(grid, m, std::move(times), std::move(dW), std::move(dZ));
}

NoisePath build_noise(const GridSpec& grid, const ChainPath& chain, unsigned m, Engine& rng) {
  return build_noise(grid, chain, m, rng, rng);
}

}  // namespace switchtaylor
