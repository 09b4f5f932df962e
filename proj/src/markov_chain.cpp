#include "switchtaylor/markov_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "switchtaylor/error.hpp"

namespace switchtaylor {

GeneratorMatrix::GeneratorMatrix(Eigen::MatrixXd q) : q_(std::move(q)) {
  if (q_.rows() == 0 || q_.rows() != q_.cols()) {
    throw Error(ErrorCode::InvalidGenerator, "generator must be a non-empty square matrix");
  }
  for (Eigen::Index i = 0; i < q_.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index k = 0; k < q_.cols(); ++k) {
      const double v = q_(i, k);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::InvalidGenerator, "generator entries must be finite");
      }
      if (i != k && v < 0.0) {
        throw Error(ErrorCode::InvalidGenerator,
                    "negative off-diagonal rate in row " + std::to_string(i + 1));
      }
      row += v;
    }
    if (std::abs(row) > 1e-12) {
      throw Error(ErrorCode::InvalidGenerator,
                  "row " + std::to_string(i + 1) + " of the generator does not sum to zero");
    }
    qmax_ = std::max(qmax_, -q_(i, i));
  }
}

GeneratorMatrix GeneratorMatrix::two_state(double rate) {
  Eigen::MatrixXd q(2, 2);
  q << -rate, rate, rate, -rate;
  return GeneratorMatrix(std::move(q));
}

GeneratorMatrix GeneratorMatrix::singleton() {
  return GeneratorMatrix(Eigen::MatrixXd::Zero(1, 1));
}

ChainPath::ChainPath(double t0, double t_end, std::size_t initial_state,
                     std::vector<JumpEvent> jumps)
    : t0_(t0), t_end_(t_end), initial_(initial_state), jumps_(std::move(jumps)) {
  if (!(t0_ < t_end_)) throw Error(ErrorCode::IntervalOutOfRange, "chain path needs t0 < T");
  double prev = t0_;
  std::size_t state = initial_;
  for (const auto& j : jumps_) {
    if (!(j.time > prev) || j.time > t_end_) {
      throw Error(ErrorCode::IntervalOutOfRange, "jump times must increase within (t0, T]");
    }
    if (j.state == state) {
      throw Error(ErrorCode::InvalidState, "self-jumps are not recorded on a chain path");
    }
    prev = j.time;
    state = j.state;
  }
}

std::size_t ChainPath::state_at(double t) const {
  auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                             [](double v, const JumpEvent& e) { return v < e.time; });
  return it == jumps_.begin() ? initial_ : std::prev(it)->state;
}

std::size_t ChainPath::state_before(double t) const {
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                             [](const JumpEvent& e, double v) { return e.time < v; });
  return it == jumps_.begin() ? initial_ : std::prev(it)->state;
}

void ChainPath::check_interval(double s, double t) const {
  if (!(t0_ <= s && s < t && t <= t_end_)) {
    throw Error(ErrorCode::IntervalOutOfRange,
                "interval (" + std::to_string(s) + ", " + std::to_string(t) +
                    "] is empty or outside the path horizon");
  }
}

std::span<const JumpEvent> ChainPath::jumps_in(double s, double t) const {
  check_interval(s, t);
  auto first = std::upper_bound(jumps_.begin(), jumps_.end(), s,
                                [](double v, const JumpEvent& e) { return v < e.time; });
  auto last = std::upper_bound(first, jumps_.end(), t,
                               [](double v, const JumpEvent& e) { return v < e.time; });
  return {first, last};
}

std::size_t ChainPath::count_jumps(double s, double t) const { return jumps_in(s, t).size(); }

std::vector<double> ChainPath::jump_times_in(double s, double t) const {
  std::vector<double> out;
  for (const auto& j : jumps_in(s, t)) out.push_back(j.time);
  return out;
}

void ChainPath::write_csv(std::ostream& out) const {
  const auto precision = out.precision(17);
  out << "time,state\n";
  out << t0_ << ',' << initial_ + 1 << '\n';
  for (const auto& j : jumps_) out << j.time << ',' << j.state + 1 << '\n';
  out << t_end_ << ',' << state_at(t_end_) + 1 << '\n';
  out.precision(precision);
}

ChainPath sample_path(const GeneratorMatrix& gen, std::size_t initial, double t0, double t_end,
                      Engine& rng) {
  if (initial >= gen.states()) {
    throw Error(ErrorCode::InvalidState, "initial regime outside the state space");
  }
  if (!(t0 < t_end)) throw Error(ErrorCode::IntervalOutOfRange, "chain path needs t0 < T");

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<JumpEvent> jumps;
  std::size_t state = initial;
  double t = t0;
  while (true) {
    const double rate = gen.exit_rate(state);
    if (rate <= 0.0) break;
    double hold = 0.0;
    while (hold <= 0.0) hold = -std::log1p(-uniform(rng)) / rate;
    t += hold;
    if (t > t_end) break;

    double target = uniform(rng) * rate;
    std::size_t next = state;
    for (std::size_t k = 0; k < gen.states(); ++k) {
      if (k == state) continue;
      const double q = gen.rate(state, k);
      if (q <= 0.0) continue;
      next = k;
      if (target < q) break;
      target -= q;
    }
    jumps.push_back({t, next});
    state = next;
  }
  return ChainPath(t0, t_end, initial, std::move(jumps));
}

std::size_t bracket_M(const ChainPath& path, std::size_t i0, std::size_t k0, double s, double t) {
  const auto jumps = path.jumps_in(s, t);
  if (i0 == k0) return 0;
  std::size_t n = 0;
  for (const auto& j : jumps) {
    if (j.state == k0 && path.state_before(j.time) == i0) ++n;
  }
  return n;
}

double occupation_time(const ChainPath& path, std::size_t state, double s, double t) {
  const auto jumps = path.jumps_in(s, t);
  double total = 0.0;
  double left = s;
  std::size_t current = path.state_at(s);
  for (const auto& j : jumps) {
    if (current == state) total += j.time - left;
    left = j.time;
    current = j.state;
  }
  if (current == state) total += t - left;
  return total;
}

double angle_M(const GeneratorMatrix& gen, const ChainPath& path, std::size_t i0, std::size_t k0,
               double s, double t) {
  const double occ = occupation_time(path, i0, s, t);
  if (i0 == k0) return 0.0;
  return gen.rate(i0, k0) * occ;
}

double martingale_M(const GeneratorMatrix& gen, const ChainPath& path, std::size_t i0,
                    std::size_t k0, double s, double t) {
  return static_cast<double>(bracket_M(path, i0, k0, s, t)) - angle_M(gen, path, i0, k0, s, t);
}

}  // namespace switchtaylor
