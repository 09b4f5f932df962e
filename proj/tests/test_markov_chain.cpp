#include <doctest.h>

#include <cmath>
#include <sstream>

#include "switchtaylor/error.hpp"
#include "switchtaylor/markov_chain.hpp"

using namespace switchtaylor;

namespace {

Eigen::MatrixXd three_state() {
  Eigen::MatrixXd q(3, 3);
  q << -2.0, 1.5, 0.5, 0.3, -0.8, 0.5, 1.0, 1.0, -2.0;
  return q;
}

}  // namespace

TEST_CASE("generator validation") {
  Eigen::MatrixXd q(2, 2);
  q << -1.0, 1.0, 2.0, -2.0;
  const GeneratorMatrix g(q);
  CHECK(g.states() == 2);
  CHECK(g.qmax() == 2.0);
  CHECK(g.exit_rate(0) == 1.0);

  Eigen::MatrixXd negative(2, 2);
  negative << 1.0, -1.0, 1.0, -1.0;
  CHECK_THROWS_AS(GeneratorMatrix{negative}, Error);
  Eigen::MatrixXd unbalanced(2, 2);
  unbalanced << -1.0, 1.0 + 1e-9, 1.0, -1.0;
  try {
    GeneratorMatrix{unbalanced};
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidGenerator);
  }
  CHECK_THROWS_AS(GeneratorMatrix{Eigen::MatrixXd(2, 3)}, Error);
  CHECK(GeneratorMatrix::singleton().qmax() == 0.0);
}

TEST_CASE("singleton chain never jumps") {
  Engine rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto path = sample_path(GeneratorMatrix::singleton(), 0, 0.0, 10.0, rng);
    CHECK(path.jumps().empty());
    CHECK(path.count_jumps(0.0, 10.0) == 0);
  }
}

TEST_CASE("half-open jump counting on a hand-built path") {
  const ChainPath path(0.0, 1.0, 0, {{0.3, 1}, {0.7, 0}});
  CHECK(path.state_at(0.0) == 0);
  CHECK(path.state_at(0.3) == 1);
  CHECK(path.state_before(0.3) == 0);
  CHECK(path.state_at(0.69) == 1);
  CHECK(path.state_at(1.0) == 0);
  CHECK(path.count_jumps(0.0, 0.3) == 1);
  CHECK(path.count_jumps(0.3, 0.7) == 1);
  CHECK(path.count_jumps(0.3, 0.69) == 0);
  CHECK(path.count_jumps(0.0, 1.0) == 2);
  CHECK(path.jump_times_in(0.1, 1.0) == std::vector<double>{0.3, 0.7});
  for (auto [s, t] : std::initializer_list<std::pair<double, double>>{
           {0.5, 0.5}, {-0.1, 0.5}, {0.5, 1.1}, {0.6, 0.4}}) {
    try {
      (void)path.count_jumps(s, t);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IntervalOutOfRange);
    }
  }
  CHECK_THROWS_AS(ChainPath(0.0, 1.0, 0, {{0.5, 0}}), Error);
  CHECK_THROWS_AS(ChainPath(0.0, 1.0, 0, {{0.5, 1}, {0.4, 0}}), Error);

  std::ostringstream csv;
  path.write_csv(csv);
  CHECK(csv.str().rfind("time,state\n0,1\n", 0) == 0);
}

TEST_CASE("jump-counting processes on a hand-built path") {
  const GeneratorMatrix g = GeneratorMatrix::two_state(2.0);
  const ChainPath path(0.0, 1.0, 0, {{0.25, 1}, {0.5, 0}});
  CHECK(bracket_M(path, 0, 1, 0.0, 1.0) == 1);
  CHECK(bracket_M(path, 1, 0, 0.0, 1.0) == 1);
  CHECK(bracket_M(path, 0, 0, 0.0, 1.0) == 0);
  CHECK(occupation_time(path, 0, 0.0, 1.0) == doctest::Approx(0.75));
  CHECK(angle_M(g, path, 0, 1, 0.0, 1.0) == doctest::Approx(1.5));
  CHECK(martingale_M(g, path, 0, 1, 0.0, 1.0) == doctest::Approx(-0.5));
  CHECK(martingale_M(g, path, 1, 1, 0.0, 1.0) == 0.0);

  const ChainPath still(0.0, 2.0, 0, {});
  CHECK(bracket_M(still, 0, 1, 0.5, 1.5) == 0);
  CHECK(angle_M(g, still, 0, 1, 0.5, 1.5) == doctest::Approx(2.0 * 1.0));
}

TEST_CASE("sampling is deterministic given the seed") {
  const GeneratorMatrix g(three_state());
  Engine a(42), b(42);
  const auto p = sample_path(g, 0, 0.0, 5.0, a);
  const auto q = sample_path(g, 0, 0.0, 5.0, b);
  REQUIRE(p.jumps().size() == q.jumps().size());
  for (std::size_t i = 0; i < p.jumps().size(); ++i) {
    CHECK(p.jumps()[i].time == q.jumps()[i].time);
    CHECK(p.jumps()[i].state == q.jumps()[i].state);
  }
}

TEST_CASE("property: bracket sums, additivity and state reconstruction") {
  const GeneratorMatrix g(three_state());
  Engine rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto path = sample_path(g, static_cast<std::size_t>(i % 3), 0.0, 2.0, rng);
    std::size_t total = 0;
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        if (a != b) total += bracket_M(path, a, b, 0.0, 2.0);
        const double whole = angle_M(g, path, a, b, 0.0, 2.0);
        CHECK(whole >= 0.0);
        CHECK(whole == doctest::Approx(angle_M(g, path, a, b, 0.0, 0.7) +
                                       angle_M(g, path, a, b, 0.7, 2.0)));
        CHECK(bracket_M(path, a, b, 0.0, 2.0) ==
              bracket_M(path, a, b, 0.0, 0.7) + bracket_M(path, a, b, 0.7, 2.0));
      }
    }
    CHECK(total == path.count_jumps(0.0, 2.0));
    std::size_t prev = path.initial_state();
    for (const auto& jump : path.jumps()) {
      CHECK(jump.state != prev);
      CHECK(path.state_at(jump.time) == jump.state);
      CHECK(path.state_before(jump.time) == prev);
      prev = jump.state;
    }
  }
}

TEST_CASE("two-state chain: mean jump count and short-time transition probability") {
  // Both states leave at rate lambda, so the jump count is Poisson(lambda T).
  const double lambda = 1.0, T = 1.0;
  const GeneratorMatrix g = GeneratorMatrix::two_state(lambda);
  const int paths = 100000;
  double sum = 0.0;
  for (int p = 0; p < paths; ++p) {
    Engine rng = make_engine(11, static_cast<std::uint64_t>(p), Stream::Chain);
    sum += static_cast<double>(sample_path(g, 0, 0.0, T, rng).count_jumps(0.0, T));
  }
  const double mean = sum / paths;
  CHECK(std::abs(mean - lambda * T) < 3.0 * std::sqrt(lambda * T / paths));

  const double delta = 1e-3;
  const int draws = 20000000;
  Engine rng(5);
  int moved = 0;
  for (int i = 0; i < draws; ++i) {
    if (sample_path(g, 0, 0.0, delta, rng).state_at(delta) == 1) ++moved;
  }
  const double freq = static_cast<double>(moved) / draws;
  CHECK(std::abs(freq - lambda * delta) / (lambda * delta) < 0.02);
  const double exact = 0.5 * (1.0 - std::exp(-2.0 * lambda * delta));
  CHECK(std::abs(freq - exact) < 4.0 * std::sqrt(exact / draws));
}

TEST_CASE("jump-count tail bound and martingale mean") {
  const GeneratorMatrix g = GeneratorMatrix::two_state(1.0);
  const int paths = 100000;
  int at_least[4] = {0, 0, 0, 0};
  double msum = 0.0, msq = 0.0;
  for (int p = 0; p < paths; ++p) {
    Engine rng = make_engine(12, static_cast<std::uint64_t>(p), Stream::Chain);
    const auto path = sample_path(g, 0, 0.0, 1.0, rng);
    const auto n = path.count_jumps(0.0, 0.01);
    for (std::size_t k = 1; k <= 3; ++k) at_least[k] += n >= k ? 1 : 0;
    const double mart = martingale_M(g, path, 0, 1, 0.0, 1.0);
    msum += mart;
    msq += mart * mart;
  }
  for (int k = 1; k <= 3; ++k) {
    const double bound = std::pow(g.qmax() * 0.01, k);
    const double freq = static_cast<double>(at_least[k]) / paths;
    CHECK(freq <= bound + 3.0 * std::sqrt(bound / paths));
  }
  const double mean = msum / paths;
  const double se = std::sqrt((msq / paths - mean * mean) / paths);
  CHECK(std::abs(mean) < 3.0 * se);
}
