#include <doctest.h>

#include <cmath>
#include <random>

#include "switchtaylor/error.hpp"
#include "switchtaylor/fixtures.hpp"
#include "switchtaylor/schemes.hpp"

using namespace switchtaylor;

namespace {

const double A[2] = {-1.0, 0.5};
const double C[2] = {0.3, 0.8};

Eigen::VectorXd scalar(double x) { return Eigen::VectorXd::Constant(1, x); }

StepInput quiet_input(double t, double h, std::size_t regime, double dw, double dz) {
  StepInput in;
  in.t = t;
  in.h = h;
  in.regime = regime;
  in.dW = {dw};
  in.dZ = {dz};
  return in;
}

// Closed forms for b = a x, sigma = c x without jumps.
double euler_oracle(double y, std::size_t i, double h, double dw) {
  return y + A[i] * y * h + C[i] * y * dw;
}
double milstein_oracle(double y, std::size_t i, double h, double dw) {
  return euler_oracle(y, i, h, dw) + 0.5 * C[i] * C[i] * y * (dw * dw - h);
}
double taylor_oracle(double y, std::size_t i, double h, double dw, double dz) {
  const double a = A[i], c = C[i];
  return milstein_oracle(y, i, h, dw) + 0.5 * a * a * y * h * h + c * a * y * dz +
         a * c * y * (h * dw - dz) + c * c * c * y * (dw * dw * dw - 3.0 * h * dw) / 6.0;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scheme and jump-term names") {
  for (auto k : {SchemeKind::Euler, SchemeKind::Milstein, SchemeKind::Taylor15}) {
    CHECK(parse_scheme(to_string(k)) == k);
  }
  CHECK(scheme_order(SchemeKind::Taylor15) == 1.5);
  CHECK(parse_jump_terms("step-indicator") == JumpTerms::StepIndicator);
  CHECK_THROWS_AS(parse_scheme("rk4"), Error);
  CHECK_THROWS_AS(parse_jump_terms("none"), Error);
}

TEST_CASE("property: closed forms of the linear model without jumps") {
  const auto model = make_fixture("linear2");
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.01, 0.3);
  for (int trial = 0; trial < 500; ++trial) {
    const double h = unit(rng), y = 3.0 * normal(rng);
    const std::size_t i = static_cast<std::size_t>(trial % 2);
    double dw = 0.0, dz = 0.0;
    joint_increment(h, normal(rng), normal(rng), dw, dz);
    const auto in = quiet_input(0.0, h, i, dw, dz);
    CHECK(rel(step_euler(*model, in, scalar(y))(0), euler_oracle(y, i, h, dw)) < 1e-14);
    CHECK(rel(step_milstein(*model, in, scalar(y))(0), milstein_oracle(y, i, h, dw)) < 1e-14);
    CHECK(rel(step_taylor15(*model, in, scalar(y))(0), taylor_oracle(y, i, h, dw, dz)) < 1e-13);
  }
}

TEST_CASE("property: one jump in the step") {
  const auto model = make_fixture("linear2");
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double t = 0.25, h = 0.1, y = 1.0 + normal(rng);
    const std::size_t i = static_cast<std::size_t>(trial % 2), k = 1 - i;
    const double tau = t + h * unit(rng);
    const double w1 = std::sqrt(tau - t) * normal(rng);
    const double dw = w1 + std::sqrt(t + h - tau) * normal(rng);
    const double dz = 0.01 * normal(rng);
    StepInput in = quiet_input(t, h, i, dw, dz);
    in.jump_times = {tau};
    in.jump_regimes = {k};
    in.jump_W = {w1};

    const double after = dw - w1, rest = t + h - tau;
    const double mil = milstein_oracle(y, i, h, dw) + (C[k] - C[i]) * y * after;
    const double tay = taylor_oracle(y, i, h, dw, dz) + (A[k] - A[i]) * y * rest +
                       (C[k] - C[i]) * y * after + C[i] * (C[k] - C[i]) * y * w1 * after +
                       (C[k] * C[k] - C[i] * C[i]) * y * 0.5 * (after * after - rest);
    CHECK(step_euler(*model, in, scalar(y))(0) == doctest::Approx(euler_oracle(y, i, h, dw)));
    for (auto mode : {JumpTerms::Piecewise, JumpTerms::StepIndicator}) {
      CHECK(rel(step_milstein(*model, in, scalar(y), mode)(0), mil) < 1e-13);
      CHECK(rel(step_taylor15(*model, in, scalar(y), mode)(0), tay) < 1e-13);
    }
  }
}

TEST_CASE("two jumps: piecewise and step-indicator corrections") {
  const auto model = make_fixture("linear2");
  const double t = 0.0, h = 0.2, y = 1.3, dw = 0.31, dz = 0.02;
  const double tau1 = 0.05, tau2 = 0.12, w1 = 0.1, w2 = -0.07;
  const std::size_t i = 0, k1 = 1, k2 = 0;
  StepInput in = quiet_input(t, h, i, dw, dz);
  in.jump_times = {tau1, tau2};
  in.jump_regimes = {k1, k2};
  in.jump_W = {w1, w2};

  const double mid = w2 - w1, span = tau2 - tau1, after = dw - w2;
  const double first = (A[k1] - A[i]) * y * span + (C[k1] - C[i]) * y * mid +
                       C[i] * (C[k1] - C[i]) * y * w1 * mid +
                       (C[k1] * C[k1] - C[i] * C[i]) * y * (0.5 * (mid * mid - span) + mid * after);
  const double second = (C[k2] - C[i]) * y * after;
  const double base = taylor_oracle(y, i, h, dw, dz);
  CHECK(second == 0.0);
  CHECK(step_taylor15(*model, in, scalar(y), JumpTerms::Piecewise)(0) ==
        doctest::Approx(base + first + second).epsilon(1e-13));
  CHECK(step_taylor15(*model, in, scalar(y), JumpTerms::StepIndicator)(0) ==
        doctest::Approx(base + second).epsilon(1e-13));
  CHECK(step_milstein(*model, in, scalar(y), JumpTerms::Piecewise)(0) ==
        doctest::Approx(milstein_oracle(y, i, h, dw) + (C[k1] - C[i]) * y * mid).epsilon(1e-13));
  CHECK(step_milstein(*model, in, scalar(y), JumpTerms::StepIndicator)(0) ==
        doctest::Approx(milstein_oracle(y, i, h, dw)).epsilon(1e-13));

  CHECK_THROWS_AS(ChainPath(0.0, 1.0, 0, {{0.05, 1}, {0.12, 1}}), Error);
}

TEST_CASE("property: multidimensional step matches operator-word expansion") {
  const auto model = make_fixture("diagonal3");
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    const double h = 0.05;
    const std::size_t i = static_cast<std::size_t>(trial % 3);
    Eigen::VectorXd y(2);
    y << normal(rng), normal(rng);
    StepInput in;
    in.h = h;
    in.regime = i;
    in.dW.resize(2);
    in.dZ.resize(2);
    for (int j = 0; j < 2; ++j) joint_increment(h, normal(rng), normal(rng), in.dW[j], in.dZ[j]);

    const auto b = model->eval_b(y, i);
    const auto s = model->eval_sigma(y, i);
    Eigen::VectorXd euler = y + b * h, mil(2), tay(2);
    for (int j = 0; j < 2; ++j) euler += s.col(j) * in.dW[j];
    mil = euler;
    for (std::size_t k = 0; k < 2; ++k) {
      double m1 = 0.0, t1 = 0.5 * apply_word(*model, {{0}}, Target::drift(k), y, i) * h * h;
      for (unsigned j = 0; j < 2; ++j) {
        const auto sig = Target::diffusion(k, j);
        t1 += apply_word(*model, {{j + 1}}, Target::drift(k), y, i) * in.dZ[j];
        t1 += apply_word(*model, {{0}}, sig, y, i) * (h * in.dW[j] - in.dZ[j]);
        for (unsigned j1 = 0; j1 < 2; ++j1) {
          m1 += 0.5 * apply_word(*model, {{j1 + 1}}, sig, y, i) *
                (in.dW[j1] * in.dW[j] - (j == j1 ? h : 0.0));
          for (unsigned j2 = 0; j2 < 2; ++j2) {
            const double corr = (j == j1 ? in.dW[j2] : 0.0) + (j == j2 ? in.dW[j1] : 0.0) +
                                (j1 == j2 ? in.dW[j] : 0.0);
            t1 += apply_word(*model, {{j2 + 1, j1 + 1}}, sig, y, i) *
                  (in.dW[j] * in.dW[j1] * in.dW[j2] - h * corr) / 6.0;
          }
        }
      }
      mil(static_cast<Eigen::Index>(k)) += m1;
      tay(static_cast<Eigen::Index>(k)) = mil(static_cast<Eigen::Index>(k)) + t1;
    }
    CHECK((step_euler(*model, in, y) - euler).norm() < 1e-13);
    CHECK((step_milstein(*model, in, y) - mil).norm() < 1e-13);
    CHECK((step_taylor15(*model, in, y) - tay).norm() < 1e-12);
  }
}

TEST_CASE("single-regime triple term") {
  // With a = 0 only the iterated Wiener terms survive: (dW^3 - 3 h dW) / 6 * c^3 y.
  const LinearSwitchingModel model({0.0}, {0.5}, GeneratorMatrix::singleton(), 1.0);
  const double h = 0.04, dw = 0.3, dz = 0.005, y = 2.0;
  const auto in = quiet_input(0.0, h, 0, dw, dz);
  const double c = 0.5;
  const double expect =
      y + c * y * dw + 0.5 * c * c * y * (dw * dw - h) + c * c * c * y * (dw * dw * dw - 3 * h * dw) / 6;
  CHECK(step_taylor15(model, in, scalar(y))(0) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("deterministic consistency ladder") {
  // b = a x, sigma = 0: one-step local errors shrink like h^2, h^2, h^3.
  const LinearSwitchingModel model({-1.3}, {0.0}, GeneratorMatrix::singleton(), 1.0);
  double prev[3] = {0, 0, 0};
  for (int level = 0; level < 5; ++level) {
    const double h = 0.1 / std::pow(2.0, level);
    const auto in = quiet_input(0.0, h, 0, 0.0, 0.0);
    const double exact = std::exp(-1.3 * h);
    const double err[3] = {std::abs(step_euler(model, in, scalar(1.0))(0) - exact),
                           std::abs(step_milstein(model, in, scalar(1.0))(0) - exact),
                           std::abs(step_taylor15(model, in, scalar(1.0))(0) - exact)};
    if (level > 0) {
      CHECK(prev[0] / err[0] == doctest::Approx(4.0).epsilon(0.05));
      CHECK(prev[1] / err[1] == doctest::Approx(4.0).epsilon(0.05));
      CHECK(prev[2] / err[2] == doctest::Approx(8.0).epsilon(0.05));
    }
    std::copy(err, err + 3, prev);
  }
}

TEST_CASE("zero coefficients keep the state constant") {
  const LinearSwitchingModel model({0.0, 0.0}, {0.0, 0.0}, GeneratorMatrix::two_state(5.0), 0.7);
  Engine chain_rng(1), rng(2);
  const auto chain = sample_path(model.generator(), 0, 0.0, 1.0, chain_rng);
  const auto noise = build_noise(GridSpec::from_levels(0.0, 1.0, {32}), chain, 1, rng);
  for (auto kind : {SchemeKind::Euler, SchemeKind::Milstein, SchemeKind::Taylor15}) {
    const auto traj = Integrator(model, kind).integrate(chain, noise, 32);
    CHECK(traj.times.size() == 33);
    CHECK((traj.states.array() == 0.7).all());
  }
}

TEST_CASE("integrator wiring") {
  const auto model = make_fixture("linear2");
  Engine chain_rng(4), brown(5), bridge(6);
  const auto chain = sample_path(model->generator(), 0, 0.0, 1.0, chain_rng);
  const auto noise =
      build_noise(GridSpec::from_levels(0.0, 1.0, {1, 8}), chain, 1, brown, bridge);

  for (auto kind : {SchemeKind::Euler, SchemeKind::Milstein, SchemeKind::Taylor15}) {
    const Integrator integ(*model, kind);
    const auto one = integ.integrate(chain, noise, 1);
    StepWorkspace ws;
    Eigen::VectorXd direct;
    step(kind, *model, make_step_input(chain, noise, 0.0, 1.0), model->x0(), JumpTerms::Piecewise,
         ws, direct);
    CHECK(one.states(0, 1) == direct(0));

    const auto traj = integ.integrate(chain, noise, 8);
    CHECK(traj.states(0, 0) == model->x0()(0));
    Eigen::VectorXd y = model->x0();
    for (std::size_t n = 0; n < 8; ++n) {
      const auto in = make_step_input(chain, noise, traj.times[n], traj.times[n + 1]);
      CHECK(in.regime == traj.regimes[n]);
      for (std::size_t r = 0; r < in.jumps(); ++r) {
        CHECK(in.W_at_jump(r, 0) == doctest::Approx(noise.W_at(in.jump_times[r], 0) -
                                                    noise.W_at(traj.times[n], 0)));
      }
      step(kind, *model, in, y, JumpTerms::Piecewise, ws, direct);
      y = direct;
      CHECK(traj.states(0, static_cast<Eigen::Index>(n + 1)) == y(0));
    }
  }
}

TEST_CASE("integrator errors") {
  const auto bad = make_fixture("noncommutative");
  CHECK_NOTHROW(Integrator(*bad, SchemeKind::Euler));
  for (auto kind : {SchemeKind::Milstein, SchemeKind::Taylor15}) {
    try {
      Integrator(*bad, kind);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CommutativityRequired);
    }
  }

  const LinearSwitchingModel blowup({1e300}, {0.0}, GeneratorMatrix::singleton(), 1.0);
  const ChainPath still(0.0, 1.0, 0, {});
  Engine rng(1);
  const auto noise = build_noise(GridSpec::from_levels(0.0, 1.0, {4}), still, 1, rng);
  try {
    (void)Integrator(blowup, SchemeKind::Euler).integrate(still, noise, 4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteState);
    REQUIRE(e.index().has_value());
    CHECK(*e.index() == 1);
  }

  const auto model = make_fixture("linear2");
  const Integrator integ(*model, SchemeKind::Euler);
  CHECK_THROWS_AS((void)integ.integrate(still, noise, 0), Error);
  CHECK_THROWS_AS((void)integ.integrate(still, noise, 8), Error);
  CHECK_THROWS_AS((void)integ.integrate(ChainPath(0.0, 1.0, 2, {}), noise, 4), Error);
  CHECK_THROWS_AS(make_step_input(still, noise, 0.0, 0.3), Error);
}
