#include <doctest.h>

#include <cmath>
#include <limits>

#include "switchtaylor/error.hpp"
#include "switchtaylor/fixtures.hpp"
#include "switchtaylor/model.hpp"

using namespace switchtaylor;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// b = x^2 + sin x, sigma = (x cos x, x^3), single regime.
class CurvedModel final : public Model {
 public:
  CurvedModel() : Model("curved", 1, 2, GeneratorMatrix::singleton(), vec({0.5})) {}

 protected:
  void drift(const Eigen::VectorXd& x, std::size_t, Eigen::Ref<Eigen::VectorXd> out) const override {
    out(0) = x(0) * x(0) + std::sin(x(0));
  }
  void diffusion(const Eigen::VectorXd& x, std::size_t,
                 Eigen::Ref<Eigen::MatrixXd> out) const override {
    out(0, 0) = x(0) * std::cos(x(0));
    out(0, 1) = x(0) * x(0) * x(0);
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("coefficient evaluation of the linear fixture") {
  const auto model = make_fixture("linear2");
  CHECK(model->state_dim() == 1);
  CHECK(model->noise_dim() == 1);
  CHECK(model->regimes() == 2);
  CHECK(model->eval_b(vec({2.0}), 0)(0) == doctest::Approx(-2.0));
  CHECK(model->eval_b(vec({2.0}), 1)(0) == doctest::Approx(1.0));
  CHECK(model->eval_sigma(vec({2.0}), 1)(0, 0) == doctest::Approx(1.6));
  CHECK(model->eval_sigma(vec({2.0}), 0)(0, 0) == doctest::Approx(0.6));
}

TEST_CASE("operator words on the linear fixture") {
  const auto model = make_fixture("linear2");
  const double a[2] = {-1.0, 0.5}, c[2] = {0.3, 0.8};
  for (double x : {-1.5, 0.0, 0.7, 3.0}) {
    for (std::size_t i = 0; i < 2; ++i) {
      const auto X = vec({x});
      const auto sig = Target::diffusion(0, 0);
      const auto drift = Target::drift(0);
      CHECK(apply_word(*model, {{1}}, sig, X, i) == doctest::Approx(c[i] * c[i] * x));
      CHECK(apply_word(*model, {{0}}, drift, X, i) == doctest::Approx(a[i] * a[i] * x));
      CHECK(apply_word(*model, {{0}}, sig, X, i) == doctest::Approx(a[i] * c[i] * x));
      CHECK(apply_word(*model, {{1}}, drift, X, i) == doctest::Approx(c[i] * a[i] * x));
      CHECK(apply_word(*model, {{1, 1}}, sig, X, i) ==
            doctest::Approx(c[i] * c[i] * c[i] * x));
      CHECK(apply_word(*model, {}, sig, X, i) == model->eval_sigma(X, i)(0, 0));
      CHECK(apply_word(*model, {}, drift, X, i) == model->eval_b(X, i)(0));
      // Operator from regime i acting on the coefficient of the other regime.
      const std::size_t k = 1 - i;
      CHECK(apply_word(*model, {{1}}, sig, X, k, i) == doctest::Approx(c[i] * c[k] * x));
    }
  }
}

TEST_CASE("word composition order") {
  // sigma = (x^2, x): L^1 L^2 x^2 = 4x^3 while L^2 L^1 x^2 = 6x^3.
  const auto model = make_fixture("noncommutative");
  const auto X = vec({0.7});
  const double x3 = 0.7 * 0.7 * 0.7;
  CHECK(apply_word(*model, {{1, 2}}, Target::diffusion(0, 0), X, 0) == doctest::Approx(4.0 * x3));
  CHECK(apply_word(*model, {{2, 1}}, Target::diffusion(0, 0), X, 0) == doctest::Approx(6.0 * x3));
  CHECK(apply_word(*model, {{2}}, Target::diffusion(0, 0), X, 0) == doctest::Approx(2.0 * 0.49));
  CHECK(apply_word(*model, {{1}}, Target::diffusion(0, 1), X, 0) == doctest::Approx(0.49));
}

TEST_CASE("property: finite differences match analytic derivatives") {
  std::vector<std::unique_ptr<Model>> models;
  for (const auto& name : fixture_names()) models.push_back(make_fixture(name));
  for (const auto& model : models) {
    CAPTURE(model->name());
    const FiniteDifferenceModel fd(*model);
    CHECK_FALSE(fd.analytic_derivatives());
    const auto d = static_cast<Eigen::Index>(model->state_dim());
    const unsigned m = static_cast<unsigned>(model->noise_dim());
    for (int step = 0; step <= 8; ++step) {
      Eigen::VectorXd x = Eigen::VectorXd::Constant(d, -2.0 + 0.5 * step);
      if (d > 1) x(1) = 0.3 - 0.25 * step;
      for (std::size_t i = 0; i < model->regimes(); ++i) {
        std::vector<Target> targets;
        for (Eigen::Index k = 0; k < d; ++k) {
          const auto kk = static_cast<std::size_t>(k);
          targets.push_back(Target::drift(kk));
          for (unsigned j = 0; j < m; ++j) targets.push_back(Target::diffusion(kk, j));
        }
        for (const auto& t : targets) {
          std::vector<OperatorWord> words{{{0}}};
          for (unsigned j = 1; j <= m; ++j) {
            words.push_back({{j}});
            for (unsigned j2 = 1; j2 <= m; ++j2) words.push_back({{j, j2}});
          }
          for (const auto& w : words) {
            const double exact = apply_word(*model, w, t, x, i);
            const double approx = apply_word(fd, w, t, x, i);
            CHECK(rel(approx, exact) < 1e-5);
          }
        }
      }
    }
  }
}

TEST_CASE("finite differences on a model without analytic derivatives") {
  const CurvedModel model;
  CHECK_FALSE(model.analytic_derivatives());
  for (double x : {-1.7, -0.2, 0.4, 1.9}) {
    const auto X = vec({x});
    const double s1 = x * std::cos(x), ds1 = std::cos(x) - x * std::sin(x);
    const double d2s1 = -2.0 * std::sin(x) - x * std::cos(x);
    const double s2 = x * x * x, ds2 = 3.0 * x * x, d2s2 = 6.0 * x;
    const double b = x * x + std::sin(x), db = 2.0 * x + std::cos(x);
    const double d2b = 2.0 - std::sin(x);
    const double L0b = b * db + 0.5 * (s1 * s1 + s2 * s2) * d2b;
    CHECK(rel(apply_word(model, {{0}}, Target::drift(0), X, 0), L0b) < 1e-5);
    CHECK(rel(apply_word(model, {{2}}, Target::diffusion(0, 0), X, 0), s2 * ds1) < 1e-5);
    // L^1 L^2 sigma1 = s1 d/dx (s2 ds1)
    const double L1L2 = s1 * (ds2 * ds1 + s2 * d2s1);
    CHECK(rel(apply_word(model, {{1, 2}}, Target::diffusion(0, 0), X, 0), L1L2) < 1e-5);
    const double L2L1 = s2 * (ds1 * ds2 + s1 * d2s2);
    CHECK(rel(apply_word(model, {{2, 1}}, Target::diffusion(0, 1), X, 0), L2L1) < 1e-5);
  }
  CHECK(default_commutativity_tolerance(model) == 1e-5);
}

TEST_CASE("commutativity checks") {
  for (const char* name : {"linear2", "diagonal3", "additive"}) {
    CAPTURE(name);
    const auto model = make_fixture(name);
    const auto points = default_sample_points(*model);
    CHECK_FALSE(points.empty());
    const auto report =
        check_commutativity(*model, points, default_commutativity_tolerance(*model));
    CHECK(report.passed());
    CHECK(report.points == points.size() * model->regimes());
  }
  const auto bad = make_fixture("noncommutative");
  const auto report = check_commutativity(*bad, default_sample_points(*bad), 1e-9);
  CHECK_FALSE(report.first_order_ok());
  CHECK_FALSE(report.passed());
  CHECK(report.first_order > 0.1);
  CHECK(default_commutativity_tolerance(*bad) == 1e-9);
}

TEST_CASE("points and words are validated") {
  const auto model = make_fixture("linear2");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    (void)model->eval_b(vec({nan}), 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteInput);
  }
  CHECK_THROWS_AS((void)model->eval_sigma(vec({1.0, 2.0}), 0), Error);
  try {
    (void)model->eval_b(vec({1.0}), 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidState);
  }
  for (const OperatorWord& w : {OperatorWord{{0, 1}}, OperatorWord{{1, 0}},
                                OperatorWord{{1, 1, 1}}, OperatorWord{{2}}}) {
    try {
      (void)apply_word(*model, w, Target::diffusion(0, 0), vec({1.0}), 0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedWordLength);
    }
  }
  try {
    (void)make_fixture("nope");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownModel);
  }
}

TEST_CASE("fixture overrides") {
  Eigen::MatrixXd q(2, 2);
  q << -3.0, 3.0, 1.0, -1.0;
  const auto model = make_fixture("linear2", FixtureOverrides{q, vec({2.5})});
  CHECK(model->generator().qmax() == 3.0);
  CHECK(model->x0()(0) == 2.5);
  CHECK_THROWS_AS(make_fixture("diagonal3", FixtureOverrides{q, std::nullopt}), Error);
}
