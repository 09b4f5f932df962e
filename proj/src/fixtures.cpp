#include "switchtaylor/fixtures.hpp"

#include <cmath>

#include "switchtaylor/error.hpp"

namespace switchtaylor {

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

void require_per_regime(std::size_t got, std::size_t regimes, const char* what) {
  if (got != regimes) {
    throw Error(ErrorCode::InvalidConfig, std::string(what) + " needs one entry per regime (" +
                                              std::to_string(regimes) + "), got " +
                                              std::to_string(got));
  }
}

}  // namespace

LinearSwitchingModel::LinearSwitchingModel(std::vector<double> a, std::vector<double> c,
                                           GeneratorMatrix generator, double x0, std::string name)
    : Model(std::move(name), 1, 1, std::move(generator), scalar(x0)),
      a_(std::move(a)),
      c_(std::move(c)) {
  require_per_regime(a_.size(), regimes(), "drift rates a");
  require_per_regime(c_.size(), regimes(), "volatilities c");
}

void LinearSwitchingModel::drift(const Eigen::VectorXd& x, std::size_t regime,
                                 Eigen::Ref<Eigen::VectorXd> out) const {
  out(0) = a_[regime] * x(0);
}

void LinearSwitchingModel::diffusion(const Eigen::VectorXd& x, std::size_t regime,
                                     Eigen::Ref<Eigen::MatrixXd> out) const {
  out(0, 0) = c_[regime] * x(0);
}

void LinearSwitchingModel::compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                                       Jet& out) const {
  out.b(0) = a_[regime] * x(0);
  out.sigma(0, 0) = c_[regime] * x(0);
  if (order >= 1) {
    out.b_jac(0, 0) = a_[regime];
    out.sigma_jac[0](0, 0) = c_[regime];
  }
  if (order >= 2) {
    out.b_hess[0](0, 0) = 0.0;
    out.sigma_hess[0](0, 0) = 0.0;
  }
}

DiagonalNoiseModel::DiagonalNoiseModel(std::vector<Eigen::Matrix2d> drift,
                                       std::vector<Eigen::Vector2d> sine,
                                       std::vector<Eigen::Vector2d> linear,
                                       GeneratorMatrix generator, Eigen::VectorXd x0)
    : Model("diagonal3", 2, 2, std::move(generator), std::move(x0)),
      drift_(std::move(drift)),
      sine_(std::move(sine)),
      linear_(std::move(linear)) {
  require_per_regime(drift_.size(), regimes(), "drift matrices");
  require_per_regime(sine_.size(), regimes(), "sine amplitudes");
  require_per_regime(linear_.size(), regimes(), "linear volatilities");
}

void DiagonalNoiseModel::drift(const Eigen::VectorXd& x, std::size_t regime,
                               Eigen::Ref<Eigen::VectorXd> out) const {
  out = drift_[regime] * x;
}

void DiagonalNoiseModel::diffusion(const Eigen::VectorXd& x, std::size_t regime,
                                   Eigen::Ref<Eigen::MatrixXd> out) const {
  out.setZero();
  for (Eigen::Index k = 0; k < 2; ++k) {
    out(k, k) = sine_[regime](k) * std::sin(x(k)) + linear_[regime](k) * x(k);
  }
}

void DiagonalNoiseModel::compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                                     Jet& out) const {
  drift(x, regime, out.b);
  diffusion(x, regime, out.sigma);
  if (order >= 1) {
    out.b_jac = drift_[regime];
    for (Eigen::Index j = 0; j < 2; ++j) {
      auto& jac = out.sigma_jac[static_cast<std::size_t>(j)];
      jac.setZero();
      jac(j, j) = sine_[regime](j) * std::cos(x(j)) + linear_[regime](j);
    }
  }
  if (order >= 2) {
    for (auto& h : out.b_hess) h.setZero();
    for (Eigen::Index k = 0; k < 2; ++k) {
      for (Eigen::Index j = 0; j < 2; ++j) {
        auto& h = out.sigma_hess[static_cast<std::size_t>(k * 2 + j)];
        h.setZero();
        if (j == k) h(k, k) = -sine_[regime](k) * std::sin(x(k));
      }
    }
  }
}

AdditiveNoiseModel::AdditiveNoiseModel(std::vector<double> a, std::vector<double> s,
                                       GeneratorMatrix generator, double x0)
    : Model("additive", 1, 1, std::move(generator), scalar(x0)),
      a_(std::move(a)),
      s_(std::move(s)) {
  require_per_regime(a_.size(), regimes(), "drift rates a");
  require_per_regime(s_.size(), regimes(), "noise levels s");
}

void AdditiveNoiseModel::drift(const Eigen::VectorXd& x, std::size_t regime,
                               Eigen::Ref<Eigen::VectorXd> out) const {
  out(0) = a_[regime] * x(0);
}

void AdditiveNoiseModel::diffusion(const Eigen::VectorXd&, std::size_t regime,
                                   Eigen::Ref<Eigen::MatrixXd> out) const {
  out(0, 0) = s_[regime];
}

void AdditiveNoiseModel::compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                                     Jet& out) const {
  out.b(0) = a_[regime] * x(0);
  out.sigma(0, 0) = s_[regime];
  if (order >= 1) {
    out.b_jac(0, 0) = a_[regime];
    out.sigma_jac[0](0, 0) = 0.0;
  }
  if (order >= 2) {
    out.b_hess[0](0, 0) = 0.0;
    out.sigma_hess[0](0, 0) = 0.0;
  }
}

NonCommutativeModel::NonCommutativeModel(GeneratorMatrix generator, double x0)
    : Model("noncommutative", 1, 2, std::move(generator), scalar(x0)) {}

void NonCommutativeModel::drift(const Eigen::VectorXd& x, std::size_t,
                                Eigen::Ref<Eigen::VectorXd> out) const {
  out(0) = -x(0);
}

void NonCommutativeModel::diffusion(const Eigen::VectorXd& x, std::size_t,
                                    Eigen::Ref<Eigen::MatrixXd> out) const {
  out(0, 0) = x(0) * x(0);
  out(0, 1) = x(0);
}

void NonCommutativeModel::compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                                      Jet& out) const {
  drift(x, regime, out.b);
  diffusion(x, regime, out.sigma);
  if (order >= 1) {
    out.b_jac(0, 0) = -1.0;
    out.sigma_jac[0](0, 0) = 2.0 * x(0);
    out.sigma_jac[1](0, 0) = 1.0;
  }
  if (order >= 2) {
    out.b_hess[0](0, 0) = 0.0;
    out.sigma_hess[0](0, 0) = 2.0;
    out.sigma_hess[1](0, 0) = 0.0;
  }
}

std::vector<std::string> fixture_names() {
  return {"linear2", "diagonal3", "additive", "noncommutative"};
}

std::unique_ptr<Model> make_fixture(const std::string& name, const FixtureOverrides& overrides) {
  auto generator = [&](Eigen::MatrixXd fallback) {
    return GeneratorMatrix(overrides.generator ? *overrides.generator : std::move(fallback));
  };
  auto start = [&](Eigen::VectorXd fallback) {
    return overrides.x0 ? *overrides.x0 : std::move(fallback);
  };
  auto scalar_start = [&](double fallback) {
    const auto v = start(scalar(fallback));
    if (v.size() != 1) throw Error(ErrorCode::InvalidConfig, name + " has a scalar state");
    return v(0);
  };
  const Eigen::MatrixXd two_state = GeneratorMatrix::two_state(1.0).matrix();

  if (name == "linear2") {
    return std::make_unique<LinearSwitchingModel>(std::vector{-1.0, 0.5}, std::vector{0.3, 0.8},
                                                  generator(two_state), scalar_start(1.0),
                                                  "linear2");
  }
  if (name == "diagonal3") {
    Eigen::MatrixXd q(3, 3);
    q << -1.0, 0.6, 0.4, 0.5, -1.0, 0.5, 0.3, 0.7, -1.0;
    std::vector<Eigen::Matrix2d> a(3);
    a[0] << -1.0, 0.2, 0.1, -0.5;
    a[1] << 0.3, 0.0, 0.2, -0.8;
    a[2] << -0.5, 0.1, 0.0, 0.2;
    std::vector<Eigen::Vector2d> s{{0.3, 0.2}, {0.5, 0.1}, {0.2, 0.4}};
    std::vector<Eigen::Vector2d> r{{0.2, 0.4}, {0.5, 0.3}, {0.1, 0.6}};
    return std::make_unique<DiagonalNoiseModel>(std::move(a), std::move(s), std::move(r),
                                                generator(q), start(Eigen::Vector2d(1.0, 0.5)));
  }
  if (name == "additive") {
    return std::make_unique<AdditiveNoiseModel>(std::vector{-1.0, 0.5}, std::vector{0.3, 0.8},
                                                generator(two_state), scalar_start(1.0));
  }
  if (name == "noncommutative") {
    return std::make_unique<NonCommutativeModel>(generator(two_state), scalar_start(0.5));
  }
  throw Error(ErrorCode::UnknownModel, "unknown model '" + name + "'");
}

}  // namespace switchtaylor
