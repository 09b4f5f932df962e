#pragma once

// Analytic test models, addressable by name:
//   linear2         scalar dX = a(alpha) X dt + c(alpha) X dW, two regimes
//   diagonal3       d = m = 2, diagonal multiplicative noise, three regimes
//   additive        scalar, sigma constant per regime
//   noncommutative  d = 1, m = 2, sigma = (x^2, x); fails the commutativity check

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "switchtaylor/model.hpp"

namespace switchtaylor {

/// Scalar linear switching model with per-regime drift rate a and volatility c.
class LinearSwitchingModel final : public Model {
 public:
  LinearSwitchingModel(std::vector<double> a, std::vector<double> c, GeneratorMatrix generator,
                       double x0, std::string name = "linear");

  bool analytic_derivatives() const override { return true; }
  const std::vector<double>& drift_rates() const noexcept { return a_; }
  const std::vector<double>& volatilities() const noexcept { return c_; }

 protected:
  void drift(const Eigen::VectorXd& x, std::size_t regime,
             Eigen::Ref<Eigen::VectorXd> out) const override;
  void diffusion(const Eigen::VectorXd& x, std::size_t regime,
                 Eigen::Ref<Eigen::MatrixXd> out) const override;
  void compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                   Jet& out) const override;

 private:
  std::vector<double> a_;
  std::vector<double> c_;
};

/// b = A_i x (full matrix per regime), sigma^{(k,k)} = s_{k,i} sin(x^k) + r_{k,i} x^k,
/// off-diagonal sigma zero.
class DiagonalNoiseModel final : public Model {
 public:
  DiagonalNoiseModel(std::vector<Eigen::Matrix2d> drift, std::vector<Eigen::Vector2d> sine,
                     std::vector<Eigen::Vector2d> linear, GeneratorMatrix generator,
                     Eigen::VectorXd x0);

  bool analytic_derivatives() const override { return true; }

 protected:
  void drift(const Eigen::VectorXd& x, std::size_t regime,
             Eigen::Ref<Eigen::VectorXd> out) const override;
  void diffusion(const Eigen::VectorXd& x, std::size_t regime,
                 Eigen::Ref<Eigen::MatrixXd> out) const override;
  void compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                   Jet& out) const override;

 private:
  std::vector<Eigen::Matrix2d> drift_;
  std::vector<Eigen::Vector2d> sine_;
  std::vector<Eigen::Vector2d> linear_;
};

/// b = a_i x, sigma = s_i.
class AdditiveNoiseModel final : public Model {
 public:
  AdditiveNoiseModel(std::vector<double> a, std::vector<double> s, GeneratorMatrix generator,
                     double x0);

  bool analytic_derivatives() const override { return true; }

 protected:
  void drift(const Eigen::VectorXd& x, std::size_t regime,
             Eigen::Ref<Eigen::VectorXd> out) const override;
  void diffusion(const Eigen::VectorXd& x, std::size_t regime,
                 Eigen::Ref<Eigen::MatrixXd> out) const override;
  void compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                   Jet& out) const override;

 private:
  std::vector<double> a_;
  std::vector<double> s_;
};

/// b = -x, sigma = (x^2, x) in every regime.
class NonCommutativeModel final : public Model {
 public:
  NonCommutativeModel(GeneratorMatrix generator, double x0);

  bool analytic_derivatives() const override { return true; }

 protected:
  void drift(const Eigen::VectorXd& x, std::size_t regime,
             Eigen::Ref<Eigen::VectorXd> out) const override;
  void diffusion(const Eigen::VectorXd& x, std::size_t regime,
                 Eigen::Ref<Eigen::MatrixXd> out) const override;
  void compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                   Jet& out) const override;
};

/// Overrides applied on top of a named fixture's defaults.
struct FixtureOverrides {
  std::optional<Eigen::MatrixXd> generator;
  std::optional<Eigen::VectorXd> x0;
};

std::vector<std::string> fixture_names();
/// Throws UnknownModel for unregistered names.
std::unique_ptr<Model> make_fixture(const std::string& name, const FixtureOverrides& overrides = {});

}  // namespace switchtaylor
