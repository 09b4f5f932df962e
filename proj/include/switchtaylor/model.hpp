#pragma once

// Coefficient interface of a switching diffusion
//   dX = b(X, alpha) dt + sigma(X, alpha) dW,   X in R^d, W in R^m,
// and the differential operators
//   L^0_i f = sum_k b^k d_k f + 1/2 sum_{k,l,j} sigma^{(k,j)} sigma^{(l,j)} d_k d_l f
//   L^j_i f = sum_k sigma^{(k,j)} d_k f
// applied as operator words. Regimes are 0-based; operator letters follow the
// multi-index alphabet (0 = time, 1..m = Wiener).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchtaylor/markov_chain.hpp"

namespace switchtaylor {

/// Coefficients and their x-derivatives at one point and regime.
/// order 0 fills b and sigma; order 1 adds Jacobians; order 2 adds Hessians.
struct Jet {
  Eigen::VectorXd b;                       // d
  Eigen::MatrixXd sigma;                   // d x m
  Eigen::MatrixXd b_jac;                   // (k, l) = d b^k / d x^l
  std::vector<Eigen::MatrixXd> b_hess;     // [k](l, p)
  std::vector<Eigen::MatrixXd> sigma_jac;  // [j](k, l) = d sigma^{(k,j)} / d x^l
  std::vector<Eigen::MatrixXd> sigma_hess; // [k * m + j](l, p)
  int order = 0;

  void resize(std::size_t d, std::size_t m, int order);
};

/// A scalar coefficient entry: b^k or sigma^{(k,j)}, 0-based.
struct Target {
  enum class Kind { Drift, Diffusion };
  Kind kind = Kind::Drift;
  std::size_t k = 0;
  std::size_t j = 0;

  static Target drift(std::size_t k) { return {Kind::Drift, k, 0}; }
  static Target diffusion(std::size_t k, std::size_t j) { return {Kind::Diffusion, k, j}; }
};

/// Word over {0, 1..m}; J^word = L^{w_1} ... L^{w_l}, rightmost applied first.
struct OperatorWord {
  std::vector<unsigned> letters;
};

class Model {
 public:
  Model(std::string name, std::size_t d, std::size_t m, GeneratorMatrix generator,
        Eigen::VectorXd x0);
  virtual ~Model() = default;

  const std::string& name() const noexcept { return name_; }
  std::size_t state_dim() const noexcept { return d_; }
  std::size_t noise_dim() const noexcept { return m_; }
  std::size_t regimes() const noexcept { return generator_.states(); }
  const GeneratorMatrix& generator() const noexcept { return generator_; }
  const Eigen::VectorXd& x0() const noexcept { return x0_; }

  /// Throws NonFiniteInput for non-finite x and InvalidState for bad regimes.
  Eigen::VectorXd eval_b(const Eigen::VectorXd& x, std::size_t regime) const;
  Eigen::MatrixXd eval_sigma(const Eigen::VectorXd& x, std::size_t regime) const;

  /// Fill `out` up to `order` (0, 1 or 2). Unchecked hot path used by the
  /// schemes; analytic models override compute_jet.
  void jet(const Eigen::VectorXd& x, std::size_t regime, int order, Jet& out) const;

  virtual bool analytic_derivatives() const { return false; }

  /// Central finite differences of drift/diffusion; step cbrt(eps) for first
  /// derivatives and eps^(1/4) for second, each scaled by max(1, |x_l|).
  void finite_difference_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                             Jet& out) const;

 protected:
  virtual void drift(const Eigen::VectorXd& x, std::size_t regime,
                     Eigen::Ref<Eigen::VectorXd> out) const = 0;
  virtual void diffusion(const Eigen::VectorXd& x, std::size_t regime,
                         Eigen::Ref<Eigen::MatrixXd> out) const = 0;
  virtual void compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                           Jet& out) const;

 private:
  std::string name_;
  std::size_t d_;
  std::size_t m_;
  GeneratorMatrix generator_;
  Eigen::VectorXd x0_;
};

/// Forwards coefficient evaluation to another model but always uses finite
/// differences for derivatives.
class FiniteDifferenceModel final : public Model {
 public:
  explicit FiniteDifferenceModel(const Model& inner);

 protected:
  void drift(const Eigen::VectorXd& x, std::size_t regime,
             Eigen::Ref<Eigen::VectorXd> out) const override;
  void diffusion(const Eigen::VectorXd& x, std::size_t regime,
                 Eigen::Ref<Eigen::MatrixXd> out) const override;

 private:
  const Model& inner_;
};

// Operator algebra on jets. `op` supplies the operator coefficients (its
// regime), `target` supplies the function being differentiated.
double target_value(const Jet& target, const Target& t);
double apply_letter(const Jet& op, const Jet& target, const Target& t, unsigned letter);
/// L^{j1} L^{j2} f for Wiener letters j1, j2 >= 1.
double apply_wiener_pair(const Jet& op, const Jet& target, const Target& t, unsigned j1,
                         unsigned j2);

/// J^word applied to the target entry at (x, regime). Words up to length 2
/// are supported; length-2 words must consist of Wiener letters
/// (UnsupportedWordLength otherwise).
double apply_word(const Model& model, const OperatorWord& word, const Target& target,
                  const Eigen::VectorXd& x, std::size_t regime);
/// Operator coefficients taken from `operator_regime`, the target from
/// `target_regime`, as in L^{j}_{i} sigma(x, k).
double apply_word(const Model& model, const OperatorWord& word, const Target& target,
                  const Eigen::VectorXd& x, std::size_t target_regime,
                  std::size_t operator_regime);

struct CommutativityReport {
  /// max |L^{j1} sigma^{(k,j)} - L^{j} sigma^{(k,j1)}| (scaled, see tolerance)
  double first_order = 0.0;
  /// max |L^{j2} L^{j1} sigma^{(k,j)} - L^{j1} L^{j2} sigma^{(k,j)}|
  double second_order = 0.0;
  double tolerance = 0.0;
  std::size_t points = 0;

  bool first_order_ok() const noexcept { return first_order <= tolerance; }
  bool second_order_ok() const noexcept { return second_order <= tolerance; }
  bool passed() const noexcept { return first_order_ok() && second_order_ok(); }
};

/// Discrepancies are measured relative to max(1, |lhs|, |rhs|).
CommutativityReport check_commutativity(const Model& model,
                                        std::span<const Eigen::VectorXd> points,
                                        double tolerance);
/// x0 together with the grid {-2, -1, 0, 1, 2}^d (d <= 3) or the coordinate
/// axes through those values (d > 3).
std::vector<Eigen::VectorXd> default_sample_points(const Model& model);
/// 1e-9 for analytic models, 1e-5 when derivatives come from finite differences.
double default_commutativity_tolerance(const Model& model);

}  // namespace switchtaylor
