#pragma once

// Strong Taylor schemes for switching diffusions in their commutative closed
// forms: Euler (order 0.5), Milstein (1.0) and the order 1.5 scheme, each with
// the Markov-chain jump corrections, plus a trajectory integrator.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "switchtaylor/markov_chain.hpp"
#include "switchtaylor/model.hpp"
#include "switchtaylor/noise.hpp"

namespace switchtaylor {

enum class SchemeKind { Euler, Milstein, Taylor15 };

std::string_view to_string(SchemeKind kind);
/// "euler", "milstein", "taylor15" (InvalidConfig otherwise).
SchemeKind parse_scheme(std::string_view name);
double scheme_order(SchemeKind kind);

/// How the jump-count integrals I_(N1), I_(N2), I_(j,N1), I_(N1,j) are realised.
///
/// StepIndicator gates each correction on the total number of jumps N in the
/// step (N = 1 or N = 2) and integrates up to t_{n+1}. Piecewise integrates
/// over the sub-interval on which exactly r jumps have occurred, i.e. between
/// tau_r and min(tau_{r+1}, t_{n+1}), for any N. The two agree whenever N <= 1.
enum class JumpTerms { Piecewise, StepIndicator };

std::string_view to_string(JumpTerms mode);
JumpTerms parse_jump_terms(std::string_view name);

/// Everything a single step on (t, t + h] may read.
struct StepInput {
  double t = 0.0;
  double h = 0.0;
  std::size_t regime = 0;  // alpha(t)
  std::vector<double> dW;  // W^j(t + h) - W^j(t), j = 0..m-1
  std::vector<double> dZ;  // int_t^{t+h} (W^j(s) - W^j(t)) ds
  std::vector<double> jump_times;      // tau_1 < ... < tau_N in (t, t + h]
  std::vector<std::size_t> jump_regimes;  // alpha(tau_i)
  std::vector<double> jump_W;          // row-major N x m: W^j(tau_i) - W^j(t)

  std::size_t jumps() const noexcept { return jump_times.size(); }
  double W_at_jump(std::size_t i, std::size_t j) const { return jump_W[i * dW.size() + j]; }
};

/// Step input for the interval between merged-grid positions a < b.
void fill_step_input(const ChainPath& chain, const NoisePath& noise, std::size_t a, std::size_t b,
                     StepInput& out);
/// Step input for (t, t_next]; both must be grid times (NotAGridTime otherwise).
StepInput make_step_input(const ChainPath& chain, const NoisePath& noise, double t,
                          double t_next);

/// Reusable evaluation buffers for the step functions.
struct StepWorkspace {
  Jet base;
  Jet first;
  Jet second;
};

/// One step of `kind` from y. Milstein and Taylor15 assume the model's
/// commutativity conditions hold; use Integrator to have them checked.
void step(SchemeKind kind, const Model& model, const StepInput& in, const Eigen::VectorXd& y,
          JumpTerms mode, StepWorkspace& ws, Eigen::VectorXd& out);

Eigen::VectorXd step_euler(const Model& model, const StepInput& in, const Eigen::VectorXd& y);
Eigen::VectorXd step_milstein(const Model& model, const StepInput& in, const Eigen::VectorXd& y,
                              JumpTerms mode = JumpTerms::Piecewise);
Eigen::VectorXd step_taylor15(const Model& model, const StepInput& in, const Eigen::VectorXd& y,
                              JumpTerms mode = JumpTerms::Piecewise);

struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;  // d x (n + 1), column n is Y(t_n)
  std::vector<std::size_t> regimes;
};

class Integrator {
 public:
  /// Checks commutativity on the default sample points: Milstein needs the
  /// first-order condition, Taylor15 both (CommutativityRequired otherwise).
  Integrator(const Model& model, SchemeKind kind, JumpTerms mode = JumpTerms::Piecewise);

  const Model& model() const noexcept { return model_; }
  SchemeKind kind() const noexcept { return kind_; }
  JumpTerms jump_terms() const noexcept { return mode_; }

  /// Runs `steps` uniform steps from Y0 = x0. Failures carry the step index.
  Trajectory integrate(const ChainPath& chain, const NoisePath& noise, std::size_t steps) const;
  /// Same, writing only the states into `states` (d x (steps + 1)).
  void integrate_states(const ChainPath& chain, const NoisePath& noise, std::size_t steps,
                        Eigen::MatrixXd& states) const;

 private:
  const Model& model_;
  SchemeKind kind_;
  JumpTerms mode_;
};

/// Throws CommutativityRequired if `model` fails the conditions `kind` needs.
void require_commutativity(const Model& model, SchemeKind kind);

}  // namespace switchtaylor
