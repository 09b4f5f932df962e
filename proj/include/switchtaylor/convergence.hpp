#pragma once

// Monte Carlo estimate of the strong error E sup_n |X(t_n) - Y(t_n)|^2 against
// a fine-grid reference driven by the same chain and Brownian paths, and the
// least-squares order fit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "switchtaylor/model.hpp"
#include "switchtaylor/schemes.hpp"

namespace switchtaylor {

struct ExperimentPlan {
  std::vector<SchemeKind> schemes{SchemeKind::Euler};
  std::vector<std::size_t> levels;  // step counts n_T of the tested grids
  std::size_t reference = 0;        // step count of the reference grid
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  double t0 = 0.0;
  double t_end = 1.0;
  std::size_t initial_regime = 0;
  JumpTerms jump_terms = JumpTerms::Piecewise;
  /// Taylor15, Milstein or Euler, whichever the model's noise admits, if unset.
  std::optional<SchemeKind> reference_scheme;
  /// 0 selects the available hardware parallelism.
  unsigned threads = 0;
};

struct LevelRow {
  std::size_t steps = 0;
  double h = 0.0;
  double mean = 0.0;       // E sup_n |Y_ref(t_n) - Y(t_n)|^2
  double stderr_mean = 0.0;
  double moment = 0.0;     // E sup_n |Y(t_n)|^2
  double stderr_moment = 0.0;
  double moment_common = 0.0;  // E max |Y|^2 over the coarsest level's grid points
  double stderr_moment_common = 0.0;
};

struct OrderFit {
  double gamma_hat = 0.0;
  double r2 = 0.0;
};

struct ConvergenceReport {
  std::string model;
  SchemeKind scheme = SchemeKind::Euler;
  SchemeKind reference_scheme = SchemeKind::Taylor15;
  std::size_t reference_steps = 0;
  std::size_t paths = 0;
  std::vector<LevelRow> rows;  // h descending
  std::optional<OrderFit> fit; // present with at least three positive rows
  double runtime_seconds = 0.0;
};

/// Slope of log2 sqrt(mean) against log2 h by unweighted least squares.
/// InsufficientLevels below three rows; NonPositiveError for a mean <= 0.
OrderFit fit_order(std::span<const LevelRow> rows);

/// Most accurate scheme whose commutativity requirements the model meets.
SchemeKind select_reference_scheme(const Model& model);

/// ReferenceNotFiner unless every level divides the reference by a power of
/// two; StepTooLargeForChain unless every step h < 1 / (2 qmax); InvalidPlan
/// for empty levels or schemes, fewer than two paths, or a bad initial regime.
void validate_plan(const Model& model, const ExperimentPlan& plan);

/// One report per plan scheme. All schemes and levels see the same chain and
/// noise realisations and the same reference trajectory per path. Results do
/// not depend on the thread count.
std::vector<ConvergenceReport> run_convergence(const Model& model, const ExperimentPlan& plan);

/// (mean, standard error) of the sup-squared error of plan.schemes.front() at
/// one level.
std::pair<double, double> strong_error(const Model& model, const ExperimentPlan& plan,
                                       std::size_t level);

/// Pairwise summation in a fixed tree order.
double pairwise_sum(std::span<const double> values);

}  // namespace switchtaylor
