#pragma once

// Run configuration: a flat "key = value" text format. Values are scalars or
// bracketed arrays, nested for matrices:
//
//   model = linear2
//   schemes = [euler, milstein, taylor15]
//   levels = [16, 32, 64, 128, 256]
//   generator = [[-1, 1], [1, -1]]
//
// '#' starts a comment. Regimes (initial_regime) are 1-based.

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchtaylor/model.hpp"
#include "switchtaylor/schemes.hpp"

namespace switchtaylor {

struct RunConfig {
  std::string model = "linear2";
  double t0 = 0.0;
  double T = 1.0;
  std::vector<SchemeKind> schemes{SchemeKind::Euler, SchemeKind::Milstein, SchemeKind::Taylor15};
  std::vector<std::size_t> levels{16, 32, 64, 128, 256};
  std::size_t reference = 0;       // 0: sixteen times the finest level
  std::size_t paths = 10000;
  std::uint64_t seed = 20240601;
  std::string output = ".";
  std::size_t steps = 256;         // simulate
  std::size_t initial_regime = 1;  // 1-based
  JumpTerms jump_terms = JumpTerms::Piecewise;
  std::optional<Eigen::VectorXd> x0;
  std::optional<Eigen::MatrixXd> generator;
  std::optional<std::vector<double>> a;  // inline linear model drift rates
  std::optional<std::vector<double>> c;  // inline linear model volatilities

  bool operator==(const RunConfig& other) const;
};

/// Throws InvalidConfig naming the offending key (or line) on any error.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// Applies SWITCHTAYLOR_SEED when set (InvalidConfig if it is not a uint64).
void apply_environment(RunConfig& config);

/// Inline linear model when both `a` and `c` are given, otherwise the named
/// fixture with the generator and x0 overrides applied.
std::unique_ptr<Model> build_model(const RunConfig& config);

}  // namespace switchtaylor
