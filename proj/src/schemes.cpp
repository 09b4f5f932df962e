#include "switchtaylor/schemes.hpp"

#include <string>

#include "switchtaylor/error.hpp"

namespace switchtaylor {

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Euler: return "euler";
    case SchemeKind::Milstein: return "milstein";
    case SchemeKind::Taylor15: return "taylor15";
  }
  return "unknown";
}

SchemeKind parse_scheme(std::string_view name) {
  if (name == "euler") return SchemeKind::Euler;
  if (name == "milstein") return SchemeKind::Milstein;
  if (name == "taylor15") return SchemeKind::Taylor15;
  throw Error(ErrorCode::InvalidConfig, "unknown scheme '" + std::string(name) +
                                            "' (expected euler, milstein or taylor15)");
}

double scheme_order(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Euler: return 0.5;
    case SchemeKind::Milstein: return 1.0;
    case SchemeKind::Taylor15: return 1.5;
  }
  return 0.0;
}

std::string_view to_string(JumpTerms mode) {
  return mode == JumpTerms::Piecewise ? "piecewise" : "step-indicator";
}

JumpTerms parse_jump_terms(std::string_view name) {
  if (name == "piecewise") return JumpTerms::Piecewise;
  if (name == "step-indicator") return JumpTerms::StepIndicator;
  throw Error(ErrorCode::InvalidConfig, "unknown jump-term mode '" + std::string(name) +
                                            "' (expected piecewise or step-indicator)");
}

void fill_step_input(const ChainPath& chain, const NoisePath& noise, std::size_t a, std::size_t b,
                     StepInput& out) {
  const auto times = noise.times();
  const unsigned m = noise.wiener_dim();
  out.t = times[a];
  out.h = times[b] - times[a];
  out.regime = chain.state_at(out.t);
  out.dW.resize(m);
  out.dZ.resize(m);
  for (unsigned j = 0; j < m; ++j) {
    out.dW[j] = noise.aggregate_W_between(a, b, j);
    out.dZ[j] = noise.aggregate_Z_between(a, b, j);
  }
  out.jump_times.clear();
  out.jump_regimes.clear();
  out.jump_W.clear();
  std::size_t pos = a;
  for (const auto& jump : chain.jumps_in(times[a], times[b])) {
    while (pos < b && times[pos] < jump.time) ++pos;
    if (times[pos] != jump.time) {
      throw Error(ErrorCode::NotAGridTime, "jump time is missing from the noise grid");
    }
    out.jump_times.push_back(jump.time);
    out.jump_regimes.push_back(jump.state);
    for (unsigned j = 0; j < m; ++j) out.jump_W.push_back(noise.aggregate_W_between(a, pos, j));
  }
}

StepInput make_step_input(const ChainPath& chain, const NoisePath& noise, double t,
                          double t_next) {
  const std::size_t a = noise.index_of(t);
  const std::size_t b = noise.index_of(t_next);
  if (!(a < b)) throw Error(ErrorCode::NotAGridTime, "step needs t < t_next");
  StepInput in;
  fill_step_input(chain, noise, a, b, in);
  return in;
}

namespace {

// Time tau_r for r = 1..3, with tau_r := t + h when fewer than r jumps occur.
double tau(const StepInput& in, std::size_t r) {
  return r <= in.jumps() ? in.jump_times[r - 1] : in.t + in.h;
}

// W^j(tau_r) - W^j(t) under the same convention.
double w_tau(const StepInput& in, std::size_t r, std::size_t j) {
  return r <= in.jumps() ? in.W_at_jump(r - 1, j) : in.dW[j];
}

void euler_part(const Jet& base, const StepInput& in, const Eigen::VectorXd& y,
                Eigen::VectorXd& out) {
  out = y + base.b * in.h;
  for (Eigen::Index j = 0; j < base.sigma.cols(); ++j) {
    out += base.sigma.col(j) * in.dW[static_cast<std::size_t>(j)];
  }
}

void milstein_part(const Jet& base, const StepInput& in, Eigen::VectorXd& out) {
  const Eigen::Index d = base.b.size();
  const auto m = static_cast<unsigned>(base.sigma.cols());
  for (Eigen::Index k = 0; k < d; ++k) {
    double acc = 0.0;
    for (unsigned j = 0; j < m; ++j) {
      const auto target = Target::diffusion(static_cast<std::size_t>(k), j);
      for (unsigned j1 = 0; j1 < m; ++j1) {
        const double ito = in.dW[j1] * in.dW[j] - (j == j1 ? in.h : 0.0);
        acc += apply_letter(base, base, target, j1 + 1) * ito;
      }
    }
    out(k) += 0.5 * acc;
  }
}

// (sigma(alpha_r) - sigma(alpha_0)) times the Wiener increment over the
// sub-interval the r-th jump term integrates over.
void sigma_switch(const Jet& base, const Jet& other, const StepInput& in, std::size_t r,
                  JumpTerms mode, Eigen::VectorXd& out) {
  const std::size_t n = in.jumps();
  if (mode == JumpTerms::StepIndicator && n != r) return;
  if (n < r) return;
  for (Eigen::Index j = 0; j < base.sigma.cols(); ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const double dw = w_tau(in, r + 1, jj) - w_tau(in, r, jj);
    out += (other.sigma.col(j) - base.sigma.col(j)) * dw;
  }
}

void taylor15_part(const Jet& base, const StepInput& in, Eigen::VectorXd& out) {
  const Eigen::Index d = base.b.size();
  const auto m = static_cast<unsigned>(base.sigma.cols());
  const double h = in.h;
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const auto drift = Target::drift(kk);
    double acc = 0.5 * apply_letter(base, base, drift, 0) * h * h;
    for (unsigned j1 = 0; j1 < m; ++j1) acc += apply_letter(base, base, drift, j1 + 1) * in.dZ[j1];
    for (unsigned j = 0; j < m; ++j) {
      const auto target = Target::diffusion(kk, j);
      acc += apply_letter(base, base, target, 0) * (h * in.dW[j] - in.dZ[j]);
      double triple = 0.0;
      for (unsigned j1 = 0; j1 < m; ++j1) {
        for (unsigned j2 = 0; j2 < m; ++j2) {
          const double correction = (j == j1 ? in.dW[j2] : 0.0) + (j == j2 ? in.dW[j1] : 0.0) +
                                    (j1 == j2 ? in.dW[j] : 0.0);
          const double product = in.dW[j] * in.dW[j1] * in.dW[j2] - h * correction;
          triple += apply_wiener_pair(base, base, target, j2 + 1, j1 + 1) * product;
        }
      }
      acc += triple / 6.0;
    }
    out(k) += acc;
  }
}

void taylor15_first_jump(const Jet& base, const Jet& first, const StepInput& in, JumpTerms mode,
                         Eigen::VectorXd& out) {
  const std::size_t n = in.jumps();
  if (n == 0 || (mode == JumpTerms::StepIndicator && n != 1)) return;
  const Eigen::Index d = base.b.size();
  const auto m = static_cast<unsigned>(base.sigma.cols());
  const double t1 = tau(in, 1);
  const double t2 = tau(in, 2);
  out += (first.b - base.b) * (t2 - t1);
  for (Eigen::Index k = 0; k < d; ++k) {
    double acc = 0.0;
    for (unsigned j = 0; j < m; ++j) {
      const auto target = Target::diffusion(static_cast<std::size_t>(k), j);
      const double a_j = w_tau(in, 2, j) - w_tau(in, 1, j);
      const double after_j = in.dW[j] - w_tau(in, 2, j);
      for (unsigned j1 = 0; j1 < m; ++j1) {
        const double own = apply_letter(base, base, target, j1 + 1);
        // (j1, N1): Wiener increment before tau_1, then dW^j after it.
        const double mixed = apply_letter(base, first, target, j1 + 1) - own;
        acc += mixed * in.W_at_jump(0, j1) * a_j;
        // (N1, j1): Wiener integral started at tau_1 while exactly one jump
        // has occurred.
        const double shifted = apply_letter(first, first, target, j1 + 1) - own;
        const double a_j1 = w_tau(in, 2, j1) - w_tau(in, 1, j1);
        const double inner = 0.5 * (a_j1 * a_j - (j == j1 ? t2 - t1 : 0.0)) + a_j1 * after_j;
        acc += shifted * inner;
      }
    }
    out(k) += acc;
  }
  sigma_switch(base, first, in, 1, mode, out);
}

}  // namespace

void step(SchemeKind kind, const Model& model, const StepInput& in, const Eigen::VectorXd& y,
          JumpTerms mode, StepWorkspace& ws, Eigen::VectorXd& out) {
  const int order = kind == SchemeKind::Euler ? 0 : (kind == SchemeKind::Milstein ? 1 : 2);
  model.jet(y, in.regime, order, ws.base);
  euler_part(ws.base, in, y, out);
  if (kind == SchemeKind::Euler) return;
  milstein_part(ws.base, in, out);
  if (kind == SchemeKind::Milstein) {
    if (in.jumps() > 0) {
      model.jet(y, in.jump_regimes[0], 0, ws.first);
      sigma_switch(ws.base, ws.first, in, 1, mode, out);
    }
    return;
  }
  taylor15_part(ws.base, in, out);
  if (in.jumps() > 0) {
    model.jet(y, in.jump_regimes[0], 1, ws.first);
    taylor15_first_jump(ws.base, ws.first, in, mode, out);
  }
  if (in.jumps() > 1) {
    model.jet(y, in.jump_regimes[1], 0, ws.second);
    sigma_switch(ws.base, ws.second, in, 2, mode, out);
  }
}

Eigen::VectorXd step_euler(const Model& model, const StepInput& in, const Eigen::VectorXd& y) {
  StepWorkspace ws;
  Eigen::VectorXd out;
  step(SchemeKind::Euler, model, in, y, JumpTerms::Piecewise, ws, out);
  return out;
}

Eigen::VectorXd step_milstein(const Model& model, const StepInput& in, const Eigen::VectorXd& y,
                              JumpTerms mode) {
  StepWorkspace ws;
  Eigen::VectorXd out;
  step(SchemeKind::Milstein, model, in, y, mode, ws, out);
  return out;
}

Eigen::VectorXd step_taylor15(const Model& model, const StepInput& in, const Eigen::VectorXd& y,
                              JumpTerms mode) {
  StepWorkspace ws;
  Eigen::VectorXd out;
  step(SchemeKind::Taylor15, model, in, y, mode, ws, out);
  return out;
}

void require_commutativity(const Model& model, SchemeKind kind) {
  if (kind == SchemeKind::Euler) return;
  const auto points = default_sample_points(model);
  const auto report =
      check_commutativity(model, points, default_commutativity_tolerance(model));
  const bool ok = kind == SchemeKind::Milstein ? report.first_order_ok() : report.passed();
  if (!ok) {
    throw Error(ErrorCode::CommutativityRequired,
                std::string(to_string(kind)) + " requires commuting noise; model '" +
                    model.name() + "' has discrepancy " +
                    std::to_string(kind == SchemeKind::Milstein
                                       ? report.first_order
                                       : std::max(report.first_order, report.second_order)));
  }
}

Integrator::Integrator(const Model& model, SchemeKind kind, JumpTerms mode)
    : model_(model), kind_(kind), mode_(mode) {
  require_commutativity(model_, kind_);
}

namespace {

void check_inputs(const Model& model, const ChainPath& chain, const NoisePath& noise,
                  std::size_t steps) {
  if (noise.wiener_dim() != model.noise_dim()) {
    throw Error(ErrorCode::InvalidGrid, "noise path dimension does not match the model");
  }
  if (chain.t0() != noise.grid().t0 || chain.t_end() != noise.grid().t_end) {
    throw Error(ErrorCode::InvalidGrid, "chain path and noise path cover different horizons");
  }
  if (chain.initial_state() >= model.regimes()) {
    throw Error(ErrorCode::InvalidState, "chain starts outside the model's regimes");
  }
  for (const auto& jump : chain.jumps()) {
    if (jump.state >= model.regimes()) {
      throw Error(ErrorCode::InvalidState, "chain visits a regime the model does not define");
    }
  }
  if (steps == 0) throw Error(ErrorCode::InvalidGrid, "integration needs at least one step");
}

}  // namespace

void Integrator::integrate_states(const ChainPath& chain, const NoisePath& noise,
                                  std::size_t steps, Eigen::MatrixXd& states) const {
  check_inputs(model_, chain, noise, steps);
  const auto d = static_cast<Eigen::Index>(model_.state_dim());
  states.resize(d, static_cast<Eigen::Index>(steps + 1));
  states.col(0) = model_.x0();
  StepWorkspace ws;
  StepInput in;
  Eigen::VectorXd y = model_.x0();
  Eigen::VectorXd next(d);
  std::size_t a = noise.level_index(0, steps);
  for (std::size_t n = 0; n < steps; ++n) {
    const std::size_t b = noise.level_index(n + 1, steps);
    try {
      fill_step_input(chain, noise, a, b, in);
      step(kind_, model_, in, y, mode_, ws, next);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (step " + std::to_string(n) + ")", n);
    }
    if (!next.allFinite()) {
      throw Error(ErrorCode::NonFiniteState,
                  "state became non-finite at step " + std::to_string(n), n);
    }
    y.swap(next);
    states.col(static_cast<Eigen::Index>(n + 1)) = y;
    a = b;
  }
}

Trajectory Integrator::integrate(const ChainPath& chain, const NoisePath& noise,
                                 std::size_t steps) const {
  Trajectory out;
  integrate_states(chain, noise, steps, out.states);
  out.times.reserve(steps + 1);
  out.regimes.reserve(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    const double t = noise.times()[noise.level_index(n, steps)];
    out.times.push_back(t);
    out.regimes.push_back(chain.state_at(t));
  }
  return out;
}

}  // namespace switchtaylor
