#include "switchtaylor/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "switchtaylor/error.hpp"
#include "switchtaylor/noise.hpp"
#include "switchtaylor/random.hpp"

namespace switchtaylor {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

OrderFit fit_order(std::span<const LevelRow> rows) {
  if (rows.size() < 3) {
    throw Error(ErrorCode::InsufficientLevels,
                "order fit needs at least 3 levels, got " + std::to_string(rows.size()));
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].mean > 0.0) || !std::isfinite(rows[i].mean) || !(rows[i].h > 0.0)) {
      throw Error(ErrorCode::NonPositiveError, "order fit needs positive errors and steps", i);
    }
    x.push_back(std::log2(rows[i].h));
    y.push_back(0.5 * std::log2(rows[i].mean));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InsufficientLevels, "order fit needs distinct step sizes");
  OrderFit fit;
  fit.gamma_hat = sxy / sxx;
  const double residual = syy - fit.gamma_hat * sxy;
  fit.r2 = syy > 0.0 ? 1.0 - std::max(residual, 0.0) / syy : 1.0;
  return fit;
}

SchemeKind select_reference_scheme(const Model& model) {
  const auto points = default_sample_points(model);
  const auto report = check_commutativity(model, points, default_commutativity_tolerance(model));
  if (report.passed()) return SchemeKind::Taylor15;
  if (report.first_order_ok()) return SchemeKind::Milstein;
  return SchemeKind::Euler;
}

void validate_plan(const Model& model, const ExperimentPlan& plan) {
  if (plan.levels.empty()) throw Error(ErrorCode::InvalidPlan, "plan has no levels");
  if (plan.schemes.empty()) throw Error(ErrorCode::InvalidPlan, "plan has no schemes");
  if (plan.paths < 2) throw Error(ErrorCode::InvalidPlan, "plan needs at least 2 paths");
  if (!(plan.t0 < plan.t_end) || !std::isfinite(plan.t0) || !std::isfinite(plan.t_end)) {
    throw Error(ErrorCode::InvalidPlan, "plan needs finite t0 < T");
  }
  if (plan.initial_regime >= model.regimes()) {
    throw Error(ErrorCode::InvalidPlan, "initial regime outside the model's regimes");
  }
  if (plan.reference == 0) throw Error(ErrorCode::ReferenceNotFiner, "reference level is unset");
  for (std::size_t steps : plan.levels) {
    if (steps == 0 || steps > plan.reference || plan.reference % steps != 0 ||
        !std::has_single_bit(plan.reference / steps)) {
      throw Error(ErrorCode::ReferenceNotFiner,
                  "level " + std::to_string(steps) + " is not a dyadic coarsening of reference " +
                      std::to_string(plan.reference));
    }
  }
  const double q = model.generator().qmax();
  if (q > 0.0) {
    const std::size_t coarsest = *std::min_element(plan.levels.begin(), plan.levels.end());
    const double h = (plan.t_end - plan.t0) / static_cast<double>(coarsest);
    if (!(h < 1.0 / (2.0 * q))) {
      throw Error(ErrorCode::StepTooLargeForChain,
                  "step " + std::to_string(h) + " violates h < 1/(2 qmax) = " +
                      std::to_string(1.0 / (2.0 * q)));
    }
  }
}

namespace {

double sup_squared_diff(const Eigen::MatrixXd& fine, const Eigen::MatrixXd& coarse,
                        std::size_t stride) {
  double worst = 0.0;
  for (Eigen::Index n = 0; n < coarse.cols(); ++n) {
    const double e =
        (fine.col(n * static_cast<Eigen::Index>(stride)) - coarse.col(n)).squaredNorm();
    worst = std::max(worst, e);
  }
  return worst;
}

double sup_squared(const Eigen::MatrixXd& states, std::size_t stride) {
  double worst = 0.0;
  for (Eigen::Index n = 0; n < states.cols(); n += static_cast<Eigen::Index>(stride)) {
    worst = std::max(worst, states.col(n).squaredNorm());
  }
  return worst;
}

void check_coupling(const NoisePath& noise, std::size_t steps, std::size_t reference,
                    std::size_t path) {
  const std::size_t n = static_cast<std::size_t>(mix64(path) % steps);
  const std::size_t ratio = reference / steps;
  const std::size_t a = noise.level_index(n, steps);
  const std::size_t b = noise.level_index(n + 1, steps);
  for (unsigned j = 0; j < noise.wiener_dim(); ++j) {
    const double coarse = noise.aggregate_W_between(a, b, j);
    double fine = 0.0;
    for (std::size_t r = 0; r < ratio; ++r) {
      fine += noise.aggregate_W_between(noise.level_index(n * ratio + r, reference),
                                        noise.level_index(n * ratio + r + 1, reference), j);
    }
    if (std::abs(coarse - fine) > 1e-12 * std::max(1.0, std::abs(coarse))) {
      throw Error(ErrorCode::InvalidGrid, "coarse and reference Wiener increments disagree");
    }
  }
}

std::pair<double, double> mean_and_stderr(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - mean) * (v[i] - mean);
  const double var = pairwise_sum(dev) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

std::vector<ConvergenceReport> run_convergence(const Model& model, const ExperimentPlan& plan) {
  validate_plan(model, plan);
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::size_t> levels = plan.levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> all = levels;
  all.push_back(plan.reference);
  const GridSpec grid = GridSpec::from_levels(plan.t0, plan.t_end, all);

  const SchemeKind ref_kind = plan.reference_scheme.value_or(select_reference_scheme(model));
  const Integrator reference(model, ref_kind, plan.jump_terms);
  std::vector<Integrator> integrators;
  for (SchemeKind kind : plan.schemes) integrators.emplace_back(model, kind, plan.jump_terms);

  const std::size_t S = integrators.size();
  const std::size_t L = levels.size();
  const std::size_t M = plan.paths;
  std::vector<double> errors(S * L * M), moments(S * L * M), common(S * L * M);
  const unsigned m = static_cast<unsigned>(model.noise_dim());

  auto run_path = [&](std::size_t p, Eigen::MatrixXd& fine, Eigen::MatrixXd& coarse) {
    Engine chain_rng = make_engine(plan.seed, p, Stream::Chain);
    Engine brownian = make_engine(plan.seed, p, Stream::Brownian);
    Engine bridge = make_engine(plan.seed, p, Stream::Bridge);
    const ChainPath chain =
        sample_path(model.generator(), plan.initial_regime, plan.t0, plan.t_end, chain_rng);
    const NoisePath noise = build_noise(grid, chain, m, brownian, bridge);
    check_coupling(noise, levels[p % L], plan.reference, p);
    reference.integrate_states(chain, noise, plan.reference, fine);
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t l = 0; l < L; ++l) {
        integrators[s].integrate_states(chain, noise, levels[l], coarse);
        const std::size_t slot = (s * L + l) * M + p;
        errors[slot] = sup_squared_diff(fine, coarse, plan.reference / levels[l]);
        moments[slot] = sup_squared(coarse, 1);
        common[slot] = sup_squared(coarse, levels[l] / levels.front());
      }
    }
  };

  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (M + kBlock - 1) / kBlock;
  unsigned threads = plan.threads != 0 ? plan.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, blocks));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    Eigen::MatrixXd fine, coarse;
    while (!failed.load()) {
      const std::size_t block = next.fetch_add(1);
      if (block >= blocks) return;
      try {
        for (std::size_t p = block * kBlock; p < std::min(M, (block + 1) * kBlock); ++p) {
          run_path(p, fine, coarse);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        failed.store(true);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<ConvergenceReport> reports;
  for (std::size_t s = 0; s < S; ++s) {
    ConvergenceReport rep;
    rep.model = model.name();
    rep.scheme = plan.schemes[s];
    rep.reference_scheme = ref_kind;
    rep.reference_steps = plan.reference;
    rep.paths = M;
    rep.runtime_seconds = runtime;
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t slot = (s * L + l) * M;
      LevelRow row;
      row.steps = levels[l];
      row.h = grid.step_size(levels[l]);
      std::tie(row.mean, row.stderr_mean) =
          mean_and_stderr(std::span<const double>(errors).subspan(slot, M));
      std::tie(row.moment, row.stderr_moment) =
          mean_and_stderr(std::span<const double>(moments).subspan(slot, M));
      std::tie(row.moment_common, row.stderr_moment_common) =
          mean_and_stderr(std::span<const double>(common).subspan(slot, M));
      rep.rows.push_back(row);
    }
    const bool fittable = rep.rows.size() >= 3 &&
                          std::all_of(rep.rows.begin(), rep.rows.end(),
                                      [](const LevelRow& r) { return r.mean > 0.0; });
    if (fittable) rep.fit = fit_order(rep.rows);
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::pair<double, double> strong_error(const Model& model, const ExperimentPlan& plan,
                                       std::size_t level) {
  ExperimentPlan single = plan;
  single.schemes = {plan.schemes.at(0)};
  single.levels = {level};
  const auto reports = run_convergence(model, single);
  const auto& row = reports.front().rows.front();
  return {row.mean, row.stderr_mean};
}

}  // namespace switchtaylor
