#include "switchtaylor/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "switchtaylor/config.hpp"
#include "switchtaylor/convergence.hpp"
#include "switchtaylor/error.hpp"
#include "switchtaylor/markov_chain.hpp"
#include "switchtaylor/multi_index.hpp"
#include "switchtaylor/noise.hpp"
#include "switchtaylor/random.hpp"
#include "switchtaylor/schemes.hpp"

namespace switchtaylor::cli {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct Common {
  std::string config_path;
  std::string model;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::string output;
  double T = 0.0;
  std::string jump_terms;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* paths_opt = nullptr;
  CLI::Option* T_opt = nullptr;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "configuration file")->check(CLI::ExistingFile);
  sub->add_option("--model", c.model, "model name (linear2, diagonal3, additive, noncommutative)");
  c.seed_opt = sub->add_option("--seed", c.seed, "experiment seed");
  c.paths_opt = sub->add_option("--paths", c.paths, "Monte Carlo paths");
  sub->add_option("--output", c.output, "output directory");
  c.T_opt = sub->add_option("--T", c.T, "time horizon");
  sub->add_option("--jump-terms", c.jump_terms, "piecewise or step-indicator");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  apply_environment(cfg);
  if (!c.model.empty()) {
    cfg.model = c.model;
    cfg.a.reset();
    cfg.c.reset();
  }
  if (c.seed_opt->count() > 0) cfg.seed = c.seed;
  if (c.paths_opt->count() > 0) cfg.paths = c.paths;
  if (!c.output.empty()) cfg.output = c.output;
  if (c.T_opt->count() > 0) cfg.T = c.T;
  if (!c.jump_terms.empty()) cfg.jump_terms = parse_jump_terms(c.jump_terms);
  return cfg;
}

std::filesystem::path output_file(const RunConfig& cfg, const std::string& name) {
  std::filesystem::path dir(cfg.output);
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

std::size_t regime_index(const RunConfig& cfg, const Model& model) {
  if (cfg.initial_regime == 0 || cfg.initial_regime > model.regimes()) {
    throw Error(ErrorCode::InvalidConfig,
                "config key 'initial_regime': must lie in 1.." + std::to_string(model.regimes()));
  }
  return cfg.initial_regime - 1;
}

nlohmann::json set_json(const IndexSet& set) {
  auto arr = nlohmann::json::array();
  for (const auto& beta : set) {
    auto word = nlohmann::json::array();
    for (const auto& c : beta.components()) word.push_back(c.to_string());
    arr.push_back(word);
  }
  return arr;
}

int cmd_sets(double gamma, unsigned m, const std::string& output, std::ostream& out) {
  const SchemeSets s = build_scheme_sets(gamma, m);
  const std::string g = fmt(gamma, "%.1f");
  out << "gamma = " << g << ", mu = " << s.mu << ", m = " << s.m << '\n';
  out << "A_b = " << to_string(s.a_b) << '\n';
  out << "A_sigma = " << to_string(s.a_sigma) << '\n';
  out << "tilde_A_b = " << to_string(s.tilde_a_b) << '\n';
  out << "tilde_A_sigma = " << to_string(s.tilde_a_sigma) << '\n';
  out << "B(A_b) = " << to_string(s.b_of_a_b) << '\n';
  out << "B(A_sigma) = " << to_string(s.b_of_a_sigma) << '\n';
  nlohmann::json doc;
  doc["gamma"] = gamma;
  doc["mu"] = s.mu;
  doc["m"] = s.m;
  doc["a_b"] = set_json(s.a_b);
  doc["a_sigma"] = set_json(s.a_sigma);
  doc["tilde_a_b"] = set_json(s.tilde_a_b);
  doc["tilde_a_sigma"] = set_json(s.tilde_a_sigma);
  doc["b_of_a_b"] = set_json(s.b_of_a_b);
  doc["b_of_a_sigma"] = set_json(s.b_of_a_sigma);
  RunConfig where;
  where.output = output;
  auto f = open_output(output_file(where, "sets_" + g + ".json"));
  f << doc.dump(2) << '\n';
  return 0;
}

int cmd_chain_stats(const RunConfig& cfg, double window, std::ostream& out) {
  const auto model = build_model(cfg);
  const auto& gen = model->generator();
  const std::size_t initial = regime_index(cfg, *model);
  if (!(window > 0.0) || cfg.t0 + window > cfg.T) {
    throw Error(ErrorCode::InvalidConfig, "--window must lie in (0, T - t0]");
  }
  const std::size_t paths = std::max<std::size_t>(cfg.paths, 2);
  std::map<std::size_t, std::size_t> histogram;
  std::size_t window_counts[4] = {0, 0, 0, 0};
  std::vector<double> mart(paths);
  double total = 0.0;
  for (std::size_t p = 0; p < paths; ++p) {
    Engine rng = make_engine(cfg.seed, p, Stream::Chain);
    const ChainPath path = sample_path(gen, initial, cfg.t0, cfg.T, rng);
    const std::size_t n = path.count_jumps(cfg.t0, cfg.T);
    ++histogram[n];
    total += static_cast<double>(n);
    const std::size_t w = path.count_jumps(cfg.t0, cfg.t0 + window);
    for (std::size_t k = 1; k <= 3; ++k) {
      if (w >= k) ++window_counts[k];
    }
    if (gen.states() > 1) mart[p] = martingale_M(gen, path, 0, 1, cfg.t0, cfg.T);
  }
  const double M = static_cast<double>(paths);
  out << "model=" << model->name() << " regimes=" << gen.states() << " qmax=" << fmt(gen.qmax(), "%g")
      << " T=" << fmt(cfg.T, "%g") << " paths=" << paths << '\n';
  out << "jumps on (t0, T]: mean=" << fmt(total / M, "%.6g") << '\n';
  for (const auto& [n, count] : histogram) {
    out << "  N=" << n << " count=" << count << " freq=" << fmt(static_cast<double>(count) / M, "%.6g")
        << '\n';
  }
  bool all_ok = true;
  for (std::size_t k = 1; k <= 3; ++k) {
    const double freq = static_cast<double>(window_counts[k]) / M;
    const double bound = std::pow(gen.qmax() * window, static_cast<double>(k));
    const double margin = 3.0 * std::sqrt(std::max(bound * (1.0 - bound), 1.0 / M) / M);
    const bool ok = freq <= bound + margin;
    all_ok = all_ok && ok;
    out << "P(N(t0, t0+" << fmt(window, "%g") << "] >= " << k << ") freq=" << fmt(freq, "%.6g")
        << " bound=" << fmt(bound, "%.6g") << (ok ? " ok" : " VIOLATED") << '\n';
  }
  if (gen.states() > 1) {
    const double mean = pairwise_sum(mart) / M;
    double var = 0.0;
    for (double v : mart) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (M - 1.0) / M);
    out << "martingale M_(1,2) over (t0, T]: mean=" << fmt(mean, "%.6g")
        << " stderr=" << fmt(se, "%.3g") << '\n';
  }
  return all_ok ? 0 : 2;
}

int cmd_simulate(const RunConfig& cfg, const std::string& dump_path, std::ostream& out) {
  const auto model = build_model(cfg);
  const std::size_t initial = regime_index(cfg, *model);
  if (cfg.schemes.size() != 1) {
    throw Error(ErrorCode::InvalidConfig, "config key 'schemes': simulate needs exactly one scheme");
  }
  if (cfg.steps == 0) throw Error(ErrorCode::InvalidConfig, "config key 'steps': must be >= 1");
  const Integrator integrator(*model, cfg.schemes.front(), cfg.jump_terms);
  const GridSpec grid = GridSpec::from_levels(cfg.t0, cfg.T, {cfg.steps});
  Engine chain_rng = make_engine(cfg.seed, 0, Stream::Chain);
  Engine brownian = make_engine(cfg.seed, 0, Stream::Brownian);
  Engine bridge = make_engine(cfg.seed, 0, Stream::Bridge);
  const ChainPath chain = sample_path(model->generator(), initial, cfg.t0, cfg.T, chain_rng);
  const NoisePath noise =
      build_noise(grid, chain, static_cast<unsigned>(model->noise_dim()), brownian, bridge);
  const Trajectory traj = integrator.integrate(chain, noise, cfg.steps);

  const auto path = output_file(cfg, "trajectory.csv");
  auto f = open_output(path);
  f << 't';
  for (std::size_t k = 1; k <= model->state_dim(); ++k) f << ",Y" << k;
  f << ",regime\n";
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    f << fmt(traj.times[n]);
    for (Eigen::Index k = 0; k < traj.states.rows(); ++k) {
      f << ',' << fmt(traj.states(k, static_cast<Eigen::Index>(n)));
    }
    f << ',' << traj.regimes[n] + 1 << '\n';
  }
  if (!dump_path.empty()) {
    std::ofstream dump(dump_path, std::ios::binary);
    if (!dump) throw std::runtime_error("cannot write " + dump_path);
    noise.write_binary(dump);
  }
  out << "scheme=" << to_string(cfg.schemes.front()) << " steps=" << cfg.steps
      << " jumps=" << chain.jumps().size() << " wrote " << path.string() << '\n';
  return 0;
}

int cmd_convergence(const RunConfig& cfg, unsigned threads, std::ostream& out) {
  const auto model = build_model(cfg);
  ExperimentPlan plan;
  plan.schemes = cfg.schemes;
  plan.levels = cfg.levels;
  plan.reference = cfg.reference;
  if (plan.reference == 0 && !plan.levels.empty()) {
    plan.reference = 16 * *std::max_element(plan.levels.begin(), plan.levels.end());
  }
  plan.paths = cfg.paths;
  plan.seed = cfg.seed;
  plan.t0 = cfg.t0;
  plan.t_end = cfg.T;
  plan.initial_regime = regime_index(cfg, *model);
  plan.jump_terms = cfg.jump_terms;
  plan.threads = threads;
  const auto reports = run_convergence(*model, plan);
  for (const auto& rep : reports) {
    const std::string name(to_string(rep.scheme));
    auto csv = open_output(output_file(cfg, "convergence_" + name + ".csv"));
    csv << "h,steps,mean_error,stderr,moment,moment_stderr\n";
    for (const auto& row : rep.rows) {
      csv << fmt(row.h) << ',' << row.steps << ',' << fmt(row.mean) << ','
          << fmt(row.stderr_mean) << ',' << fmt(row.moment) << ',' << fmt(row.stderr_moment)
          << '\n';
    }
    auto dat = open_output(output_file(cfg, "loglog_" + name + ".dat"));
    dat << "# log2(h) log2(sqrt(mean_error))\n";
    for (const auto& row : rep.rows) {
      if (row.mean > 0.0) {
        dat << fmt(std::log2(row.h)) << ' ' << fmt(0.5 * std::log2(row.mean)) << '\n';
      }
    }
    out << "scheme=" << name;
    if (rep.fit) {
      out << " gamma_hat=" << fmt(rep.fit->gamma_hat, "%.4f") << " r2=" << fmt(rep.fit->r2, "%.4f");
    } else {
      out << " gamma_hat=nan r2=nan";
    }
    out << " reference=" << to_string(rep.reference_scheme) << '@' << rep.reference_steps
        << " paths=" << rep.paths << " runtime=" << fmt(rep.runtime_seconds, "%.1f") << "s\n";
  }
  return 0;
}

bool is_runtime_failure(ErrorCode code) {
  return code == ErrorCode::NonFiniteState || code == ErrorCode::NonFiniteDerivative ||
         code == ErrorCode::NonPositiveError || code == ErrorCode::EnumerationTooLarge;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strong Taylor schemes for switching diffusions"};
  app.require_subcommand(1);

  double gamma = 0.0;
  unsigned m = 0;
  std::string sets_output = ".";
  auto* sets = app.add_subcommand("sets", "print and export the scheme index sets");
  sets->add_option("--gamma", gamma, "scheme order (0.5, 1.0, 1.5, ...)")->required();
  sets->add_option("--m", m, "Wiener dimension")->required();
  sets->add_option("--output", sets_output, "directory for sets_<gamma>.json");

  Common chain_opts, sim_opts, conv_opts;
  double window = 0.01;
  auto* chain = app.add_subcommand("chain-stats", "jump statistics of sampled chain paths");
  add_common(chain, chain_opts);
  chain->add_option("--window", window, "window length for the jump-count bounds");

  std::string scheme, dump_path;
  std::size_t steps = 0;
  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(simulate, sim_opts);
  simulate->add_option("--scheme", scheme, "euler, milstein or taylor15");
  auto* steps_opt = simulate->add_option("--steps", steps, "number of steps");
  simulate->add_option("--dump-path", dump_path, "write the noise path in binary form");

  std::vector<std::string> conv_schemes;
  std::vector<std::size_t> levels;
  std::size_t reference = 0;
  unsigned threads = 0;
  auto* convergence = app.add_subcommand("convergence", "strong-order experiment");
  add_common(convergence, conv_opts);
  convergence->add_option("--scheme", conv_schemes, "schemes to test (repeatable)");
  convergence->add_option("--levels", levels, "coarse step counts");
  auto* ref_opt = convergence->add_option("--reference", reference, "reference step count");
  convergence->add_option("--threads", threads, "worker threads (default: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sets) return cmd_sets(gamma, m, sets_output, out);
    if (*chain) {
      RunConfig cfg = resolve(chain_opts);
      return cmd_chain_stats(cfg, window, out);
    }
    if (*simulate) {
      RunConfig cfg = resolve(sim_opts);
      if (!scheme.empty()) cfg.schemes = {parse_scheme(scheme)};
      if (cfg.schemes.size() > 1 && scheme.empty()) cfg.schemes = {cfg.schemes.back()};
      if (steps_opt->count() > 0) cfg.steps = steps;
      return cmd_simulate(cfg, dump_path, out);
    }
    RunConfig cfg = resolve(conv_opts);
    if (!conv_schemes.empty()) {
      cfg.schemes.clear();
      for (const auto& s : conv_schemes) cfg.schemes.push_back(parse_scheme(s));
    }
    if (!levels.empty()) cfg.levels = levels;
    if (ref_opt->count() > 0) cfg.reference = reference;
    return cmd_convergence(cfg, threads, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return is_runtime_failure(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace switchtaylor::cli
