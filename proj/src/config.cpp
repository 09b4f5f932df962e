#include "switchtaylor/config.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "switchtaylor/error.hpp"
#include "switchtaylor/fixtures.hpp"

namespace switchtaylor {

bool RunConfig::operator==(const RunConfig& o) const {
  auto same_opt = [](const auto& x, const auto& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    if constexpr (std::is_same_v<std::decay_t<decltype(*x)>, std::vector<double>>) {
      return *x == *y;
    } else {
      return x->rows() == y->rows() && x->cols() == y->cols() && *x == *y;
    }
  };
  return model == o.model && t0 == o.t0 && T == o.T && schemes == o.schemes &&
         levels == o.levels && reference == o.reference && paths == o.paths && seed == o.seed &&
         output == o.output && steps == o.steps && initial_regime == o.initial_regime &&
         jump_terms == o.jump_terms && same_opt(x0, o.x0) && same_opt(generator, o.generator) &&
         same_opt(a, o.a) && same_opt(c, o.c);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, "config key '" + key + "': " + why);
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) bad(key, "expected a non-negative integer, got '" + text + "'");
  return v;
}

double parse_double(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    bad(key, "expected a finite number, got '" + text + "'");
  }
  return v;
}

nlohmann::json parse_array(const std::string& key, const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_array()) bad(key, "expected a bracketed array");
  return j;
}

std::vector<double> number_list(const std::string& key, const nlohmann::json& j) {
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) bad(key, "array entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::string> word_list(const std::string& key, const std::string& text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    return {trim(text)};
  }
  std::vector<std::string> out;
  std::stringstream ss(text.substr(1, text.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad(key, "empty list entry");
    out.push_back(item);
  }
  return out;
}

Eigen::MatrixXd matrix_value(const std::string& key, const nlohmann::json& j) {
  if (j.empty()) bad(key, "matrix needs at least one row");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd out;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) bad(key, "matrix rows must be arrays");
    const auto values = number_list(key, row);
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(values.size());
      out.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(values.size()) != cols) {
      bad(key, "matrix rows have different lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = values[static_cast<std::size_t>(c)];
  }
  return out;
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "model") {
      cfg.model = value;
    } else if (key == "t0") {
      cfg.t0 = parse_double(key, value);
    } else if (key == "T") {
      cfg.T = parse_double(key, value);
    } else if (key == "scheme" || key == "schemes") {
      cfg.schemes.clear();
      for (const auto& name : word_list(key, value)) cfg.schemes.push_back(parse_scheme(name));
    } else if (key == "levels") {
      cfg.levels.clear();
      for (double v : number_list(key, parse_array(key, value))) {
        if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
          bad(key, "levels must be positive integers");
        }
        cfg.levels.push_back(static_cast<std::size_t>(v));
      }
    } else if (key == "reference") {
      cfg.reference = parse_u64(key, value);
    } else if (key == "paths") {
      cfg.paths = parse_u64(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, value);
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "steps") {
      cfg.steps = parse_u64(key, value);
    } else if (key == "initial_regime") {
      cfg.initial_regime = parse_u64(key, value);
      if (cfg.initial_regime == 0) bad(key, "regimes are numbered from 1");
    } else if (key == "jump_terms") {
      cfg.jump_terms = parse_jump_terms(value);
    } else if (key == "x0") {
      const auto v = value.front() == '[' ? number_list(key, parse_array(key, value))
                                          : std::vector<double>{parse_double(key, value)};
      cfg.x0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (key == "generator") {
      cfg.generator = matrix_value(key, parse_array(key, value));
    } else if (key == "a") {
      cfg.a = number_list(key, parse_array(key, value));
    } else if (key == "c") {
      cfg.c = number_list(key, parse_array(key, value));
    } else {
      bad(key, "unknown key");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig && std::string(e.what()).rfind("config key", 0) == 0) {
      throw;
    }
    bad(key, e.what());
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig,
                  "config line " + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "scheme") key = "schemes";
    if (key.empty() || value.empty()) {
      throw Error(ErrorCode::InvalidConfig,
                  "config line " + std::to_string(number) + ": empty key or value");
    }
    if (!seen.insert(key).second) bad(key, "given more than once");
    assign(cfg, key, value);
  }
  return cfg;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "model = " << cfg.model << '\n';
  out << "t0 = " << fmt(cfg.t0) << '\n';
  out << "T = " << fmt(cfg.T) << '\n';
  out << "schemes = [";
  for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
    out << (i ? ", " : "") << to_string(cfg.schemes[i]);
  }
  out << "]\n";
  out << "levels = [";
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) out << (i ? ", " : "") << cfg.levels[i];
  out << "]\n";
  out << "reference = " << cfg.reference << '\n';
  out << "paths = " << cfg.paths << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "output = " << cfg.output << '\n';
  out << "steps = " << cfg.steps << '\n';
  out << "initial_regime = " << cfg.initial_regime << '\n';
  out << "jump_terms = " << to_string(cfg.jump_terms) << '\n';
  if (cfg.x0) out << "x0 = " << fmt_list({cfg.x0->data(), cfg.x0->data() + cfg.x0->size()}) << '\n';
  if (cfg.generator) {
    out << "generator = [";
    for (Eigen::Index r = 0; r < cfg.generator->rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(cfg.generator->cols()));
      for (Eigen::Index c = 0; c < cfg.generator->cols(); ++c) {
        row[static_cast<std::size_t>(c)] = (*cfg.generator)(r, c);
      }
      out << (r ? ", " : "") << fmt_list(row);
    }
    out << "]\n";
  }
  if (cfg.a) out << "a = " << fmt_list(*cfg.a) << '\n';
  if (cfg.c) out << "c = " << fmt_list(*cfg.c) << '\n';
  return out.str();
}

void apply_environment(RunConfig& config) {
  const char* seed = std::getenv("SWITCHTAYLOR_SEED");
  if (seed != nullptr && *seed != '\0') config.seed = parse_u64("SWITCHTAYLOR_SEED", seed);
}

std::unique_ptr<Model> build_model(const RunConfig& config) {
  if (config.a.has_value() != config.c.has_value()) {
    bad(config.a ? "c" : "a", "inline linear models need both 'a' and 'c'");
  }
  try {
    if (config.a) {
      Eigen::MatrixXd q = config.generator ? *config.generator
                                           : GeneratorMatrix::two_state(1.0).matrix();
      double x0 = 1.0;
      if (config.x0) {
        if (config.x0->size() != 1) bad("x0", "inline linear models are scalar");
        x0 = (*config.x0)(0);
      }
      return std::make_unique<LinearSwitchingModel>(*config.a, *config.c,
                                                    GeneratorMatrix(std::move(q)), x0, "linear");
    }
    return make_fixture(config.model, FixtureOverrides{config.generator, config.x0});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidGenerator) bad("generator", e.what());
    if (e.code() == ErrorCode::UnknownModel) bad("model", e.what());
    throw;
  }
}

}  // namespace switchtaylor
