#include "switchtaylor/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "switchtaylor/error.hpp"

namespace switchtaylor {

void Jet::resize(std::size_t d, std::size_t m, int new_order) {
  const auto D = static_cast<Eigen::Index>(d);
  const auto Mw = static_cast<Eigen::Index>(m);
  b.resize(D);
  sigma.resize(D, Mw);
  if (new_order >= 1) {
    b_jac.resize(D, D);
    sigma_jac.resize(m);
    for (auto& s : sigma_jac) s.resize(D, D);
  }
  if (new_order >= 2) {
    b_hess.resize(d);
    for (auto& h : b_hess) h.resize(D, D);
    sigma_hess.resize(d * m);
    for (auto& h : sigma_hess) h.resize(D, D);
  }
  order = new_order;
}

Model::Model(std::string name, std::size_t d, std::size_t m, GeneratorMatrix generator,
             Eigen::VectorXd x0)
    : name_(std::move(name)), d_(d), m_(m), generator_(std::move(generator)), x0_(std::move(x0)) {
  if (d_ == 0 || m_ == 0) throw Error(ErrorCode::InvalidConfig, "model dimensions must be >= 1");
  if (static_cast<std::size_t>(x0_.size()) != d_) {
    throw Error(ErrorCode::InvalidConfig, "initial state has dimension " +
                                              std::to_string(x0_.size()) + ", expected " +
                                              std::to_string(d_));
  }
  if (!x0_.allFinite()) throw Error(ErrorCode::NonFiniteInput, "initial state is not finite");
}

namespace {

void check_point(const Model& model, const Eigen::VectorXd& x, std::size_t regime) {
  if (static_cast<std::size_t>(x.size()) != model.state_dim()) {
    throw Error(ErrorCode::NonFiniteInput, "state has the wrong dimension");
  }
  if (!x.allFinite()) throw Error(ErrorCode::NonFiniteInput, "state is not finite");
  if (regime >= model.regimes()) {
    throw Error(ErrorCode::InvalidState, "regime " + std::to_string(regime + 1) +
                                             " outside 1.." + std::to_string(model.regimes()));
  }
}

}  // namespace

Eigen::VectorXd Model::eval_b(const Eigen::VectorXd& x, std::size_t regime) const {
  check_point(*this, x, regime);
  Eigen::VectorXd out(static_cast<Eigen::Index>(d_));
  drift(x, regime, out);
  return out;
}

Eigen::MatrixXd Model::eval_sigma(const Eigen::VectorXd& x, std::size_t regime) const {
  check_point(*this, x, regime);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(m_));
  diffusion(x, regime, out);
  return out;
}

void Model::jet(const Eigen::VectorXd& x, std::size_t regime, int order, Jet& out) const {
  out.resize(d_, m_, order);
  compute_jet(x, regime, order, out);
}

void Model::compute_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                        Jet& out) const {
  finite_difference_jet(x, regime, order, out);
}

void Model::finite_difference_jet(const Eigen::VectorXd& x, std::size_t regime, int order,
                                  Jet& out) const {
  out.resize(d_, m_, order);
  drift(x, regime, out.b);
  diffusion(x, regime, out.sigma);
  if (order < 1) return;

  const auto D = static_cast<Eigen::Index>(d_);
  const auto Mw = static_cast<Eigen::Index>(m_);
  const double eps = std::numeric_limits<double>::epsilon();
  const double first_scale = std::cbrt(eps);
  const double second_scale = std::sqrt(std::sqrt(eps));

  Eigen::VectorXd y = x;
  Eigen::VectorXd bp(D), bm(D);
  Eigen::MatrixXd sp(D, Mw), sm(D, Mw);
  for (Eigen::Index l = 0; l < D; ++l) {
    const double h = first_scale * std::max(1.0, std::abs(x(l)));
    y(l) = x(l) + h;
    const double up = y(l) - x(l);
    drift(y, regime, bp);
    diffusion(y, regime, sp);
    y(l) = x(l) - h;
    const double down = x(l) - y(l);
    drift(y, regime, bm);
    diffusion(y, regime, sm);
    y(l) = x(l);
    const double width = up + down;
    out.b_jac.col(l) = (bp - bm) / width;
    for (Eigen::Index j = 0; j < Mw; ++j) out.sigma_jac[j].col(l) = (sp.col(j) - sm.col(j)) / width;
  }
  if (order < 2) return;

  std::vector<double> steps(d_);
  for (std::size_t l = 0; l < d_; ++l) {
    steps[l] = second_scale * std::max(1.0, std::abs(x(static_cast<Eigen::Index>(l))));
  }
  Eigen::VectorXd b_pp(D), b_pm(D), b_mp(D), b_mm(D);
  Eigen::MatrixXd s_pp(D, Mw), s_pm(D, Mw), s_mp(D, Mw), s_mm(D, Mw);
  auto eval_at = [&](Eigen::Index l, double dl, Eigen::Index p, double dp, Eigen::VectorXd& bo,
                     Eigen::MatrixXd& so) {
    y = x;
    y(l) += dl;
    y(p) += dp;
    drift(y, regime, bo);
    diffusion(y, regime, so);
  };
  for (Eigen::Index l = 0; l < D; ++l) {
    for (Eigen::Index p = l; p < D; ++p) {
      const double hl = steps[static_cast<std::size_t>(l)];
      const double hp = steps[static_cast<std::size_t>(p)];
      eval_at(l, hl, p, hp, b_pp, s_pp);
      eval_at(l, hl, p, -hp, b_pm, s_pm);
      eval_at(l, -hl, p, hp, b_mp, s_mp);
      eval_at(l, -hl, p, -hp, b_mm, s_mm);
      const double scale = 1.0 / (4.0 * hl * hp);
      for (Eigen::Index k = 0; k < D; ++k) {
        const double v = (b_pp(k) - b_pm(k) - b_mp(k) + b_mm(k)) * scale;
        out.b_hess[static_cast<std::size_t>(k)](l, p) = v;
        out.b_hess[static_cast<std::size_t>(k)](p, l) = v;
        for (Eigen::Index j = 0; j < Mw; ++j) {
          const double w = (s_pp(k, j) - s_pm(k, j) - s_mp(k, j) + s_mm(k, j)) * scale;
          auto& h = out.sigma_hess[static_cast<std::size_t>(k * Mw + j)];
          h(l, p) = w;
          h(p, l) = w;
        }
      }
    }
  }
  y = x;
}

FiniteDifferenceModel::FiniteDifferenceModel(const Model& inner)
    : Model(inner.name() + "-fd", inner.state_dim(), inner.noise_dim(), inner.generator(),
            inner.x0()),
      inner_(inner) {}

void FiniteDifferenceModel::drift(const Eigen::VectorXd& x, std::size_t regime,
                                  Eigen::Ref<Eigen::VectorXd> out) const {
  out = inner_.eval_b(x, regime);
}

void FiniteDifferenceModel::diffusion(const Eigen::VectorXd& x, std::size_t regime,
                                      Eigen::Ref<Eigen::MatrixXd> out) const {
  out = inner_.eval_sigma(x, regime);
}

namespace {

double gradient(const Jet& jet, const Target& t, Eigen::Index l) {
  const auto k = static_cast<Eigen::Index>(t.k);
  if (t.kind == Target::Kind::Drift) return jet.b_jac(k, l);
  return jet.sigma_jac[t.j](k, l);
}

const Eigen::MatrixXd& hessian(const Jet& jet, const Target& t) {
  if (t.kind == Target::Kind::Drift) return jet.b_hess[t.k];
  return jet.sigma_hess[t.k * static_cast<std::size_t>(jet.sigma.cols()) + t.j];
}

}  // namespace

double target_value(const Jet& target, const Target& t) {
  const auto k = static_cast<Eigen::Index>(t.k);
  if (t.kind == Target::Kind::Drift) return target.b(k);
  return target.sigma(k, static_cast<Eigen::Index>(t.j));
}

double apply_letter(const Jet& op, const Jet& target, const Target& t, unsigned letter) {
  const Eigen::Index d = op.b.size();
  double acc = 0.0;
  if (letter == 0) {
    for (Eigen::Index l = 0; l < d; ++l) acc += op.b(l) * gradient(target, t, l);
    const auto& h = hessian(target, t);
    double second = 0.0;
    for (Eigen::Index j = 0; j < op.sigma.cols(); ++j) {
      for (Eigen::Index l = 0; l < d; ++l) {
        for (Eigen::Index p = 0; p < d; ++p) second += op.sigma(l, j) * op.sigma(p, j) * h(l, p);
      }
    }
    return acc + 0.5 * second;
  }
  const auto j = static_cast<Eigen::Index>(letter - 1);
  for (Eigen::Index l = 0; l < d; ++l) acc += op.sigma(l, j) * gradient(target, t, l);
  return acc;
}

double apply_wiener_pair(const Jet& op, const Jet& target, const Target& t, unsigned j1,
                         unsigned j2) {
  const Eigen::Index d = op.b.size();
  const auto a = static_cast<Eigen::Index>(j1 - 1);
  const auto c = static_cast<Eigen::Index>(j2 - 1);
  const auto& h = hessian(target, t);
  const auto& dsig = op.sigma_jac[static_cast<std::size_t>(c)];
  double acc = 0.0;
  for (Eigen::Index l = 0; l < d; ++l) {
    double inner = 0.0;
    for (Eigen::Index p = 0; p < d; ++p) {
      inner += dsig(p, l) * gradient(target, t, p) + op.sigma(p, c) * h(l, p);
    }
    acc += op.sigma(l, a) * inner;
  }
  return acc;
}

double apply_word(const Model& model, const OperatorWord& word, const Target& target,
                  const Eigen::VectorXd& x, std::size_t regime) {
  return apply_word(model, word, target, x, regime, regime);
}

double apply_word(const Model& model, const OperatorWord& word, const Target& target,
                  const Eigen::VectorXd& x, std::size_t target_regime,
                  std::size_t operator_regime) {
  check_point(model, x, target_regime);
  check_point(model, x, operator_regime);
  const std::size_t m = model.noise_dim();
  if (target.k >= model.state_dim() ||
      (target.kind == Target::Kind::Diffusion && target.j >= m)) {
    throw Error(ErrorCode::UnsupportedWordLength, "target entry outside the coefficient shape");
  }
  for (unsigned letter : word.letters) {
    if (letter > m) {
      throw Error(ErrorCode::UnsupportedWordLength,
                  "operator letter " + std::to_string(letter) + " exceeds m");
    }
  }
  const auto& w = word.letters;
  if (w.size() > 2 || (w.size() == 2 && (w[0] == 0 || w[1] == 0))) {
    throw Error(ErrorCode::UnsupportedWordLength,
                "operator words are limited to length 1, or length 2 over Wiener letters");
  }

  Jet op, tgt;
  const int order = w.empty() ? 0 : (w.size() == 2 || w[0] == 0 ? 2 : 1);
  model.jet(x, target_regime, order, tgt);
  double value = 0.0;
  if (w.empty()) {
    value = target_value(tgt, target);
  } else {
    model.jet(x, operator_regime, w.size() == 2 ? 1 : 0, op);
    value = w.size() == 1 ? apply_letter(op, tgt, target, w[0])
                          : apply_wiener_pair(op, tgt, target, w[0], w[1]);
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteDerivative, "operator word evaluated to a non-finite value");
  }
  return value;
}

CommutativityReport check_commutativity(const Model& model,
                                        std::span<const Eigen::VectorXd> points,
                                        double tolerance) {
  CommutativityReport report;
  report.tolerance = tolerance;
  const auto d = model.state_dim();
  const auto m = model.noise_dim();
  Jet jet;
  auto scaled = [](double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (const auto& x : points) {
    for (std::size_t regime = 0; regime < model.regimes(); ++regime) {
      check_point(model, x, regime);
      model.jet(x, regime, 2, jet);
      ++report.points;
      for (std::size_t k = 0; k < d; ++k) {
        for (unsigned j = 1; j <= m; ++j) {
          for (unsigned j1 = 1; j1 <= m; ++j1) {
            const double lhs = apply_letter(jet, jet, Target::diffusion(k, j - 1), j1);
            const double rhs = apply_letter(jet, jet, Target::diffusion(k, j1 - 1), j);
            report.first_order = std::max(report.first_order, scaled(lhs, rhs));
            for (unsigned j2 = 1; j2 <= m; ++j2) {
              const double a = apply_wiener_pair(jet, jet, Target::diffusion(k, j - 1), j2, j1);
              const double b = apply_wiener_pair(jet, jet, Target::diffusion(k, j - 1), j1, j2);
              report.second_order = std::max(report.second_order, scaled(a, b));
            }
          }
        }
      }
    }
  }
  return report;
}

std::vector<Eigen::VectorXd> default_sample_points(const Model& model) {
  const auto d = static_cast<Eigen::Index>(model.state_dim());
  const double values[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  std::vector<Eigen::VectorXd> out{model.x0()};
  if (d <= 3) {
    std::vector<int> counter(static_cast<std::size_t>(d), 0);
    while (true) {
      Eigen::VectorXd p(d);
      for (Eigen::Index l = 0; l < d; ++l) p(l) = values[counter[static_cast<std::size_t>(l)]];
      out.push_back(p);
      std::size_t pos = 0;
      while (pos < counter.size() && ++counter[pos] == 5) counter[pos++] = 0;
      if (pos == counter.size()) break;
    }
  } else {
    for (Eigen::Index l = 0; l < d; ++l) {
      for (double v : values) {
        Eigen::VectorXd p = model.x0();
        p(l) = v;
        out.push_back(p);
      }
    }
  }
  return out;
}

double default_commutativity_tolerance(const Model& model) {
  return model.analytic_derivatives() ? 1e-9 : 1e-5;
}

}  // namespace switchtaylor
