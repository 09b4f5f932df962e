#include "switchtaylor/multi_index.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "switchtaylor/error.hpp"

namespace switchtaylor {

std::string Component::to_string() const {
  switch (kind_) {
    case Kind::TimeInt: return "0";
    case Kind::Wiener: return std::to_string(index_);
    case Kind::JumpExact: return "N" + std::to_string(index_);
    case Kind::JumpOverflow: return "Nbar" + std::to_string(index_);
  }
  return "?";
}

std::vector<Component> Alphabet::letters() const {
  std::vector<Component> out;
  out.reserve(m + mu + 2);
  out.push_back(Component::time());
  for (unsigned j = 1; j <= m; ++j) out.push_back(Component::wiener(j));
  for (unsigned r = 1; r <= mu; ++r) out.push_back(Component::jump(r));
  out.push_back(Component::overflow(mu));
  return out;
}

bool Alphabet::contains(Component c) const noexcept {
  switch (c.kind()) {
    case Component::Kind::TimeInt: return true;
    case Component::Kind::Wiener: return c.index() >= 1 && c.index() <= m;
    case Component::Kind::JumpExact: return c.index() >= 1 && c.index() <= mu;
    case Component::Kind::JumpOverflow: return c.index() == mu;
  }
  return false;
}

MultiIndex MultiIndex::validate(std::vector<Component> components) {
  for (std::size_t i = 1; i < components.size(); ++i) {
    if (components[i].is_jump() && components[i - 1].is_jump()) {
      throw Error(ErrorCode::ConsecutiveJumpComponents,
                  "jump components at positions " + std::to_string(i) + " and " +
                      std::to_string(i + 1) + " are adjacent",
                  i + 1);
    }
  }
  return MultiIndex(std::move(components));
}

IndexCounts MultiIndex::counts() const noexcept {
  IndexCounts c;
  c.length = components_.size();
  for (const auto& comp : components_) {
    switch (comp.kind()) {
      case Component::Kind::TimeInt: ++c.time; break;
      case Component::Kind::Wiener: ++c.wiener; break;
      default:
        ++c.jumps;
        c.max_jump = std::max(c.max_jump, comp.jump_value());
        break;
    }
  }
  return c;
}

unsigned MultiIndex::eta() const noexcept {
  const auto c = counts();
  return static_cast<unsigned>(c.wiener + 2 * c.time) + c.max_jump;
}

IndexClass MultiIndex::classify() const noexcept {
  if (!has_jump()) return IndexClass::M1;
  return components_.front().is_jump() ? IndexClass::M3 : IndexClass::M2;
}

bool MultiIndex::has_jump_exact() const noexcept {
  return std::any_of(components_.begin(), components_.end(), [](const Component& c) {
    return c.kind() == Component::Kind::JumpExact;
  });
}

bool MultiIndex::has_jump() const noexcept {
  return std::any_of(components_.begin(), components_.end(),
                     [](const Component& c) { return c.is_jump(); });
}

bool MultiIndex::all_time() const noexcept {
  return std::all_of(components_.begin(), components_.end(), [](const Component& c) {
    return c.kind() == Component::Kind::TimeInt;
  });
}

MultiIndex MultiIndex::drop_first() const {
  if (empty()) throw Error(ErrorCode::EmptyIndex, "cannot drop a component of nu");
  return MultiIndex(std::vector<Component>(components_.begin() + 1, components_.end()));
}

MultiIndex MultiIndex::drop_last() const {
  if (empty()) throw Error(ErrorCode::EmptyIndex, "cannot drop a component of nu");
  return MultiIndex(std::vector<Component>(components_.begin(), components_.end() - 1));
}

MultiIndex MultiIndex::prepend(Component c) const {
  if (!empty() && c.is_jump() && components_.front().is_jump()) {
    throw Error(ErrorCode::ConsecutiveJumpComponents,
                "prepending " + c.to_string() + " to " + to_string() +
                    " makes adjacent jump components",
                2);
  }
  std::vector<Component> out;
  out.reserve(components_.size() + 1);
  out.push_back(c);
  out.insert(out.end(), components_.begin(), components_.end());
  return MultiIndex(std::move(out));
}

bool MultiIndex::in_alphabet(const Alphabet& alphabet) const noexcept {
  return std::all_of(components_.begin(), components_.end(),
                     [&](const Component& c) { return alphabet.contains(c); });
}

std::string MultiIndex::to_string() const {
  if (empty()) return "nu";
  std::string out = "(";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) out += ',';
    out += components_[i].to_string();
  }
  out += ')';
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

unsigned parse_unsigned(std::string_view s, std::string_view whole) {
  unsigned v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::ComponentOutOfAlphabet,
                "cannot parse component '" + std::string(s) + "' in " + std::string(whole));
  }
  return v;
}

}  // namespace

MultiIndex MultiIndex::parse(std::string_view text) {
  auto s = trim(text);
  if (s == "nu" || s == "()" || s.empty()) return MultiIndex();
  if (s.front() != '(' || s.back() != ')') {
    throw Error(ErrorCode::ComponentOutOfAlphabet,
                "multi-index must be parenthesised: " + std::string(text));
  }
  s = s.substr(1, s.size() - 2);
  std::vector<Component> comps;
  while (true) {
    const auto comma = s.find(',');
    auto tok = trim(s.substr(0, comma));
    if (tok.starts_with("Nbar")) {
      comps.push_back(Component::overflow(parse_unsigned(tok.substr(4), text)));
    } else if (tok.starts_with("N")) {
      comps.push_back(Component::jump(parse_unsigned(tok.substr(1), text)));
    } else {
      const unsigned v = parse_unsigned(tok, text);
      comps.push_back(v == 0 ? Component::time() : Component::wiener(v));
    }
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return validate(std::move(comps));
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.length() <=> b.length(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.components_.begin(), a.components_.end(),
                                                b.components_.begin(), b.components_.end());
}

MultiIndex concat(const MultiIndex& a, const MultiIndex& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<Component> out(a.components().begin(), a.components().end());
  out.insert(out.end(), b.components().begin(), b.components().end());
  return MultiIndex::validate(std::move(out));
}

IndexSet build_hierarchical_set(const std::function<bool(const MultiIndex&)>& keep,
                                const Alphabet& alphabet, std::size_t max_length) {
  IndexSet out;
  const MultiIndex nu;
  if (!keep(nu)) return out;
  out.insert(nu);
  const auto letters = alphabet.letters();
  std::vector<MultiIndex> frontier{nu};
  while (!frontier.empty()) {
    std::vector<MultiIndex> next;
    for (const auto& tail : frontier) {
      for (const auto& c : letters) {
        if (!tail.empty() && c.is_jump() && tail[0].is_jump()) continue;
        auto word = tail.prepend(c);
        if (!keep(word)) continue;
        if (word.length() > max_length) {
          throw Error(ErrorCode::EnumerationTooLarge,
                      "hierarchical set enumeration exceeded length " +
                          std::to_string(max_length));
        }
        if (out.insert(word).second) next.push_back(std::move(word));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

IndexSet remainder_set(const IndexSet& set, const Alphabet& alphabet) {
  if (set.empty()) return IndexSet{MultiIndex()};
  IndexSet out;
  const auto letters = alphabet.letters();
  for (const auto& tail : set) {
    for (const auto& c : letters) {
      if (!tail.empty() && c.is_jump() && tail[0].is_jump()) continue;
      auto word = tail.prepend(c);
      if (!set.contains(word)) out.insert(std::move(word));
    }
  }
  return out;
}

bool is_hierarchical(const IndexSet& set) {
  for (const auto& beta : set) {
    if (!beta.empty() && !set.contains(beta.drop_first())) return false;
  }
  return set.empty() || set.contains(MultiIndex());
}

SchemeSets build_scheme_sets(double gamma, unsigned m) {
  const double twice = 2.0 * gamma;
  if (!std::isfinite(gamma) || twice < 1.0 || std::abs(twice - std::round(twice)) > 1e-12) {
    throw Error(ErrorCode::InvalidGamma,
                "gamma must be a positive half-integer, got " + std::to_string(gamma));
  }
  if (gamma > 3.0) {
    throw Error(ErrorCode::InvalidGamma,
                "gamma above 3 is not supported (index sets grow combinatorially)");
  }
  if (m == 0) throw Error(ErrorCode::InvalidGamma, "Wiener dimension m must be at least 1");

  const int order2 = static_cast<int>(std::lround(twice));
  SchemeSets s;
  s.gamma = gamma;
  s.mu = static_cast<unsigned>(order2);
  s.m = m;
  const Alphabet alphabet{m, s.mu};

  s.a_sigma = build_hierarchical_set(
      [&](const MultiIndex& b) { return static_cast<int>(b.eta()) <= order2 - 1; }, alphabet);
  s.a_b = build_hierarchical_set(
      [&](const MultiIndex& b) {
        if (b.empty()) return true;
        const int eta = static_cast<int>(b.eta());
        if (b.all_time()) return eta <= order2 - 1;
        return eta <= order2 - 2;
      },
      alphabet);

  for (const auto& b : s.a_b)
    if (b.has_jump_exact()) s.tilde_a_b.insert(b);
  for (const auto& b : s.a_sigma)
    if (b.has_jump_exact()) s.tilde_a_sigma.insert(b);
  s.b_of_a_b = remainder_set(s.a_b, alphabet);
  s.b_of_a_sigma = remainder_set(s.a_sigma, alphabet);
  return s;
}

std::string to_string(const IndexSet& set) {
  std::string out = "{";
  bool first = true;
  for (const auto& b : set) {
    if (!first) out += ", ";
    out += b.to_string();
    first = false;
  }
  out += '}';
  return out;
}

std::string_view to_string(IndexClass c) {
  switch (c) {
    case IndexClass::M1: return "M1";
    case IndexClass::M2: return "M2";
    case IndexClass::M3: return "M3";
  }
  return "?";
}

}  // namespace switchtaylor
