#pragma once

// Multi-index algebra for Ito-Taylor expansions with Markovian switching.
//
// A multi-index is a word over the alphabet
//   0            time integral
//   1..m         Wiener integrals
//   N_1..N_mu    "exactly r jumps" integrals
//   Nbar_mu      "more than mu jumps" integral
// subject to the rule that two jump letters never sit next to each other.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace switchtaylor {

class Component {
 public:
  enum class Kind : std::uint8_t { TimeInt = 0, Wiener = 1, JumpExact = 2, JumpOverflow = 3 };

  static constexpr Component time() noexcept { return Component(Kind::TimeInt, 0); }
  static constexpr Component wiener(unsigned j) noexcept { return Component(Kind::Wiener, j); }
  static constexpr Component jump(unsigned r) noexcept { return Component(Kind::JumpExact, r); }
  /// Nbar_r; stands for the number r + 1.
  static constexpr Component overflow(unsigned r) noexcept {
    return Component(Kind::JumpOverflow, r);
  }

  constexpr Kind kind() const noexcept { return kind_; }
  constexpr unsigned index() const noexcept { return index_; }
  constexpr bool is_jump() const noexcept {
    return kind_ == Kind::JumpExact || kind_ == Kind::JumpOverflow;
  }
  /// Numeric value of a jump letter: N_r -> r, Nbar_r -> r + 1. Zero otherwise.
  constexpr unsigned jump_value() const noexcept {
    switch (kind_) {
      case Kind::JumpExact: return index_;
      case Kind::JumpOverflow: return index_ + 1;
      default: return 0;
    }
  }

  std::string to_string() const;

  friend constexpr auto operator<=>(const Component&, const Component&) = default;

 private:
  constexpr Component(Kind kind, unsigned index) noexcept : kind_(kind), index_(index) {}
  Kind kind_;
  unsigned index_;
};

/// Letters available for a given Wiener dimension m and jump cap mu.
struct Alphabet {
  unsigned m = 1;
  unsigned mu = 1;

  /// 0, 1..m, N_1..N_mu, Nbar_mu in canonical order.
  std::vector<Component> letters() const;
  bool contains(Component c) const noexcept;
};

struct IndexCounts {
  std::size_t length = 0;
  std::size_t wiener = 0;     // n
  std::size_t time = 0;       // nbar
  std::size_t jumps = 0;      // [n]
  unsigned max_jump = 0;      // mu_max, 0 without jump letters

  friend bool operator==(const IndexCounts&, const IndexCounts&) = default;
};

enum class IndexClass { M1, M2, M3 };

class MultiIndex {
 public:
  /// The empty word nu.
  MultiIndex() = default;

  /// Throws ConsecutiveJumpComponents (index = 1-based offending position).
  static MultiIndex validate(std::vector<Component> components);
  static MultiIndex validate(std::initializer_list<Component> components) {
    return validate(std::vector<Component>(components));
  }

  std::span<const Component> components() const noexcept { return components_; }
  std::size_t length() const noexcept { return components_.size(); }
  bool empty() const noexcept { return components_.empty(); }
  const Component& operator[](std::size_t i) const { return components_[i]; }

  IndexCounts counts() const noexcept;
  /// n + 2 nbar + mu_max.
  unsigned eta() const noexcept;
  IndexClass classify() const noexcept;

  bool has_jump_exact() const noexcept;
  bool has_jump() const noexcept;
  bool all_time() const noexcept;

  /// -beta. Throws EmptyIndex on nu.
  MultiIndex drop_first() const;
  /// beta-. Throws EmptyIndex on nu.
  MultiIndex drop_last() const;
  /// (c) * beta. Throws ConsecutiveJumpComponents when both are jumps.
  MultiIndex prepend(Component c) const;

  bool in_alphabet(const Alphabet& alphabet) const noexcept;

  /// "(0,N2,2,1,N3,0)", "nu" for the empty word, "Nbar3" for overflow letters.
  std::string to_string() const;
  /// Inverse of to_string; validates condition (a).
  static MultiIndex parse(std::string_view text);

  /// Canonical order: by length, then lexicographically by component.
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  explicit MultiIndex(std::vector<Component> c) : components_(std::move(c)) {}
  std::vector<Component> components_;
};

/// beta * beta_bar. Throws ConsecutiveJumpComponents when the junction
/// places two jump letters next to each other.
MultiIndex concat(const MultiIndex& a, const MultiIndex& b);

using IndexSet = std::set<MultiIndex>;

/// Breadth-first enumeration of {beta : keep(beta)} by prepending letters
/// of `alphabet` to accepted words. `keep` must be monotone under removal of
/// the first component, which makes the result hierarchical. Words longer than
/// `max_length` abort with EnumerationTooLarge.
IndexSet build_hierarchical_set(const std::function<bool(const MultiIndex&)>& keep,
                                const Alphabet& alphabet, std::size_t max_length = 32);

/// B(A) = {beta not in A : -beta in A}; B(empty) = {nu}.
IndexSet remainder_set(const IndexSet& set, const Alphabet& alphabet);

bool is_hierarchical(const IndexSet& set);

struct SchemeSets {
  double gamma = 0.5;
  unsigned mu = 1;
  unsigned m = 1;
  IndexSet a_b;
  IndexSet a_sigma;
  IndexSet tilde_a_b;
  IndexSet tilde_a_sigma;
  IndexSet b_of_a_b;
  IndexSet b_of_a_sigma;
};

/// Index sets of the order-gamma scheme. gamma must be a positive half-integer
/// no larger than 3 (InvalidGamma otherwise).
SchemeSets build_scheme_sets(double gamma, unsigned m);

std::string to_string(const IndexSet& set);
std::string_view to_string(IndexClass c);

}  // namespace switchtaylor
