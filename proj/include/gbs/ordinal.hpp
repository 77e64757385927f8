#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gbs {

/// One summand w^exponent * coefficient of a Cantor normal form.
struct OrdinalTerm {
  std::uint32_t exponent = 0;
  std::uint64_t coefficient = 0;

  friend bool operator==(const OrdinalTerm&, const OrdinalTerm&) = default;
};

/// An ordinal below w^w in Cantor normal form: a strictly descending list
/// of exponents with positive coefficients. The empty list is 0.
///
/// Ordinals are immutable values. Every limit ordinal factors as w * q
/// for some q; the finite tail of an ordinal (its constant coefficient)
/// is its position inside the block [limit_part, limit_part + w).
class Ordinal {
 public:
  Ordinal() = default;

  static Ordinal finite(std::uint64_t n);
  static Ordinal omega_power(std::uint32_t exponent, std::uint64_t coefficient = 1);
  static Ordinal omega() { return omega_power(1); }
  /// Validates the CNF invariants; throws DomainError on violation.
  static Ordinal from_terms(std::vector<OrdinalTerm> terms);

  const std::vector<OrdinalTerm>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_finite() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent == 0); }
  bool is_successor() const { return !terms_.empty() && terms_.back().exponent == 0; }
  bool is_limit() const { return !terms_.empty() && terms_.back().exponent > 0; }
  /// Limit whose last CNF term has exponent 1, i.e. of the form L + w.
  bool is_successor_limit() const { return is_limit() && terms_.back().exponent == 1; }
  /// Limit of limit ordinals: last CNF term has exponent >= 2.
  bool is_limit_of_limits() const { return is_limit() && terms_.back().exponent >= 2; }

  /// Constant coefficient n in alpha = L + n.
  std::uint64_t finite_part() const;
  /// L in alpha = L + n, with L zero or a limit.
  Ordinal limit_part() const;
  /// Least limit ordinal strictly above this one: limit_part() + w.
  Ordinal next_limit() const;
  Ordinal successor() const;
  /// Finite value; throws DomainError when the ordinal is infinite.
  std::uint64_t to_uint() const;
  /// q with this == w * q; requires zero or a limit.
  Ordinal omega_quotient() const;

  /// Textual form such as "w^2*3+w+1"; "0" for zero.
  std::string to_string() const;

  friend bool operator==(const Ordinal&, const Ordinal&) = default;
  friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b);

 private:
  std::vector<OrdinalTerm> terms_;
};

enum class Cmp { LT, EQ, GT };

Cmp ord_cmp(const Ordinal& a, const Ordinal& b);

/// Ordinal sum; terms of `a` below the leading exponent of `b` are absorbed.
Ordinal ord_add(const Ordinal& a, const Ordinal& b);
inline Ordinal operator+(const Ordinal& a, const Ordinal& b) { return ord_add(a, b); }

/// The unique g with a + g == b; throws DomainError when a > b.
Ordinal ord_left_sub(const Ordinal& a, const Ordinal& b);

struct OrdKind {
  enum class Tag { Zero, Successor, Limit };
  Tag tag = Tag::Zero;
  /// Successor: the predecessor.
  std::optional<Ordinal> predecessor;
  /// Limit: q with a == w * q.
  std::optional<Ordinal> block_index;
};

OrdKind ord_kind(const Ordinal& a);

std::size_t hash_value(const Ordinal& a);

}  // namespace gbs

template <>
struct std::hash<gbs::Ordinal> {
  std::size_t operator()(const gbs::Ordinal& a) const noexcept { return gbs::hash_value(a); }
};
