#include "gbs/ordinal.hpp"

#include <limits>

#include "gbs/error.hpp"

namespace gbs {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) {
    throw OverflowError("ordinal coefficient overflow");
  }
  return a + b;
}

}  // namespace

Ordinal Ordinal::finite(std::uint64_t n) {
  Ordinal o;
  if (n > 0) o.terms_.push_back({0, n});
  return o;
}

Ordinal Ordinal::omega_power(std::uint32_t exponent, std::uint64_t coefficient) {
  Ordinal o;
  if (coefficient > 0) o.terms_.push_back({exponent, coefficient});
  return o;
}

Ordinal Ordinal::from_terms(std::vector<OrdinalTerm> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coefficient == 0) throw DomainError("CNF coefficient must be positive");
    if (i > 0 && terms[i].exponent >= terms[i - 1].exponent) {
      throw DomainError("CNF exponents must be strictly decreasing");
    }
  }
  Ordinal o;
  o.terms_ = std::move(terms);
  return o;
}

std::uint64_t Ordinal::finite_part() const {
  return is_successor() ? terms_.back().coefficient : 0;
}

Ordinal Ordinal::limit_part() const {
  if (!is_successor()) return *this;
  Ordinal o = *this;
  o.terms_.pop_back();
  return o;
}

Ordinal Ordinal::next_limit() const { return ord_add(limit_part(), omega()); }

Ordinal Ordinal::successor() const { return ord_add(*this, finite(1)); }

std::uint64_t Ordinal::to_uint() const {
  if (!is_finite()) throw DomainError("ordinal " + to_string() + " is not finite");
  return finite_part();
}

Ordinal Ordinal::omega_quotient() const {
  if (is_successor()) throw DomainError("omega_quotient of a successor ordinal");
  Ordinal q;
  for (const auto& t : terms_) q.terms_.push_back({t.exponent - 1, t.coefficient});
  return q;
}

std::string Ordinal::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += '+';
    if (t.exponent == 0) {
      out += std::to_string(t.coefficient);
      continue;
    }
    out += 'w';
    if (t.exponent > 1) out += "^" + std::to_string(t.exponent);
    if (t.coefficient > 1) out += "*" + std::to_string(t.coefficient);
  }
  return out;
}

std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) {
  const auto& x = a.terms_;
  const auto& y = b.terms_;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i].exponent != y[i].exponent) return x[i].exponent <=> y[i].exponent;
    if (x[i].coefficient != y[i].coefficient) return x[i].coefficient <=> y[i].coefficient;
  }
  return x.size() <=> y.size();
}

Cmp ord_cmp(const Ordinal& a, const Ordinal& b) {
  auto c = a <=> b;
  if (c < 0) return Cmp::LT;
  if (c > 0) return Cmp::GT;
  return Cmp::EQ;
}

Ordinal ord_add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  const auto& bt = b.terms();
  const std::uint32_t lead = bt.front().exponent;
  std::vector<OrdinalTerm> out;
  for (const auto& t : a.terms()) {
    if (t.exponent > lead) {
      out.push_back(t);
    } else if (t.exponent == lead) {
      out.push_back({lead, checked_add(t.coefficient, bt.front().coefficient)});
      break;
    } else {
      break;
    }
  }
  std::size_t start = 0;
  if (!out.empty() && out.back().exponent == lead) start = 1;
  for (std::size_t i = start; i < bt.size(); ++i) out.push_back(bt[i]);
  return Ordinal::from_terms(std::move(out));
}

Ordinal ord_left_sub(const Ordinal& a, const Ordinal& b) {
  if (a > b) throw DomainError("ord_left_sub: " + a.to_string() + " > " + b.to_string());
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::size_t i = 0;
  while (i < x.size() && i < y.size() && x[i] == y[i]) ++i;
  std::vector<OrdinalTerm> out;
  if (i == x.size()) {
    out.assign(y.begin() + static_cast<std::ptrdiff_t>(i), y.end());
  } else if (x[i].exponent == y[i].exponent) {
    // a < b forces x[i].coefficient < y[i].coefficient here.
    out.push_back({y[i].exponent, y[i].coefficient - x[i].coefficient});
    out.insert(out.end(), y.begin() + static_cast<std::ptrdiff_t>(i + 1), y.end());
  } else {
    out.assign(y.begin() + static_cast<std::ptrdiff_t>(i), y.end());
  }
  return Ordinal::from_terms(std::move(out));
}

OrdKind ord_kind(const Ordinal& a) {
  OrdKind k;
  if (a.is_zero()) return k;
  if (a.is_successor()) {
    k.tag = OrdKind::Tag::Successor;
    auto terms = a.terms();
    if (--terms.back().coefficient == 0) terms.pop_back();
    k.predecessor = Ordinal::from_terms(std::move(terms));
    return k;
  }
  k.tag = OrdKind::Tag::Limit;
  k.block_index = a.omega_quotient();
  return k;
}

std::size_t hash_value(const Ordinal& a) {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (const auto& t : a.terms()) {
    h ^= std::hash<std::uint64_t>{}(t.coefficient) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= std::hash<std::uint32_t>{}(t.exponent) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace gbs
