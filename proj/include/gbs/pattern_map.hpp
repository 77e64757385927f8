#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <type_traits>
#include <utility>
#include <vector>

#include "gbs/error.hpp"
#include "gbs/ordinal.hpp"

namespace gbs {

/// Half-open ordinal interval [lo, hi).
struct OrdInterval {
  Ordinal lo;
  Ordinal hi;

  friend bool operator==(const OrdInterval&, const OrdInterval&) = default;
};

/// A piece of a pattern map. At alpha = L + n inside the piece the value is
/// `limit_value` when n == 0 and `word[(n - 1) % word.size()]` otherwise.
/// The rule only looks at n, so splitting or merging pieces never changes
/// the values they denote.
template <class V>
struct Piece {
  OrdInterval interval;
  V limit_value{};
  std::vector<V> word;

  const Ordinal& lo() const { return interval.lo; }
  const Ordinal& hi() const { return interval.hi; }

  bool same_data(const Piece& o) const { return limit_value == o.limit_value && word == o.word; }

  const V& value_at_offset(std::uint64_t n) const {
    return n == 0 ? limit_value : word[(n - 1) % word.size()];
  }

  friend bool operator==(const Piece&, const Piece&) = default;
};

namespace detail {

inline constexpr std::uint64_t kMaxExplicitPositions = 1u << 16;
inline constexpr std::size_t kMaxWordLength = 1u << 16;

template <class V>
std::vector<V> primitive_word(const std::vector<V>& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = (w[i] == w[i % p]);
    if (ok) return std::vector<V>(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
  }
  return w;
}

/// Canonical description of one block [L, L + w) or a run of identical
/// prefix-free blocks.
template <class V>
struct BlockUnit {
  enum class Kind { Run, PrefixBlock, Partial };
  Kind kind = Kind::Run;
  Ordinal start;
  Ordinal end;
  V lim{};
  std::vector<V> prefix;  // values at n = 1..k
  std::vector<V> word;    // tail word (Run, PrefixBlock)
};

template <class V>
struct PendingBlock {
  Ordinal start;
  V lim{};
  std::vector<V> explicit_values;  // index k-1 holds the value at n = k
};

template <class V>
void finalize_tail(PendingBlock<V>& pb, const std::vector<V>& tail_word, std::vector<BlockUnit<V>>& units) {
  BlockUnit<V> u;
  u.start = pb.start;
  u.end = pb.start.next_limit();
  u.lim = pb.lim;
  u.word = primitive_word(tail_word);
  auto& ex = pb.explicit_values;
  while (!ex.empty() && ex.back() == u.word[(ex.size() - 1) % u.word.size()]) ex.pop_back();
  if (ex.empty()) {
    u.kind = BlockUnit<V>::Kind::Run;
  } else {
    u.kind = BlockUnit<V>::Kind::PrefixBlock;
    u.prefix = std::move(ex);
  }
  units.push_back(std::move(u));
}

template <class V>
void push_piece(std::vector<Piece<V>>& out, Ordinal lo, Ordinal hi, V lim, std::vector<V> word) {
  if (!out.empty() && out.back().limit_value == lim && out.back().word == word) {
    out.back().interval.hi = std::move(hi);
    return;
  }
  out.push_back(Piece<V>{{std::move(lo), std::move(hi)}, std::move(lim), std::move(word)});
}

/// Rebuilds a piece list into the unique canonical form of the function it
/// denotes. Pieces must already partition [0, bound).
template <class V>
std::vector<Piece<V>> canonicalize(const Ordinal& bound, const std::vector<Piece<V>>& pieces) {
  std::vector<BlockUnit<V>> units;
  std::optional<PendingBlock<V>> pending;

  for (const auto& pc : pieces) {
    Ordinal pos = pc.lo();
    while (pos < pc.hi()) {
      const Ordinal block = pos.limit_part();
      const std::uint64_t n = pos.finite_part();
      const Ordinal block_end = block.next_limit();
      if (n == 0 && !pending && pc.hi() >= block_end) {
        Ordinal run_end = pc.hi().limit_part();
        units.push_back({BlockUnit<V>::Kind::Run, pos, run_end, pc.limit_value, {}, primitive_word(pc.word)});
        pos = std::move(run_end);
        continue;
      }
      if (!pending) pending = PendingBlock<V>{block, {}, {}};
      std::uint64_t first = n;
      if (n == 0) {
        pending->lim = pc.limit_value;
        first = 1;
      }
      if (pc.hi() >= block_end) {
        finalize_tail(*pending, pc.word, units);
        pending.reset();
        pos = block_end;
        continue;
      }
      const std::uint64_t stop = pc.hi().finite_part();
      if (stop - first > kMaxExplicitPositions) throw OverflowError("pattern piece too long to expand");
      for (std::uint64_t k = first; k < stop; ++k) pending->explicit_values.push_back(pc.value_at_offset(k));
      pos = pc.hi();
    }
  }
  if (pending) {
    BlockUnit<V> u;
    u.kind = BlockUnit<V>::Kind::Partial;
    u.start = pending->start;
    u.end = bound;
    u.lim = pending->lim;
    u.prefix = std::move(pending->explicit_values);
    units.push_back(std::move(u));
  }

  std::vector<BlockUnit<V>> merged;
  for (auto& u : units) {
    if (!merged.empty() && merged.back().kind == BlockUnit<V>::Kind::Run && u.kind == BlockUnit<V>::Kind::Run &&
        merged.back().lim == u.lim && merged.back().word == u.word) {
      merged.back().end = u.end;
    } else {
      merged.push_back(std::move(u));
    }
  }

  std::vector<Piece<V>> out;
  const Ordinal one = Ordinal::finite(1);
  for (const auto& u : merged) {
    switch (u.kind) {
      case BlockUnit<V>::Kind::Run:
        push_piece(out, u.start, u.end, u.lim, u.word);
        break;
      case BlockUnit<V>::Kind::PrefixBlock: {
        push_piece(out, u.start, u.start + one, u.lim, u.word);
        for (std::size_t i = 0; i < u.prefix.size(); ++i) {
          push_piece(out, u.start + Ordinal::finite(i + 1), u.start + Ordinal::finite(i + 2), u.prefix[i],
                     std::vector<V>{u.prefix[i]});
        }
        push_piece(out, u.start + Ordinal::finite(u.prefix.size() + 1), u.end, u.lim, u.word);
        break;
      }
      case BlockUnit<V>::Kind::Partial: {
        push_piece(out, u.start, u.start + one, u.lim, std::vector<V>{u.lim});
        for (std::size_t i = 0; i < u.prefix.size(); ++i) {
          push_piece(out, u.start + Ordinal::finite(i + 1), u.start + Ordinal::finite(i + 2), u.prefix[i],
                     std::vector<V>{u.prefix[i]});
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// A finitely described function [0, bound) -> V. Construction validates
/// that the pieces partition the domain and canonicalizes, so two maps
/// compare equal exactly when they agree at every position.
template <class V>
class PatternMap {
 public:
  using value_type = V;

  PatternMap() = default;

  PatternMap(Ordinal bound, std::vector<Piece<V>> pieces) : bound_(std::move(bound)) {
    validate(pieces);
    pieces_ = detail::canonicalize(bound_, pieces);
  }

  static PatternMap constant(const Ordinal& bound, const V& v) { return uniform(bound, v, {v}); }

  /// Single piece [0, bound) with the given limit value and word.
  static PatternMap uniform(const Ordinal& bound, const V& lim, std::vector<V> word) {
    if (bound.is_zero()) return PatternMap(bound, {});
    return PatternMap(bound, {Piece<V>{{Ordinal{}, bound}, lim, std::move(word)}});
  }

  const Ordinal& domain_bound() const { return bound_; }
  const std::vector<Piece<V>>& pieces() const { return pieces_; }

  const Piece<V>& piece_at(const Ordinal& a) const {
    if (!(a < bound_)) throw DomainError("position " + a.to_string() + " outside [0, " + bound_.to_string() + ")");
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), a,
                               [](const Ordinal& x, const Piece<V>& p) { return x < p.hi(); });
    return *it;
  }

  const V& at(const Ordinal& a) const { return piece_at(a).value_at_offset(a.finite_part()); }

  /// The map restricted to [0, a).
  PatternMap restrict(const Ordinal& a) const {
    if (a > bound_) throw DomainError("restriction bound " + a.to_string() + " exceeds " + bound_.to_string());
    if (a == bound_) return *this;
    std::vector<Piece<V>> out;
    for (const auto& p : pieces_) {
      if (!(p.lo() < a)) break;
      Piece<V> q = p;
      if (q.interval.hi > a) q.interval.hi = a;
      out.push_back(std::move(q));
    }
    return PatternMap(a, std::move(out));
  }

  /// Extends the domain to `new_bound`, filling [bound, new_bound) with `fill`.
  PatternMap extend(const Ordinal& new_bound, const V& fill) const {
    if (new_bound < bound_) throw DomainError("extend: new bound below current bound");
    if (new_bound == bound_) return *this;
    auto out = pieces_;
    out.push_back(Piece<V>{{bound_, new_bound}, fill, {fill}});
    return PatternMap(new_bound, std::move(out));
  }

  /// Copy with the single position a overwritten by v.
  PatternMap with_value(const Ordinal& a, const V& v) const {
    if (!(a < bound_)) throw DomainError("with_value: position outside domain");
    std::vector<Piece<V>> out;
    const Ordinal next = a.successor();
    for (const auto& p : pieces_) {
      if (p.hi() <= a || p.lo() > a) {
        out.push_back(p);
        continue;
      }
      if (p.lo() < a) out.push_back(Piece<V>{{p.lo(), a}, p.limit_value, p.word});
      out.push_back(Piece<V>{{a, next}, v, {v}});
      if (next < p.hi()) out.push_back(Piece<V>{{next, p.hi()}, p.limit_value, p.word});
    }
    return PatternMap(bound_, std::move(out));
  }

  template <class F>
  auto transform(F f) const -> PatternMap<std::decay_t<std::invoke_result_t<F, const V&>>> {
    using U = std::decay_t<std::invoke_result_t<F, const V&>>;
    std::vector<Piece<U>> out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_) {
      std::vector<U> w;
      w.reserve(p.word.size());
      for (const auto& x : p.word) w.push_back(f(x));
      out.push_back(Piece<U>{p.interval, f(p.limit_value), std::move(w)});
    }
    return PatternMap<U>(bound_, std::move(out));
  }

  /// Piece boundaries, including 0 (when the domain is nonempty) and the bound.
  std::vector<Ordinal> boundaries() const {
    std::vector<Ordinal> out;
    for (const auto& p : pieces_) out.push_back(p.lo());
    out.push_back(bound_);
    return out;
  }

  /// Distinct values that occur at some position.
  std::vector<V> values() const {
    std::vector<V> out;
    auto add = [&](const V& v) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    for (const auto& p : pieces_) {
      if (has_offset_zero(p)) add(p.limit_value);
      for (std::size_t i = 0; i < p.word.size(); ++i) {
        if (successor_offset_used(p, i)) add(p.word[i]);
      }
    }
    return out;
  }

  friend bool operator==(const PatternMap&, const PatternMap&) = default;

  /// True when some position of p has finite part zero.
  static bool has_offset_zero(const Piece<V>& p) {
    return p.lo().finite_part() == 0 || p.lo().next_limit() < p.hi();
  }

  /// True when word index i is read at some position of p.
  static bool successor_offset_used(const Piece<V>& p, std::size_t i) {
    const std::uint64_t n0 = p.lo().finite_part();
    if (p.hi().limit_part() > p.lo().limit_part()) return true;  // infinite successor tail
    std::uint64_t first = std::max<std::uint64_t>(n0, 1);
    std::uint64_t stop = p.hi().finite_part();
    if (stop <= first) return false;
    if (stop - first >= p.word.size()) return true;
    for (std::uint64_t k = first; k < stop; ++k) {
      if ((k - 1) % p.word.size() == i) return true;
    }
    return false;
  }

 private:
  void validate(const std::vector<Piece<V>>& pieces) const {
    Ordinal pos;
    for (const auto& p : pieces) {
      if (!(p.lo() == pos)) throw DomainError("pattern pieces do not partition the domain at " + pos.to_string());
      if (!(p.lo() < p.hi())) throw DomainError("empty pattern piece at " + p.lo().to_string());
      if (p.word.empty()) throw DomainError("pattern piece with empty word at " + p.lo().to_string());
      if (p.word.size() > detail::kMaxWordLength) throw OverflowError("pattern word too long");
      pos = p.hi();
    }
    if (!(pos == bound_)) {
      throw DomainError("pattern pieces end at " + pos.to_string() + " but the domain is [0, " + bound_.to_string() + ")");
    }
  }

  Ordinal bound_;
  std::vector<Piece<V>> pieces_;
};

using Bit = std::uint8_t;
using BitMap = PatternMap<Bit>;

/// Pointwise combination of two maps over the same domain.
template <class V, class W, class F>
auto pm_zip(const PatternMap<V>& a, const PatternMap<W>& b, F f)
    -> PatternMap<std::decay_t<std::invoke_result_t<F, const V&, const W&>>> {
  using U = std::decay_t<std::invoke_result_t<F, const V&, const W&>>;
  if (!(a.domain_bound() == b.domain_bound())) {
    throw DomainError("pm_zip: domains [0, " + a.domain_bound().to_string() + ") and [0, " +
                      b.domain_bound().to_string() + ") differ");
  }
  std::vector<Piece<U>> out;
  const auto& pa = a.pieces();
  const auto& pb = b.pieces();
  std::size_t i = 0, j = 0;
  Ordinal pos;
  while (i < pa.size() && j < pb.size()) {
    const Ordinal& hi = std::min(pa[i].hi(), pb[j].hi());
    const std::size_t la = pa[i].word.size();
    const std::size_t lb = pb[j].word.size();
    const std::size_t len = std::lcm(la, lb);
    if (len > detail::kMaxWordLength) throw OverflowError("pm_zip: combined period too long");
    std::vector<U> w;
    w.reserve(len);
    for (std::size_t k = 0; k < len; ++k) w.push_back(f(pa[i].word[k % la], pb[j].word[k % lb]));
    out.push_back(Piece<U>{{pos, hi}, f(pa[i].limit_value, pb[j].limit_value), std::move(w)});
    pos = hi;
    if (pa[i].hi() == pos) ++i;
    if (pb[j].hi() == pos) ++j;
  }
  return PatternMap<U>(a.domain_bound(), std::move(out));
}

/// Whether a and b take the same values on [0, d). Bounds above either
/// domain make the answer false.
template <class V>
bool pm_agree_below(const PatternMap<V>& a, const PatternMap<V>& b, const Ordinal& d) {
  if (d > a.domain_bound() || d > b.domain_bound()) return false;
  const auto& pa = a.pieces();
  const auto& pb = b.pieces();
  std::size_t i = 0, j = 0;
  Ordinal pos;
  constexpr std::uint64_t kInf = ~std::uint64_t{0};
  auto same_on = [&](const Piece<V>& p, const Piece<V>& q, std::uint64_t s, std::uint64_t e) {
    if (s >= e) return true;
    if (s == 0 && !(p.limit_value == q.limit_value)) return false;
    const std::uint64_t from = std::max<std::uint64_t>(s, 1);
    std::uint64_t to = e;
    if (e == kInf) to = from + std::lcm(p.word.size(), q.word.size());
    for (std::uint64_t n = from; n < to; ++n) {
      if (!(p.word[(n - 1) % p.word.size()] == q.word[(n - 1) % q.word.size()])) return false;
    }
    return true;
  };
  while (pos < d) {
    while (pa[i].hi() <= pos) ++i;
    while (pb[j].hi() <= pos) ++j;
    const Ordinal hi = std::min({pa[i].hi(), pb[j].hi(), d});
    const Ordinal nl = pos.next_limit();
    const std::uint64_t s = pos.finite_part();
    if (hi <= nl) {
      if (!same_on(pa[i], pb[j], s, hi == nl ? kInf : hi.finite_part())) return false;
    } else {
      if (!same_on(pa[i], pb[j], s, kInf)) return false;
      if (!same_on(pa[i], pb[j], 0, hi.limit_part() > nl ? kInf : hi.finite_part())) return false;
    }
    pos = hi;
  }
  return true;
}

/// Result of analysing the set {alpha : pred(m(alpha))}.
struct SupportAnalysis {
  /// Least strict upper bound of the set when it is bounded below the
  /// domain bound; nullopt when unbounded.
  std::optional<Ordinal> bounded_by;
  /// The set contains every position with finite part zero from some point on.
  bool contains_final_limit_segment = false;
  std::optional<Ordinal> final_segment_start;
};

namespace detail {

/// L with a == L + w, for a successor limit a.
inline Ordinal block_before(const Ordinal& a) {
  auto terms = a.terms();
  if (--terms.back().coefficient == 0) terms.pop_back();
  return Ordinal::from_terms(std::move(terms));
}

/// Least strict upper bound of {alpha in piece : pred holds}, or nullopt.
template <class V, class Pred>
std::optional<Ordinal> piece_sup(const Piece<V>& p, Pred pred) {
  const bool succ_hit = std::any_of(p.word.begin(), p.word.end(), pred);
  const bool lim_hit = pred(p.limit_value);
  if (!succ_hit && !lim_hit) return std::nullopt;
  const Ordinal top = p.hi().limit_part();
  const std::uint64_t m = p.hi().finite_part();
  if (m > 0) {
    const std::uint64_t first = p.lo() >= top ? p.lo().finite_part() : 0;
    for (std::uint64_t k = m; k-- > first;) {
      if (pred(p.value_at_offset(k))) return top + Ordinal::finite(k + 1);
    }
    if (!(p.lo() < top)) return std::nullopt;
  }
  // Remaining part [lo, top) with top a limit.
  if (succ_hit || top.is_limit_of_limits()) return top;
  const Ordinal last = block_before(top);
  if (last >= p.lo()) return last.successor();
  return std::nullopt;
}

}  // namespace detail

/// The set is unbounded exactly when its supremum is a limit domain bound.
template <class V, class Pred>
SupportAnalysis pm_support_analysis(const PatternMap<V>& m, Pred pred) {
  SupportAnalysis r;
  const auto& ps = m.pieces();
  r.bounded_by = Ordinal{};
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
    if (auto s = detail::piece_sup(*it, pred)) {
      if (*s == m.domain_bound() && s->is_limit()) {
        r.bounded_by.reset();
      } else {
        r.bounded_by = *s;
      }
      break;
    }
  }
  // Last offset-zero position where pred fails.
  r.contains_final_limit_segment = true;
  r.final_segment_start = Ordinal{};
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
    const auto& p = *it;
    if (pred(p.limit_value) || !PatternMap<V>::has_offset_zero(p)) continue;
    const Ordinal top = p.hi().limit_part();
    if (p.hi().finite_part() > 0 && top >= p.lo()) {
      r.final_segment_start = top.successor();
    } else if (top.is_limit_of_limits()) {
      if (top == m.domain_bound()) {
        r.contains_final_limit_segment = false;
        r.final_segment_start.reset();
      } else {
        r.final_segment_start = top;
      }
    } else {
      r.final_segment_start = detail::block_before(top).successor();
    }
    break;
  }
  return r;
}

inline SupportAnalysis pm_support_analysis(const BitMap& m) {
  return pm_support_analysis(m, [](Bit b) { return b != 0; });
}

/// Number of positions holding v: a finite count, or nullopt for infinitely many.
template <class V>
std::optional<std::uint64_t> pm_count(const PatternMap<V>& m, const V& v) {
  std::uint64_t total = 0;
  for (const auto& p : m.pieces()) {
    const bool succ_hit = std::find(p.word.begin(), p.word.end(), v) != p.word.end();
    const bool lim_hit = p.limit_value == v;
    if (!succ_hit && !lim_hit) continue;
    const Ordinal lo_block = p.lo().limit_part();
    const Ordinal hi_block = p.hi().limit_part();
    if (lo_block == hi_block) {
      for (std::uint64_t k = p.lo().finite_part(); k < p.hi().finite_part(); ++k) {
        if (p.value_at_offset(k) == v) ++total;
      }
      continue;
    }
    if (succ_hit) return std::nullopt;
    // Only offset-zero positions carry v: count limits in [lo, hi).
    const Ordinal first = p.lo().finite_part() == 0 ? p.lo() : p.lo().next_limit();
    if (first > hi_block) continue;
    const Ordinal span = ord_left_sub(first, hi_block);
    if (!span.is_zero() && span.terms().front().exponent >= 2) return std::nullopt;
    total += span.is_zero() ? 0 : span.terms().front().coefficient;
    if (p.hi().finite_part() > 0) ++total;
  }
  return total;
}

/// Least position holding v, if any.
template <class V>
std::optional<Ordinal> pm_first_position(const PatternMap<V>& m, const V& v) {
  for (const auto& p : m.pieces()) {
    const std::uint64_t n0 = p.lo().finite_part();
    const Ordinal block = p.lo().limit_part();
    auto scan_block = [&](const Ordinal& start_block, std::uint64_t from) -> std::optional<Ordinal> {
      // Positions start_block + k for k >= from, staying below hi and inside the block.
      const bool same_block = p.hi().limit_part() == start_block;
      const std::uint64_t stop = same_block ? p.hi().finite_part() : from + p.word.size() + 1;
      for (std::uint64_t k = from; k < stop; ++k) {
        if (p.value_at_offset(k) == v) return start_block + Ordinal::finite(k);
      }
      return std::nullopt;
    };
    if (auto hit = scan_block(block, n0)) return hit;
    const Ordinal nl = p.lo().next_limit();
    if (nl < p.hi()) {
      if (auto hit = scan_block(nl, 0)) return hit;
    }
  }
  return std::nullopt;
}

/// Builds a map over [0, bound) that is `zero` at every position except
/// limit ordinals, where it takes value(a). `value` must be constant on the
/// limits strictly between consecutive critical points; the helper adds 0,
/// limits of limits below the bound and the next limit above each critical
/// point. Requires finitely many limits of limits below the bound.
template <class V, class F>
PatternMap<V> limit_grid_map(const Ordinal& bound, const std::vector<Ordinal>& criticals, const V& zero, F value) {
  std::set<Ordinal> cs;
  cs.insert(Ordinal{});
  for (const auto& c : criticals) {
    if (c < bound) cs.insert(c);
    const Ordinal nl = c.next_limit();
    if (nl < bound) cs.insert(nl);
  }
  // Limits of limits below the bound: w^2 * j ... only the w^2-multiples are supported.
  if (!bound.is_zero()) {
    const auto& t = bound.terms();
    if (t.front().exponent > 2 || (t.front().exponent == 2 && t.size() > 1)) {
      throw DomainError("limit_grid_map: bound " + bound.to_string() + " has infinitely many limits of limits");
    }
    if (t.front().exponent == 2) {
      for (std::uint64_t j = 1; j < t.front().coefficient; ++j) cs.insert(Ordinal::omega_power(2, j));
    }
  }
  std::vector<Ordinal> sorted(cs.begin(), cs.end());
  std::vector<Piece<V>> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Ordinal& c = sorted[i];
    const Ordinal next = (i + 1 < sorted.size()) ? sorted[i + 1] : bound;
    const Ordinal c1 = c.successor();
    out.push_back(Piece<V>{{c, c1}, c.is_limit() ? V(value(c)) : zero, {zero}});
    if (c1 < next) {
      const Ordinal rep = c.next_limit();
      out.push_back(Piece<V>{{c1, next}, rep < next ? V(value(rep)) : zero, {zero}});
    }
  }
  return PatternMap<V>(bound, std::move(out));
}

}  // namespace gbs
