#include "gbs/workbench.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <set>

#include "gbs/borel.hpp"
#include "gbs/error.hpp"

namespace gbs {

void WorkbenchConfig::validate() const {
  const auto& t = lambda.terms();
  if (t.size() != 1 || t[0].exponent != 2) {
    throw DomainError("lambda must be w^2*m, got " + lambda.to_string());
  }
  if (word_bound == 0 || word_bound > 16) throw DomainError("word bound must be between 1 and 16");
}

namespace {

// ---------------------------------------------------------------------------
// Map surgery

template <class V>
PatternMap<V> splice(const PatternMap<V>& head, const PatternMap<V>& tail, const Ordinal& at) {
  std::vector<Piece<V>> ps;
  for (const auto& p : head.pieces()) {
    if (!(p.lo() < at)) break;
    ps.push_back(p);
    if (ps.back().interval.hi > at) ps.back().interval.hi = at;
  }
  for (const auto& p : tail.pieces()) {
    if (p.hi() <= at) continue;
    ps.push_back(p);
    if (ps.back().interval.lo < at) ps.back().interval.lo = at;
  }
  return PatternMap<V>(tail.domain_bound(), std::move(ps));
}

// Where mask is 1 take a, else b.
template <class V>
PatternMap<V> select(const BitMap& mask, const PatternMap<V>& a, const PatternMap<V>& b) {
  auto ma = pm_zip(mask, a, [](Bit m, const V& v) { return std::pair<Bit, V>{m, v}; });
  return pm_zip(ma, b, [](const std::pair<Bit, V>& mv, const V& w) { return mv.first ? mv.second : w; });
}

// Limits at or above beta.
BitMap limits_from(const Ordinal& lambda, const Ordinal& beta) {
  std::vector<Piece<Bit>> ps;
  if (!beta.is_zero()) ps.push_back(Piece<Bit>{{Ordinal{}, beta}, 0, {0}});
  ps.push_back(Piece<Bit>{{beta, lambda}, 1, {0}});
  return BitMap(lambda, std::move(ps));
}

BitMap ones_from(const Ordinal& lambda, const Ordinal& beta) {
  std::vector<Piece<Bit>> ps;
  if (!beta.is_zero()) ps.push_back(Piece<Bit>{{Ordinal{}, beta}, 0, {0}});
  ps.push_back(Piece<Bit>{{beta, lambda}, 1, {1}});
  return BitMap(lambda, std::move(ps));
}

std::uint64_t uni(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

bool coin(Rng& rng, int num = 1, int den = 2) { return static_cast<int>(uni(rng, 0, den - 1)) < num; }

// Position below lambda = w^2*m, biased toward early blocks.
Ordinal random_position(Rng& rng, const Ordinal& lambda) {
  const std::uint64_t m = lambda.terms().front().coefficient;
  const std::uint64_t j = uni(rng, 0, m - 1);
  const Ordinal a = j ? Ordinal::omega_power(2, j) : Ordinal{};
  const std::uint64_t q = uni(rng, 0, 5);
  const std::uint64_t n = coin(rng) ? 0 : uni(rng, 1, 6);
  return a + Ordinal::omega_power(1, q) + Ordinal::finite(n);
}

template <class V, class Gen>
PatternMap<V> random_map(Rng& rng, const Ordinal& bound, const Ordinal& lambda, Gen value) {
  if (bound.is_zero()) return PatternMap<V>(bound, {});
  std::set<Ordinal> cuts{Ordinal{}};
  const std::uint64_t k = uni(rng, 0, 4);
  for (std::uint64_t i = 0; i < k; ++i) {
    auto c = random_position(rng, lambda);
    if (c < bound) cuts.insert(c);
  }
  std::vector<Ordinal> cv(cuts.begin(), cuts.end());
  std::vector<Piece<V>> ps;
  for (std::size_t i = 0; i < cv.size(); ++i) {
    const Ordinal hi = i + 1 < cv.size() ? cv[i + 1] : bound;
    std::vector<V> w;
    const std::uint64_t len = uni(rng, 1, 3);
    for (std::uint64_t j = 0; j < len; ++j) w.push_back(value(rng));
    ps.push_back(Piece<V>{{cv[i], hi}, value(rng), std::move(w)});
  }
  return PatternMap<V>(bound, std::move(ps));
}

BitMap random_bitmap(Rng& rng, const Ordinal& bound, const Ordinal& lambda) {
  return random_map<Bit>(rng, bound, lambda, [](Rng& r) { return static_cast<Bit>(r() & 1u); });
}

Ordinal random_small_ordinal(Rng& rng) {
  static const std::vector<Ordinal> pool{Ordinal{}, Ordinal::finite(1), Ordinal::finite(2), Ordinal::omega(),
                                         Ordinal::omega() + Ordinal::finite(1), Ordinal::omega_power(1, 2)};
  return pool[uni(rng, 0, pool.size() - 1)];
}

OrdMap random_ordmap(Rng& rng, const Ordinal& bound, const Ordinal& lambda) {
  return random_map<Ordinal>(rng, bound, lambda, random_small_ordinal);
}

IndexMap random_indexmap(Rng& rng, const Ordinal& bound, const Ordinal& lambda, std::uint32_t n) {
  return random_map<std::uint32_t>(rng, bound, lambda,
                                   [n](Rng& r) { return static_cast<std::uint32_t>(uni(r, 0, n - 1)); });
}

// Assignment using every index below n at least once.
IndexMap surjective_indexmap(Rng& rng, const Ordinal& lambda, std::uint32_t n) {
  auto tail = random_indexmap(rng, lambda, lambda, n);
  for (std::uint32_t i = 0; i < n; ++i) tail = tail.with_value(Ordinal::finite(i), i);
  return tail;
}

Point flip_at(const Point& x, const Ordinal& a) {
  const auto& m = x.as_bits();
  return Point::bits(m.with_value(a, static_cast<Bit>(1 - m.at(a))));
}

std::string ord_list(const std::vector<Ordinal>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].to_string();
  return out + ")";
}

Ordinal drop_last_block(const Ordinal& a) {
  auto t = a.terms();
  if (--t.back().coefficient == 0) t.pop_back();
  return Ordinal::from_terms(std::move(t));
}

std::string keyed(const std::string& k) { return std::to_string(k.size()) + ":" + k; }

OrdMap e1_to_e0(const Point& x, bool spread) {
  if (!x.is_family()) throw SpaceMismatch("red_E1_to_E0 needs a family of bit sequences");
  for (const auto& c : x.components()) {
    if (!c.is_bits()) throw SpaceMismatch("red_E1_to_E0 needs a family of bit sequences");
  }
  const Ordinal& lambda = x.domain_bound();
  const auto& asg = x.assignment();
  auto germ = [&](const Ordinal& a) -> Ordinal {
    const Piece<std::uint32_t>* tail = nullptr;
    for (const auto& p : asg.pieces()) {
      if (p.lo() < a && a <= p.hi()) {
        tail = &p;
        break;
      }
    }
    std::vector<std::string> restricted(x.components().size());
    auto key_of = [&](std::uint32_t i) -> const std::string& {
      if (restricted[i].empty()) restricted[i] = restrict_point(x.components()[i], a).open_key();
      return restricted[i];
    };
    std::vector<std::string> keys;
    for (auto v : tail->word) keys.push_back(key_of(v));
    keys = detail::primitive_word(keys);
    std::string g = "e1:";
    if (a.is_limit_of_limits()) {
      g += "L" + keyed(key_of(tail->limit_value));
    } else if (spread) {
      g += "S" + keyed(key_of(asg.at(drop_last_block(a))));
    }
    g += "|";
    for (const auto& k : keys) g += keyed(k);
    return Ordinal::finite(class_code_of(g));
  };
  return limit_grid_map<Ordinal>(lambda, deep_boundaries(x), Ordinal{}, germ);
}

}  // namespace

OrdMap red_E1_to_E0(const Point& x) { return e1_to_e0(x, true); }
OrdMap red_E1_to_E0_unadapted(const Point& x) { return e1_to_e0(x, false); }

Point red_E0_to_E1(const Point& eta) {
  if (!eta.is_bits()) throw SpaceMismatch("red_E0_to_E1 needs a bit sequence");
  const Ordinal& b = eta.domain_bound();
  return Point::family({Point::bits(BitMap::constant(b, 0)), Point::bits(BitMap::constant(b, 1))},
                       eta.as_bits().transform([](Bit v) { return static_cast<std::uint32_t>(v); }));
}

namespace {

Point e0_to_idplus(const std::vector<Ordinal>& support, const Point& eta, std::size_t max_support, bool drop) {
  if (!eta.is_bits()) throw SpaceMismatch("red_E0_to_idplus needs a bit sequence");
  std::vector<Ordinal> s = support;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.size() > max_support) {
    throw DomainError("support of size " + std::to_string(s.size()) + " exceeds the bound " + std::to_string(max_support));
  }
  const Ordinal& lambda = eta.domain_bound();
  if (!s.empty() && !(s.back() < lambda)) throw DomainError("support position " + s.back().to_string() + " outside the domain");
  const Ordinal dom = s.empty() ? Ordinal{} : s.back().successor();
  std::uint64_t count = std::uint64_t{1} << s.size();
  if (drop && count > 1) --count;
  std::vector<Point> comps;
  std::vector<Piece<std::uint32_t>> asg;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    auto p = BitMap::constant(dom, 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if ((mask >> i) & 1u) p = p.with_value(s[i], 1);
    }
    comps.push_back(Point::bits(xor_prefix(p, eta.as_bits())));
    const auto v = static_cast<std::uint32_t>(mask);
    asg.push_back(Piece<std::uint32_t>{{Ordinal::finite(mask), Ordinal::finite(mask + 1)}, v, {v}});
  }
  asg.push_back(Piece<std::uint32_t>{{Ordinal::finite(count), lambda}, 0, {0}});
  return Point::family(std::move(comps), IndexMap(lambda, std::move(asg)));
}

}  // namespace

Point red_E0_to_idplus(const std::vector<Ordinal>& support, const Point& eta, std::size_t max_support) {
  return e0_to_idplus(support, eta, max_support, false);
}

bool agree_off(const std::vector<Ordinal>& support, const Point& x, const Point& y) {
  auto d = diff_map(x, y);
  for (const auto& s : support) {
    if (s < d.domain_bound()) d = d.with_value(s, 0);
  }
  return d == BitMap::constant(d.domain_bound(), 0);
}

// ---------------------------------------------------------------------------

GroupAction ActionSpec::build() const {
  FiniteGroup g = [&] {
    switch (group) {
      case GroupKind::Cyclic: return FiniteGroup::cyclic(order);
      case GroupKind::Symmetric: return FiniteGroup::symmetric(order);
      case GroupKind::Permutations: return FiniteGroup::from_permutations(generators, "perms");
    }
    throw Error("unreachable");
  }();
  if (rule == GroupAction::Rule::CoordinatePermutation) return GroupAction::permute(std::move(g), coords);
  return GroupAction::flip(std::move(g), coords, masks);
}

Relation Relation::handle(EqRelHandle h) {
  Relation r;
  r.kind_ = Kind::Handle;
  r.handle_ = std::move(h);
  return r;
}

Relation Relation::agree_off(std::vector<Ordinal> support) {
  Relation r;
  r.kind_ = Kind::AgreeOff;
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  r.support_ = std::move(support);
  return r;
}

Relation Relation::orbit(ActionSpec action) {
  Relation r;
  r.kind_ = Kind::Orbit;
  r.built_ = std::make_shared<const GroupAction>(action.build());
  r.action_ = std::move(action);
  return r;
}

const EqRelHandle& Relation::handle() const {
  if (!handle_) throw DomainError("relation " + to_string() + " is not a named relation");
  return *handle_;
}

const ActionSpec& Relation::action() const {
  if (!action_) throw DomainError("relation " + to_string() + " is not an orbit relation");
  return *action_;
}

SpaceDescriptor Relation::space() const {
  return kind_ == Kind::Handle ? handle_->space() : SpaceDescriptor::bits();
}

bool Relation::decide(const Point& x, const Point& y) const {
  switch (kind_) {
    case Kind::Handle: return gbs::decide(*handle_, x, y);
    case Kind::AgreeOff: return gbs::agree_off(support_, x, y);
    case Kind::Orbit: return orbit_decide(*built_, x, y).has_value();
  }
  throw Error("unreachable");
}

namespace {

std::string action_text(const ActionSpec& a) {
  std::string g;
  switch (a.group) {
    case ActionSpec::GroupKind::Cyclic: g = "cyclic(" + std::to_string(a.order) + ")"; break;
    case ActionSpec::GroupKind::Symmetric: g = "symmetric(" + std::to_string(a.order) + ")"; break;
    case ActionSpec::GroupKind::Permutations: {
      g = "perms(";
      for (std::size_t i = 0; i < a.generators.size(); ++i) {
        g += i ? ", (" : "(";
        for (std::size_t j = 0; j < a.generators[i].size(); ++j) g += (j ? " " : "") + std::to_string(a.generators[i][j]);
        g += ")";
      }
      g += ")";
      break;
    }
  }
  std::string out = (a.rule == GroupAction::Rule::CoordinatePermutation ? "permute " : "flip ") + g + " on " + ord_list(a.coords);
  if (a.rule == GroupAction::Rule::BitFlip) {
    out += " masks (";
    for (std::size_t i = 0; i < a.masks.size(); ++i) out += (i ? ", " : "") + std::to_string(a.masks[i]);
    out += ")";
  }
  return out;
}

}  // namespace

std::string Relation::to_string() const {
  switch (kind_) {
    case Kind::Handle: return handle_->to_string();
    case Kind::AgreeOff: return "E0_off" + ord_list(support_);
    case Kind::Orbit: return "orbit(" + action_text(*action_) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

const std::vector<std::pair<ReductionMap::Kind, const char*>>& map_names() {
  static const std::vector<std::pair<ReductionMap::Kind, const char*>> names{
      {ReductionMap::Kind::E1ToE0, "e1_to_e0"},
      {ReductionMap::Kind::E1ToE0Unadapted, "e1_to_e0_unadapted"},
      {ReductionMap::Kind::E0ToE1, "e0_to_e1"},
      {ReductionMap::Kind::E0ToIdPlus, "e0_to_idplus"},
      {ReductionMap::Kind::E0ToIdPlusDrop, "e0_to_idplus_drop"},
      {ReductionMap::Kind::Constant, "constant"},
      {ReductionMap::Kind::ActionToE0, "action_to_e0"},
  };
  return names;
}

}  // namespace

std::optional<ReductionMap::Kind> ReductionMap::kind_from_name(const std::string& name) {
  for (const auto& [k, n] : map_names()) {
    if (name == n) return k;
  }
  return std::nullopt;
}

std::string ReductionMap::name_of(Kind k) {
  for (const auto& [kk, n] : map_names()) {
    if (kk == k) return n;
  }
  return "?";
}

SpaceDescriptor ReductionMap::input_space() const {
  switch (kind) {
    case Kind::E1ToE0:
    case Kind::E1ToE0Unadapted: return SpaceDescriptor::family_of(SpaceDescriptor::bits());
    default: return SpaceDescriptor::bits();
  }
}

SpaceDescriptor ReductionMap::output_space() const {
  switch (kind) {
    case Kind::E1ToE0:
    case Kind::E1ToE0Unadapted:
    case Kind::ActionToE0: return SpaceDescriptor::ords();
    case Kind::E0ToE1:
    case Kind::E0ToIdPlus:
    case Kind::E0ToIdPlusDrop: return SpaceDescriptor::family_of(SpaceDescriptor::bits());
    case Kind::Constant: return SpaceDescriptor::bits();
  }
  return SpaceDescriptor::bits();
}

Point ReductionMap::apply(const Point& x, const WorkbenchConfig& cfg) const {
  switch (kind) {
    case Kind::E1ToE0: return Point::ords(red_E1_to_E0(x));
    case Kind::E1ToE0Unadapted: return Point::ords(red_E1_to_E0_unadapted(x));
    case Kind::E0ToE1: return red_E0_to_E1(x);
    case Kind::E0ToIdPlus: return e0_to_idplus(support, x, 8, false);
    case Kind::E0ToIdPlusDrop: return e0_to_idplus(support, x, 8, true);
    case Kind::Constant: return Point::bits(BitMap::constant(cfg.lambda, 0));
    case Kind::ActionToE0: {
      if (!action) throw DomainError("action_to_e0 needs an action");
      const auto act = action->build();
      CylinderEnumeration en(enumeration_bound);
      return Point::ords(red_action_to_E0(act, en, x, x.domain_bound()));
    }
  }
  throw Error("unreachable");
}

std::string verdict_name(Report::Verdict v) {
  switch (v) {
    case Report::Verdict::Pass: return "pass";
    case Report::Verdict::Fail: return "fail";
    case Report::Verdict::InputError: return "inputError";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Generators

Point random_point(const SpaceDescriptor& s, Rng& rng, const Ordinal& lambda) {
  switch (s.kind()) {
    case SpaceDescriptor::Kind::Bits: return Point::bits(random_bitmap(rng, lambda, lambda));
    case SpaceDescriptor::Kind::Ords: return Point::ords(random_ordmap(rng, lambda, lambda));
    case SpaceDescriptor::Kind::FamilyOf: {
      const auto n = static_cast<std::uint32_t>(uni(rng, 1, 3));
      std::vector<Point> comps;
      for (std::uint32_t i = 0; i < n; ++i) comps.push_back(random_point(s.inner(), rng, lambda));
      return Point::family(std::move(comps), random_indexmap(rng, lambda, lambda, n));
    }
    case SpaceDescriptor::Kind::TaggedSum: {
      const auto t = uni(rng, 0, s.parts().size() - 1);
      return Point::tagged(Ordinal::finite(t), random_point(s.parts()[t], rng, lambda));
    }
  }
  throw Error("unreachable");
}

Point equivalent_edit(const EqRelHandle& e, const Point& x, Rng& rng) {
  using K = EqRelHandle::Kind;
  const Ordinal lambda = x.domain_bound();
  switch (e.kind()) {
    case K::Id: return x;
    case K::E0: {
      const Ordinal beta = random_position(rng, lambda);
      if (x.is_bits()) return Point::bits(xor_prefix(random_bitmap(rng, beta, lambda), x.as_bits()));
      return Point::ords(splice(random_ordmap(rng, lambda, lambda), x.as_ords(), beta));
    }
    case K::E1:
    case K::E1Approx: {
      Ordinal beta = random_position(rng, lambda);
      const bool approx = e.kind() == K::E1Approx;
      if (approx && !(beta < e.level())) beta = drop_last_block(e.level());
      std::vector<Point> comps = x.components();
      const auto n = static_cast<std::uint32_t>(comps.size());
      const auto extra = static_cast<std::uint32_t>(uni(rng, 0, 2));
      for (std::uint32_t i = 0; i < extra; ++i) comps.push_back(random_point(SpaceDescriptor::bits(), rng, lambda));
      auto asg = x.assignment().transform([](std::uint32_t v) { return v; });
      asg = splice(random_indexmap(rng, lambda, lambda, n + extra), asg, beta);
      if (approx && e.level() < lambda) asg = splice(asg, random_indexmap(rng, lambda, lambda, n + extra), e.level());
      return Point::family(std::move(comps), asg);
    }
    case K::IdPlus:
    case K::Jump: {
      std::vector<Point> comps;
      for (const auto& c : x.components()) comps.push_back(e.kind() == K::Jump ? equivalent_edit(e.inner(), c, rng) : c);
      if (e.kind() == K::Jump && coin(rng)) {
        const auto& c = x.components()[uni(rng, 0, x.components().size() - 1)];
        comps.push_back(equivalent_edit(e.inner(), c, rng));
      }
      return Point::family(comps, surjective_indexmap(rng, lambda, static_cast<std::uint32_t>(comps.size())));
    }
    case K::IdPlusStar: {
      auto asg = x.assignment();
      const std::uint64_t swaps = uni(rng, 1, 3);
      for (std::uint64_t s = 0; s < swaps; ++s) {
        const Ordinal i = random_position(rng, lambda), j = random_position(rng, lambda);
        const auto vi = asg.at(i), vj = asg.at(j);
        asg = asg.with_value(i, vj).with_value(j, vi);
      }
      return Point::family(x.components(), asg);
    }
    case K::Cub: {
      const auto keep = limits_from(lambda, random_position(rng, lambda));
      if (x.is_bits()) return Point::bits(select(keep, x.as_bits(), random_bitmap(rng, lambda, lambda)));
      return Point::ords(select(keep, x.as_ords(), random_ordmap(rng, lambda, lambda)));
    }
    case K::Join: {
      const auto t = x.tag().to_uint();
      return Point::tagged(x.tag(), equivalent_edit(e.parts().at(t), x.payload(), rng));
    }
  }
  throw Error("unreachable");
}

Point inequivalent_candidate(const EqRelHandle& e, const Point& x, Rng& rng) {
  using K = EqRelHandle::Kind;
  const Ordinal lambda = x.domain_bound();
  const int variant = static_cast<int>(uni(rng, 0, 3));
  if (variant == 0 && e.kind() != K::Join) return random_point(e.space(), rng, lambda);
  switch (e.kind()) {
    case K::Id:
      if (x.is_bits()) return flip_at(x, random_position(rng, lambda));
      return random_point(e.space(), rng, lambda);
    case K::E0:
    case K::Cub: {
      const Ordinal beta = random_position(rng, lambda);
      BitMap mask = variant == 1 ? limits_from(lambda, beta)
                                 : (variant == 2 ? ones_from(lambda, beta)
                                                 : splice(BitMap::constant(lambda, 0), random_bitmap(rng, lambda, lambda), beta));
      if (x.is_bits()) {
        return Point::bits(pm_zip(x.as_bits(), mask, [](Bit a, Bit b) { return static_cast<Bit>(a ^ b); }));
      }
      auto bumped = x.as_ords().transform([](const Ordinal& v) { return v.successor(); });
      return Point::ords(select(mask, bumped, x.as_ords()));
    }
    case K::E1:
    case K::E1Approx: {
      std::vector<Point> comps = x.components();
      const auto fresh = static_cast<std::uint32_t>(comps.size());
      comps.push_back(random_point(SpaceDescriptor::bits(), rng, lambda));
      Ordinal beta = random_position(rng, lambda);
      if (e.kind() == K::E1Approx && !(beta < e.level())) beta = drop_last_block(e.level());
      const auto& asg = x.assignment();
      const auto other = IndexMap::constant(lambda, fresh);
      if (variant == 1) return Point::family(comps, select(limits_from(lambda, beta), other, asg));
      if (variant == 2) return Point::family(comps, select(ones_from(lambda, beta), other, asg));
      return Point::family(comps, splice(asg, random_indexmap(rng, lambda, lambda, fresh + 1), beta));
    }
    case K::IdPlus:
    case K::IdPlusStar:
    case K::Jump: {
      std::vector<Point> comps = x.components();
      const auto i = uni(rng, 0, comps.size() - 1);
      if (e.kind() == K::IdPlusStar && variant == 1) {
        auto asg = x.assignment();
        const Ordinal p = random_position(rng, lambda);
        return Point::family(comps, asg.with_value(p, static_cast<std::uint32_t>((asg.at(p) + 1) % comps.size())));
      }
      if (e.kind() == K::Jump) {
        comps[i] = inequivalent_candidate(e.inner(), comps[i], rng);
      } else {
        comps[i] = flip_at(comps[i], random_position(rng, lambda));
      }
      if (variant == 2) comps.push_back(random_point(e.space().inner(), rng, lambda));
      return Point::family(comps, surjective_indexmap(rng, lambda, static_cast<std::uint32_t>(comps.size())));
    }
    case K::Join: {
      const auto k = e.parts().size();
      const auto t = x.tag().to_uint();
      if (k > 1 && variant < 2) {
        const auto u = (t + uni(rng, 1, k - 1)) % k;
        return Point::tagged(Ordinal::finite(u), random_point(e.parts()[u].space(), rng, lambda));
      }
      return Point::tagged(x.tag(), inequivalent_candidate(e.parts()[t], x.payload(), rng));
    }
  }
  throw Error("unreachable");
}

std::vector<GeneratedPair> generate_pairs(const Relation& source, const GeneratorPolicy& g, const WorkbenchConfig& cfg,
                                          Rng& rng) {
  std::vector<GeneratedPair> out;
  const Ordinal& lambda = cfg.lambda;
  constexpr std::uint64_t kAttempts = 64;
  switch (source.kind()) {
    case Relation::Kind::Handle: {
      const auto& h = source.handle();
      if (g.kind == GeneratorPolicy::Kind::Exhaustive) {
        throw DomainError("exhaustive generation needs a finite carrier; " + h.to_string() + " has none");
      }
      if (g.kind == GeneratorPolicy::Kind::Sampled) {
        for (std::uint64_t i = 0; i < g.count; ++i) {
          auto x = random_point(h.space(), rng, lambda);
          auto y = random_point(h.space(), rng, lambda);
          out.push_back({std::move(x), std::move(y), false});
        }
        return out;
      }
      for (std::uint64_t i = 0; i < g.equivalent; ++i) {
        auto x = random_point(h.space(), rng, lambda);
        auto y = equivalent_edit(h, x, rng);
        out.push_back({std::move(x), std::move(y), true});
      }
      for (std::uint64_t i = 0; i < g.inequivalent; ++i) {
        auto x = random_point(h.space(), rng, lambda);
        bool found = false;
        for (std::uint64_t a = 0; a < kAttempts && !found; ++a) {
          auto y = inequivalent_candidate(h, x, rng);
          if (!gbs::decide(h, x, y)) {
            out.push_back({x, std::move(y), false});
            found = true;
          }
        }
        if (!found) throw DomainError("generator exhausted: no inequivalent partner found for " + h.to_string());
      }
      return out;
    }
    case Relation::Kind::AgreeOff: {
      const auto& s = source.support();
      if (s.size() > 8) throw DomainError("support larger than 8 positions");
      for (const auto& p : s) {
        if (!(p < lambda)) throw DomainError("support position " + p.to_string() + " outside lambda");
      }
      const Ordinal dom = s.empty() ? Ordinal{} : s.back().successor();
      auto masked = [&](const Point& eta, std::uint64_t mask) {
        auto p = BitMap::constant(dom, 0);
        for (std::size_t i = 0; i < s.size(); ++i) {
          if ((mask >> i) & 1u) p = p.with_value(s[i], 1);
        }
        return Point::bits(xor_prefix(p, eta.as_bits()));
      };
      auto off_support = [&](Rng& r) {
        for (std::uint64_t a = 0; a < kAttempts; ++a) {
          auto p = random_position(r, lambda);
          if (!std::binary_search(s.begin(), s.end(), p)) return p;
        }
        throw DomainError("generator exhausted: no position off the support");
      };
      const std::uint64_t all = std::uint64_t{1} << s.size();
      if (g.kind == GeneratorPolicy::Kind::Exhaustive) {
        for (std::uint64_t i = 0; i < g.count; ++i) {
          auto eta = random_point(SpaceDescriptor::bits(), rng, lambda);
          for (std::uint64_t m = 0; m < all; ++m) out.push_back({eta, masked(eta, m), true});
        }
        return out;
      }
      if (g.kind == GeneratorPolicy::Kind::Sampled) {
        for (std::uint64_t i = 0; i < g.count; ++i) {
          out.push_back({random_point(SpaceDescriptor::bits(), rng, lambda), random_point(SpaceDescriptor::bits(), rng, lambda), false});
        }
        return out;
      }
      for (std::uint64_t i = 0; i < g.equivalent; ++i) {
        auto eta = random_point(SpaceDescriptor::bits(), rng, lambda);
        out.push_back({eta, masked(eta, uni(rng, 0, all - 1)), true});
      }
      for (std::uint64_t i = 0; i < g.inequivalent; ++i) {
        auto eta = random_point(SpaceDescriptor::bits(), rng, lambda);
        auto y = masked(flip_at(eta, off_support(rng)), uni(rng, 0, all - 1));
        out.push_back({eta, std::move(y), false});
      }
      return out;
    }
    case Relation::Kind::Orbit: {
      const auto act = source.action().build();
      if (act.coordinates().size() > 6) throw DomainError("orbit carrier larger than 64 points");
      const auto carrier = supported_carrier(act.coordinates(), lambda);
      if (g.kind == GeneratorPolicy::Kind::Exhaustive) {
        for (const auto& x : carrier) {
          for (const auto& y : carrier) out.push_back({x, y, false});
        }
        return out;
      }
      if (g.kind == GeneratorPolicy::Kind::Sampled) {
        for (std::uint64_t i = 0; i < g.count; ++i) {
          out.push_back({carrier[uni(rng, 0, carrier.size() - 1)], carrier[uni(rng, 0, carrier.size() - 1)], false});
        }
        return out;
      }
      for (std::uint64_t i = 0; i < g.equivalent; ++i) {
        const auto& x = carrier[uni(rng, 0, carrier.size() - 1)];
        const auto el = static_cast<FiniteGroup::Element>(uni(rng, 0, act.group().order() - 1));
        out.push_back({x, act.act(el, x), true});
      }
      for (std::uint64_t i = 0; i < g.inequivalent; ++i) {
        const auto& x = carrier[uni(rng, 0, carrier.size() - 1)];
        bool found = false;
        for (std::uint64_t a = 0; a < kAttempts && !found; ++a) {
          const auto& y = carrier[uni(rng, 0, carrier.size() - 1)];
          if (!orbit_decide(act, x, y)) {
            out.push_back({x, y, false});
            found = true;
          }
        }
        if (!found) throw DomainError("generator exhausted: carrier has a single orbit");
      }
      return out;
    }
  }
  throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// Shrinking

namespace {

template <class V>
std::vector<PatternMap<V>> shrink_map(const PatternMap<V>& m, const std::function<std::vector<V>(const V&)>& smaller) {
  std::vector<PatternMap<V>> out;
  const auto& ps = m.pieces();
  auto add = [&](std::vector<Piece<V>> q) {
    try {
      PatternMap<V> c(m.domain_bound(), std::move(q));
      if (!(c == m)) out.push_back(std::move(c));
    } catch (const Error&) {
    }
  };
  for (std::size_t i = 1; i < ps.size(); ++i) {
    auto q = ps;
    q[i - 1].interval.hi = q[i].interval.hi;
    q.erase(q.begin() + static_cast<std::ptrdiff_t>(i));
    add(std::move(q));
    q = ps;
    q[i].interval.lo = q[i - 1].interval.lo;
    q.erase(q.begin() + static_cast<std::ptrdiff_t>(i - 1));
    add(std::move(q));
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].word.size() > 1) {
      auto q = ps;
      q[i].word.resize(1);
      add(q);
      q = ps;
      q[i].word.pop_back();
      add(std::move(q));
    }
    if (!(ps[i].limit_value == ps[i].word.front())) {
      auto q = ps;
      q[i].limit_value = q[i].word.front();
      add(std::move(q));
    }
  }
  for (const auto& v : m.values()) {
    for (const auto& s : smaller(v)) add(m.transform([&](const V& u) { return u == v ? s : u; }).pieces());
  }
  return out;
}

std::vector<Ordinal> smaller_ordinals(const Ordinal& v) {
  if (v.is_zero()) return {};
  auto t = v.terms();
  t.pop_back();
  std::vector<Ordinal> out{Ordinal{}};
  if (!t.empty()) out.push_back(Ordinal::from_terms(t));
  return out;
}

template <class V, class W>
std::uint64_t map_size(const PatternMap<V>& m, W weight) {
  std::uint64_t n = 0;
  for (const auto& p : m.pieces()) {
    n += 1 + p.word.size() + weight(p.limit_value);
    for (const auto& v : p.word) n += weight(v);
  }
  return n;
}

std::uint64_t ord_weight(const Ordinal& a) {
  std::uint64_t n = 0;
  for (const auto& t : a.terms()) n += 1 + t.exponent + std::min<std::uint64_t>(t.coefficient, 64);
  return n;
}

/// Strictly decreases along every accepted shrink step.
std::uint64_t point_size(const Point& x) {
  switch (x.kind()) {
    case Point::Kind::Bits: return map_size(x.as_bits(), [](Bit b) { return std::uint64_t{b}; });
    case Point::Kind::OrdVals: return map_size(x.as_ords(), ord_weight);
    case Point::Kind::Family: {
      std::uint64_t n = map_size(x.assignment(), [](std::uint32_t v) { return std::uint64_t{v != 0}; });
      for (const auto& c : x.components()) n += 1 + point_size(c);
      return n;
    }
    case Point::Kind::Tagged: return 1 + ord_weight(x.tag()) + point_size(x.payload());
  }
  return 0;
}

}  // namespace

std::vector<Point> shrink_candidates(const Point& x) {
  std::vector<Point> out;
  switch (x.kind()) {
    case Point::Kind::Bits:
      for (auto& m : shrink_map<Bit>(x.as_bits(), [](const Bit& b) { return b ? std::vector<Bit>{0} : std::vector<Bit>{}; })) {
        out.push_back(Point::bits(std::move(m)));
      }
      break;
    case Point::Kind::OrdVals:
      for (auto& m : shrink_map<Ordinal>(x.as_ords(), smaller_ordinals)) out.push_back(Point::ords(std::move(m)));
      break;
    case Point::Kind::Family: {
      const auto& comps = x.components();
      const auto n = static_cast<std::uint32_t>(comps.size());
      if (n > 1) {
        for (std::uint32_t i = 0; i < n; ++i) {
          const std::uint32_t to = i == 0 ? 1 : 0;
          out.push_back(Point::family(comps, x.assignment().transform([&](std::uint32_t v) { return v == i ? to : v; })));
        }
      }
      auto below = [](const std::uint32_t& v) { return v ? std::vector<std::uint32_t>{0} : std::vector<std::uint32_t>{}; };
      for (auto& m : shrink_map<std::uint32_t>(x.assignment(), below)) out.push_back(Point::family(comps, std::move(m)));
      for (std::uint32_t i = 0; i < n; ++i) {
        for (auto& c : shrink_candidates(comps[i])) {
          auto cs = comps;
          cs[i] = std::move(c);
          out.push_back(Point::family(std::move(cs), x.assignment()));
        }
      }
      break;
    }
    case Point::Kind::Tagged:
      for (auto& p : shrink_candidates(x.payload())) out.push_back(Point::tagged(x.tag(), std::move(p)));
      break;
  }
  return out;
}

std::pair<Point, Point> shrink_pair(const Point& x0, const Point& y0,
                                    const std::function<bool(const Point&, const Point&)>& fails, std::size_t max_steps) {
  Point x = x0, y = y0;
  auto still = [&](const Point& a, const Point& b) {
    try {
      return fails(a, b);
    } catch (const Error&) {
      return false;
    }
  };
  for (std::size_t step = 0; step < max_steps; ++step) {
    bool improved = false;
    for (auto& c : shrink_candidates(x)) {
      if (point_size(c) < point_size(x) && still(c, y)) {
        x = std::move(c);
        improved = true;
        break;
      }
    }
    if (!improved) {
      for (auto& c : shrink_candidates(y)) {
        if (point_size(c) < point_size(y) && still(x, c)) {
          y = std::move(c);
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
  }
  return {x, y};
}

Report verify_reduction(const ReductionSpec& spec, const WorkbenchConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.seed = cfg.seed;
  rep.lambda = cfg.lambda;
  auto finish = [&] {
    rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rep;
  };
  std::vector<GeneratedPair> pairs;
  try {
    cfg.validate();
    if (spec.map.kind != ReductionMap::Kind::Constant && !(spec.map.input_space() == spec.source.space())) {
      throw SpaceMismatch("map " + ReductionMap::name_of(spec.map.kind) + " takes " + spec.map.input_space().to_string() +
                          " but the source relation lives on " + spec.source.space().to_string());
    }
    if (!(spec.map.output_space() == spec.target.space())) {
      throw SpaceMismatch("map " + ReductionMap::name_of(spec.map.kind) + " yields " + spec.map.output_space().to_string() +
                          " but the target relation lives on " + spec.target.space().to_string());
    }
    Rng rng(cfg.seed);
    pairs = generate_pairs(spec.source, spec.generator, cfg, rng);
  } catch (const Error& e) {
    rep.verdict = Report::Verdict::InputError;
    rep.message = e.what();
    return finish();
  }
  auto judge = [&](const Point& x, const Point& y, bool& s, bool& t) {
    s = spec.source.decide(x, y);
    t = spec.target.decide(spec.map.apply(x, cfg), spec.map.apply(y, cfg));
  };
  try {
    for (const auto& p : pairs) {
      bool s = false, t = false;
      judge(p.x, p.y, s, t);
      ++rep.checked;
      (s ? rep.equivalent_pairs : rep.inequivalent_pairs) += 1;
      if (s == t) continue;
      ++rep.failed;
      if (rep.counterexample) continue;
      auto [sx, sy] = shrink_pair(p.x, p.y, [&](const Point& a, const Point& b) {
        bool s2 = false, t2 = false;
        judge(a, b, s2, t2);
        return s2 != t2;
      });
      bool s2 = false, t2 = false;
      judge(sx, sy, s2, t2);
      rep.counterexample = Counterexample{sx, sy, s2, t2};
    }
  } catch (const Error& e) {
    rep.verdict = Report::Verdict::InputError;
    rep.message = e.what();
    return finish();
  }
  rep.verdict = rep.failed ? Report::Verdict::Fail : Report::Verdict::Pass;
  return finish();
}

}  // namespace gbs
