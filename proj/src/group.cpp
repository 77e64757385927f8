#include "gbs/group.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "gbs/error.hpp"

namespace gbs {

namespace {

using Perm = std::vector<std::uint32_t>;

Perm compose(const Perm& a, const Perm& b) {
  Perm out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[b[i]];
  return out;
}

bool has(FiniteGroup::Subset s, FiniteGroup::Element g) { return (s >> g) & 1u; }

std::string hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  do {
    out.insert(out.begin(), digits[v & 15]);
    v >>= 4;
  } while (v);
  return out;
}

}  // namespace

FiniteGroup::FiniteGroup(std::vector<std::vector<Element>> table, std::vector<Element> generators, std::string name)
    : table_(std::move(table)), generators_(std::move(generators)), name_(std::move(name)) {
  const std::size_t n = table_.size();
  if (n == 0 || n > kMaxOrder) throw DomainError("group order must be between 1 and 64");
  for (const auto& row : table_) {
    if (row.size() != n) throw DomainError("Cayley table is not square");
    for (auto v : row) {
      if (v >= n) throw DomainError("Cayley table entry out of range");
    }
  }
  bool found = false;
  for (Element e = 0; e < n && !found; ++e) {
    bool ok = true;
    for (Element a = 0; a < n && ok; ++a) ok = table_[e][a] == a && table_[a][e] == a;
    if (ok) {
      identity_ = e;
      found = true;
    }
  }
  if (!found) throw DomainError("Cayley table has no identity");
  inverse_.assign(n, 0);
  for (Element a = 0; a < n; ++a) {
    bool ok = false;
    for (Element b = 0; b < n; ++b) {
      if (table_[a][b] == identity_ && table_[b][a] == identity_) {
        inverse_[a] = b;
        ok = true;
        break;
      }
    }
    if (!ok) throw DomainError("element " + std::to_string(a) + " has no inverse");
  }
  for (Element a = 0; a < n; ++a) {
    for (Element b = 0; b < n; ++b) {
      for (Element c = 0; c < n; ++c) {
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]]) throw DomainError("Cayley table is not associative");
      }
    }
  }
  for (auto g : generators_) {
    if (g >= n) throw DomainError("generator out of range");
  }
}

FiniteGroup FiniteGroup::from_permutations(const std::vector<std::vector<std::uint32_t>>& gens, std::string name) {
  if (gens.empty()) throw DomainError("need at least one generating permutation");
  const std::size_t k = gens.front().size();
  for (const auto& g : gens) {
    if (g.size() != k) throw DomainError("generating permutations have different degrees");
    Perm sorted = g;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < k; ++i) {
      if (sorted[i] != i) throw DomainError("not a permutation");
    }
  }
  Perm id(k);
  std::iota(id.begin(), id.end(), 0u);
  std::vector<Perm> elems{id};
  std::map<Perm, Element> index{{id, 0}};
  std::deque<Perm> todo{id};
  while (!todo.empty()) {
    Perm cur = todo.front();
    todo.pop_front();
    for (const auto& g : gens) {
      Perm nxt = compose(cur, g);
      if (index.count(nxt)) continue;
      if (elems.size() == kMaxOrder) throw OverflowError("generated group exceeds order 64");
      index.emplace(nxt, static_cast<Element>(elems.size()));
      elems.push_back(nxt);
      todo.push_back(nxt);
    }
  }
  const std::size_t n = elems.size();
  std::vector<std::vector<Element>> table(n, std::vector<Element>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) table[a][b] = index.at(compose(elems[a], elems[b]));
  }
  std::vector<Element> gen_idx;
  for (const auto& g : gens) gen_idx.push_back(index.at(g));
  FiniteGroup out(std::move(table), std::move(gen_idx), std::move(name));
  out.perms_ = std::move(elems);
  return out;
}

FiniteGroup FiniteGroup::cyclic(std::uint32_t n) {
  if (n == 0) throw DomainError("cyclic group of order 0");
  Perm rot(n);
  for (std::uint32_t i = 0; i < n; ++i) rot[i] = (i + 1) % n;
  return from_permutations({rot}, "cyclic(" + std::to_string(n) + ")");
}

FiniteGroup FiniteGroup::symmetric(std::uint32_t k) {
  if (k == 0 || k > 4) throw DomainError("symmetric group degree must be 1..4");
  Perm swap(k), cycle(k);
  std::iota(swap.begin(), swap.end(), 0u);
  if (k > 1) std::swap(swap[0], swap[1]);
  for (std::uint32_t i = 0; i < k; ++i) cycle[i] = (i + 1) % k;
  return from_permutations({swap, cycle}, "symmetric(" + std::to_string(k) + ")");
}

FiniteGroup::Subset FiniteGroup::closure(const std::vector<Element>& gens) const {
  Subset s = Subset{1} << identity_;
  std::vector<Element> frontier{identity_};
  while (!frontier.empty()) {
    Element cur = frontier.back();
    frontier.pop_back();
    for (auto g : gens) {
      Element nxt = mul(cur, g);
      if (!has(s, nxt)) {
        s |= Subset{1} << nxt;
        frontier.push_back(nxt);
      }
    }
  }
  return s;
}

bool FiniteGroup::is_subgroup(Subset s) const {
  if (!has(s, identity_) || (s & ~all())) return false;
  for (Element a = 0; a < order(); ++a) {
    if (!has(s, a)) continue;
    for (Element b = 0; b < order(); ++b) {
      if (has(s, b) && !has(s, mul(a, b))) return false;
    }
  }
  return true;
}

FiniteGroup::Subset FiniteGroup::right_mul(Subset s, Element g) const {
  Subset out = 0;
  for (Element a = 0; a < order(); ++a) {
    if (has(s, a)) out |= Subset{1} << mul(a, g);
  }
  return out;
}

FreeWord free_reduce(const std::vector<Letter>& w) {
  FreeWord out;
  for (const auto& l : w) {
    if (!out.letters_.empty() && out.letters_.back().generator == l.generator && out.letters_.back().inverse != l.inverse) {
      out.letters_.pop_back();
    } else {
      out.letters_.push_back(l);
    }
  }
  return out;
}

FreeWord FreeWord::inverse() const {
  std::vector<Letter> r(letters_.rbegin(), letters_.rend());
  for (auto& l : r) l.inverse = !l.inverse;
  return free_reduce(r);
}

FreeWord operator*(const FreeWord& a, const FreeWord& b) {
  std::vector<Letter> w = a.letters_;
  w.insert(w.end(), b.letters_.begin(), b.letters_.end());
  return free_reduce(w);
}

std::string FreeWord::to_string() const {
  if (letters_.empty()) return "e";
  std::string out;
  for (const auto& l : letters_) {
    if (!out.empty()) out += ' ';
    out += "g" + std::to_string(l.generator);
    if (l.inverse) out += "^-1";
  }
  return out;
}

Presentation::Presentation(FiniteGroup group, std::vector<FiniteGroup::Element> images)
    : group_(std::make_shared<const FiniteGroup>(std::move(group))), images_(std::move(images)) {
  for (auto g : images_) {
    if (g >= group_->order()) throw DomainError("generator image out of range");
  }
  if (group_->closure(images_) != group_->all()) throw DomainError("generator images do not generate the group");
}

FiniteGroup::Element pr_apply(const Presentation& p, const FreeWord& w) {
  const auto& g = p.group();
  FiniteGroup::Element acc = g.identity();
  for (const auto& l : w.letters()) {
    if (l.generator >= p.images().size()) throw DomainError("word uses generator outside the presentation");
    auto img = p.images()[l.generator];
    acc = g.mul(acc, l.inverse ? g.inv(img) : img);
  }
  return acc;
}

bool SymbolicCoset::contains(const FreeWord& w) const { return has(subset, pr_apply(presentation, w)); }

SymbolicCoset coset_mul(const SymbolicCoset& s, const FreeWord& w) {
  return SymbolicCoset{s.presentation, s.presentation.group().right_mul(s.subset, pr_apply(s.presentation, w))};
}

GroupAction::GroupAction(FiniteGroup g, Rule r, std::vector<Ordinal> coords)
    : group_(std::move(g)), rule_(r), coords_(std::move(coords)) {
  std::set<Ordinal> distinct(coords_.begin(), coords_.end());
  if (distinct.size() != coords_.size()) throw DomainError("action coordinates must be distinct");
  if (coords_.empty() || coords_.size() > 64) throw DomainError("action needs 1..64 coordinates");
}

GroupAction GroupAction::permute(FiniteGroup g, std::vector<Ordinal> coords) {
  if (g.permutations().empty()) throw DomainError("coordinate permutation needs a permutation group");
  if (g.permutations().front().size() != coords.size()) {
    throw DomainError("group " + g.name() + " permutes " + std::to_string(g.permutations().front().size()) +
                      " points but " + std::to_string(coords.size()) + " coordinates were given");
  }
  return GroupAction(std::move(g), Rule::CoordinatePermutation, std::move(coords));
}

GroupAction GroupAction::flip(FiniteGroup g, std::vector<Ordinal> coords, std::vector<std::uint64_t> generator_masks) {
  GroupAction a(std::move(g), Rule::BitFlip, std::move(coords));
  const auto& grp = a.group_;
  if (generator_masks.size() != grp.generators().size()) throw DomainError("need one flip mask per generator");
  const std::uint64_t valid = a.coords_.size() == 64 ? ~0ull : ((1ull << a.coords_.size()) - 1);
  for (auto m : generator_masks) {
    if (m & ~valid) throw DomainError("flip mask refers to a missing coordinate");
  }
  a.gen_masks_ = std::move(generator_masks);
  std::vector<std::optional<std::uint64_t>> masks(grp.order());
  masks[grp.identity()] = 0;
  std::vector<FiniteGroup::Element> frontier{grp.identity()};
  while (!frontier.empty()) {
    auto cur = frontier.back();
    frontier.pop_back();
    for (std::size_t i = 0; i < grp.generators().size(); ++i) {
      auto nxt = grp.mul(cur, grp.generators()[i]);
      if (!masks[nxt]) {
        masks[nxt] = *masks[cur] ^ a.gen_masks_[i];
        frontier.push_back(nxt);
      }
    }
  }
  for (FiniteGroup::Element x = 0; x < grp.order(); ++x) {
    if (!masks[x]) throw DomainError("group generators do not reach every element");
    a.element_masks_.push_back(*masks[x]);
  }
  for (FiniteGroup::Element x = 0; x < grp.order(); ++x) {
    for (FiniteGroup::Element y = 0; y < grp.order(); ++y) {
      if (a.element_masks_[grp.mul(x, y)] != (a.element_masks_[x] ^ a.element_masks_[y])) {
        throw DomainError("flip masks do not define a homomorphism of " + grp.name());
      }
    }
  }
  return a;
}

bool GroupAction::preserves_cut(FiniteGroup::Element g, const Ordinal& a) const {
  if (rule_ == Rule::BitFlip) return true;
  const auto& p = group_.permutations()[g];
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if ((coords_[i] < a) != (coords_[p[i]] < a)) return false;
  }
  return true;
}

Point GroupAction::act(FiniteGroup::Element g, const Point& x) const {
  if (g >= group_.order()) throw DomainError("group element out of range");
  const BitMap& m = x.as_bits();
  const Ordinal& dom = m.domain_bound();
  if (!preserves_cut(g, dom)) throw DomainError("group element does not act on level " + dom.to_string());
  BitMap out = m;
  if (rule_ == Rule::BitFlip) {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if ((element_masks_[g] >> i & 1u) && coords_[i] < dom) out = out.with_value(coords_[i], 1 - m.at(coords_[i]));
    }
  } else {
    const auto& p = group_.permutations()[g];
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] < dom) out = out.with_value(coords_[p[i]], m.at(coords_[i]));
    }
  }
  return Point::bits(std::move(out));
}

void GroupAction::verify_on(const std::vector<Point>& carrier) const {
  for (const auto& x : carrier) {
    if (!(act(group_.identity(), x) == x)) throw DomainError("identity does not act trivially");
    for (FiniteGroup::Element h = 0; h < group_.order(); ++h) {
      Point hx = act(h, x);
      for (FiniteGroup::Element g = 0; g < group_.order(); ++g) {
        if (!(act(g, hx) == act(group_.mul(g, h), x))) throw DomainError("action is not compatible with the group law");
      }
    }
  }
}

void GroupAction::set_chain(std::vector<ChainStep> chain) {
  if (chain.empty()) {
    chain_.clear();
    return;
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!group_.is_subgroup(chain[i].subgroup)) throw DomainError("chain step is not a subgroup");
    if (i > 0) {
      if (!(chain[i - 1].from < chain[i].from)) throw DomainError("chain levels must increase");
      if (chain[i - 1].subgroup & ~chain[i].subgroup) throw DomainError("chain subgroups must be nondecreasing");
    }
  }
  if (chain.back().subgroup != group_.all()) throw DomainError("chain must exhaust the group");
  chain_ = std::move(chain);
}

FiniteGroup::Subset GroupAction::subgroup_at(const Ordinal& a) const {
  if (!chain_.empty()) {
    FiniteGroup::Subset s = FiniteGroup::Subset{1} << group_.identity();
    for (const auto& step : chain_) {
      if (step.from <= a) s = step.subgroup;
    }
    return s;
  }
  FiniteGroup::Subset s = 0;
  for (FiniteGroup::Element g = 0; g < group_.order(); ++g) {
    if (preserves_cut(g, a)) s |= FiniteGroup::Subset{1} << g;
  }
  return s;
}

std::vector<Ordinal> GroupAction::chain_criticals() const {
  std::vector<Ordinal> out;
  for (const auto& c : coords_) {
    out.push_back(c);
    out.push_back(c.successor());
  }
  for (const auto& step : chain_) out.push_back(step.from);
  return out;
}

std::optional<FiniteGroup::Element> orbit_decide(const GroupAction& act, const Point& x, const Point& y) {
  for (FiniteGroup::Element g = 0; g < act.group().order(); ++g) {
    if (act.act(g, x) == y) return g;
  }
  return std::nullopt;
}

CylinderEnumeration::CylinderEnumeration(std::uint32_t bound) : bound_(bound) {
  if (bound == 0 || bound > 16) throw DomainError("cylinder enumeration bound must be 1..16");
  for (std::uint32_t len = 0; len < bound; ++len) {
    for (std::uint64_t bits = 0; bits < (1ull << len); ++bits) {
      std::vector<Bit> w(len);
      for (std::uint32_t i = 0; i < len; ++i) w[i] = (bits >> (len - 1 - i)) & 1u;
      words_.push_back(std::move(w));
    }
  }
}

namespace {

std::vector<Bit> prefix_bits(const Point& x, std::uint32_t len) {
  const BitMap& m = x.as_bits();
  std::vector<Bit> out;
  for (std::uint32_t i = 0; i < len && Ordinal::finite(i) < m.domain_bound(); ++i) out.push_back(m.at(Ordinal::finite(i)));
  return out;
}

bool prefix_matches(const std::vector<Bit>& pre, const std::vector<Bit>& w) {
  if (w.size() > pre.size()) return false;
  return std::equal(w.begin(), w.end(), pre.begin());
}

}  // namespace

bool CylinderEnumeration::in_cylinder(const Point& x, std::size_t i) const {
  const auto& w = words_.at(i);
  return prefix_matches(prefix_bits(x, static_cast<std::uint32_t>(w.size())), w);
}

void CylinderEnumeration::require_separates(const std::vector<Point>& pts) const {
  std::map<std::vector<Bit>, const Point*> seen;
  for (const auto& p : pts) {
    auto [it, fresh] = seen.emplace(prefix_bits(p, bound_ - 1), &p);
    if (!fresh && !(*it->second == p)) throw DomainError("enumeration bound too small");
  }
}

Trace red_ac1(const GroupAction& act, const CylinderEnumeration& en, const Point& x) {
  const auto& g = act.group();
  std::vector<Point> orbit;
  for (FiniteGroup::Element e = 0; e < g.order(); ++e) orbit.push_back(act.act(e, x));
  en.require_separates(orbit);
  std::vector<std::vector<Bit>> pre;
  for (const auto& p : orbit) pre.push_back(prefix_bits(p, en.bound() - 1));
  Trace z(en.words().size(), 0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (FiniteGroup::Element e = 0; e < g.order(); ++e) {
      if (prefix_matches(pre[e], en.words()[i])) z[i] |= FiniteGroup::Subset{1} << e;
    }
  }
  return z;
}

std::optional<FiniteGroup::Element> ac1_criterion(const FiniteGroup& g, const Trace& zx, const Trace& zy) {
  if (zx.size() != zy.size()) throw DomainError("traces over different enumerations");
  for (FiniteGroup::Element e = 0; e < g.order(); ++e) {
    bool ok = true;
    for (std::size_t i = 0; i < zx.size() && ok; ++i) ok = zx[i] == g.right_mul(zy[i], e);
    if (ok) return e;
  }
  return std::nullopt;
}

OrdMap red_ac3_selector(const GroupAction& act, const Point& x, const Ordinal& lambda) {
  if (!(x.domain_bound() == lambda)) throw DomainError("selector input must live on [0, lambda)");
  const auto& g = act.group();
  std::vector<Ordinal> crit = act.chain_criticals();
  for (FiniteGroup::Element e = 0; e < g.order(); ++e) {
    for (const auto& b : act.act(e, x).as_bits().boundaries()) crit.push_back(b);
  }
  auto& reg = ClassCodeRegistry::global();
  return limit_grid_map<Ordinal>(lambda, crit, Ordinal{}, [&](const Ordinal& a) {
    const Point xa = restrict_point(x, a);
    const auto sub = act.subgroup_at(a);
    std::string best;
    bool first = true;
    for (FiniteGroup::Element e = 0; e < g.order(); ++e) {
      if (!(sub >> e & 1u)) continue;
      std::string k = act.act(e, xa).open_key();
      if (first || k < best) best = std::move(k);
      first = false;
    }
    return Ordinal::finite(reg.code("ac3:" + best));
  });
}

OrdMap red_action_to_E0(const GroupAction& act, const CylinderEnumeration& en, const Point& x, const Ordinal& lambda) {
  const auto& g = act.group();
  const Trace z = red_ac1(act, en, x);
  auto& reg = ClassCodeRegistry::global();
  std::vector<Ordinal> crit = act.chain_criticals();
  return limit_grid_map<Ordinal>(lambda, crit, Ordinal{}, [&](const Ordinal& a) {
    const auto sub = act.subgroup_at(a);
    std::string best;
    bool first = true;
    for (FiniteGroup::Element e = 0; e < g.order(); ++e) {
      if (!(sub >> e & 1u)) continue;
      std::string k;
      for (auto s : z) k += hex(g.right_mul(s, e)) + ",";
      if (first || k < best) best = std::move(k);
      first = false;
    }
    return Ordinal::finite(reg.code("trace:" + best));
  });
}

std::vector<Point> supported_carrier(const std::vector<Ordinal>& support, const Ordinal& lambda) {
  if (support.size() > 16) throw DomainError("carrier support too large");
  std::vector<Point> out;
  for (std::uint64_t bits = 0; bits < (1ull << support.size()); ++bits) {
    BitMap m = BitMap::constant(lambda, 0);
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (bits >> i & 1u) m = m.with_value(support[i], 1);
    }
    out.push_back(Point::bits(std::move(m)));
  }
  return out;
}

}  // namespace gbs
