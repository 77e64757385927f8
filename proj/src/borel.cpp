#include "gbs/borel.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "gbs/error.hpp"

namespace gbs {

namespace {

// Max over plain bounds and over successors of indices, allocating once.
struct BoundAcc {
  const Ordinal* plain = nullptr;
  const Ordinal* index = nullptr;

  void add_plain(const Ordinal& a) {
    if (!plain || *plain < a) plain = &a;
  }
  void add_index(const Ordinal& a) {
    if (!index || *index < a) index = &a;
  }
  void add_address(const Address& ad) {
    for (const auto& st : ad.path) {
      if (st.kind == Address::Step::Kind::Component) add_index(st.index);
    }
  }
  Ordinal value() const {
    Ordinal out = index ? index->successor() : Ordinal{};
    if (plain && out < *plain) out = *plain;
    return out;
  }
};

void add_condition(BoundAcc& acc, const std::vector<FiniteWord>& words, const LeafCondition& c) {
  for (const auto& at : c) {
    acc.add_address(at.a);
    switch (at.kind) {
      case Atom::Kind::Segment: acc.add_plain(words.at(at.word_a).domain_bound()); break;
      case Atom::Kind::PairSegment:
        acc.add_plain(words.at(at.word_a).domain_bound());
        acc.add_plain(words.at(at.word_b).domain_bound());
        acc.add_address(at.b);
        break;
      case Atom::Kind::Tag: break;
      case Atom::Kind::PairTag: acc.add_address(at.b); break;
    }
  }
}

}  // namespace

Ordinal Address::index_bound() const {
  BoundAcc acc;
  acc.add_address(*this);
  return acc.value();
}

bool operator==(const CodeNode& a, const CodeNode& b) {
  return a.entry == b.entry && a.children == b.children && a.label == b.label && a.depth == b.depth;
}

BorelCode::BorelCode(SpaceDescriptor space, bool pair) : space_(std::move(space)), pair_(pair) {}

std::uint32_t BorelCode::add_word(const FiniteWord& w) {
  for (std::uint32_t i = 0; i < words_.size(); ++i) {
    if (words_[i] == w) return i;
  }
  words_.push_back(w);
  return static_cast<std::uint32_t>(words_.size() - 1);
}

std::uint32_t BorelCode::add_child(std::uint32_t parent, const Ordinal& entry) {
  if (parent >= nodes_.size()) throw DomainError("add_child: no node " + std::to_string(parent));
  if (nodes_[parent].label) throw DomainError("add_child: node " + std::to_string(parent) + " is a labelled leaf");
  auto& ch = nodes_[parent].children;
  auto it = std::lower_bound(ch.begin(), ch.end(), entry,
                             [&](std::uint32_t c, const Ordinal& e) { return nodes_[c].entry < e; });
  if (it != ch.end() && nodes_[*it].entry == entry) {
    throw DomainError("add_child: entry " + entry.to_string() + " repeated under node " + std::to_string(parent));
  }
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  const std::size_t at = static_cast<std::size_t>(it - ch.begin());
  CodeNode n;
  n.entry = entry;
  n.depth = nodes_[parent].depth + 1;
  nodes_.push_back(std::move(n));
  auto& ch2 = nodes_[parent].children;
  ch2.insert(ch2.begin() + static_cast<std::ptrdiff_t>(at), id);
  return id;
}

void BorelCode::set_label(std::uint32_t leaf, LeafCondition cond) {
  if (leaf >= nodes_.size()) throw DomainError("set_label: no node " + std::to_string(leaf));
  if (!nodes_[leaf].is_leaf()) throw DomainError("set_label: node " + std::to_string(leaf) + " is not a leaf");
  nodes_[leaf].label = std::move(cond);
}

Ordinal BorelCode::position_bound(const LeafCondition& c) const {
  BoundAcc acc;
  add_condition(acc, words_, c);
  return acc.value();
}

Ordinal BorelCode::content_bound() const {
  BoundAcc acc;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i > 0) acc.add_index(nodes_[i].entry);
    if (nodes_[i].label) add_condition(acc, words_, *nodes_[i].label);
  }
  return acc.value();
}

void BorelCode::validate() const {
  auto side_ok = [&](const Address& a) {
    return pair_ ? a.side != Address::Side::Single : a.side == Address::Side::Single;
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.label && !n.is_leaf()) throw DomainError("node " + std::to_string(i) + " is labelled but has children");
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      const auto c = n.children[k];
      if (c >= nodes_.size() || c == 0) throw DomainError("node " + std::to_string(i) + " has a bad child index");
      if (nodes_[c].depth != n.depth + 1) throw DomainError("node " + std::to_string(c) + " has a bad depth");
      if (k > 0 && !(nodes_[n.children[k - 1]].entry < nodes_[c].entry)) {
        throw DomainError("children of node " + std::to_string(i) + " are not strictly increasing");
      }
    }
    if (!n.label) continue;
    for (const auto& at : *n.label) {
      const bool two = at.kind == Atom::Kind::PairSegment || at.kind == Atom::Kind::PairTag;
      if (!side_ok(at.a) || (two && !side_ok(at.b))) {
        throw DomainError("node " + std::to_string(i) + (pair_ ? ": pair code atom must address Left or Right"
                                                               : ": single code atom must address Single"));
      }
      if (at.kind == Atom::Kind::Segment || at.kind == Atom::Kind::PairSegment) {
        if (at.word_a >= words_.size() || (at.kind == Atom::Kind::PairSegment && at.word_b >= words_.size())) {
          throw DomainError("node " + std::to_string(i) + " refers to a missing word");
        }
      }
    }
  }
}

namespace {

void fingerprint(const BorelCode& c, std::uint32_t i, std::string& out) {
  const auto& n = c.node(i);
  out += n.entry.to_string();
  if (n.label) {
    out += '[';
    for (const auto& at : *n.label) {
      out += std::to_string(static_cast<int>(at.kind)) + (at.negate ? "!" : "") + std::to_string(static_cast<int>(at.a.side));
      for (const auto& s : at.a.path) out += (s.kind == Address::Step::Kind::Payload ? "p" : "c" + s.index.to_string());
      out += '/' + std::to_string(static_cast<int>(at.b.side));
      for (const auto& s : at.b.path) out += (s.kind == Address::Step::Kind::Payload ? "p" : "c" + s.index.to_string());
      if (at.kind == Atom::Kind::Segment || at.kind == Atom::Kind::PairSegment) {
        out += '/' + serialize_map(c.words()[at.word_a], false);
      }
      if (at.kind == Atom::Kind::PairSegment) out += '/' + serialize_map(c.words()[at.word_b], false);
      if (at.kind == Atom::Kind::Tag || at.kind == Atom::Kind::PairTag) out += '/' + at.tag.to_string();
      out += ';';
    }
    out += ']';
  }
  out += '(';
  for (auto ch : n.children) fingerprint(c, ch, out);
  out += ')';
}

}  // namespace

bool operator==(const BorelCode& a, const BorelCode& b) {
  if (!(a.space_ == b.space_) || a.pair_ != b.pair_) return false;
  std::string fa, fb;
  fingerprint(a, 0, fa);
  fingerprint(b, 0, fb);
  return fa == fb;
}

namespace {

const Point* resolve(const Address& a, const Point& x, const Point* y) {
  const Point* p = a.side == Address::Side::Right ? y : &x;
  if (!p) return nullptr;
  for (const auto& s : a.path) {
    if (s.kind == Address::Step::Kind::Payload) {
      if (!p->is_tagged()) return nullptr;
      p = &p->payload();
    } else {
      if (!p->is_family() || !(s.index < p->domain_bound())) return nullptr;
      p = &p->component_at(s.index);
    }
  }
  return p;
}

struct PtrWordHash {
  std::size_t operator()(const std::pair<const Point*, std::uint32_t>& k) const noexcept {
    return std::hash<const void*>()(k.first) * 31u + k.second;
  }
};

class Evaluator {
 public:
  Evaluator(const BorelCode& c, const Point& x, const Point* y)
      : code_(c), x_(x), y_(y), use_cache_(c.nodes().size() > 64) {}

  bool segment(const Address& a, std::uint32_t w) {
    const Point* p = resolve(a, x_, y_);
    if (!p || !p->is_bits()) return false;
    if (!use_cache_) return check(*p, w);
    auto key = std::make_pair(p, w);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const bool v = check(*p, w);
    cache_.emplace(key, v);
    return v;
  }

  bool tag(const Address& a, const Ordinal& t) {
    const Point* p = resolve(a, x_, y_);
    return p && p->is_tagged() && p->tag() == t;
  }

  bool atom(const Atom& at) {
    bool v = false;
    switch (at.kind) {
      case Atom::Kind::Segment: v = segment(at.a, at.word_a); break;
      case Atom::Kind::PairSegment: v = segment(at.a, at.word_a) == segment(at.b, at.word_b); break;
      case Atom::Kind::Tag: v = tag(at.a, at.tag); break;
      case Atom::Kind::PairTag: v = tag(at.a, at.tag) == tag(at.b, at.tag); break;
    }
    return v != at.negate;
  }

  bool leaf(const LeafCondition& c) {
    for (const auto& at : c) {
      if (!atom(at)) return false;
    }
    return true;
  }

  bool value(std::uint32_t i) {
    const auto& n = code_.node(i);
    if (n.is_leaf()) return n.label && leaf(*n.label);
    const bool first_player = n.depth % 2 == 0;
    for (auto c : n.children) {
      if (value(c) != first_player) return !first_player;
    }
    return first_player;
  }

  // Value for II at node i; records the first good move of whoever wins at i.
  bool solve(std::uint32_t i, std::vector<std::int32_t>& choice) {
    const auto& n = code_.node(i);
    if (n.is_leaf()) return n.label && leaf(*n.label);
    const bool first_player = n.depth % 2 == 0;
    for (auto c : n.children) {
      const bool v = solve(c, choice);
      if (first_player && !v) {
        choice[i] = static_cast<std::int32_t>(c);
        return false;
      }
      if (!first_player && v) {
        choice[i] = static_cast<std::int32_t>(c);
        return true;
      }
    }
    return first_player;
  }

 private:
  bool check(const Point& p, std::uint32_t w) const {
    const auto& q = code_.words()[w];
    return pm_agree_below(q, p.as_bits(), q.domain_bound());
  }

  const BorelCode& code_;
  const Point& x_;
  const Point* y_;
  bool use_cache_;
  std::unordered_map<std::pair<const Point*, std::uint32_t>, bool, PtrWordHash> cache_;
};

void require_args(const BorelCode& code, const Point& x, const Point* y) {
  if (code.is_pair() && !y) throw DomainError("pair code needs two arguments");
  if (!code.is_pair() && y) throw DomainError("single code takes one argument");
  code.space().require(x, "code argument");
  if (y) code.space().require(*y, "code argument");
}

}  // namespace

bool leaf_satisfied(const BorelCode& code, const LeafCondition& cond, const Point& x, const Point* y) {
  Evaluator ev(code, x, y);
  return ev.leaf(cond);
}

GameResult game_member(const BorelCode& code, const Point& x, const Point* y) {
  require_args(code, x, y);
  Evaluator ev(code, x, y);
  GameResult r;
  r.strategy.choice.assign(code.nodes().size(), -1);
  r.member = ev.solve(0, r.strategy.choice);
  r.strategy.player_two = r.member;
  // Drop choices made by the loser at nodes they own.
  for (std::size_t i = 0; i < code.nodes().size(); ++i) {
    const bool first_player = code.node(i).depth % 2 == 0;
    if (first_player == r.member) r.strategy.choice[i] = -1;
  }
  return r;
}

bool strategy_wins(const BorelCode& code, const GameResult& r, const Point& x, const Point* y) {
  require_args(code, x, y);
  Evaluator ev(code, x, y);
  const bool two = r.strategy.player_two;
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    const auto& n = code.node(i);
    if (n.is_leaf()) {
      const bool ii = n.label && ev.leaf(*n.label);
      if (ii != two) return false;
      continue;
    }
    const bool owner_is_two = n.depth % 2 == 1;
    if (owner_is_two == two) {
      const auto c = r.strategy.choice.at(i);
      if (c < 0 || std::find(n.children.begin(), n.children.end(), static_cast<std::uint32_t>(c)) == n.children.end()) {
        return false;
      }
      stack.push_back(static_cast<std::uint32_t>(c));
    } else {
      for (auto c : n.children) stack.push_back(c);
    }
  }
  return true;
}

BorelCode code_restrict(const BorelCode& code, const Ordinal& a) {
  BorelCode out(code.space_, code.pair_);
  out.words_ = code.words_;
  out.nodes_.front().entry = code.nodes_.front().entry;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> todo{{0, 0}};
  while (!todo.empty()) {
    auto [src, dst] = todo.back();
    todo.pop_back();
    const auto& n = code.nodes_[src];
    if (n.is_leaf()) {
      out.nodes_[dst].label = n.label;
      continue;
    }
    for (auto c : n.children) {
      if (!(code.nodes_[c].entry < a)) continue;
      CodeNode m;
      m.entry = code.nodes_[c].entry;
      m.depth = code.nodes_[c].depth;
      const auto id = static_cast<std::uint32_t>(out.nodes_.size());
      out.nodes_.push_back(std::move(m));
      out.nodes_[dst].children.push_back(id);
      todo.emplace_back(c, id);
    }
  }
  return out;
}

namespace {

// position_bound(c) < a for a limit a; index + 1 < a iff index < a.
bool positions_below(const BorelCode& code, const LeafCondition& c, const Ordinal& a) {
  auto addr_ok = [&](const Address& ad) {
    for (const auto& s : ad.path) {
      if (s.kind == Address::Step::Kind::Component && !(s.index < a)) return false;
    }
    return true;
  };
  const auto& words = code.words();
  for (const auto& at : c) {
    if (!addr_ok(at.a)) return false;
    switch (at.kind) {
      case Atom::Kind::Segment:
        if (!(words.at(at.word_a).domain_bound() < a)) return false;
        break;
      case Atom::Kind::PairSegment:
        if (!(words.at(at.word_a).domain_bound() < a) || !(words.at(at.word_b).domain_bound() < a) || !addr_ok(at.b)) {
          return false;
        }
        break;
      case Atom::Kind::Tag: break;
      case Atom::Kind::PairTag:
        if (!addr_ok(at.b)) return false;
        break;
    }
  }
  return true;
}

}  // namespace

bool is_good(const BorelCode& code, const Ordinal& a) {
  if (!a.is_limit()) return false;
  if (code.content_bound() < a) return true;
  const auto r = code_restrict(code, a);
  for (const auto& n : r.nodes()) {
    if (n.label && !positions_below(r, *n.label, a)) return false;
  }
  return true;
}

ApproxProbe::ApproxProbe(const Point& x_, const Point* y_, std::uint64_t grid_depth) : x(x_) {
  if (y_) y = *y_;
  Ordinal dom = x.domain_bound();
  if (y) dom = std::min(dom, y->domain_bound());
  for (std::uint64_t q = 1; q <= grid_depth; ++q) {
    const Ordinal a = Ordinal::omega_power(1, q);
    if (a > dom) break;
    xs.push_back(restrict_point(x, a));
    if (y) ys.push_back(restrict_point(*y, a));
  }
}

ApproxReport approx_lemma_check(const BorelCode& code, const ApproxProbe& probe) {
  const Point* y = probe.y ? &*probe.y : nullptr;
  ApproxReport rep;
  const auto full = game_member(code, probe.x, y);
  rep.member = full.member;
  const Ordinal content = code.content_bound();
  rep.closure_bound = content;
  for (std::size_t i = 0; i < code.nodes().size(); ++i) {
    const auto c = full.strategy.choice[i];
    if (c >= 0) rep.closure_bound = std::max(rep.closure_bound, code.node(static_cast<std::uint32_t>(c)).entry.successor());
  }
  for (std::size_t i = 0; i < probe.xs.size(); ++i) {
    const Ordinal a = Ordinal::omega_power(1, i + 1);
    if (!(rep.closure_bound < a)) continue;
    // above the content bound the restriction is the code itself and a is good
    std::optional<BorelCode> rc;
    if (!(content < a)) {
      if (!is_good(code, a)) continue;
      rc = code_restrict(code, a);
    }
    const BorelCode& c = rc ? *rc : code;
    Evaluator ev(c, probe.xs[i], y ? &probe.ys[i] : nullptr);
    const bool m = ev.value(0);
    ++rep.levels_checked;
    if (m != rep.member) {
      rep.stable = false;
      if (!rep.first_unstable) rep.first_unstable = a;
    }
  }
  return rep;
}

ApproxReport approx_lemma_check(const BorelCode& code, const Point& x, const Point* y, std::uint64_t grid_depth) {
  return approx_lemma_check(code, ApproxProbe(x, y, grid_depth));
}

CodeBasis basis_all_words_below(std::uint32_t n) {
  CodeBasis b;
  for (std::uint32_t len = 0; len < n; ++len) {
    if (len > 20) throw OverflowError("basis_all_words_below: too many words");
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
      std::vector<Piece<Bit>> ps;
      for (std::uint32_t i = 0; i < len; ++i) {
        const Bit v = static_cast<Bit>((bits >> (len - 1 - i)) & 1u);
        ps.push_back(Piece<Bit>{{Ordinal::finite(i), Ordinal::finite(i + 1)}, v, {v}});
      }
      b.words.emplace_back(Ordinal::finite(len), std::move(ps));
    }
  }
  return b;
}

namespace {

void collect_basis(const Point& x, const Ordinal& lambda, std::vector<FiniteWord>& words, std::set<Ordinal>& idx,
                   std::set<std::string>& seen_words) {
  switch (x.kind()) {
    case Point::Kind::Bits: {
      const auto& m = x.as_bits();
      for (const auto& c : m.boundaries()) {
        const Ordinal d1 = c.next_limit();
        for (const Ordinal& d : {d1, d1.next_limit()}) {
          if (!(d < lambda) || d > m.domain_bound()) continue;
          auto w = m.restrict(d);
          if (seen_words.insert(serialize_map(w, false)).second) words.push_back(std::move(w));
        }
      }
      break;
    }
    case Point::Kind::OrdVals: break;
    case Point::Kind::Family: {
      for (std::uint32_t i = 0; i < x.components().size(); ++i) {
        if (auto p = pm_first_position(x.assignment(), i)) idx.insert(*p);
        collect_basis(x.components()[i], lambda, words, idx, seen_words);
      }
      break;
    }
    case Point::Kind::Tagged: collect_basis(x.payload(), lambda, words, idx, seen_words); break;
  }
}

}  // namespace

CodeBasis basis_for_universe(const std::vector<Point>& universe, const Ordinal& lambda) {
  CodeBasis b;
  std::set<Ordinal> idx;
  std::set<std::string> seen;
  for (const auto& x : universe) collect_basis(x, lambda, b.words, idx, seen);
  b.indices.assign(idx.begin(), idx.end());
  return b;
}

BorelCode code_id(const CodeBasis& basis, const SpaceDescriptor& space) {
  BorelCode c(space, true);
  std::map<Ordinal, std::uint64_t> per_group;
  std::set<std::string> seen;
  for (const auto& w : basis.words) {
    if (!seen.insert(serialize_map(w, false)).second) continue;
    const Ordinal group = w.domain_bound().limit_part();
    const std::uint64_t k = per_group[group]++;
    const auto leaf = c.add_child(0, group + Ordinal::finite(k));
    const auto wi = c.add_word(w);
    Atom at;
    at.kind = Atom::Kind::PairSegment;
    at.a.side = Address::Side::Left;
    at.b.side = Address::Side::Right;
    at.word_a = at.word_b = wi;
    c.set_label(leaf, {at});
  }
  if (c.node(0).is_leaf()) c.set_label(0, {});
  return c;
}

namespace {

using AddrMap = std::function<Address(const Address&)>;

void graft(BorelCode& dst, std::uint32_t parent, const Ordinal& entry, const BorelCode& src, std::uint32_t node,
           const AddrMap& remap, const std::vector<std::uint32_t>& word_map) {
  const auto id = dst.add_child(parent, entry);
  const auto& n = src.node(node);
  if (n.is_leaf()) {
    if (!n.label) return;
    LeafCondition cond;
    for (auto at : *n.label) {
      at.a = remap(at.a);
      at.b = remap(at.b);
      if (at.kind == Atom::Kind::Segment || at.kind == Atom::Kind::PairSegment) {
        at.word_a = word_map[at.word_a];
        if (at.kind == Atom::Kind::PairSegment) at.word_b = word_map[at.word_b];
      }
      cond.push_back(std::move(at));
    }
    dst.set_label(id, std::move(cond));
    return;
  }
  for (auto c : n.children) graft(dst, id, src.node(c).entry, src, c, remap, word_map);
}

std::vector<std::uint32_t> import_words(BorelCode& dst, const BorelCode& src) {
  std::vector<std::uint32_t> m;
  for (const auto& w : src.words()) m.push_back(dst.add_word(w));
  return m;
}

void require_pair(const BorelCode& c, const char* what) {
  if (!c.is_pair()) throw DomainError(std::string(what) + " needs a pair code");
}

}  // namespace

BorelCode code_jump(const BorelCode& inner, const CodeBasis& basis) {
  require_pair(inner, "code_jump");
  BorelCode c(SpaceDescriptor::family_of(inner.space()), true);
  const auto wm = import_words(c, inner);
  std::vector<Ordinal> idx = basis.indices;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  for (std::uint64_t side = 0; side < 2; ++side) {
    const auto s = c.add_child(0, Ordinal::finite(side));
    const auto pick = c.add_child(s, Ordinal{});
    if (idx.empty()) {
      c.set_label(pick, {});
      continue;
    }
    for (const auto& alpha : idx) {
      const auto an = c.add_child(pick, alpha);
      for (const auto& beta : idx) {
        const Ordinal& left = side == 0 ? alpha : beta;
        const Ordinal& right = side == 0 ? beta : alpha;
        AddrMap remap = [&](const Address& a) {
          Address out = a;
          const Ordinal& k = a.side == Address::Side::Right ? right : left;
          out.path.insert(out.path.begin(), Address::Step{Address::Step::Kind::Component, k});
          return out;
        };
        graft(c, an, beta, inner, 0, remap, wm);
      }
    }
  }
  return c;
}

BorelCode code_join(const std::vector<BorelCode>& parts) {
  if (parts.empty()) throw DomainError("code_join of no codes");
  std::vector<SpaceDescriptor> spaces;
  for (const auto& p : parts) {
    require_pair(p, "code_join");
    spaces.push_back(p.space());
  }
  const std::uint64_t k = parts.size();
  BorelCode c(SpaceDescriptor::tagged_sum(std::move(spaces)), true);
  for (std::uint64_t i = 0; i < k; ++i) {
    const auto leaf = c.add_child(0, Ordinal::finite(i));
    Atom at;
    at.kind = Atom::Kind::PairTag;
    at.a.side = Address::Side::Left;
    at.b.side = Address::Side::Right;
    at.tag = Ordinal::finite(i);
    c.set_label(leaf, {at});
  }
  AddrMap remap = [](const Address& a) {
    Address out = a;
    out.path.insert(out.path.begin(), Address::Step{Address::Step::Kind::Payload, Ordinal{}});
    return out;
  };
  for (std::uint64_t i = 0; i < k; ++i) {
    const auto enter = c.add_child(0, Ordinal::finite(k + i));
    const auto escape = c.add_child(enter, Ordinal{});
    Atom at;
    at.kind = Atom::Kind::Tag;
    at.a.side = Address::Side::Left;
    at.tag = Ordinal::finite(i);
    at.negate = true;
    c.set_label(escape, {at});
    const auto wm = import_words(c, parts[i]);
    graft(c, enter, Ordinal::finite(1), parts[i], 0, remap, wm);
  }
  return c;
}

namespace {

struct LevelMatrix {
  std::vector<Point> pts;
  std::vector<std::vector<char>> m;
};

// code|a, shared with the code itself when a lies above its content bound.
struct LevelCode {
  std::optional<BorelCode> copy;
  const BorelCode* code = nullptr;
  bool good = false;
};

LevelCode level_code(const BorelCode& code, const Ordinal& content, const Ordinal& a) {
  LevelCode lc;
  if (content < a) {
    lc.code = &code;
    lc.good = a.is_limit();
    return lc;
  }
  lc.copy = code_restrict(code, a);
  lc.code = &*lc.copy;
  lc.good = a.is_limit();
  for (const auto& n : lc.copy->nodes()) {
    if (!lc.good) break;
    if (n.label && !positions_below(*lc.copy, *n.label, a)) lc.good = false;
  }
  return lc;
}

LevelMatrix level_matrix(const BorelCode& rc, const Ordinal& a, const std::vector<Point>& pts, std::size_t n) {
  LevelMatrix lm;
  for (std::size_t i = 0; i < n; ++i) lm.pts.push_back(restrict_point(pts[i], a));
  lm.m.assign(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rc.is_pair()) lm.m[i][j] = game_member(rc, lm.pts[i], &lm.pts[j]).member ? 1 : 0;
    }
  }
  return lm;
}

EqRelCheck check_matrix(const std::vector<std::vector<char>>& m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!m[i][i]) return {false, "reflexivity", {i}};
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m[i][j] && !m[j][i]) return {false, "symmetry", {i, j}};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!m[i][j]) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (m[j][k] && !m[i][k]) return {false, "transitivity", {i, j, k}};
      }
    }
  }
  return {};
}

// Class codes of every pool point at level a, or nullopt when a is not a
// good limit or the level-a relation is not an equivalence on the pool.
std::optional<std::vector<std::uint64_t>> level_classes(const BorelCode& code, const Ordinal& content,
                                                         const Ordinal& a, const std::vector<Point>& pool) {
  const auto lc = level_code(code, content, a);
  if (!lc.good) return std::nullopt;
  auto lm = level_matrix(*lc.code, a, pool, pool.size());
  if (!check_matrix(lm.m).ok) return std::nullopt;
  std::vector<std::uint64_t> out(pool.size(), 0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const std::string* best = nullptr;
    std::string best_key;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (!lm.m[i][j]) continue;
      std::string k = lm.pts[j].open_key();
      if (!best || k < best_key) {
        best_key = std::move(k);
        best = &best_key;
      }
    }
    out[i] = class_code_of("cls:" + best_key);
  }
  return out;
}

void collect_boundaries(const Point& x, std::set<Ordinal>& out) {
  switch (x.kind()) {
    case Point::Kind::Bits:
      for (const auto& b : x.as_bits().boundaries()) out.insert(b);
      break;
    case Point::Kind::OrdVals:
      for (const auto& b : x.as_ords().boundaries()) out.insert(b);
      break;
    case Point::Kind::Family:
      for (const auto& b : x.assignment().boundaries()) out.insert(b);
      for (std::uint32_t i = 0; i < x.components().size(); ++i) {
        if (auto p = pm_first_position(x.assignment(), i)) out.insert(*p);
        collect_boundaries(x.components()[i], out);
      }
      break;
    case Point::Kind::Tagged: collect_boundaries(x.payload(), out); break;
  }
}

}  // namespace

EqRelCheck is_eqrel_on_approx(const BorelCode& code, const Ordinal& a, const std::vector<Point>& samples,
                              std::size_t budget) {
  require_pair(code, "is_eqrel_on_approx");
  const std::size_t n = std::min(budget, samples.size());
  return check_matrix(level_matrix(*level_code(code, code.content_bound(), a).code, a, samples, n).m);
}

std::uint64_t class_code(const BorelCode& code, const Ordinal& a, const Point& x, const std::vector<Point>& pool) {
  require_pair(code, "class_code");
  if (!is_good(code, a)) throw DomainError("class_code: " + a.to_string() + " is not a good limit for the code");
  std::vector<Point> all = pool;
  std::size_t xi = all.size();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] == x) xi = i;
  }
  if (xi == all.size()) all.push_back(x);
  auto cls = level_classes(code, code.content_bound(), a, all);
  if (!cls) throw DomainError("class_code: level " + a.to_string() + " is not an equivalence relation on the pool");
  return (*cls)[xi];
}

std::vector<Ordinal> deep_boundaries(const Point& x) {
  std::set<Ordinal> s;
  collect_boundaries(x, s);
  return {s.begin(), s.end()};
}

std::vector<OrdMap> red_S_to_cub(const BorelCode& code, const std::vector<Point>& pool, const Ordinal& lambda) {
  require_pair(code, "red_S_to_cub");
  for (const auto& x : pool) {
    if (!(x.domain_bound() == lambda)) throw DomainError("red_S_to_cub: point domain differs from lambda");
  }
  const Ordinal content = code.content_bound();
  std::set<Ordinal> crit;
  crit.insert(content);
  for (const auto& x : pool) collect_boundaries(x, crit);
  std::map<Ordinal, std::optional<std::vector<std::uint64_t>>> memo;
  auto at_level = [&](const Ordinal& a) -> const std::optional<std::vector<std::uint64_t>>& {
    auto it = memo.find(a);
    if (it == memo.end()) it = memo.emplace(a, level_classes(code, content, a, pool)).first;
    return it->second;
  };
  std::vector<Ordinal> cv(crit.begin(), crit.end());
  std::vector<OrdMap> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out.push_back(limit_grid_map<Ordinal>(lambda, cv, Ordinal{}, [&](const Ordinal& a) {
      const auto& cls = at_level(a);
      return cls ? Ordinal::finite((*cls)[i]) : Ordinal{};
    }));
  }
  return out;
}

}  // namespace gbs
