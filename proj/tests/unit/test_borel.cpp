#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "gbs/borel.hpp"
#include "gbs/error.hpp"
#include "gbs/relations.hpp"

using gbs::Address;
using gbs::Atom;
using gbs::BitMap;
using gbs::BorelCode;
using gbs::IndexMap;
using gbs::LeafCondition;
using gbs::Ordinal;
using gbs::Piece;
using gbs::Point;
using gbs::SpaceDescriptor;
using oracle::n;
using oracle::w;
using oracle::w2;

namespace {

using BitPiece = Piece<gbs::Bit>;

BitMap word(std::vector<int> v) {
  std::vector<BitPiece> ps;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto b = static_cast<gbs::Bit>(v[i]);
    ps.push_back(BitPiece{{n(i), n(i + 1)}, b, {b}});
  }
  return BitMap(n(v.size()), ps);
}

Address side(Address::Side s) {
  Address a;
  a.side = s;
  return a;
}

Atom seg(Address::Side s, std::uint32_t wi) {
  Atom a;
  a.kind = Atom::Kind::Segment;
  a.a = side(s);
  a.word_a = wi;
  return a;
}

Atom pairseg(std::uint32_t wa, std::uint32_t wb) {
  Atom a;
  a.kind = Atom::Kind::PairSegment;
  a.a = side(Address::Side::Left);
  a.b = side(Address::Side::Right);
  a.word_a = wa;
  a.word_b = wb;
  return a;
}

// Bits over [0, w^2) from raw pieces over [0, w*blocks), zero above.
Point random_bits(std::mt19937_64& rng, std::uint64_t blocks, std::size_t cuts) {
  auto ps = oracle::random_pieces<gbs::Bit>(rng, blocks, cuts, [](std::mt19937_64& r) { return static_cast<gbs::Bit>(r() & 1u); });
  ps.push_back(BitPiece{{w(blocks), w2()}, 0, {0}});
  return Point::bits(BitMap(w2(), ps));
}

// q < x by position-wise comparison on a dense grid.
bool naive_segment(const BitMap& q, const Point& x) {
  if (!x.is_bits() || q.domain_bound() > x.domain_bound()) return false;
  for (const auto& a : oracle::grid(q.domain_bound(), 6, 40)) {
    if (oracle::naive_eval(q.pieces(), a) != oracle::naive_eval(x.as_bits().pieces(), a)) return false;
  }
  return true;
}

// Tree for the minimax oracle: label indexes a truth table, -1 is unlabelled.
struct OTree {
  Ordinal entry;
  std::vector<OTree> kids;
  int label = -1;
};

bool minimax(const OTree& t, std::size_t depth, const std::vector<char>& truth) {
  if (t.kids.empty()) return t.label >= 0 && truth[static_cast<std::size_t>(t.label)];
  if (depth % 2 == 0) {
    for (const auto& k : t.kids) if (!minimax(k, depth + 1, truth)) return false;
    return true;
  }
  for (const auto& k : t.kids) if (minimax(k, depth + 1, truth)) return true;
  return false;
}

OTree prune(const OTree& t, const Ordinal& a) {
  OTree out{t.entry, {}, t.kids.empty() ? t.label : -1};
  for (const auto& k : t.kids) {
    if (k.entry < a) out.kids.push_back(prune(k, a));
  }
  return out;
}

void build(BorelCode& c, std::uint32_t at, const OTree& t, const std::vector<LeafCondition>& labels) {
  if (t.kids.empty()) {
    if (t.label >= 0) c.set_label(at, labels[static_cast<std::size_t>(t.label)]);
    return;
  }
  for (const auto& k : t.kids) build(c, c.add_child(at, k.entry), k, labels);
}

OTree random_tree(std::mt19937_64& rng, int budget, int labels, const std::vector<Ordinal>& entries) {
  // Grow by attaching children to random nodes.
  OTree root;
  std::vector<OTree*> all{&root};
  int size = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(budget));
  for (int i = 1; i < size; ++i) {
    OTree* p = all[rng() % all.size()];
    std::vector<Ordinal> free_entries;
    for (const auto& e : entries) {
      bool used = false;
      for (const auto& k : p->kids) used = used || k.entry == e;
      if (!used) free_entries.push_back(e);
    }
    if (free_entries.empty()) continue;
    const Ordinal e = free_entries[rng() % free_entries.size()];
    auto it = std::lower_bound(p->kids.begin(), p->kids.end(), e, [](const OTree& k, const Ordinal& x) { return k.entry < x; });
    p->kids.insert(it, OTree{e, {}, -1});
    // Pointers into vectors were invalidated; rebuild.
    all.clear();
    std::function<void(OTree&)> walk = [&](OTree& t) {
      all.push_back(&t);
      for (auto& k : t.kids) walk(k);
    };
    walk(root);
  }
  std::function<void(OTree&)> lab = [&](OTree& t) {
    if (t.kids.empty()) t.label = (rng() % 7 == 0) ? -1 : static_cast<int>(rng() % static_cast<std::uint64_t>(labels));
    for (auto& k : t.kids) lab(k);
  };
  lab(root);
  return root;
}

struct LabelPool {
  BorelCode base{SpaceDescriptor::bits(), true};
  std::vector<LeafCondition> labels;
  std::vector<BitMap> words;
  // (kind, word a, word b), kind 0 Left segment, 1 Right segment, 2 pair
  std::vector<std::vector<std::tuple<int, int, int>>> spec;
};

LabelPool make_pool() {
  LabelPool p;
  p.words = {word({1}), word({0}), word({0, 1}), word({1, 1}), BitMap::constant(w(), 0),
             BitMap::uniform(w() + n(1), 1, {0})};
  for (const auto& x : p.words) p.base.add_word(x);
  p.spec = {{{0, 0, 0}}, {{0, 1, 0}}, {{1, 0, 0}}, {{1, 2, 0}}, {{2, 0, 0}}, {{2, 1, 1}},
            {{2, 2, 3}}, {{0, 4, 0}}, {{1, 4, 0}}, {{2, 5, 5}}, {{0, 0, 0}, {1, 3, 0}}, {}};
  for (const auto& s : p.spec) {
    LeafCondition c;
    for (auto [k, a, b] : s) {
      if (k == 2) c.push_back(pairseg(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)));
      else c.push_back(seg(k == 0 ? Address::Side::Left : Address::Side::Right, static_cast<std::uint32_t>(a)));
    }
    p.labels.push_back(c);
  }
  return p;
}

std::vector<char> naive_truth(const LabelPool& p, const Point& x, const Point& y) {
  std::vector<char> t;
  for (const auto& s : p.spec) {
    bool ok = true;
    for (auto [k, a, b] : s) {
      const auto& wa = p.words[static_cast<std::size_t>(a)];
      if (k == 0) ok = ok && naive_segment(wa, x);
      if (k == 1) ok = ok && naive_segment(wa, y);
      if (k == 2) ok = ok && (naive_segment(wa, x) == naive_segment(p.words[static_cast<std::size_t>(b)], y));
    }
    t.push_back(ok ? 1 : 0);
  }
  return t;
}

BorelCode code_of(const LabelPool& p, const OTree& t) {
  BorelCode c = p.base;
  build(c, 0, t, p.labels);
  c.validate();
  return c;
}

}  // namespace

TEST_CASE("game examples") {
  const Point eta = Point::bits(BitMap::uniform(w2(), 1, {0, 1}));
  const Point zero = Point::bits(BitMap::constant(w2(), 0));

  BorelCode leaf(SpaceDescriptor::bits(), false);
  leaf.set_label(0, {});
  CHECK(gbs::game_member(leaf, eta).member);

  BorelCode bare(SpaceDescriptor::bits(), false);
  CHECK_FALSE(gbs::game_member(bare, eta).member);

  auto id = gbs::code_id(gbs::basis_all_words_below(4));
  CHECK(gbs::game_member(id, eta, eta).member);
  CHECK_FALSE(gbs::game_member(id, eta, zero).member);

  // I picks one of two segment leaves.
  BorelCode two(SpaceDescriptor::bits(), false);
  const auto w1 = two.add_word(word({1}));
  const auto w10 = two.add_word(word({1, 0}));
  Atom a1;
  a1.a = side(Address::Side::Single);
  a1.word_a = w1;
  Atom a2 = a1;
  a2.word_a = w10;
  two.set_label(two.add_child(0, n(0)), {a1});
  two.set_label(two.add_child(0, n(1)), {a2});
  CHECK(gbs::game_member(two, eta).member);
  const Point one_one = Point::bits(BitMap::constant(w2(), 1));
  CHECK_FALSE(gbs::game_member(two, one_one).member);
  CHECK_FALSE(gbs::game_member(two, zero).member);

  CHECK_THROWS_AS(gbs::game_member(id, eta), gbs::DomainError);
  CHECK_THROWS_AS(two.add_child(0, n(1)), gbs::DomainError);
}

TEST_CASE("restriction prunes and goodness") {
  BorelCode c(SpaceDescriptor::bits(), false);
  const auto wl = c.add_word(BitMap::uniform(w() + n(1), 1, {0}));
  const auto ws = c.add_word(word({1}));
  Atom big;
  big.a = side(Address::Side::Single);
  big.word_a = wl;
  Atom small = big;
  small.word_a = ws;
  const auto a = c.add_child(0, n(0));
  const auto b = c.add_child(0, w());
  c.set_label(a, {small});
  c.set_label(b, {small});
  CHECK(c.content_bound() == w() + n(1));

  auto r = gbs::code_restrict(c, w());
  REQUIRE(r.node(0).children.size() == 1);
  CHECK(r.node(r.node(0).children[0]).entry == n(0));

  // Everything pruned: the root becomes an unlabelled leaf that II loses.
  auto nothing = gbs::code_restrict(c, n(0));
  CHECK(nothing.node(0).is_leaf());
  CHECK_FALSE(nothing.node(0).label.has_value());
  CHECK_FALSE(gbs::game_member(nothing, Point::bits(BitMap::constant(w2(), 1))).member);

  CHECK(gbs::is_good(c, w()));
  CHECK(gbs::is_good(c, w(2)));
  CHECK_FALSE(gbs::is_good(c, n(5)));

  BorelCode d(SpaceDescriptor::bits(), false);
  const auto wl2 = d.add_word(BitMap::uniform(w() + n(1), 1, {0}));
  Atom at;
  at.a = side(Address::Side::Single);
  at.word_a = wl2;
  d.set_label(d.add_child(0, n(0)), {at});
  CHECK_FALSE(gbs::is_good(d, w()));
  CHECK(gbs::is_good(d, w(2)));
  for (std::uint64_t q = 2; q < 10; ++q) CHECK(gbs::is_good(d, w(q)));
}

TEST_CASE("games on random small codes match minimax") {
  std::mt19937_64 rng(42);
  const auto pool = make_pool();
  const std::vector<Ordinal> entries{n(0), n(1), w(), w() + n(1)};
  std::vector<std::pair<Point, Point>> probes;
  for (int i = 0; i < 12; ++i) probes.emplace_back(random_bits(rng, 3, 3), random_bits(rng, 3, 3));
  probes.emplace_back(Point::bits(BitMap::constant(w2(), 0)), Point::bits(BitMap::constant(w2(), 0)));
  std::vector<std::vector<char>> truth;
  for (const auto& [x, y] : probes) truth.push_back(naive_truth(pool, x, y));

  for (int it = 0; it < 600; ++it) {
    const auto t = random_tree(rng, 6, 12, entries);
    const auto code = code_of(pool, t);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const auto& [x, y] = probes[p];
      const auto r = gbs::game_member(code, x, y);
      REQUIRE(r.member == minimax(t, 0, truth[p]));
      REQUIRE(gbs::strategy_wins(code, r, x, &y));
      for (const auto& a : {w(), n(1), w(2)}) {
        const auto pr = prune(t, a);
        REQUIRE(gbs::game_member(gbs::code_restrict(code, a), x, y).member == minimax(pr, 0, truth[p]));
      }
    }
  }
}

TEST_CASE("a forged strategy is caught by replay") {
  const auto pool = make_pool();
  OTree t{Ordinal{}, {OTree{n(0), {}, 0}, OTree{n(1), {}, 11}}, -1};
  const auto code = code_of(pool, t);
  const Point one = Point::bits(BitMap::constant(w2(), 1));
  auto r = gbs::game_member(code, one, one);
  REQUIRE(r.member);
  CHECK(gbs::strategy_wins(code, r, one, &one));
  const Point zero = Point::bits(BitMap::constant(w2(), 0));
  CHECK_FALSE(gbs::game_member(code, zero, zero).member);
  CHECK_FALSE(gbs::strategy_wins(code, r, zero, &zero));
}

TEST_CASE("approximation is stable above the closure bound") {
  std::mt19937_64 rng(7);
  const auto pool = make_pool();
  const std::vector<Ordinal> entries{n(0), n(1), w(), w() + n(1)};
  std::size_t checked = 0;
  for (int it = 0; it < 200; ++it) {
    const auto code = code_of(pool, random_tree(rng, 6, 12, entries));
    const Point x = random_bits(rng, 4, 3), y = random_bits(rng, 4, 3);
    const auto rep = gbs::approx_lemma_check(code, x, &y, 12);
    CHECK(rep.stable);
    CHECK(rep.closure_bound <= w() + n(2));
    checked += rep.levels_checked;
  }
  CHECK(checked >= 200 * 10);
}

TEST_CASE("prepared probes give the same reports") {
  std::mt19937_64 rng(8);
  const auto pool = make_pool();
  const std::vector<Ordinal> entries{n(0), n(1), w(), w() + n(1)};
  const Point x = random_bits(rng, 4, 3), y = random_bits(rng, 4, 3);
  const gbs::ApproxProbe probe(x, &y, 12);
  CHECK(probe.xs.size() == 12);
  CHECK(probe.ys[2] == gbs::restrict_point(y, w(3)));
  for (int it = 0; it < 100; ++it) {
    const auto code = code_of(pool, random_tree(rng, 6, 12, entries));
    const auto a = gbs::approx_lemma_check(code, x, &y, 12);
    const auto b = gbs::approx_lemma_check(code, probe);
    CHECK(a.member == b.member);
    CHECK(a.closure_bound == b.closure_bound);
    CHECK(a.levels_checked == b.levels_checked);
    CHECK(a.stable == b.stable);
  }
  // A restriction that really prunes still goes through code_restrict.
  BorelCode c(SpaceDescriptor::bits(), true);
  const auto w1 = c.add_word(word({1}));
  c.set_label(c.add_child(0, w(3)), {seg(Address::Side::Left, w1)});
  CHECK(gbs::is_good(c, w(2)));
  CHECK(gbs::code_restrict(c, w(2)).node(0).is_leaf());
  CHECK(gbs::is_eqrel_on_approx(c, w(2), {x}).failure == "reflexivity");
}

namespace {

std::vector<Point> bit_universe(std::mt19937_64& rng, std::size_t k) {
  std::vector<Point> u;
  for (std::size_t i = 0; i < k; ++i) u.push_back(random_bits(rng, 4, 2));
  u.push_back(u.front());  // a repeat
  // Same except far out.
  auto m = u.front().as_bits().with_value(w(3) + n(2), 1 - u.front().as_bits().at(w(3) + n(2)));
  u.push_back(Point::bits(m));
  return u;
}

Point random_family(std::mt19937_64& rng, const std::vector<Point>& comps, std::size_t pick) {
  std::vector<Point> cs;
  for (std::size_t i = 0; i < pick; ++i) cs.push_back(comps[rng() % comps.size()]);
  auto ps = oracle::random_pieces<std::uint32_t>(rng, 3, 2, [pick](std::mt19937_64& r) {
    return static_cast<std::uint32_t>(r() % pick);
  });
  ps.push_back(Piece<std::uint32_t>{{w(3), w2()}, 0, {0}});
  return Point::family(cs, IndexMap(w2(), ps));
}

}  // namespace

TEST_CASE("identity, jump and join codes denote their relations") {
  std::mt19937_64 rng(11);
  const auto u = bit_universe(rng, 5);
  const auto basis = gbs::basis_for_universe(u, w2());
  const auto id = gbs::code_id(basis);
  for (const auto& x : u) {
    for (const auto& y : u) CHECK(gbs::game_member(id, x, y).member == (x == y));
  }

  std::vector<Point> fams;
  for (int i = 0; i < 6; ++i) fams.push_back(random_family(rng, u, 1 + rng() % 3));
  fams.push_back(Point::family({u[0], u[1]}, IndexMap::uniform(w2(), 0, {1, 0})));
  fams.push_back(Point::family({u[1], u[0]}, IndexMap::constant(w2(), 0).with_value(n(5), 1)));
  const auto jb = gbs::basis_for_universe(fams, w2());
  const auto jid = gbs::code_jump(id, jb);
  const auto jump = gbs::EqRelHandle::jump(gbs::EqRelHandle::id(SpaceDescriptor::bits()));
  for (const auto& x : fams) {
    for (const auto& y : fams) CHECK(gbs::game_member(jid, x, y).member == gbs::decide(jump, x, y));
  }

  // Families of families.
  std::vector<Point> fams2;
  for (int i = 0; i < 4; ++i) fams2.push_back(random_family(rng, fams, 1 + rng() % 2));
  const auto j2b = gbs::basis_for_universe(fams2, w2());
  const auto j2 = gbs::code_jump(gbs::code_jump(id, j2b), j2b);
  const auto jump2 = gbs::EqRelHandle::jump(jump);
  for (const auto& x : fams2) {
    for (const auto& y : fams2) CHECK(gbs::game_member(j2, x, y).member == gbs::decide(jump2, x, y));
  }

  const auto jn = gbs::code_join({id, jid});
  const auto join = gbs::EqRelHandle::join({gbs::EqRelHandle::id(SpaceDescriptor::bits()), jump});
  std::vector<Point> tagged;
  for (std::size_t i = 0; i < 4; ++i) tagged.push_back(Point::tagged(n(0), u[i]));
  for (std::size_t i = 0; i < 4; ++i) tagged.push_back(Point::tagged(n(1), fams[i]));
  for (const auto& x : tagged) {
    for (const auto& y : tagged) CHECK(gbs::game_member(jn, x, y).member == gbs::decide(join, x, y));
  }
}

TEST_CASE("equivalence checks on approximations") {
  std::mt19937_64 rng(5);
  const auto u = bit_universe(rng, 6);
  const auto id = gbs::code_id(gbs::basis_for_universe(u, w2()));
  // Below w every basis word is pruned and the denotation is empty.
  CHECK(gbs::is_eqrel_on_approx(id, w(), u).failure == "reflexivity");
  for (std::uint64_t q = 2; q <= 6; ++q) CHECK(gbs::is_eqrel_on_approx(id, w(q), u).ok);

  // "x starts with 1": neither reflexive nor symmetric in general.
  BorelCode c(SpaceDescriptor::bits(), true);
  const auto w1 = c.add_word(word({1}));
  c.set_label(0, {seg(Address::Side::Left, w1)});
  std::vector<Point> pts{Point::bits(BitMap::constant(w2(), 0)), Point::bits(BitMap::constant(w2(), 1))};
  auto r = gbs::is_eqrel_on_approx(c, w(), pts);
  CHECK_FALSE(r.ok);
  CHECK(r.failure == "reflexivity");
  CHECK(r.witness == std::vector<std::size_t>{0});
  CHECK(gbs::is_eqrel_on_approx(c, w(), {pts[1]}).ok);
  CHECK_THROWS_AS(gbs::class_code(c, w(), pts[0], pts), gbs::DomainError);
}

TEST_CASE("class codes and the cub reduction") {
  std::mt19937_64 rng(9);
  const Point x = random_bits(rng, 4, 3);
  const Point y = Point::bits(x.as_bits().with_value(w(2) + n(3), 1 - x.as_bits().at(w(2) + n(3))));
  const std::vector<Point> pool{x, y};
  const auto id = gbs::code_id(gbs::basis_for_universe(pool, w2()));
  CHECK_THROWS_AS(gbs::class_code(id, w(), x, pool), gbs::DomainError);
  CHECK(gbs::class_code(id, w(2), x, pool) == gbs::class_code(id, w(2), y, pool));
  CHECK(gbs::class_code(id, w(5), x, pool) != gbs::class_code(id, w(5), y, pool));

  const auto f = gbs::red_S_to_cub(id, pool, w2());
  REQUIRE(f.size() == 2);
  gbs::CubParams cp;
  cp.value_space = gbs::CubParams::ValueSpace::Ordinal;
  CHECK_FALSE(gbs::decide_cub(cp, Point::ords(f[0]), Point::ords(f[1])));
  CHECK(f[0].at(w()) == Ordinal{});
  CHECK(f[0].at(w(2)) == f[1].at(w(2)));
  CHECK(f[0].at(w(4)) != f[1].at(w(4)));
  CHECK(f[0].at(w(4) + n(1)) == Ordinal{});

  // Equal points, and points related only by the restriction at small levels.
  for (int i = 0; i < 20; ++i) {
    const Point a = random_bits(rng, 4, 3), b = random_bits(rng, 4, 3);
    for (const auto& [p, q] : {std::pair{a, a}, std::pair{a, b}}) {
      const std::vector<Point> pl{p, q};
      const auto c = gbs::code_id(gbs::basis_for_universe(pl, w2()));
      const auto g = gbs::red_S_to_cub(c, pl, w2());
      CHECK(gbs::decide_cub(cp, Point::ords(g[0]), Point::ords(g[1])) == (p == q));
    }
  }
}
