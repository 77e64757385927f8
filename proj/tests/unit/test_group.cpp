#include "doctest.h"
#include "oracles.hpp"

#include <map>

#include "gbs/error.hpp"
#include "gbs/group.hpp"
#include "gbs/relations.hpp"

using gbs::BitMap;
using gbs::FiniteGroup;
using gbs::FreeWord;
using gbs::GroupAction;
using gbs::Letter;
using gbs::Ordinal;
using gbs::Point;
using oracle::n;
using oracle::w;
using oracle::w2;

namespace {

// Repeatedly deletes the leftmost cancelling pair.
std::vector<Letter> naive_reduce(std::vector<Letter> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i].generator == w[i + 1].generator && w[i].inverse != w[i + 1].inverse) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i + 2));
        changed = true;
        break;
      }
    }
  }
  return w;
}

std::vector<Letter> random_letters(std::mt19937_64& rng, std::size_t len, std::uint32_t gens) {
  std::vector<Letter> out(len);
  for (auto& l : out) l = {static_cast<std::uint32_t>(rng() % gens), (rng() & 1) != 0};
  return out;
}

// Orbit partition by explicit closure under the generators' point maps.
std::vector<int> orbit_labels(const GroupAction& act, const std::vector<Point>& carrier) {
  std::vector<int> label(carrier.size(), -1);
  std::map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < carrier.size(); ++i) where[carrier[i].key()] = i;
  int next = 0;
  for (std::size_t i = 0; i < carrier.size(); ++i) {
    if (label[i] >= 0) continue;
    std::vector<std::size_t> stack{i};
    label[i] = next;
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      for (auto g : act.group().generators()) {
        auto j = where.at(act.act(g, carrier[cur]).key());
        if (label[j] < 0) {
          label[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
  return label;
}

GroupAction flip0() { return GroupAction::flip(FiniteGroup::cyclic(2), {n(0)}, {1}); }

}  // namespace

TEST_CASE("groups") {
  auto z4 = FiniteGroup::cyclic(4);
  CHECK(z4.order() == 4);
  auto s3 = FiniteGroup::symmetric(3);
  CHECK(s3.order() == 6);
  CHECK(s3.closure(s3.generators()) == s3.all());
  CHECK(s3.is_subgroup(s3.closure({s3.generators()[0]})));
  CHECK_FALSE(s3.is_subgroup(0b110));
  CHECK_THROWS_AS(FiniteGroup({{0, 1}, {0, 1}}, {}, "bad"), gbs::DomainError);
  CHECK_THROWS_AS(FiniteGroup::symmetric(5), gbs::DomainError);
}

TEST_CASE("free reduction") {
  CHECK(gbs::free_reduce({{0, false}, {0, true}}).size() == 0);
  std::vector<Letter> abba{{0, false}, {1, false}, {1, true}, {0, false}};
  CHECK(gbs::free_reduce(abba).letters() == std::vector<Letter>{{0, false}, {0, false}});
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    auto raw = random_letters(rng, rng() % 12, 2);
    auto red = gbs::free_reduce(raw);
    REQUIRE(red.letters() == naive_reduce(raw));
    REQUIRE(gbs::free_reduce(red.letters()) == red);
    for (std::size_t k = 0; k + 1 < red.size(); ++k) {
      REQUIRE_FALSE((red.letters()[k].generator == red.letters()[k + 1].generator &&
                     red.letters()[k].inverse != red.letters()[k + 1].inverse));
    }
  }
}

TEST_CASE("presentations and symbolic cosets") {
  auto s3 = FiniteGroup::symmetric(3);
  gbs::Presentation pr(s3, s3.generators());
  CHECK(gbs::pr_apply(pr, FreeWord{}) == s3.identity());
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    auto u = gbs::free_reduce(random_letters(rng, rng() % 8, 2));
    auto v = gbs::free_reduce(random_letters(rng, rng() % 8, 2));
    REQUIRE(gbs::pr_apply(pr, u * v) == s3.mul(gbs::pr_apply(pr, u), gbs::pr_apply(pr, v)));
  }
  gbs::SymbolicCoset e{pr, FiniteGroup::Subset{1} << s3.identity()};
  for (int i = 0; i < 100; ++i) {
    auto wd = gbs::free_reduce(random_letters(rng, rng() % 6, 2));
    gbs::SymbolicCoset base{pr, rng() & s3.all()};
    for (const auto& s : {e, base}) {
      auto moved = gbs::coset_mul(s, wd);
      for (int j = 0; j < 20; ++j) {
        auto v = gbs::free_reduce(random_letters(rng, rng() % 8, 2));
        REQUIRE(moved.contains(v) == s.contains(v * wd.inverse()));
      }
    }
  }
  CHECK_THROWS_AS(gbs::Presentation(s3, {s3.identity()}), gbs::DomainError);
}

TEST_CASE("orbit decisions") {
  auto act = flip0();
  auto zeros = Point::bits(BitMap::constant(w2(), 0));
  auto ind0 = Point::bits(oracle::indicator(w2(), {n(0)}));
  auto indw = Point::bits(oracle::indicator(w2(), {w()}));
  CHECK(orbit_decide(act, zeros, zeros) == act.group().identity());
  CHECK(orbit_decide(act, zeros, ind0).has_value());
  CHECK_FALSE(orbit_decide(act, zeros, indw).has_value());
  CHECK_THROWS_AS(GroupAction::permute(FiniteGroup::cyclic(4), {n(0), n(1)}), gbs::DomainError);
  CHECK_THROWS_AS(GroupAction::flip(FiniteGroup::cyclic(3), {n(0)}, {1}), gbs::DomainError);
}

TEST_CASE("Ac1 traces") {
  auto act = flip0();
  gbs::CylinderEnumeration en(4);
  auto x = Point::bits(BitMap::constant(w2(), 0));
  const FiniteGroup::Element f = 1 - act.group().identity();
  auto y = act.act(f, x);
  auto zx = red_ac1(act, en, x);
  auto zy = red_ac1(act, en, y);
  // Cylinder <1> is the word of length 1 with value 1: index 2.
  REQUIRE(en.words()[2] == std::vector<gbs::Bit>{1});
  CHECK(zx[2] == (FiniteGroup::Subset{1} << f));
  CHECK(zy[2] == (FiniteGroup::Subset{1} << act.group().identity()));
  auto g = ac1_criterion(act.group(), zx, zy);
  REQUIRE(g.has_value());
  for (std::size_t i = 0; i < zx.size(); ++i) CHECK(zx[i] == act.group().right_mul(zy[i], f));
  CHECK(ac1_criterion(act.group(), zx, zx) == act.group().identity());
  auto far = GroupAction::flip(FiniteGroup::cyclic(2), {n(9)}, {1});
  CHECK_THROWS_WITH_AS(red_ac1(far, en, x), "enumeration bound too small", gbs::DomainError);
}

TEST_CASE("Ac3 selector") {
  auto act = flip0();
  auto zeros = Point::bits(BitMap::constant(w2(), 0));
  auto ind0 = Point::bits(oracle::indicator(w2(), {n(0)}));
  auto indw = Point::bits(oracle::indicator(w2(), {w()}));
  auto h0 = red_ac3_selector(act, zeros, w2());
  CHECK(h0 == red_ac3_selector(act, ind0, w2()));
  auto hw = red_ac3_selector(act, indw, w2());
  for (std::uint64_t q = 2; q < 20; ++q) CHECK_FALSE(h0.at(w(q)) == hw.at(w(q)));
  CHECK(h0.at(w()) == hw.at(w()));
  CHECK(h0.at(w() + n(1)) == Ordinal{});
  CHECK_FALSE(decide_E0(Point::ords(h0), Point::ords(hw)));
}

TEST_CASE("ActionToE0 on exhaustive carriers") {
  const Ordinal L = w2();
  struct Case {
    GroupAction act;
    std::vector<Ordinal> support;
  };
  std::vector<Case> cases{
      {flip0(), {n(0), n(1), n(2), n(3), n(4), n(5)}},
      {GroupAction::permute(FiniteGroup::cyclic(4), {n(0), n(1), n(2), n(3)}), {n(0), n(1), n(2), n(3)}},
      {GroupAction::permute(FiniteGroup::symmetric(3), {n(0), n(1), n(2)}), {n(0), n(1), n(2), n(3), n(4), n(5)}},
  };
  gbs::CylinderEnumeration en(8);
  for (auto& c : cases) {
    auto carrier = gbs::supported_carrier(c.support, L);
    c.act.verify_on(carrier);
    auto labels = orbit_labels(c.act, carrier);
    std::vector<gbs::OrdMap> red;
    std::vector<gbs::Trace> tr;
    for (const auto& x : carrier) {
      red.push_back(red_action_to_E0(c.act, en, x, L));
      tr.push_back(red_ac1(c.act, en, x));
    }
    for (std::size_t i = 0; i < carrier.size(); ++i) {
      for (std::size_t j = 0; j < carrier.size(); ++j) {
        const bool same = labels[i] == labels[j];
        REQUIRE(orbit_decide(c.act, carrier[i], carrier[j]).has_value() == same);
        REQUIRE(decide_E0(Point::ords(red[i]), Point::ords(red[j])) == same);
        REQUIRE(ac1_criterion(c.act.group(), tr[i], tr[j]).has_value() == same);
      }
    }
  }
}

TEST_CASE("chain schedules") {
  auto act = GroupAction::permute(FiniteGroup::cyclic(2), {n(1), w() + n(1)});
  // Swapping across the cut at w is not available at level w.
  CHECK(act.subgroup_at(w()) == (FiniteGroup::Subset{1} << act.group().identity()));
  CHECK(act.subgroup_at(w(2)) == act.group().all());
  auto x = Point::bits(oracle::indicator(w2(), {n(1)}));
  auto y = Point::bits(oracle::indicator(w2(), {w() + n(1)}));
  auto hx = red_ac3_selector(act, x, w2());
  auto hy = red_ac3_selector(act, y, w2());
  CHECK_FALSE(hx.at(w()) == hy.at(w()));
  CHECK(hx.restrict(w2()).at(w(5)) == hy.at(w(5)));
  CHECK(decide_E0(Point::ords(hx), Point::ords(hy)));
  auto bad = act;
  CHECK_THROWS_AS(bad.set_chain({{Ordinal{}, FiniteGroup::Subset{1} << act.group().identity()}}), gbs::DomainError);
  bad.set_chain({{Ordinal{}, act.group().all()}});
  CHECK_THROWS_AS(red_ac3_selector(bad, x, w2()), gbs::DomainError);
}
