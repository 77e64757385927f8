#include "doctest.h"
#include "oracles.hpp"

#include "gbs/error.hpp"
#include "gbs/point.hpp"

using gbs::BitMap;
using gbs::IndexMap;
using gbs::Ordinal;
using gbs::Point;
using oracle::n;
using oracle::w;
using oracle::w2;

TEST_CASE("restriction of points") {
  auto eta = Point::bits(BitMap::uniform(w2(), 1, {0, 1, 1}));
  CHECK(restrict_point(eta, w2()) == eta);
  CHECK(restrict_point(restrict_point(eta, w(3)), w()) == restrict_point(eta, w()));
  CHECK_THROWS_AS(restrict_point(eta, w2(2)), gbs::DomainError);

  auto a = Point::bits(BitMap::uniform(w2(), 0, {1, 0}));
  auto b = Point::bits(oracle::indicator(w2(), {n(2), w() + n(1)}));
  IndexMap asg(w2(), {{{Ordinal{}, w2()}, 0, {1, 0, 0}}});
  auto fam = Point::family({a, b}, asg);
  auto r = restrict_point(fam, w());
  REQUIRE(r.domain_bound() == w());
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Ordinal pos = n(k);
    const Point& orig = fam.component_at(pos);
    const Point& got = r.component_at(pos);
    REQUIRE(got == restrict_point(orig, w()));
    for (std::uint64_t j = 0; j < 12; ++j) REQUIRE(got.as_bits().at(n(j)) == orig.as_bits().at(n(j)));
  }
  CHECK_THROWS_AS(restrict_point(fam, w() + n(1)), gbs::DomainError);
}

TEST_CASE("families are normalized") {
  auto a = Point::bits(BitMap::constant(w2(), 0));
  auto b = Point::bits(BitMap::constant(w2(), 1));
  auto f1 = Point::family({a, b, a}, IndexMap::uniform(w2(), 0, {1, 2}));
  auto f2 = Point::family({b, a}, IndexMap::uniform(w2(), 1, {0, 1}));
  CHECK(f1 == f2);
  CHECK(f1.components().size() == 2);
  auto f3 = Point::family({a, b}, IndexMap::constant(w2(), 1));
  CHECK(f3.components().size() == 1);
  CHECK_THROWS_AS(Point::family({a}, IndexMap::constant(w2(), 3)), gbs::DomainError);
  CHECK_THROWS_AS(Point::family({Point::bits(BitMap::constant(w(), 0))}, IndexMap::constant(w2(), 0)), gbs::DomainError);
}

TEST_CASE("xor prefix and padding") {
  std::mt19937_64 rng(9);
  auto gen = [](std::mt19937_64& r) { return static_cast<gbs::Bit>(r() & 1); };
  for (int round = 0; round < 100; ++round) {
    BitMap eta(w(4), oracle::random_pieces<gbs::Bit>(rng, 4, 4, gen));
    BitMap p = BitMap(w(4), oracle::random_pieces<gbs::Bit>(rng, 4, 4, gen)).restrict(w() + n(3));
    CHECK(xor_prefix(BitMap::constant(Ordinal{}, 0), eta) == eta);
    CHECK(xor_prefix(p, xor_prefix(p, eta)) == eta);
    auto x = xor_prefix(p, eta);
    for (const auto& a : oracle::grid(w(4), 4, 10)) {
      REQUIRE(x.at(a) == (a < p.domain_bound() ? (p.at(a) ^ eta.at(a)) : eta.at(a)));
    }
    CHECK(zero_pad_embed(p, w(3)).restrict(p.domain_bound()) == p);
  }
  CHECK(xor_prefix(BitMap::constant(n(3), 1), BitMap::constant(w2(), 0)) == oracle::indicator(w2(), {n(0), n(1), n(2)}));
  CHECK(zero_pad_embed(oracle::indicator(n(2), {n(1)}), w()) == oracle::indicator(w(), {n(1)}));
  CHECK(zero_pad_embed(BitMap::constant(w(), 1), w()) == BitMap::constant(w(), 1));
  CHECK_THROWS_AS(zero_pad_embed(BitMap::constant(w(2), 1), w()), gbs::DomainError);
}

TEST_CASE("diff maps") {
  auto z = Point::bits(BitMap::constant(w2(), 0));
  auto s = Point::bits(BitMap::uniform(w2(), 0, {1}));
  CHECK(diff_map(z, z) == BitMap::constant(w2(), 0));
  CHECK(diff_map(z, s) == diff_map(s, z));
  auto d = diff_map(z, s);
  for (const auto& a : oracle::grid(w2(), 20, 6)) REQUIRE(d.at(a) == (a.is_successor() ? 1 : 0));
  CHECK_THROWS_AS(diff_map(z, Point::ords(gbs::OrdMap::constant(w2(), Ordinal{}))), gbs::SpaceMismatch);
}

TEST_CASE("canonical order") {
  auto zeros = Point::bits(BitMap::constant(w2(), 0));
  auto ind0 = Point::bits(oracle::indicator(w2(), {n(0)}));
  CHECK(gbs::canonical_min({ind0, zeros}) == zeros);
  CHECK(zeros.key() < ind0.key());
  CHECK(gbs::canonical_min({zeros}) == zeros);
  CHECK_THROWS_AS(gbs::canonical_min({}), gbs::DomainError);

  std::mt19937_64 rng(4);
  auto gen = [](std::mt19937_64& r) { return static_cast<gbs::Bit>(r() & 1); };
  std::vector<Point> pool;
  for (int i = 0; i < 30; ++i) pool.push_back(Point::bits(BitMap(w(3), oracle::random_pieces<gbs::Bit>(rng, 3, 4, gen))));
  const Point& m = gbs::canonical_min(pool);
  CHECK(std::find(pool.begin(), pool.end(), m) != pool.end());
  for (const auto& p : pool) CHECK(m.key() <= p.key());
  CHECK(gbs::canonical_min({m}) == m);
  for (const auto& p : pool) {
    for (const auto& q : pool) CHECK((p == q) == (diff_map(p, q) == BitMap::constant(w(3), 0)));
  }
}

TEST_CASE("open keys ignore the level") {
  auto eta = Point::bits(BitMap::uniform(w2(), 1, {0, 1}));
  CHECK(restrict_point(eta, w(3)).open_key() == restrict_point(eta, w(7)).open_key());
  CHECK(restrict_point(eta, w(3)).key() != restrict_point(eta, w(7)).key());
  auto tail = Point::bits(oracle::indicator(w2(), {w(2) + n(1)}));
  CHECK(restrict_point(tail, w()).open_key() != restrict_point(tail, w(3)).open_key());
}

TEST_CASE("class code registry") {
  gbs::ClassCodeRegistry reg;
  auto c1 = reg.code("alpha");
  CHECK(c1 >= 1);
  CHECK(c1 <= (1ull << 62));
  CHECK(reg.code("alpha") == c1);
  CHECK(reg.code("beta") != c1);
  CHECK(reg.size() == 2);
}

TEST_CASE("space descriptors") {
  auto f = gbs::SpaceDescriptor::family_of(gbs::SpaceDescriptor::bits());
  auto a = Point::bits(BitMap::constant(w2(), 0));
  auto fam = Point::family({a}, IndexMap::constant(w2(), 0));
  CHECK(f.matches(fam));
  CHECK_FALSE(f.matches(a));
  auto t = gbs::SpaceDescriptor::tagged_sum({gbs::SpaceDescriptor::bits(), f});
  CHECK(t.matches(Point::tagged(n(1), fam)));
  CHECK_FALSE(t.matches(Point::tagged(n(0), fam)));
  CHECK_FALSE(t.matches(Point::tagged(n(2), a)));
  CHECK(t.to_string() == "sum(bits,family(bits))");
}
