#include "doctest.h"
#include "oracles.hpp"

#include "gbs/pattern_map.hpp"

using gbs::BitMap;
using gbs::Ordinal;
using gbs::Piece;

namespace {

Ordinal w(std::uint64_t q = 1) { return Ordinal::omega_power(1, q); }
Ordinal n(std::uint64_t k) { return Ordinal::finite(k); }
const Ordinal W2 = Ordinal::omega_power(2);

auto bit_gen = [](std::mt19937_64& r) { return static_cast<gbs::Bit>(r() & 1); };

}  // namespace

TEST_CASE("evaluation") {
  auto m = BitMap::uniform(W2, 1, {0});
  CHECK(m.at(w(3)) == 1);
  CHECK(m.at(w(3) + n(2)) == 0);
  auto alt = BitMap::uniform(W2, 0, {0, 1});
  std::vector<Piece<gbs::Bit>> raw{{{Ordinal{}, W2}, 0, {0, 1}}};
  CHECK(alt.at(w() + n(2)) == 1);
  CHECK(oracle::naive_eval(raw, w() + n(2)) == 1);
  CHECK_THROWS_AS(m.at(W2), gbs::DomainError);
}

TEST_CASE("pieces must partition the domain") {
  CHECK_THROWS_AS(BitMap(w(2), {{{Ordinal{}, w()}, 0, {0}}}), gbs::DomainError);
  CHECK_THROWS_AS(BitMap(w(2), {{{Ordinal{}, w()}, 0, {0}}, {{w() + n(1), w(2)}, 0, {0}}}), gbs::DomainError);
  CHECK_THROWS_AS(BitMap(w(), {{{Ordinal{}, w()}, 0, {}}}), gbs::DomainError);
}

TEST_CASE("canonical form merges and minimizes") {
  BitMap a(w(3), {{{Ordinal{}, w()}, 1, {0, 1, 0, 1}}, {{w(), w(3)}, 1, {0, 1}}});
  REQUIRE(a.pieces().size() == 1);
  CHECK(a.pieces()[0].word == std::vector<gbs::Bit>{0, 1});
  // An explicit prefix that already follows the tail word disappears.
  BitMap b(w(), {{{Ordinal{}, n(3)}, 0, {1, 0}}, {{n(3), w()}, 0, {1, 0}}});
  CHECK(b == BitMap::uniform(w(), 0, {1, 0}));
  BitMap c(w(), {{{Ordinal{}, n(2)}, 0, {1}}, {{n(2), w()}, 0, {1, 0}}});
  CHECK(c == BitMap::uniform(w(), 0, {1, 0}));
}

TEST_CASE("canonicalization preserves values and decides equality") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 400; ++round) {
    auto raw = oracle::random_pieces<gbs::Bit>(rng, 4, 5, bit_gen);
    BitMap m(w(4), raw);
    for (const auto& a : oracle::grid(w(4), 4, 16)) REQUIRE(m.at(a) == oracle::naive_eval(raw, a));
    // Same function rebuilt from singleton pieces on a fine grid of each block.
    auto raw2 = oracle::random_pieces<gbs::Bit>(rng, 4, 5, bit_gen);
    BitMap m2(w(4), raw2);
    bool agree = true;
    for (const auto& a : oracle::grid(w(4), 4, 16)) agree = agree && (oracle::naive_eval(raw, a) == oracle::naive_eval(raw2, a));
    REQUIRE(agree == (m == m2));
  }
}

TEST_CASE("restriction and overwrite") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 200; ++round) {
    auto raw = oracle::random_pieces<gbs::Bit>(rng, 3, 4, bit_gen);
    BitMap m(w(3), raw);
    auto r = m.restrict(w() + n(4));
    for (const auto& a : oracle::grid(r.domain_bound(), 2, 12)) REQUIRE(r.at(a) == m.at(a));
    CHECK(m.restrict(w(3)) == m);
    CHECK(m.restrict(w(2)).restrict(w()) == m.restrict(w()));
    auto e = m.with_value(w() + n(2), 1);
    for (const auto& a : oracle::grid(w(3), 3, 12)) REQUIRE(e.at(a) == (a == w() + n(2) ? 1 : m.at(a)));
  }
  CHECK_THROWS_AS(BitMap::constant(w(), 0).restrict(w(2)), gbs::DomainError);
}

TEST_CASE("pm_zip is pointwise") {
  auto m = BitMap::uniform(W2, 1, {0, 1});
  auto eq = pm_zip(m, m, [](gbs::Bit a, gbs::Bit b) { return static_cast<gbs::Bit>(a == b); });
  CHECK(eq == BitMap::constant(W2, 1));
  BitMap ind3(W2, {{{Ordinal{}, n(3)}, 1, {1}}, {{n(3), W2}, 0, {0}}});
  auto x = pm_zip(BitMap::constant(W2, 0), ind3, [](gbs::Bit a, gbs::Bit b) { return static_cast<gbs::Bit>(a ^ b); });
  CHECK(x == ind3);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> qd(0, 4), nd(0, 30);
  for (int round = 0; round < 50; ++round) {
    auto ra = oracle::random_pieces<gbs::Bit>(rng, 5, 5, bit_gen);
    auto rb = oracle::random_pieces<gbs::Bit>(rng, 5, 5, bit_gen);
    BitMap a(w(5), ra), b(w(5), rb);
    auto z = pm_zip(a, b, [](gbs::Bit p, gbs::Bit q) { return static_cast<gbs::Bit>(p & (1 - q)); });
    for (int s = 0; s < 200; ++s) {
      auto pos = oracle::to_ord({qd(rng), nd(rng)});
      REQUIRE(z.at(pos) == (oracle::naive_eval(ra, pos) & (1 - oracle::naive_eval(rb, pos))));
    }
  }
  CHECK_THROWS_AS(pm_zip(BitMap::constant(w(), 0), BitMap::constant(w(2), 0), [](gbs::Bit a, gbs::Bit) { return a; }),
                  gbs::DomainError);
}

TEST_CASE("support analysis examples") {
  BitMap first(W2, {{{Ordinal{}, w()}, 1, {1}}, {{w(), W2}, 0, {0}}});
  auto s = pm_support_analysis(first);
  REQUIRE(s.bounded_by.has_value());
  CHECK(*s.bounded_by == w());
  CHECK_FALSE(s.contains_final_limit_segment);

  auto limits = pm_support_analysis(BitMap::uniform(W2, 1, {0}));
  CHECK_FALSE(limits.bounded_by.has_value());
  CHECK(limits.contains_final_limit_segment);
  CHECK(*limits.final_segment_start == Ordinal{});

  // {w*q + odd n}
  auto odd = BitMap::uniform(W2, 0, {1, 0});
  auto so = pm_support_analysis(odd);
  CHECK_FALSE(so.bounded_by.has_value());
  CHECK_FALSE(so.contains_final_limit_segment);
  for (const auto& a : oracle::grid(W2, 20, 8)) {
    if (a.is_limit() || a.is_zero()) REQUIRE(odd.at(a) == 0);
  }

  auto zeros = pm_support_analysis(BitMap::constant(W2, 0));
  CHECK(*zeros.bounded_by == Ordinal{});

  // Only w*3 and w*3+1 set.
  BitMap two(W2, {{{Ordinal{}, w(3)}, 0, {0}}, {{w(3), w(3) + n(2)}, 1, {1}}, {{w(3) + n(2), W2}, 0, {0}}});
  CHECK(*pm_support_analysis(two).bounded_by == w(3) + n(2));

  // Limits from w*4 on.
  BitMap tail(W2, {{{Ordinal{}, w(4)}, 0, {0}}, {{w(4), W2}, 1, {0}}});
  auto st = pm_support_analysis(tail);
  CHECK(st.contains_final_limit_segment);
  CHECK(*st.final_segment_start == w(3) + n(1));
}

TEST_CASE("support analysis against a grid oracle") {
  std::mt19937_64 rng(17);
  const std::uint64_t B = 4;
  for (int round = 0; round < 400; ++round) {
    auto raw = oracle::random_pieces<gbs::Bit>(rng, B, 5, bit_gen);
    BitMap m(w(B), raw);
    auto s = pm_support_analysis(m);
    // Patterns are periodic with period <= 3 beyond offset 7.
    bool unbounded = false;
    for (std::uint64_t k = 24; k < 30; ++k) unbounded = unbounded || oracle::naive_eval(raw, oracle::to_ord({B - 1, k}));
    REQUIRE(unbounded == !s.bounded_by.has_value());
    if (!unbounded) {
      Ordinal sup;
      for (const auto& a : oracle::grid(w(B), B, 30)) {
        if (oracle::naive_eval(raw, a)) sup = a.finite_part() >= 24 ? a.next_limit() : a.successor();
      }
      std::string desc;
      for (auto& p : raw) {
        desc += "[" + p.interval.lo.to_string() + "," + p.interval.hi.to_string() + ") lim=" + std::to_string(p.limit_value) + " w=";
        for (auto b : p.word) desc += std::to_string(b);
        desc += "; ";
      }
      INFO(desc);
      REQUIRE(*s.bounded_by == sup);
    }
    Ordinal start;
    for (std::uint64_t q = 0; q < B; ++q) {
      if (!oracle::naive_eval(raw, oracle::to_ord({q, 0}))) start = oracle::to_ord({q, 1});
    }
    REQUIRE(s.contains_final_limit_segment);
    REQUIRE(*s.final_segment_start == start);
  }
}

TEST_CASE("counting and first positions") {
  BitMap m(W2, {{{Ordinal{}, w(2)}, 1, {0}}, {{w(2), w(2) + n(3)}, 0, {1}}, {{w(2) + n(3), W2}, 0, {0}}});
  CHECK(*gbs::pm_count(m, gbs::Bit{1}) == 4);  // 0, w, w*2+1, w*2+2
  CHECK_FALSE(gbs::pm_count(m, gbs::Bit{0}).has_value());
  CHECK(*gbs::pm_first_position(m, gbs::Bit{0}) == n(1));
  CHECK(*gbs::pm_first_position(BitMap::uniform(W2, 1, {0}), gbs::Bit{1}) == Ordinal{});
  CHECK(*gbs::pm_first_position(BitMap(W2, {{{Ordinal{}, n(5)}, 0, {0}}, {{n(5), W2}, 1, {0}}}), gbs::Bit{1}) == w());
  CHECK_FALSE(gbs::pm_first_position(BitMap::constant(W2, 0), gbs::Bit{1}).has_value());
  CHECK_FALSE(gbs::pm_count(BitMap::uniform(W2, 1, {0}), gbs::Bit{1}).has_value());
  CHECK(*gbs::pm_count(BitMap::uniform(w(5), 1, {0}), gbs::Bit{1}) == 5);

  std::mt19937_64 rng(23);
  for (int round = 0; round < 300; ++round) {
    auto raw = oracle::random_pieces<gbs::Bit>(rng, 3, 5, bit_gen);
    BitMap mm(w(3), raw);
    for (gbs::Bit v : {gbs::Bit{0}, gbs::Bit{1}}) {
      std::optional<Ordinal> first;
      std::uint64_t count = 0;
      bool late = false;
      for (const auto& a : oracle::grid(w(3), 3, 40)) {
        if (oracle::naive_eval(raw, a) == v) {
          if (!first) first = a;
          ++count;
          late = late || a.finite_part() >= 20;
        }
      }
      REQUIRE(gbs::pm_first_position(mm, v) == first);
      auto c = gbs::pm_count(mm, v);
      if (c) REQUIRE(*c == count);
      REQUIRE(c.has_value() == !late);
    }
  }
}

TEST_CASE("limit grid maps") {
  auto f = gbs::limit_grid_map<Ordinal>(Ordinal::omega_power(2, 2), {w(3) + n(2)}, Ordinal{},
                                        [](const Ordinal& a) { return a < w(4) ? n(1) : n(2); });
  const Ordinal L = Ordinal::omega_power(2, 2);
  for (const auto& a : oracle::grid(L, 12, 6)) {
    Ordinal expect = a.is_limit() ? (a < w(4) ? n(1) : n(2)) : Ordinal{};
    REQUIRE(f.at(a) == expect);
  }
  CHECK(f.at(W2) == n(2));
  CHECK(f.at(W2 + w(7)) == n(2));
  CHECK_THROWS_AS(gbs::limit_grid_map<Ordinal>(Ordinal::omega_power(3), {}, Ordinal{}, [](const Ordinal&) { return Ordinal{}; }),
                  gbs::DomainError);
}

TEST_CASE("agreement below a bound matches comparison of restrictions") {
  std::mt19937_64 rng(123);
  auto bit = [](std::mt19937_64& r) { return static_cast<gbs::Bit>(r() & 1u); };
  for (int it = 0; it < 3000; ++it) {
    gbs::BitMap a(oracle::w(4), oracle::random_pieces<gbs::Bit>(rng, 4, 4, bit));
    gbs::BitMap b = (it % 3 == 0) ? a.with_value(oracle::to_ord({rng() % 4, rng() % 5}), static_cast<gbs::Bit>(rng() & 1u))
                                  : gbs::BitMap(oracle::w(4), oracle::random_pieces<gbs::Bit>(rng, 4, 4, bit));
    const auto d = oracle::to_ord({rng() % 5, (rng() % 2) ? rng() % 4 : 0});
    if (d > oracle::w(4)) continue;
    INFO(d.to_string());
    CHECK(gbs::pm_agree_below(a, b, d) == (a.restrict(d) == b.restrict(d)));
  }
  CHECK_FALSE(gbs::pm_agree_below(gbs::BitMap::constant(oracle::w(), 0), gbs::BitMap::constant(oracle::w(2), 0), oracle::w(2)));
}
