#include "gbs/dsl.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace gbs {

namespace {

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Number;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (src.compare(i, 2, "\xCF\x89") == 0) {  // omega
      t.kind = Token::Kind::Ident;
      t.text = "w";
      advance(2);
    } else if (std::string("{}()[],;:=+*^.&").find(c) != std::string::npos) {
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"lambda", "point", "code", "relation", "action", "carrier", "reduction",
                                       "eval", "approx", "orbit", "bits", "ords", "family", "tagged", "single",
                                       "pair", "id", "E0", "E1", "E0_off", "idplus", "idplus_star", "cub", "jump",
                                       "join", "permute", "flip", "supported", "points", "w"};
  return k;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  WorkbenchSpec spec() {
    WorkbenchSpec s;
    while (!at_end()) s.statements.push_back(statement());
    return s;
  }

  Ordinal lone_ordinal() {
    auto a = ordinal();
    expect_end();
    return a;
  }
  Point lone_point() {
    auto p = point();
    expect_end();
    return p;
  }
  Relation lone_relation() {
    auto r = relation();
    expect_end();
    return r;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Point> points_;
  std::map<std::string, BorelCode> codes_;
  std::map<std::string, Relation> relations_;
  std::map<std::string, ActionSpec> actions_;
  std::map<std::string, Carrier> carriers_;
  std::set<std::string> reductions_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.col, msg); }
  static std::string describe(const Token& t) {
    return t.kind == Token::Kind::End ? std::string("end of input") : "'" + t.text + "'";
  }
  bool is(const char* text) const {
    return peek().kind != Token::Kind::End && peek().kind != Token::Kind::Number && peek().text == text;
  }
  bool accept(const char* text) {
    if (!is(text)) return false;
    next();
    return true;
  }
  void expect(const char* text) {
    if (!accept(text)) fail(peek(), std::string("expected '") + text + "', found " + describe(peek()));
  }
  void expect_end() {
    if (!at_end()) fail(peek(), "unexpected " + describe(peek()));
  }
  std::string name() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail(t, "expected a name, found " + describe(t));
    if (keywords().count(t.text)) fail(t, "'" + t.text + "' is reserved and cannot be used as a name");
    return next().text;
  }
  std::uint64_t number() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Number) fail(t, "expected a number, found " + describe(t));
    if (t.text.size() > 19) fail(t, "number " + t.text + " is too large");
    next();
    return std::stoull(t.text);
  }
  std::uint32_t small_number(std::uint64_t max) {
    const Token& t = peek();
    const auto n = number();
    if (n > max) fail(t, "number " + t.text + " exceeds " + std::to_string(max));
    return static_cast<std::uint32_t>(n);
  }

  template <class F>
  auto guarded(const Token& at, F f) -> decltype(f()) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(at, e.what());
    }
  }

  template <class F>
  void list(const char* open, const char* close, F item) {
    expect(open);
    if (accept(close)) return;
    do {
      item();
    } while (accept(","));
    expect(close);
  }

  // ordinal := term ('+' term)*; term := N | w ['^' N] ['*' N]
  Ordinal ordinal() {
    const Token& start = peek();
    Ordinal acc;
    do {
      const Token& t = peek();
      Ordinal term;
      if (t.kind == Token::Kind::Number) {
        term = Ordinal::finite(number());
      } else if (t.kind == Token::Kind::Ident && t.text == "w") {
        next();
        std::uint32_t e = 1;
        std::uint64_t c = 1;
        if (accept("^")) e = small_number(1u << 20);
        if (accept("*")) c = number();
        term = guarded(t, [&] { return Ordinal::omega_power(e, c); });
      } else {
        fail(t, "expected an ordinal, found " + describe(t));
      }
      acc = guarded(start, [&] { return acc + term; });
    } while (accept("+"));
    return acc;
  }

  std::vector<Ordinal> ordinal_list() {
    std::vector<Ordinal> out;
    list("(", ")", [&] { out.push_back(ordinal()); });
    return out;
  }

  // piece list: '{' [piece (';' piece)*] '}', or bare pieces where a ';'
  // continues the list only when another '[' follows
  template <class V, class ReadValue, class ReadWord>
  PatternMap<V> pattern(ReadValue value, ReadWord word_of) {
    const Token& start = peek();
    const bool braced = accept("{");
    if (!braced && !is("[")) fail(start, "expected a piece list, found " + describe(start));
    std::vector<Piece<V>> pieces;
    Ordinal bound;
    while (is("[")) {
      Piece<V> p;
      expect("[");
      p.interval.lo = ordinal();
      expect(",");
      p.interval.hi = ordinal();
      expect(")");
      accept(":");
      expect("lim");
      expect("=");
      p.limit_value = value();
      expect("word");
      expect("=");
      p.word = word_of();
      bound = p.interval.hi;
      pieces.push_back(std::move(p));
      if (!(is(";") && peek(1).kind == Token::Kind::Punct && peek(1).text == "[")) {
        if (braced) accept(";");
        break;
      }
      next();
    }
    if (braced) expect("}");
    return guarded(start, [&] { return PatternMap<V>(bound, std::move(pieces)); });
  }

  Bit bit() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Number || (t.text != "0" && t.text != "1")) fail(t, "expected a bit, found " + describe(t));
    next();
    return t.text == "1" ? 1 : 0;
  }

  std::vector<std::uint64_t> digit_word(std::uint64_t max) {
    const Token& t = peek();
    std::vector<std::uint64_t> out;
    if (t.kind == Token::Kind::Number) {
      for (char c : t.text) {
        const auto d = static_cast<std::uint64_t>(c - '0');
        if (d > max) fail(t, std::string("digit ") + c + " out of range in word " + t.text);
        out.push_back(d);
      }
      next();
      return out;
    }
    if (!is("(")) fail(t, "expected a word, found " + describe(t));
    list("(", ")", [&] {
      const Token& d = peek();
      const auto v = number();
      if (v > max) fail(d, "value " + d.text + " out of range");
      out.push_back(v);
    });
    if (out.empty()) fail(t, "empty word");
    return out;
  }

  BitMap bit_map() {
    return pattern<Bit>([&] { return bit(); },
                        [&] {
                          std::vector<Bit> w;
                          for (auto d : digit_word(1)) w.push_back(static_cast<Bit>(d));
                          return w;
                        });
  }
  OrdMap ord_map() {
    return pattern<Ordinal>([&] { return ordinal(); },
                            [&] {
                              const Token& t = peek();
                              auto w = ordinal_list();
                              if (w.empty()) fail(t, "empty word");
                              return w;
                            });
  }
  IndexMap index_map() {
    return pattern<std::uint32_t>([&] { return small_number(~std::uint32_t{0}); },
                                  [&] {
                                    std::vector<std::uint32_t> w;
                                    for (auto d : digit_word(~std::uint32_t{0})) w.push_back(static_cast<std::uint32_t>(d));
                                    return w;
                                  });
  }

  Point point() {
    const Token& t = peek();
    if (is("{") || is("[")) return Point::bits(bit_map());
    if (accept("bits")) return Point::bits(bit_map());
    if (accept("ords")) return Point::ords(ord_map());
    if (accept("tagged")) {
      const auto tag = ordinal();
      return Point::tagged(tag, point());
    }
    if (accept("family")) {
      std::vector<Point> comps;
      list("(", ")", [&] { comps.push_back(point()); });
      expect("assign");
      const Token& at = peek();
      auto assign = index_map();
      return guarded(at, [&] {
        for (const auto& p : assign.pieces()) {
          auto check = [&](std::uint32_t v) {
            if (v >= comps.size()) throw DomainError("assignment refers to component " + std::to_string(v) + " of " + std::to_string(comps.size()));
          };
          check(p.limit_value);
          for (auto v : p.word) check(v);
        }
        return Point::family(std::move(comps), std::move(assign));
      });
    }
    if (t.kind == Token::Kind::Ident && !keywords().count(t.text)) {
      next();
      auto it = points_.find(t.text);
      if (it == points_.end()) fail(t, "unknown point '" + t.text + "'");
      return it->second;
    }
    fail(t, "expected a point, found " + describe(t));
  }

  SpaceDescriptor space() {
    const Token& t = peek();
    if (accept("bits")) return SpaceDescriptor::bits();
    if (accept("ords")) return SpaceDescriptor::ords();
    if (accept("family")) {
      expect("(");
      auto inner = space();
      expect(")");
      return SpaceDescriptor::family_of(inner);
    }
    if (accept("sum")) {
      std::vector<SpaceDescriptor> parts;
      list("(", ")", [&] { parts.push_back(space()); });
      if (parts.empty()) fail(t, "sum needs at least one part");
      return SpaceDescriptor::tagged_sum(std::move(parts));
    }
    fail(t, "expected a space, found " + describe(t));
  }

  Address address(bool pair) {
    const Token& t = peek();
    Address a;
    if (accept("x")) {
      a.side = Address::Side::Single;
    } else if (accept("left")) {
      a.side = Address::Side::Left;
    } else if (accept("right")) {
      a.side = Address::Side::Right;
    } else {
      fail(t, "expected an address (x, left or right), found " + describe(t));
    }
    if (pair != (a.side != Address::Side::Single)) {
      fail(t, pair ? "pair codes address left or right" : "single codes address x");
    }
    for (;;) {
      if (accept("[")) {
        a.path.push_back({Address::Step::Kind::Component, ordinal()});
        expect("]");
      } else if (accept(".")) {
        expect("payload");
        a.path.push_back({Address::Step::Kind::Payload, Ordinal{}});
      } else {
        break;
      }
    }
    return a;
  }

  Atom atom(BorelCode& code) {
    Atom at;
    at.negate = accept("not");
    const Token& t = peek();
    const bool pair = code.is_pair();
    if (accept("seg")) {
      at.kind = Atom::Kind::Segment;
      at.a = address(pair);
      at.word_a = code.add_word(bit_map());
    } else if (accept("pairseg")) {
      at.kind = Atom::Kind::PairSegment;
      at.a = address(pair);
      at.word_a = code.add_word(bit_map());
      at.b = address(pair);
      at.word_b = code.add_word(bit_map());
    } else if (accept("tag")) {
      at.kind = Atom::Kind::Tag;
      at.a = address(pair);
      at.tag = ordinal();
    } else if (accept("pairtag")) {
      at.kind = Atom::Kind::PairTag;
      at.a = address(pair);
      at.b = address(pair);
      at.tag = ordinal();
    } else {
      fail(t, "expected an atom (seg, pairseg, tag, pairtag), found " + describe(t));
    }
    return at;
  }

  void node(BorelCode& code, std::uint32_t idx) {
    const Token& t = peek();
    if (accept("leaf")) {
      expect("(");
      LeafCondition cond;
      if (!is(")")) {
        do {
          cond.push_back(atom(code));
        } while (accept("&"));
      }
      expect(")");
      code.set_label(idx, std::move(cond));
      return;
    }
    if (!is("{")) fail(t, "expected a node ('{' or leaf), found " + describe(t));
    list("{", "}", [&] {
      const Token& e = peek();
      const auto entry = ordinal();
      expect(":");
      const auto child = guarded(e, [&] { return code.add_child(idx, entry); });
      node(code, child);
    });
  }

  BorelCode code_literal() {
    const Token& t = peek();
    bool pair = false;
    if (accept("pair")) {
      pair = true;
    } else if (!accept("single")) {
      fail(t, "expected 'single' or 'pair', found " + describe(t));
    }
    BorelCode code(space(), pair);
    node(code, 0);
    guarded(t, [&] {
      code.validate();
      return 0;
    });
    return code;
  }

  BorelCode code_ref() {
    if (is("single") || is("pair")) return code_literal();
    const Token& t = peek();
    const auto n = name();
    auto it = codes_.find(n);
    if (it == codes_.end()) fail(t, "unknown code '" + n + "'");
    return it->second;
  }

  EqRelHandle handle() {
    const Token& t = peek();
    auto r = relation();
    if (r.kind() != Relation::Kind::Handle) fail(t, "jump and join take catalog relations, not " + r.to_string());
    return r.handle();
  }

  Relation relation() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail(t, "expected a relation, found " + describe(t));
    const std::string w = t.text;
    if (w == "id") {
      next();
      expect("(");
      auto s = space();
      expect(")");
      return Relation::handle(EqRelHandle::id(s));
    }
    if (w == "E0") {
      next();
      bool ords = false;
      if (accept("(")) {
        if (accept("ords")) {
          ords = true;
        } else {
          expect("bits");
        }
        expect(")");
      }
      return Relation::handle(EqRelHandle::e0(ords));
    }
    if (w == "E1") {
      next();
      if (accept("[")) {
        const Token& lt = peek();
        auto level = ordinal();
        expect("]");
        return Relation::handle(guarded(lt, [&] { return EqRelHandle::e1_approx(level); }));
      }
      return Relation::handle(EqRelHandle::e1());
    }
    if (w == "idplus") {
      next();
      return Relation::handle(EqRelHandle::idplus());
    }
    if (w == "idplus_star") {
      next();
      return Relation::handle(EqRelHandle::idplus_star());
    }
    if (w == "cub") {
      next();
      CubParams p;
      expect("(");
      if (accept("literal")) {
        p.mode = CubParams::Mode::Literal;
      } else if (accept("structural")) {
        p.mode = CubParams::Mode::Structural;
      } else {
        fail(peek(), "expected 'literal' or 'structural', found " + describe(peek()));
      }
      expect(",");
      if (accept("ords")) {
        p.value_space = CubParams::ValueSpace::Ordinal;
      } else {
        expect("bits");
        p.value_space = CubParams::ValueSpace::Binary;
      }
      expect(")");
      return Relation::handle(EqRelHandle::cub(p));
    }
    if (w == "jump") {
      next();
      expect("(");
      auto inner = handle();
      expect(")");
      return Relation::handle(EqRelHandle::jump(inner));
    }
    if (w == "join") {
      next();
      std::vector<EqRelHandle> parts;
      list("(", ")", [&] { parts.push_back(handle()); });
      if (parts.empty()) fail(t, "join needs at least one part");
      return Relation::handle(guarded(t, [&] { return EqRelHandle::join(std::move(parts)); }));
    }
    if (w == "E0_off") {
      next();
      return Relation::agree_off(ordinal_list());
    }
    if (w == "orbit") {
      next();
      expect("(");
      auto a = action();
      expect(")");
      return Relation::orbit(a);
    }
    const auto n = name();
    auto it = relations_.find(n);
    if (it == relations_.end()) fail(t, "unknown relation '" + n + "'");
    return it->second;
  }

  std::vector<std::uint32_t> permutation() {
    std::vector<std::uint32_t> out;
    expect("(");
    while (!is(")")) {
      out.push_back(small_number(63));
      accept(",");
    }
    expect(")");
    return out;
  }

  ActionSpec action() {
    const Token& t = peek();
    ActionSpec a;
    if (accept("permute")) {
      a.rule = GroupAction::Rule::CoordinatePermutation;
    } else if (accept("flip")) {
      a.rule = GroupAction::Rule::BitFlip;
    } else {
      const auto n = name();
      auto it = actions_.find(n);
      if (it == actions_.end()) fail(t, "unknown action '" + n + "'");
      return it->second;
    }
    if (accept("cyclic")) {
      a.group = ActionSpec::GroupKind::Cyclic;
      expect("(");
      a.order = small_number(64);
      expect(")");
    } else if (accept("symmetric")) {
      a.group = ActionSpec::GroupKind::Symmetric;
      expect("(");
      a.order = small_number(4);
      expect(")");
    } else if (accept("perms")) {
      a.group = ActionSpec::GroupKind::Permutations;
      a.order = 0;
      list("(", ")", [&] { a.generators.push_back(permutation()); });
    } else {
      fail(peek(), "expected a group (cyclic, symmetric, perms), found " + describe(peek()));
    }
    expect("on");
    a.coords = ordinal_list();
    if (a.rule == GroupAction::Rule::BitFlip) {
      expect("masks");
      list("(", ")", [&] { a.masks.push_back(number()); });
    }
    guarded(t, [&] {
      a.build();
      return 0;
    });
    return a;
  }

  Carrier carrier() {
    const Token& t = peek();
    Carrier c;
    if (accept("supported")) {
      c.support = ordinal_list();
      return c;
    }
    if (accept("points")) {
      list("(", ")", [&] { c.points.push_back(point()); });
      return c;
    }
    const auto n = name();
    auto it = carriers_.find(n);
    if (it == carriers_.end()) fail(t, "unknown carrier '" + n + "'");
    return it->second;
  }

  ReductionMap reduction_map() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail(t, "expected a map name, found " + describe(t));
    auto k = ReductionMap::kind_from_name(t.text);
    if (!k) fail(t, "unknown map '" + t.text + "'");
    next();
    ReductionMap m;
    m.kind = *k;
    switch (m.kind) {
      case ReductionMap::Kind::E0ToIdPlus:
      case ReductionMap::Kind::E0ToIdPlusDrop:
        m.support = ordinal_list();
        if (m.support.size() > 8) fail(t, "support of size " + std::to_string(m.support.size()) + " exceeds 8");
        break;
      case ReductionMap::Kind::ActionToE0:
        expect("(");
        m.action = action();
        expect(",");
        m.enumeration_bound = small_number(16);
        expect(")");
        break;
      default: break;
    }
    return m;
  }

  GeneratorPolicy generator() {
    const Token& t = peek();
    GeneratorPolicy g;
    if (accept("exhaustive")) {
      g.kind = GeneratorPolicy::Kind::Exhaustive;
      expect("(");
      g.count = number();
      expect(")");
    } else if (accept("sampled")) {
      g.kind = GeneratorPolicy::Kind::Sampled;
      expect("(");
      g.count = number();
      expect(")");
    } else if (accept("constructed")) {
      g.kind = GeneratorPolicy::Kind::Constructed;
      expect("(");
      g.equivalent = number();
      expect(",");
      g.inequivalent = number();
      expect(")");
    } else {
      fail(t, "expected a generator (exhaustive, sampled, constructed), found " + describe(t));
    }
    return g;
  }

  template <class M>
  std::string declare(M& table) {
    const Token& t = peek();
    auto n = name();
    if (table.count(n)) fail(t, "'" + n + "' is already defined");
    return n;
  }

  std::vector<Point> args(const BorelCode& code, const Token& at) {
    std::vector<Point> out;
    const Token& open = peek();
    list("(", ")", [&] { out.push_back(point()); });
    const std::size_t want = code.is_pair() ? 2 : 1;
    if (out.size() != want) {
      fail(open, "code takes " + std::to_string(want) + " argument" + (want == 1 ? "" : "s") + ", got " +
                     std::to_string(out.size()));
    }
    for (const auto& p : out) {
      if (!code.space().matches(p)) fail(at, "argument does not belong to " + code.space().to_string());
    }
    return out;
  }

  Statement statement() {
    const Token& t = peek();
    if (accept("lambda")) {
      const Token& lt = peek();
      auto a = ordinal();
      if (!a.is_limit_of_limits()) fail(lt, "lambda must be a limit of limits, got " + a.to_string());
      expect(";");
      return LambdaStmt{a};
    }
    if (accept("point")) {
      auto n = declare(points_);
      expect("=");
      auto p = point();
      expect(";");
      points_.emplace(n, p);
      return PointStmt{n, p};
    }
    if (accept("code")) {
      auto n = declare(codes_);
      expect("=");
      auto c = code_literal();
      expect(";");
      codes_.emplace(n, c);
      return CodeStmt{n, c};
    }
    if (accept("relation")) {
      auto n = declare(relations_);
      expect("=");
      auto r = relation();
      expect(";");
      relations_.emplace(n, r);
      return RelationStmt{n, r};
    }
    if (accept("action")) {
      auto n = declare(actions_);
      expect("=");
      auto a = action();
      expect(";");
      actions_.emplace(n, a);
      return ActionStmt{n, a};
    }
    if (accept("carrier")) {
      auto n = declare(carriers_);
      expect("=");
      auto c = carrier();
      expect(";");
      carriers_.emplace(n, c);
      return CarrierStmt{n, c};
    }
    if (accept("reduction")) {
      auto n = declare(reductions_);
      reductions_.insert(n);
      return reduction(n, t);
    }
    if (is("eval") || is("approx")) {
      const bool eval = next().text == "eval";
      const Token& ct = peek();
      auto c = code_ref();
      auto a = args(c, ct);
      expect(";");
      if (eval) return EvalStmt{c, a};
      return ApproxStmt{c, a};
    }
    if (accept("orbit")) {
      OrbitStmt o;
      o.action = action();
      o.carrier = carrier();
      if (accept("bound")) o.bound = small_number(16);
      expect(";");
      return o;
    }
    fail(t, "expected a statement, found " + describe(t));
  }

  Statement reduction(const std::string& n, const Token& at) {
    expect("{");
    std::optional<Relation> source, target;
    std::optional<ReductionMap> map;
    std::optional<GeneratorPolicy> gen;
    auto once = [&](auto& slot, const Token& ft, auto value) {
      if (slot) fail(ft, "duplicate field '" + ft.text + "'");
      slot = value;
    };
    while (!accept("}")) {
      const Token& ft = peek();
      if (accept("source")) {
        once(source, ft, relation());
      } else if (accept("target")) {
        once(target, ft, relation());
      } else if (accept("map")) {
        once(map, ft, reduction_map());
      } else if (accept("generator")) {
        once(gen, ft, generator());
      } else {
        fail(ft, "expected source, target, map or generator, found " + describe(ft));
      }
      expect(";");
    }
    accept(";");
    const char* missing = !source ? "source" : !target ? "target" : !map ? "map" : !gen ? "generator" : nullptr;
    if (missing) fail(at, "reduction '" + n + "' has no " + missing);
    return ReductionStmt{n, ReductionSpec{*source, *target, *map, *gen}};
  }
};

std::string ord_list(const std::vector<Ordinal>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].to_string();
  return out + ")";
}

template <class V, class F, class W>
std::string print_pieces(const PatternMap<V>& m, F value, W word) {
  std::string out = "{";
  for (std::size_t i = 0; i < m.pieces().size(); ++i) {
    const auto& p = m.pieces()[i];
    if (i) out += "; ";
    out += "[" + p.lo().to_string() + "," + p.hi().to_string() + ") lim=" + value(p.limit_value) + " word=" + word(p.word);
  }
  return out + "}";
}

std::string print_bits(const BitMap& m) {
  return print_pieces(m, [](Bit b) { return std::string(1, b ? '1' : '0'); },
                      [](const std::vector<Bit>& w) {
                        std::string s;
                        for (auto b : w) s += b ? '1' : '0';
                        return s;
                      });
}

std::string print_address(const Address& a) {
  std::string out = a.side == Address::Side::Single ? "x" : a.side == Address::Side::Left ? "left" : "right";
  for (const auto& s : a.path) out += s.kind == Address::Step::Kind::Payload ? ".payload" : "[" + s.index.to_string() + "]";
  return out;
}

std::string print_atom(const BorelCode& c, const Atom& at) {
  std::string out = at.negate ? "not " : "";
  switch (at.kind) {
    case Atom::Kind::Segment: return out + "seg " + print_address(at.a) + " " + print_bits(c.words()[at.word_a]);
    case Atom::Kind::PairSegment:
      return out + "pairseg " + print_address(at.a) + " " + print_bits(c.words()[at.word_a]) + " " +
             print_address(at.b) + " " + print_bits(c.words()[at.word_b]);
    case Atom::Kind::Tag: return out + "tag " + print_address(at.a) + " " + at.tag.to_string();
    case Atom::Kind::PairTag:
      return out + "pairtag " + print_address(at.a) + " " + print_address(at.b) + " " + at.tag.to_string();
  }
  return out;
}

void print_node(const BorelCode& c, std::uint32_t i, std::string& out) {
  const auto& n = c.node(i);
  if (n.label) {
    out += "leaf(";
    for (std::size_t k = 0; k < n.label->size(); ++k) {
      if (k) out += " & ";
      out += print_atom(c, (*n.label)[k]);
    }
    out += ")";
    return;
  }
  out += "{";
  for (std::size_t k = 0; k < n.children.size(); ++k) {
    if (k) out += ", ";
    out += c.node(n.children[k]).entry.to_string() + ": ";
    print_node(c, n.children[k], out);
  }
  out += "}";
}

std::string print_carrier(const Carrier& c) {
  if (c.support) return "supported" + ord_list(*c.support);
  std::string out = "points(";
  for (std::size_t i = 0; i < c.points.size(); ++i) out += (i ? ", " : "") + print_point(c.points[i]);
  return out + ")";
}

std::string print_map(const ReductionMap& m) {
  std::string out = ReductionMap::name_of(m.kind);
  switch (m.kind) {
    case ReductionMap::Kind::E0ToIdPlus:
    case ReductionMap::Kind::E0ToIdPlusDrop: return out + ord_list(m.support);
    case ReductionMap::Kind::ActionToE0:
      return out + "(" + (m.action ? print_action(*m.action) : std::string("?")) + ", " +
             std::to_string(m.enumeration_bound) + ")";
    default: return out;
  }
}

std::string print_generator(const GeneratorPolicy& g) {
  switch (g.kind) {
    case GeneratorPolicy::Kind::Exhaustive: return "exhaustive(" + std::to_string(g.count) + ")";
    case GeneratorPolicy::Kind::Sampled: return "sampled(" + std::to_string(g.count) + ")";
    case GeneratorPolicy::Kind::Constructed:
      return "constructed(" + std::to_string(g.equivalent) + ", " + std::to_string(g.inequivalent) + ")";
  }
  return "?";
}

std::string print_args(const std::vector<Point>& args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + print_point(args[i]);
  return out + ")";
}

struct StatementPrinter {
  std::string operator()(const LambdaStmt& s) const { return "lambda " + s.lambda.to_string() + ";"; }
  std::string operator()(const PointStmt& s) const { return "point " + s.name + " = " + print_point(s.point) + ";"; }
  std::string operator()(const CodeStmt& s) const { return "code " + s.name + " = " + print_code(s.code) + ";"; }
  std::string operator()(const RelationStmt& s) const {
    return "relation " + s.name + " = " + print_relation(s.relation) + ";";
  }
  std::string operator()(const ActionStmt& s) const { return "action " + s.name + " = " + print_action(s.action) + ";"; }
  std::string operator()(const CarrierStmt& s) const {
    return "carrier " + s.name + " = " + print_carrier(s.carrier) + ";";
  }
  std::string operator()(const ReductionStmt& s) const {
    return "reduction " + s.name + " {\n  source " + print_relation(s.spec.source) + ";\n  target " +
           print_relation(s.spec.target) + ";\n  map " + print_map(s.spec.map) + ";\n  generator " +
           print_generator(s.spec.generator) + ";\n}";
  }
  std::string operator()(const EvalStmt& s) const { return "eval " + print_code(s.code) + " " + print_args(s.args) + ";"; }
  std::string operator()(const ApproxStmt& s) const {
    return "approx " + print_code(s.code) + " " + print_args(s.args) + ";";
  }
  std::string operator()(const OrbitStmt& s) const {
    return "orbit " + print_action(s.action) + " " + print_carrier(s.carrier) + " bound " + std::to_string(s.bound) + ";";
  }
};

}  // namespace

std::vector<Point> Carrier::expand(const Ordinal& lambda) const {
  if (support) return supported_carrier(*support, lambda);
  return points;
}

std::optional<Ordinal> WorkbenchSpec::lambda() const {
  std::optional<Ordinal> out;
  for (const auto* l : all<LambdaStmt>()) out = l->lambda;
  return out;
}

WorkbenchSpec parse_spec(const std::string& text) { return Parser(text).spec(); }

std::string print_spec(const WorkbenchSpec& spec) {
  std::string out;
  for (const auto& s : spec.statements) out += std::visit(StatementPrinter{}, s) + "\n";
  return out;
}

Ordinal parse_ordinal(const std::string& text) { return Parser(text).lone_ordinal(); }
Point parse_point(const std::string& text) { return Parser(text).lone_point(); }
Relation parse_relation(const std::string& text) { return Parser(text).lone_relation(); }

std::string print_ordinal(const Ordinal& a) { return a.to_string(); }

std::string print_point(const Point& x) {
  switch (x.kind()) {
    case Point::Kind::Bits: return "bits" + print_bits(x.as_bits());
    case Point::Kind::OrdVals:
      return "ords" + print_pieces(x.as_ords(), [](const Ordinal& a) { return a.to_string(); },
                                   [](const std::vector<Ordinal>& w) { return ord_list(w); });
    case Point::Kind::Family: {
      std::string out = "family(";
      for (std::size_t i = 0; i < x.components().size(); ++i) out += (i ? ", " : "") + print_point(x.components()[i]);
      return out + ") assign " +
             print_pieces(x.assignment(), [](std::uint32_t v) { return std::to_string(v); },
                          [](const std::vector<std::uint32_t>& w) {
                            std::string s = "(";
                            for (std::size_t i = 0; i < w.size(); ++i) s += (i ? ", " : "") + std::to_string(w[i]);
                            return s + ")";
                          });
    }
    case Point::Kind::Tagged: return "tagged " + x.tag().to_string() + " " + print_point(x.payload());
  }
  return "?";
}

std::string print_code(const BorelCode& c) {
  std::string out = std::string(c.is_pair() ? "pair " : "single ") + c.space().to_string() + " ";
  print_node(c, 0, out);
  return out;
}

std::string print_relation(const Relation& r) { return r.to_string(); }

std::string print_action(const ActionSpec& a) {
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

// ---------------------------------------------------------------------------
// Random specs

namespace {

std::uint64_t pick(Rng& rng, std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); }

Ordinal random_small_ordinal(Rng& rng) {
  static const std::vector<Ordinal> pool{Ordinal{}, Ordinal::finite(1), Ordinal::finite(2), Ordinal::omega(),
                                         Ordinal::omega() + Ordinal::finite(1), Ordinal::omega_power(1, 2),
                                         Ordinal::omega_power(2), Ordinal::omega_power(2) + Ordinal::finite(3)};
  return pool[pick(rng, pool.size())];
}

std::vector<Ordinal> random_coords(Rng& rng, std::size_t n) {
  std::vector<Ordinal> out;
  Ordinal a = Ordinal::finite(pick(rng, 3));
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(a);
    a = a + Ordinal::finite(1 + pick(rng, 2));
    if (pick(rng, 4) == 0) a = a.next_limit();
  }
  return out;
}

ActionSpec random_action(Rng& rng) {
  ActionSpec a;
  switch (pick(rng, 4)) {
    case 0:
      a.group = ActionSpec::GroupKind::Cyclic;
      a.order = static_cast<std::uint32_t>(2 + pick(rng, 3));
      a.coords = random_coords(rng, a.order);
      break;
    case 1:
      a.group = ActionSpec::GroupKind::Symmetric;
      a.order = 3;
      a.coords = random_coords(rng, 3);
      break;
    case 2:
      a.group = ActionSpec::GroupKind::Permutations;
      a.order = 0;
      a.generators = {{1, 0, 2}, {0, 2, 1}};
      a.coords = random_coords(rng, 3);
      break;
    default:
      a.group = ActionSpec::GroupKind::Cyclic;
      a.order = 2;
      a.rule = GroupAction::Rule::BitFlip;
      a.coords = random_coords(rng, 1 + pick(rng, 3));
      a.masks = {1 + pick(rng, (std::uint64_t{1} << a.coords.size()) - 1)};
      break;
  }
  return a;
}

EqRelHandle random_handle(Rng& rng, int depth) {
  switch (pick(rng, depth > 0 ? 11 : 9)) {
    case 0: return EqRelHandle::id(pick(rng, 2) ? SpaceDescriptor::bits() : SpaceDescriptor::ords());
    case 1: return EqRelHandle::e0(pick(rng, 2));
    case 2: return EqRelHandle::e1();
    case 3: return EqRelHandle::e1_approx(Ordinal::omega_power(1, 1 + pick(rng, 6)));
    case 4: return EqRelHandle::idplus();
    case 5: return EqRelHandle::idplus_star();
    case 6:
    case 7: {
      CubParams p;
      p.mode = pick(rng, 2) ? CubParams::Mode::Literal : CubParams::Mode::Structural;
      p.value_space = pick(rng, 2) ? CubParams::ValueSpace::Binary : CubParams::ValueSpace::Ordinal;
      return EqRelHandle::cub(p);
    }
    case 8: return EqRelHandle::id(SpaceDescriptor::family_of(SpaceDescriptor::bits()));
    case 9: return EqRelHandle::jump(random_handle(rng, depth - 1));
    default: {
      std::vector<EqRelHandle> parts;
      const auto n = 1 + pick(rng, 3);
      for (std::uint64_t i = 0; i < n; ++i) parts.push_back(random_handle(rng, depth - 1));
      return EqRelHandle::join(std::move(parts));
    }
  }
}

Relation random_relation(Rng& rng) {
  switch (pick(rng, 6)) {
    case 0: return Relation::agree_off(random_coords(rng, 1 + pick(rng, 3)));
    case 1: return Relation::orbit(random_action(rng));
    default: return Relation::handle(random_handle(rng, 2));
  }
}

BitMap random_word(Rng& rng) {
  const auto k = pick(rng, 5);
  std::vector<Bit> w;
  for (std::uint64_t i = 0; i < std::max<std::uint64_t>(k, 1); ++i) w.push_back(static_cast<Bit>(pick(rng, 2)));
  if (pick(rng, 6) == 0) return BitMap::uniform(Ordinal::omega(), w[0], w);
  return BitMap::uniform(Ordinal::finite(k), w[0], w);
}

Address random_address(Rng& rng, const SpaceDescriptor& space, bool pair) {
  Address a;
  a.side = pair ? (pick(rng, 2) ? Address::Side::Left : Address::Side::Right) : Address::Side::Single;
  const SpaceDescriptor* s = &space;
  while (pick(rng, 3) != 0) {
    if (s->kind() == SpaceDescriptor::Kind::FamilyOf) {
      a.path.push_back({Address::Step::Kind::Component, random_small_ordinal(rng)});
      s = &s->inner();
    } else if (s->kind() == SpaceDescriptor::Kind::TaggedSum) {
      a.path.push_back({Address::Step::Kind::Payload, Ordinal{}});
      s = &s->parts()[0];
    } else {
      break;
    }
  }
  return a;
}

void random_subtree(Rng& rng, BorelCode& c, std::uint32_t node, int depth) {
  if (depth == 0 || pick(rng, 3) == 0) {
    if (pick(rng, 4) == 0) return;
    LeafCondition cond;
    const auto n = pick(rng, 3);
    for (std::uint64_t i = 0; i < n; ++i) {
      Atom at;
      at.negate = pick(rng, 3) == 0;
      const auto k = pick(rng, c.is_pair() ? 4 : 2);
      at.a = random_address(rng, c.space(), c.is_pair());
      if (k == 0 || k == 2) {
        at.kind = k == 0 ? Atom::Kind::Segment : Atom::Kind::PairSegment;
        at.word_a = c.add_word(random_word(rng));
        if (k == 2) {
          at.b = random_address(rng, c.space(), true);
          at.word_b = c.add_word(random_word(rng));
        }
      } else {
        at.kind = k == 1 ? Atom::Kind::Tag : Atom::Kind::PairTag;
        if (k == 3) at.b = random_address(rng, c.space(), true);
        at.tag = Ordinal::finite(pick(rng, 3));
      }
      cond.push_back(std::move(at));
    }
    c.set_label(node, std::move(cond));
    return;
  }
  std::set<Ordinal> used;
  const auto n = 1 + pick(rng, 3);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto e = random_small_ordinal(rng);
    if (!used.insert(e).second) continue;
    random_subtree(rng, c, c.add_child(node, e), depth - 1);
  }
}

SpaceDescriptor random_space(Rng& rng) {
  switch (pick(rng, 4)) {
    case 0: return SpaceDescriptor::family_of(SpaceDescriptor::bits());
    case 1: return SpaceDescriptor::tagged_sum({SpaceDescriptor::bits(), SpaceDescriptor::bits()});
    default: return SpaceDescriptor::bits();
  }
}

BorelCode random_code(Rng& rng) {
  BorelCode c(random_space(rng), pick(rng, 2) == 1);
  random_subtree(rng, c, 0, 4);
  return c;
}

ReductionSpec random_reduction(Rng& rng) {
  ReductionSpec r;
  switch (pick(rng, 6)) {
    case 0:
      r.source = Relation::handle(EqRelHandle::e1());
      r.target = Relation::handle(EqRelHandle::e0(true));
      r.map.kind = pick(rng, 2) ? ReductionMap::Kind::E1ToE0 : ReductionMap::Kind::E1ToE0Unadapted;
      break;
    case 1:
      r.source = Relation::handle(EqRelHandle::e0());
      r.target = Relation::handle(EqRelHandle::e1());
      r.map.kind = ReductionMap::Kind::E0ToE1;
      break;
    case 2:
    case 3:
      r.map.kind = pick(rng, 2) ? ReductionMap::Kind::E0ToIdPlus : ReductionMap::Kind::E0ToIdPlusDrop;
      r.map.support = random_coords(rng, 1 + pick(rng, 4));
      r.source = Relation::agree_off(r.map.support);
      r.target = Relation::handle(EqRelHandle::idplus());
      break;
    case 4:
      r.source = Relation::handle(EqRelHandle::e0());
      r.target = Relation::handle(EqRelHandle::id(SpaceDescriptor::bits()));
      r.map.kind = ReductionMap::Kind::Constant;
      break;
    default:
      r.map.kind = ReductionMap::Kind::ActionToE0;
      r.map.action = random_action(rng);
      r.map.enumeration_bound = static_cast<std::uint32_t>(4 + pick(rng, 8));
      r.source = Relation::orbit(*r.map.action);
      r.target = Relation::handle(EqRelHandle::e0(true));
      break;
  }
  switch (pick(rng, 3)) {
    case 0: r.generator = {GeneratorPolicy::Kind::Exhaustive, pick(rng, 300), 0, 0}; break;
    case 1: r.generator = {GeneratorPolicy::Kind::Sampled, pick(rng, 300), 0, 0}; break;
    default: r.generator = {GeneratorPolicy::Kind::Constructed, 0, pick(rng, 600), pick(rng, 600)}; break;
  }
  return r;
}

Point random_any_point(Rng& rng, const Ordinal& lambda) {
  static const std::vector<SpaceDescriptor> spaces{
      SpaceDescriptor::bits(), SpaceDescriptor::ords(), SpaceDescriptor::family_of(SpaceDescriptor::bits()),
      SpaceDescriptor::tagged_sum({SpaceDescriptor::bits(), SpaceDescriptor::ords()})};
  return random_point(spaces[pick(rng, spaces.size())], rng, lambda);
}

std::vector<Point> random_args(Rng& rng, const BorelCode& c, const Ordinal& lambda) {
  std::vector<Point> out;
  for (int i = 0; i < (c.is_pair() ? 2 : 1); ++i) out.push_back(random_point(c.space(), rng, lambda));
  return out;
}

}  // namespace

WorkbenchSpec random_spec(Rng& rng, std::size_t statements) {
  WorkbenchSpec s;
  const Ordinal lambda = Ordinal::omega_power(2, 1 + pick(rng, 2));
  s.statements.push_back(LambdaStmt{lambda});
  for (std::size_t i = 1; i < statements; ++i) {
    const std::string name = "n" + std::to_string(i);
    switch (pick(rng, 10)) {
      case 0: s.statements.push_back(PointStmt{name, random_any_point(rng, lambda)}); break;
      case 1: s.statements.push_back(CodeStmt{name, random_code(rng)}); break;
      case 2: s.statements.push_back(RelationStmt{name, random_relation(rng)}); break;
      case 3: s.statements.push_back(ActionStmt{name, random_action(rng)}); break;
      case 4: {
        Carrier c;
        if (pick(rng, 2)) {
          c.support = random_coords(rng, 1 + pick(rng, 4));
        } else {
          for (std::uint64_t k = pick(rng, 4); k > 0; --k) c.points.push_back(random_point(SpaceDescriptor::bits(), rng, lambda));
        }
        s.statements.push_back(CarrierStmt{name, c});
        break;
      }
      case 5:
      case 6: s.statements.push_back(ReductionStmt{name, random_reduction(rng)}); break;
      case 7: {
        auto c = random_code(rng);
        auto a = random_args(rng, c, lambda);
        s.statements.push_back(EvalStmt{std::move(c), std::move(a)});
        break;
      }
      case 8: {
        auto c = random_code(rng);
        auto a = random_args(rng, c, lambda);
        s.statements.push_back(ApproxStmt{std::move(c), std::move(a)});
        break;
      }
      default: {
        OrbitStmt o;
        o.action = random_action(rng);
        o.carrier.support = o.action.coords;
        o.bound = static_cast<std::uint32_t>(4 + pick(rng, 8));
        s.statements.push_back(o);
        break;
      }
    }
  }
  return s;
}

}  // namespace gbs
