#include "gbs/point.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "gbs/error.hpp"

namespace gbs {

namespace {

void put(std::string& out, Bit b) { out += static_cast<char>('0' + b); }
void put(std::string& out, const Ordinal& o) { out += o.to_string(); }
void put(std::string& out, std::uint32_t v) { out += std::to_string(v); }

template <class V>
std::string serialize_impl(const PatternMap<V>& m, bool open, bool dense) {
  std::string out;
  const auto& ps = m.pieces();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    put(out, ps[i].limit_value);
    out += '|';
    for (std::size_t j = 0; j < ps[i].word.size(); ++j) {
      if (!dense && j > 0) out += ' ';
      put(out, ps[i].word[j]);
    }
    out += '|';
    if (!(open && i + 1 == ps.size())) out += ps[i].hi().to_string();
    out += ';';
  }
  return out;
}

}  // namespace

std::string serialize_map(const BitMap& m, bool open) { return serialize_impl(m, open, true); }
std::string serialize_map(const OrdMap& m, bool open) { return serialize_impl(m, open, false); }
std::string serialize_map(const IndexMap& m, bool open) { return serialize_impl(m, open, false); }

Point::Point() : Point(Data{BitMap{}}) {}

Point::Point(Data d) : data_(std::move(d)) { key_ = std::make_shared<const std::string>(serialize(false)); }

Point Point::bits(BitMap m) { return Point(Data{std::move(m)}); }

Point Point::ords(OrdMap m) { return Point(Data{std::move(m)}); }

Point Point::family(std::vector<Point> components, IndexMap assignment) {
  for (const auto& c : components) {
    if (!(c.domain_bound() == assignment.domain_bound())) {
      throw DomainError("family component has domain [0, " + c.domain_bound().to_string() + "), expected [0, " +
                        assignment.domain_bound().to_string() + ")");
    }
  }
  const auto used = assignment.values();
  for (auto v : used) {
    if (v >= components.size()) throw DomainError("family assignment refers to missing component " + std::to_string(v));
  }
  // Distinct referenced components in key order.
  std::map<std::string, std::uint32_t> slot;
  for (auto v : used) slot.emplace(components[v].key(), 0);
  std::vector<Point> sorted;
  for (auto& [k, idx] : slot) {
    idx = static_cast<std::uint32_t>(sorted.size());
    for (auto v : used) {
      if (components[v].key() == k) {
        sorted.push_back(components[v]);
        break;
      }
    }
  }
  std::vector<std::uint32_t> remap(components.size(), 0);
  for (auto v : used) remap[v] = slot.at(components[v].key());
  auto data = std::make_shared<FamilyData>();
  data->components = std::move(sorted);
  data->assignment = assignment.transform([&](std::uint32_t v) { return remap[v]; });
  return Point(Data{std::shared_ptr<const FamilyData>(std::move(data))});
}

Point Point::tagged(Ordinal tag, Point payload) {
  return Point(Data{std::make_shared<const TaggedData>(TaggedData{std::move(tag), std::move(payload)})});
}

const BitMap& Point::as_bits() const {
  if (!is_bits()) throw SpaceMismatch("expected a bit sequence");
  return std::get<BitMap>(data_);
}

const OrdMap& Point::as_ords() const {
  if (!is_ords()) throw SpaceMismatch("expected an ordinal-valued sequence");
  return std::get<OrdMap>(data_);
}

const std::vector<Point>& Point::components() const {
  if (!is_family()) throw SpaceMismatch("expected a family");
  return std::get<2>(data_)->components;
}

const IndexMap& Point::assignment() const {
  if (!is_family()) throw SpaceMismatch("expected a family");
  return std::get<2>(data_)->assignment;
}

const Ordinal& Point::tag() const {
  if (!is_tagged()) throw SpaceMismatch("expected a tagged point");
  return std::get<3>(data_)->tag;
}

const Point& Point::payload() const {
  if (!is_tagged()) throw SpaceMismatch("expected a tagged point");
  return std::get<3>(data_)->payload;
}

const Point& Point::component_at(const Ordinal& a) const { return components()[assignment().at(a)]; }

const Ordinal& Point::domain_bound() const {
  switch (kind()) {
    case Kind::Bits: return std::get<BitMap>(data_).domain_bound();
    case Kind::OrdVals: return std::get<OrdMap>(data_).domain_bound();
    case Kind::Family: return std::get<2>(data_)->assignment.domain_bound();
    case Kind::Tagged: return std::get<3>(data_)->payload.domain_bound();
  }
  throw Error("unreachable");
}

std::string Point::serialize(bool open) const {
  switch (kind()) {
    case Kind::Bits: return "B" + serialize_map(std::get<BitMap>(data_), open);
    case Kind::OrdVals: return "O" + serialize_map(std::get<OrdMap>(data_), open);
    case Kind::Family: {
      const auto& f = *std::get<2>(data_);
      std::string out = "F(";
      for (std::size_t i = 0; i < f.components.size(); ++i) {
        if (i) out += ',';
        out += open ? f.components[i].open_key() : f.components[i].key();
      }
      out += ')';
      return out + serialize_map(f.assignment, open);
    }
    case Kind::Tagged: {
      const auto& t = *std::get<3>(data_);
      return "T" + t.tag.to_string() + ":" + (open ? t.payload.open_key() : t.payload.key());
    }
  }
  throw Error("unreachable");
}

std::string Point::open_key() const { return serialize(true); }

SpaceDescriptor SpaceDescriptor::bits() { return SpaceDescriptor{}; }

SpaceDescriptor SpaceDescriptor::ords() {
  SpaceDescriptor s;
  s.kind_ = Kind::Ords;
  return s;
}

SpaceDescriptor SpaceDescriptor::family_of(SpaceDescriptor inner) {
  SpaceDescriptor s;
  s.kind_ = Kind::FamilyOf;
  s.children_.push_back(std::move(inner));
  return s;
}

SpaceDescriptor SpaceDescriptor::tagged_sum(std::vector<SpaceDescriptor> parts) {
  if (parts.empty()) throw DomainError("tagged sum needs at least one part");
  SpaceDescriptor s;
  s.kind_ = Kind::TaggedSum;
  s.children_ = std::move(parts);
  return s;
}

const SpaceDescriptor& SpaceDescriptor::inner() const {
  if (kind_ != Kind::FamilyOf) throw SpaceMismatch("space " + to_string() + " is not a family space");
  return children_.front();
}

bool SpaceDescriptor::matches(const Point& x) const {
  switch (kind_) {
    case Kind::Bits: return x.is_bits();
    case Kind::Ords: return x.is_ords();
    case Kind::FamilyOf:
      return x.is_family() &&
             std::all_of(x.components().begin(), x.components().end(), [&](const Point& c) { return children_[0].matches(c); });
    case Kind::TaggedSum: {
      if (!x.is_tagged() || !x.tag().is_finite()) return false;
      const auto t = x.tag().to_uint();
      return t < children_.size() && children_[t].matches(x.payload());
    }
  }
  return false;
}

void SpaceDescriptor::require(const Point& x, const char* what) const {
  if (!matches(x)) throw SpaceMismatch(std::string(what) + " is not a point of " + to_string());
}

std::string SpaceDescriptor::to_string() const {
  switch (kind_) {
    case Kind::Bits: return "bits";
    case Kind::Ords: return "ords";
    case Kind::FamilyOf: return "family(" + children_[0].to_string() + ")";
    case Kind::TaggedSum: {
      std::string out = "sum(";
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (i) out += ',';
        out += children_[i].to_string();
      }
      return out + ")";
    }
  }
  return "?";
}

Point restrict_point(const Point& x, const Ordinal& a) {
  if (a > x.domain_bound()) {
    throw DomainError("restriction level " + a.to_string() + " exceeds domain " + x.domain_bound().to_string());
  }
  if (a == x.domain_bound()) return x;
  switch (x.kind()) {
    case Point::Kind::Bits: return Point::bits(x.as_bits().restrict(a));
    case Point::Kind::OrdVals: return Point::ords(x.as_ords().restrict(a));
    case Point::Kind::Family: {
      if (!a.is_limit() && !a.is_zero()) throw DomainError("family restriction needs a limit level, got " + a.to_string());
      std::vector<Point> comps;
      comps.reserve(x.components().size());
      for (const auto& c : x.components()) comps.push_back(restrict_point(c, a));
      return Point::family(std::move(comps), x.assignment().restrict(a));
    }
    case Point::Kind::Tagged: return Point::tagged(x.tag(), restrict_point(x.payload(), a));
  }
  throw Error("unreachable");
}

BitMap zero_pad_embed(const FiniteWord& p, const Ordinal& b) {
  if (p.domain_bound() > b) {
    throw DomainError("zero_pad_embed: domain " + p.domain_bound().to_string() + " exceeds " + b.to_string());
  }
  return p.extend(b, 0);
}

BitMap xor_prefix(const FiniteWord& p, const BitMap& eta) {
  return pm_zip(zero_pad_embed(p, eta.domain_bound()), eta, [](Bit a, Bit b) { return static_cast<Bit>(a ^ b); });
}

BitMap diff_map(const Point& x, const Point& y) {
  if (x.is_bits() && y.is_bits()) {
    return pm_zip(x.as_bits(), y.as_bits(), [](Bit a, Bit b) { return static_cast<Bit>(a != b); });
  }
  if (x.is_ords() && y.is_ords()) {
    return pm_zip(x.as_ords(), y.as_ords(), [](const Ordinal& a, const Ordinal& b) { return static_cast<Bit>(!(a == b)); });
  }
  throw SpaceMismatch("diff_map needs two bit sequences or two ordinal sequences");
}

const Point& canonical_min(const std::vector<Point>& s) {
  if (s.empty()) throw DomainError("canonical_min of an empty set");
  return *std::min_element(s.begin(), s.end(), [](const Point& a, const Point& b) { return a.key() < b.key(); });
}

const Point& canonical_min_open(const std::vector<Point>& s) {
  if (s.empty()) throw DomainError("canonical_min of an empty set");
  std::size_t best = 0;
  std::string best_key = s[0].open_key();
  for (std::size_t i = 1; i < s.size(); ++i) {
    std::string k = s[i].open_key();
    if (k < best_key) {
      best_key = std::move(k);
      best = i;
    }
  }
  return s[best];
}

std::uint64_t class_code_of(const std::string& key) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return (h & ((1ull << 62) - 1)) + 1;
}

std::uint64_t ClassCodeRegistry::code(const std::string& key) {
  const std::uint64_t c = class_code_of(key);
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, fresh] = seen_.emplace(c, key);
  if (!fresh && it->second != key) throw Error("class code collision between distinct serializations");
  return c;
}

std::size_t ClassCodeRegistry::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return seen_.size();
}

ClassCodeRegistry& ClassCodeRegistry::global() {
  static ClassCodeRegistry r;
  return r;
}

}  // namespace gbs
