#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gbs/ordinal.hpp"
#include "gbs/pattern_map.hpp"

namespace gbs {

using OrdMap = PatternMap<Ordinal>;
using IndexMap = PatternMap<std::uint32_t>;
/// An element of 2^{<lambda}: a bit map with domain below the space bound.
using FiniteWord = BitMap;

class Point;

struct FamilyData;
struct TaggedData;

/// Recursive point of a sequence space. Families keep their distinct
/// components sorted by canonical key, so equal points have equal
/// representations and `key()` decides equality.
class Point {
 public:
  enum class Kind { Bits, OrdVals, Family, Tagged };

  Point();  // the empty bit sequence
  static Point bits(BitMap m);
  static Point ords(OrdMap m);
  /// Components are deduplicated and sorted; unreferenced ones are dropped.
  /// `assignment` maps each index to a position in `components`.
  static Point family(std::vector<Point> components, IndexMap assignment);
  static Point tagged(Ordinal tag, Point payload);

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_bits() const { return kind() == Kind::Bits; }
  bool is_ords() const { return kind() == Kind::OrdVals; }
  bool is_family() const { return kind() == Kind::Family; }
  bool is_tagged() const { return kind() == Kind::Tagged; }

  const BitMap& as_bits() const;
  const OrdMap& as_ords() const;
  const std::vector<Point>& components() const;
  const IndexMap& assignment() const;
  const Ordinal& tag() const;
  const Point& payload() const;

  /// x_a for a family.
  const Point& component_at(const Ordinal& a) const;

  /// Domain of the underlying sequence (payload's for tagged points).
  const Ordinal& domain_bound() const;

  /// Canonical serialization; lexicographic order on keys is the canonical
  /// total order on points.
  const std::string& key() const { return *key_; }
  /// Serialization with every domain endpoint left out. Injective among
  /// points whose domains all coincide.
  std::string open_key() const;

  friend bool operator==(const Point& a, const Point& b) { return a.key_ == b.key_ || *a.key_ == *b.key_; }
  friend std::strong_ordering operator<=>(const Point& a, const Point& b) { return a.key().compare(b.key()) <=> 0; }

 private:
  using Data = std::variant<BitMap, OrdMap, std::shared_ptr<const FamilyData>, std::shared_ptr<const TaggedData>>;
  explicit Point(Data d);
  std::string serialize(bool open) const;

  Data data_;
  std::shared_ptr<const std::string> key_;
};

struct FamilyData {
  std::vector<Point> components;
  IndexMap assignment;
};

struct TaggedData {
  Ordinal tag;
  Point payload;
};

/// Shape of a sequence space.
class SpaceDescriptor {
 public:
  enum class Kind { Bits, Ords, FamilyOf, TaggedSum };

  static SpaceDescriptor bits();
  static SpaceDescriptor ords();
  static SpaceDescriptor family_of(SpaceDescriptor inner);
  /// Tag i carries points of parts[i].
  static SpaceDescriptor tagged_sum(std::vector<SpaceDescriptor> parts);

  Kind kind() const { return kind_; }
  const SpaceDescriptor& inner() const;
  const std::vector<SpaceDescriptor>& parts() const { return children_; }

  bool matches(const Point& x) const;
  /// Throws SpaceMismatch with a description when x does not fit.
  void require(const Point& x, const char* what) const;
  std::string to_string() const;

  friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;

 private:
  Kind kind_ = Kind::Bits;
  std::vector<SpaceDescriptor> children_;
};

std::string serialize_map(const BitMap& m, bool open);
std::string serialize_map(const OrdMap& m, bool open);
std::string serialize_map(const IndexMap& m, bool open);

/// x restricted to [0, a); families restrict every component and the
/// assignment. Family restriction needs a limit level (or the full domain).
Point restrict_point(const Point& x, const Ordinal& a);

/// p xor eta on dom(p), eta elsewhere.
BitMap xor_prefix(const FiniteWord& p, const BitMap& eta);

/// p followed by zeros up to b.
BitMap zero_pad_embed(const FiniteWord& p, const Ordinal& b);

/// Indicator of pointwise disagreement of two bit or ordinal sequences.
BitMap diff_map(const Point& x, const Point& y);

/// Least element under the canonical order; throws DomainError when empty.
const Point& canonical_min(const std::vector<Point>& s);
/// Least element under open-key order (for points sharing a domain).
const Point& canonical_min_open(const std::vector<Point>& s);

/// Content-addressed registry turning serializations into nonzero naturals
/// below 2^62. Hash collisions are detected and reported.
class ClassCodeRegistry {
 public:
  std::uint64_t code(const std::string& key);
  std::size_t size() const;
  static ClassCodeRegistry& global();

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, std::string> seen_;
};

std::uint64_t class_code_of(const std::string& key);

}  // namespace gbs
