#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gbs/point.hpp"

namespace gbs {

/// Finite group of order at most 64, stored as a Cayley table. Subsets are
/// bit masks over element indices.
class FiniteGroup {
 public:
  using Element = std::uint32_t;
  using Subset = std::uint64_t;
  static constexpr std::size_t kMaxOrder = 64;

  /// Verifies closure, associativity, identity and inverses.
  FiniteGroup(std::vector<std::vector<Element>> table, std::vector<Element> generators, std::string name);

  /// Z/n realised as rotations of n points.
  static FiniteGroup cyclic(std::uint32_t n);
  /// S_k realised as all permutations of k points.
  static FiniteGroup symmetric(std::uint32_t k);
  /// Group generated by permutations of {0..k-1}; product is composition
  /// (a*b)(i) = a(b(i)).
  static FiniteGroup from_permutations(const std::vector<std::vector<std::uint32_t>>& gens, std::string name);

  std::size_t order() const { return table_.size(); }
  Element identity() const { return identity_; }
  Element mul(Element a, Element b) const { return table_[a][b]; }
  Element inv(Element a) const { return inverse_[a]; }
  const std::vector<Element>& generators() const { return generators_; }
  const std::string& name() const { return name_; }
  Subset all() const { return order() == 64 ? ~Subset{0} : ((Subset{1} << order()) - 1); }

  /// Permutation of each element when the group came from permutations.
  const std::vector<std::vector<std::uint32_t>>& permutations() const { return perms_; }

  /// Subgroup generated by the given elements.
  Subset closure(const std::vector<Element>& gens) const;
  bool is_subgroup(Subset s) const;
  /// {a*g : a in s}.
  Subset right_mul(Subset s, Element g) const;

 private:
  std::vector<std::vector<Element>> table_;
  std::vector<Element> inverse_;
  std::vector<Element> generators_;
  std::vector<std::vector<std::uint32_t>> perms_;
  Element identity_ = 0;
  std::string name_;
};

struct Letter {
  std::uint32_t generator = 0;
  bool inverse = false;
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Reduced word of a free group.
class FreeWord {
 public:
  FreeWord() = default;
  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  FreeWord inverse() const;
  friend FreeWord operator*(const FreeWord& a, const FreeWord& b);
  friend bool operator==(const FreeWord&, const FreeWord&) = default;
  std::string to_string() const;

 private:
  friend FreeWord free_reduce(const std::vector<Letter>& w);
  std::vector<Letter> letters_;
};

FreeWord free_reduce(const std::vector<Letter>& w);

/// Epimorphism from the free group on the generator indices onto a group.
class Presentation {
 public:
  /// Throws DomainError when the images do not generate the group.
  Presentation(FiniteGroup group, std::vector<FiniteGroup::Element> images);
  const FiniteGroup& group() const { return *group_; }
  const std::vector<FiniteGroup::Element>& images() const { return images_; }

 private:
  std::shared_ptr<const FiniteGroup> group_;
  std::vector<FiniteGroup::Element> images_;
};

FiniteGroup::Element pr_apply(const Presentation& p, const FreeWord& w);

/// pr^{-1}(A) for a subset A of the group.
struct SymbolicCoset {
  Presentation presentation;
  FiniteGroup::Subset subset = 0;

  bool contains(const FreeWord& w) const;
};

/// pr^{-1}(A) * w = pr^{-1}(A * pr(w)).
SymbolicCoset coset_mul(const SymbolicCoset& s, const FreeWord& w);

/// Action of a finite group on 2^lambda through a designated finite set of
/// coordinates.
class GroupAction {
 public:
  enum class Rule { CoordinatePermutation, BitFlip };
  struct ChainStep {
    Ordinal from;               // level where this subgroup takes over
    FiniteGroup::Subset subgroup = 0;
  };

  /// Coordinate permutation: g sends the value at coords[i] to
  /// coords[perm_g(i)]. Requires a permutation group on coords.size() points.
  static GroupAction permute(FiniteGroup g, std::vector<Ordinal> coords);
  /// Bit flips: generator i toggles the coordinates in generator_masks[i];
  /// the mask of every element must be well defined.
  static GroupAction flip(FiniteGroup g, std::vector<Ordinal> coords, std::vector<std::uint64_t> generator_masks);

  const FiniteGroup& group() const { return group_; }
  Rule rule() const { return rule_; }
  const std::vector<Ordinal>& coordinates() const { return coords_; }
  const std::vector<std::uint64_t>& generator_masks() const { return gen_masks_; }

  Point act(FiniteGroup::Element g, const Point& x) const;
  /// Identity and compatibility on every carrier point; throws DomainError.
  void verify_on(const std::vector<Point>& carrier) const;

  /// Explicit chain schedule (nondecreasing, exhausting the group). Without
  /// one, the subgroup at level a is the stabilizer of the cut at a.
  void set_chain(std::vector<ChainStep> chain);
  const std::vector<ChainStep>& chain() const { return chain_; }
  FiniteGroup::Subset subgroup_at(const Ordinal& a) const;
  /// Levels where subgroup_at may change.
  std::vector<Ordinal> chain_criticals() const;

 private:
  GroupAction(FiniteGroup g, Rule r, std::vector<Ordinal> coords);
  bool preserves_cut(FiniteGroup::Element g, const Ordinal& a) const;

  FiniteGroup group_;
  Rule rule_;
  std::vector<Ordinal> coords_;
  std::vector<std::uint64_t> gen_masks_;
  std::vector<std::uint64_t> element_masks_;
  std::vector<ChainStep> chain_;
};

/// Witness g with g.x = y, if any.
std::optional<FiniteGroup::Element> orbit_decide(const GroupAction& act, const Point& x, const Point& y);

/// All bit words of length below `bound`, by length then lexicographically.
class CylinderEnumeration {
 public:
  explicit CylinderEnumeration(std::uint32_t bound);
  std::uint32_t bound() const { return bound_; }
  const std::vector<std::vector<Bit>>& words() const { return words_; }
  bool in_cylinder(const Point& x, std::size_t i) const;
  /// Throws DomainError("enumeration bound too small") when two distinct
  /// points agree below the bound.
  void require_separates(const std::vector<Point>& pts) const;

 private:
  std::uint32_t bound_;
  std::vector<std::vector<Bit>> words_;
};

using Trace = std::vector<FiniteGroup::Subset>;

/// Z_i(x) = {g : g.x in [w_i]} over the enumerated cylinders.
Trace red_ac1(const GroupAction& act, const CylinderEnumeration& en, const Point& x);
/// Some g with Z(x) = Z(y) * g.
std::optional<FiniteGroup::Element> ac1_criterion(const FiniteGroup& g, const Trace& zx, const Trace& zy);

/// Ordinal sequence over [0, lambda): at each limit a, the code of the
/// least point of {g.(x|a) : g in G_a}; 0 at successors.
OrdMap red_ac3_selector(const GroupAction& act, const Point& x, const Ordinal& lambda);

/// Composite ActionToE0 reduction: at each limit a, the code of the least
/// right translate of the Ac1 trace by G_a; 0 at successors.
OrdMap red_action_to_E0(const GroupAction& act, const CylinderEnumeration& en, const Point& x, const Ordinal& lambda);

/// All 2^|support| bit points over [0, lambda) supported in `support`.
std::vector<Point> supported_carrier(const std::vector<Ordinal>& support, const Ordinal& lambda);

}  // namespace gbs
