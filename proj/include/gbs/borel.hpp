#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gbs/point.hpp"

namespace gbs {

/// Where a leaf atom looks: one side of the argument pair, then a path of
/// component and payload steps.
struct Address {
  enum class Side { Single, Left, Right };
  struct Step {
    enum class Kind { Component, Payload };
    Kind kind = Kind::Component;
    Ordinal index;
    friend bool operator==(const Step&, const Step&) = default;
  };
  Side side = Side::Single;
  std::vector<Step> path;

  friend bool operator==(const Address&, const Address&) = default;
  /// Largest component index + 1 on the path.
  Ordinal index_bound() const;
};

/// One conjunct of a leaf condition. Words are indices into the code's
/// word table.
struct Atom {
  enum class Kind {
    Segment,      // word[a] is an initial segment of A
    PairSegment,  // (word[a] < A) iff (word[b] < B)
    Tag,          // A carries tag
    PairTag,      // (A tagged t) iff (B tagged t)
  };
  Kind kind = Kind::Segment;
  Address a;
  Address b;
  std::uint32_t word_a = 0;
  std::uint32_t word_b = 0;
  Ordinal tag;
  bool negate = false;

  friend bool operator==(const Atom&, const Atom&) = default;
};

using LeafCondition = std::vector<Atom>;

struct CodeNode {
  Ordinal entry;                      // last coordinate of the node's sequence
  std::vector<std::uint32_t> children;  // ascending by entry
  std::optional<LeafCondition> label;   // leaves only; absent means II loses
  std::uint32_t depth = 0;

  bool is_leaf() const { return children.empty(); }
};

/// Finite game tree with leaf conditions. Player I moves at even depth.
class BorelCode {
 public:
  BorelCode() = default;
  /// `pair` codes take two arguments addressed by the Left and Right sides.
  BorelCode(SpaceDescriptor space, bool pair);

  const SpaceDescriptor& space() const { return space_; }
  bool is_pair() const { return pair_; }
  const std::vector<CodeNode>& nodes() const { return nodes_; }
  const CodeNode& node(std::uint32_t i) const { return nodes_.at(i); }
  const std::vector<FiniteWord>& words() const { return words_; }

  std::uint32_t add_word(const FiniteWord& w);
  /// Appends a child with the given entry; entries under one parent must be distinct.
  std::uint32_t add_child(std::uint32_t parent, const Ordinal& entry);
  void set_label(std::uint32_t leaf, LeafCondition cond);

  /// Max of (entry + 1) over nodes and position bounds over labels.
  Ordinal content_bound() const;
  Ordinal position_bound(const LeafCondition& c) const;

  /// Checks structural invariants; throws DomainError.
  void validate() const;

  friend bool operator==(const BorelCode&, const BorelCode&);

 private:
  friend BorelCode code_restrict(const BorelCode& code, const Ordinal& a);
  SpaceDescriptor space_;
  bool pair_ = false;
  std::vector<CodeNode> nodes_{CodeNode{}};
  std::vector<FiniteWord> words_;
};

bool operator==(const CodeNode& a, const CodeNode& b);

/// Chosen child per node owned by the winner (-1 elsewhere).
struct Strategy {
  bool player_two = true;
  std::vector<std::int32_t> choice;
};

struct GameResult {
  bool member = false;
  Strategy strategy;
};

GameResult game_member(const BorelCode& code, const Point& x, const Point* y = nullptr);
inline GameResult game_member(const BorelCode& code, const Point& x, const Point& y) { return game_member(code, x, &y); }

/// Replays the strategy against every opposing line of play.
bool strategy_wins(const BorelCode& code, const GameResult& r, const Point& x, const Point* y = nullptr);

/// Whether the atom conjunction holds (independent of the tree).
bool leaf_satisfied(const BorelCode& code, const LeafCondition& cond, const Point& x, const Point* y);

BorelCode code_restrict(const BorelCode& code, const Ordinal& a);
bool is_good(const BorelCode& code, const Ordinal& a);

struct ApproxReport {
  bool member = false;
  Ordinal closure_bound;
  bool stable = true;
  std::size_t levels_checked = 0;
  std::optional<Ordinal> first_unstable;
};

/// Checks membership of restrictions at good limits w*q (q <= grid_depth)
/// above the closure bound and below the argument domain.
ApproxReport approx_lemma_check(const BorelCode& code, const Point& x, const Point* y, std::uint64_t grid_depth);

/// Arguments with their restrictions to w*q precomputed, for checking many codes on the same points.
struct ApproxProbe {
  ApproxProbe(const Point& x, const Point* y, std::uint64_t grid_depth);
  Point x;
  std::optional<Point> y;
  std::vector<Point> xs, ys;  // restriction to w*(i+1)
};

ApproxReport approx_lemma_check(const BorelCode& code, const ApproxProbe& probe);

/// Words and component indices a class-S code ranges over.
struct CodeBasis {
  std::vector<FiniteWord> words;
  std::vector<Ordinal> indices;
};

/// All finite words of length below n.
CodeBasis basis_all_words_below(std::uint32_t n);
/// Words x|D for every bit point x occurring anywhere in the universe and
/// D the next and second-next limits above its piece boundaries; indices
/// are first occurrences of each component of every family.
CodeBasis basis_for_universe(const std::vector<Point>& universe, const Ordinal& lambda);

BorelCode code_id(const CodeBasis& basis, const SpaceDescriptor& space = SpaceDescriptor::bits());
BorelCode code_jump(const BorelCode& inner, const CodeBasis& basis);
BorelCode code_join(const std::vector<BorelCode>& parts);

struct EqRelCheck {
  bool ok = true;
  std::string failure;  // "reflexivity", "symmetry" or "transitivity"
  std::vector<std::size_t> witness;  // sample indices
};

/// Reflexivity, symmetry and transitivity of the level-a denotation on the
/// first `budget` sample points (restricted to a).
EqRelCheck is_eqrel_on_approx(const BorelCode& code, const Ordinal& a, const std::vector<Point>& samples,
                              std::size_t budget = 16);

/// Content-addressed code of the open-key least member of the level-a class
/// of x|a among pool|a. Throws DomainError when a is not a good limit or the
/// level-a denotation is not an equivalence relation on the pool.
std::uint64_t class_code(const BorelCode& code, const Ordinal& a, const Point& x, const std::vector<Point>& pool);

/// Levels where restrictions of x may change shape.
std::vector<Ordinal> deep_boundaries(const Point& x);

/// f_x for every x in the pool: class codes at good limits where the
/// restriction is an equivalence relation on the pool, 0 elsewhere.
std::vector<OrdMap> red_S_to_cub(const BorelCode& code, const std::vector<Point>& pool, const Ordinal& lambda);

}  // namespace gbs
