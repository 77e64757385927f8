#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gbs/group.hpp"
#include "gbs/point.hpp"
#include "gbs/relations.hpp"

namespace gbs {

struct WorkbenchConfig {
  Ordinal lambda = Ordinal::omega_power(2);
  std::uint32_t word_bound = 8;  // cylinder enumeration bound
  std::uint64_t sample_count = 200;
  std::uint64_t seed = 1;
  std::uint64_t grid_depth = 20;

  /// Throws DomainError unless lambda is w^2*m and the bound fits.
  void validate() const;
};

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Reductions spanning modules.

/// At a limit a: code of the E1^a-class of the limit-spread family x|a (tail
/// germ of the last block together with the component at its limit); 0 at
/// successors.
OrdMap red_E1_to_E0(const Point& x);
/// Same without the limit component: blind to cofinal limit-only changes.
OrdMap red_E1_to_E0_unadapted(const Point& x);
/// Component alpha is the constant sequence eta(alpha).
Point red_E0_to_E1(const Point& eta);
/// Components xor_prefix(p, eta) for p supported on S, listed on the first
/// 2^|S| indices, then the first one repeated.
Point red_E0_to_idplus(const std::vector<Ordinal>& support, const Point& eta, std::size_t max_support = 8);

/// True when x and y agree at every position outside S.
bool agree_off(const std::vector<Ordinal>& support, const Point& x, const Point& y);

// ---------------------------------------------------------------------------
// Relations, maps and generators for the harness.

struct ActionSpec {
  enum class GroupKind { Cyclic, Symmetric, Permutations };
  GroupKind group = GroupKind::Cyclic;
  std::uint32_t order = 2;  // n for cyclic, k for symmetric
  std::vector<std::vector<std::uint32_t>> generators;
  GroupAction::Rule rule = GroupAction::Rule::CoordinatePermutation;
  std::vector<Ordinal> coords;
  std::vector<std::uint64_t> masks;

  GroupAction build() const;
  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

class Relation {
 public:
  enum class Kind { Handle, AgreeOff, Orbit };

  static Relation handle(EqRelHandle h);
  static Relation agree_off(std::vector<Ordinal> support);
  static Relation orbit(ActionSpec action);

  Kind kind() const { return kind_; }
  const EqRelHandle& handle() const;
  const std::vector<Ordinal>& support() const { return support_; }
  const ActionSpec& action() const;
  SpaceDescriptor space() const;
  bool decide(const Point& x, const Point& y) const;
  std::string to_string() const;

  friend bool operator==(const Relation& a, const Relation& b) { return a.to_string() == b.to_string(); }

 private:
  Kind kind_ = Kind::Handle;
  std::optional<EqRelHandle> handle_;
  std::vector<Ordinal> support_;
  std::optional<ActionSpec> action_;
  std::shared_ptr<const GroupAction> built_;
};

struct ReductionMap {
  enum class Kind { E1ToE0, E1ToE0Unadapted, E0ToE1, E0ToIdPlus, E0ToIdPlusDrop, Constant, ActionToE0 };
  Kind kind = Kind::E1ToE0;
  std::vector<Ordinal> support;        // E0ToIdPlus*
  std::optional<ActionSpec> action;    // ActionToE0
  std::uint32_t enumeration_bound = 8;  // ActionToE0

  static std::optional<Kind> kind_from_name(const std::string& name);
  static std::string name_of(Kind k);
  SpaceDescriptor input_space() const;
  SpaceDescriptor output_space() const;
  Point apply(const Point& x, const WorkbenchConfig& cfg) const;
  friend bool operator==(const ReductionMap&, const ReductionMap&) = default;
};

struct GeneratorPolicy {
  enum class Kind { Exhaustive, Sampled, Constructed };
  Kind kind = Kind::Constructed;
  std::uint64_t count = 0;        // Exhaustive: sampled seeds, Sampled: pairs
  std::uint64_t equivalent = 0;   // Constructed
  std::uint64_t inequivalent = 0;  // Constructed
  friend bool operator==(const GeneratorPolicy&, const GeneratorPolicy&) = default;
};

struct ReductionSpec {
  Relation source = Relation::handle(EqRelHandle::e0());
  Relation target = Relation::handle(EqRelHandle::e0());
  ReductionMap map;
  GeneratorPolicy generator;
  friend bool operator==(const ReductionSpec&, const ReductionSpec&) = default;
};

struct Counterexample {
  Point x;
  Point y;
  bool source_related = false;
  bool target_related = false;
};

struct Report {
  enum class Verdict { Pass, Fail, InputError };
  Verdict verdict = Verdict::Pass;
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
  std::uint64_t equivalent_pairs = 0;
  std::uint64_t inequivalent_pairs = 0;
  std::optional<Counterexample> counterexample;
  std::uint64_t seed = 0;
  Ordinal lambda;
  double elapsed_ms = 0;
  std::string message;
};

std::string verdict_name(Report::Verdict v);

/// Random point of the given space over [0, lambda).
Point random_point(const SpaceDescriptor& s, Rng& rng, const Ordinal& lambda);
/// Some y with x E y, obtained by an edit that preserves the relation.
Point equivalent_edit(const EqRelHandle& e, const Point& x, Rng& rng);
/// Candidate y likely inequivalent to x; callers verify with the decider.
Point inequivalent_candidate(const EqRelHandle& e, const Point& x, Rng& rng);

/// Pairs for a source relation; throws InputError-style DomainError on
/// generator exhaustion.
struct GeneratedPair {
  Point x;
  Point y;
  bool constructed_equivalent = false;
};
std::vector<GeneratedPair> generate_pairs(const Relation& source, const GeneratorPolicy& g, const WorkbenchConfig& cfg,
                                          Rng& rng);

/// Greedy simplification of a pair keeping `fails` true.
std::pair<Point, Point> shrink_pair(const Point& x, const Point& y,
                                    const std::function<bool(const Point&, const Point&)>& fails,
                                    std::size_t max_steps = 400);
/// One-step simplifications of a point (fewer pieces, shorter words,
/// smaller ordinals, fewer components).
std::vector<Point> shrink_candidates(const Point& x);

Report verify_reduction(const ReductionSpec& spec, const WorkbenchConfig& cfg);

}  // namespace gbs
