#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gbs/point.hpp"

namespace gbs {

struct CubParams {
  enum class ValueSpace { Binary, Ordinal };
  enum class Mode { Literal, Structural };
  /// Cofinality of the limits the cub must be closed under; always w here.
  Ordinal mu = Ordinal::omega();
  ValueSpace value_space = ValueSpace::Binary;
  Mode mode = Mode::Structural;

  friend bool operator==(const CubParams&, const CubParams&) = default;
};

/// Descriptor of a catalog relation together with its space.
class EqRelHandle {
 public:
  enum class Kind { Id, E0, E1, E1Approx, IdPlus, IdPlusStar, Cub, Jump, Join };

  static EqRelHandle id(SpaceDescriptor space);
  static EqRelHandle e0(bool ordinal_values = false);
  static EqRelHandle e1();
  static EqRelHandle e1_approx(Ordinal level);
  static EqRelHandle idplus();
  static EqRelHandle idplus_star();
  static EqRelHandle cub(CubParams params);
  static EqRelHandle jump(EqRelHandle inner);
  static EqRelHandle join(std::vector<EqRelHandle> parts);

  Kind kind() const { return node_->kind; }
  const SpaceDescriptor& space() const { return node_->space; }
  const Ordinal& level() const;
  const CubParams& cub_params() const;
  const EqRelHandle& inner() const;
  const std::vector<EqRelHandle>& parts() const;

  /// Text form accepted by the relation grammar, e.g. "jump(id(bits))".
  std::string to_string() const;

  friend bool operator==(const EqRelHandle& a, const EqRelHandle& b) { return a.to_string() == b.to_string(); }

 private:
  struct Node {
    Kind kind = Kind::Id;
    SpaceDescriptor space;
    Ordinal level;
    CubParams cub;
    std::vector<EqRelHandle> children;
  };
  explicit EqRelHandle(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Witness for id+* built from cardinality classes of index sets.
struct ComponentMatching {
  struct Pair {
    std::uint32_t x_component = 0;
    std::uint32_t y_component = 0;
    /// Size of both index sets; nullopt when infinite.
    std::optional<std::uint64_t> cardinality;
  };
  std::vector<Pair> pairs;
};

bool decide(const EqRelHandle& e, const Point& x, const Point& y);

bool decide_E0(const Point& x, const Point& y);
/// Eventual componentwise equality; with a level, both families are first
/// restricted to it.
bool decide_E1(const Point& x, const Point& y, const std::optional<Ordinal>& level = std::nullopt);
bool decide_idplus(const Point& x, const Point& y);
bool decide_idplus_star(const Point& x, const Point& y, ComponentMatching* witness = nullptr);
bool decide_cub(const CubParams& params, const Point& x, const Point& y);
bool decide_jump(const EqRelHandle& inner, const Point& x, const Point& y);
bool decide_join(const std::vector<EqRelHandle>& parts, const Point& x, const Point& y);

/// Indicator of {a : x_a != y_a} for two families over the same domain.
BitMap component_diff(const Point& x, const Point& y);

inline constexpr std::uint64_t kDefaultJoinWidth = 4;

/// Jump tower over `base` for levels below w*2. Level w joins the finite
/// levels 0 .. join_width-1.
EqRelHandle make_tower(const EqRelHandle& base, const Ordinal& level, std::uint64_t join_width = kDefaultJoinWidth);

}  // namespace gbs
