#include "gbs/relations.hpp"

#include <algorithm>

#include "gbs/error.hpp"

namespace gbs {

EqRelHandle EqRelHandle::id(SpaceDescriptor space) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Id;
  n->space = std::move(space);
  return EqRelHandle(std::move(n));
}

EqRelHandle EqRelHandle::e0(bool ordinal_values) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::E0;
  n->space = ordinal_values ? SpaceDescriptor::ords() : SpaceDescriptor::bits();
  return EqRelHandle(std::move(n));
}

EqRelHandle EqRelHandle::e1() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::E1;
  n->space = SpaceDescriptor::family_of(SpaceDescriptor::bits());
  return EqRelHandle(std::move(n));
}

EqRelHandle EqRelHandle::e1_approx(Ordinal level) {
  if (!level.is_limit()) throw DomainError("E1 approximation level must be a limit, got " + level.to_string());
  auto n = std::make_shared<Node>();
  n->kind = Kind::E1Approx;
  n->space = SpaceDescriptor::family_of(SpaceDescriptor::bits());
  n->level = std::move(level);
  return EqRelHandle(std::move(n));
}

EqRelHandle EqRelHandle::idplus() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::IdPlus;
  n->space = SpaceDescriptor::family_of(SpaceDescriptor::bits());
  return EqRelHandle(std::move(n));
}

EqRelHandle EqRelHandle::idplus_star() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::IdPlusStar;
  n->space = SpaceDescriptor::family_of(SpaceDescriptor::bits());
  return EqRelHandle(std::move(n));
}

EqRelHandle EqRelHandle::cub(CubParams params) {
  if (!(params.mu == Ordinal::omega())) throw DomainError("cub cofinality parameter must be w");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Cub;
  n->space = params.value_space == CubParams::ValueSpace::Binary ? SpaceDescriptor::bits() : SpaceDescriptor::ords();
  n->cub = params;
  return EqRelHandle(std::move(n));
}

EqRelHandle EqRelHandle::jump(EqRelHandle inner) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Jump;
  n->space = SpaceDescriptor::family_of(inner.space());
  n->children.push_back(std::move(inner));
  return EqRelHandle(std::move(n));
}

EqRelHandle EqRelHandle::join(std::vector<EqRelHandle> parts) {
  if (parts.empty()) throw DomainError("join of no relations");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Join;
  std::vector<SpaceDescriptor> spaces;
  for (const auto& p : parts) spaces.push_back(p.space());
  n->space = SpaceDescriptor::tagged_sum(std::move(spaces));
  n->children = std::move(parts);
  return EqRelHandle(std::move(n));
}

const Ordinal& EqRelHandle::level() const {
  if (kind() != Kind::E1Approx) throw DomainError("relation has no level");
  return node_->level;
}

const CubParams& EqRelHandle::cub_params() const {
  if (kind() != Kind::Cub) throw DomainError("relation has no cub parameters");
  return node_->cub;
}

const EqRelHandle& EqRelHandle::inner() const {
  if (kind() != Kind::Jump) throw DomainError("relation is not a jump");
  return node_->children.front();
}

const std::vector<EqRelHandle>& EqRelHandle::parts() const {
  if (kind() != Kind::Join) throw DomainError("relation is not a join");
  return node_->children;
}

std::string EqRelHandle::to_string() const {
  switch (kind()) {
    case Kind::Id: return "id(" + space().to_string() + ")";
    case Kind::E0: return space().kind() == SpaceDescriptor::Kind::Ords ? "E0(ords)" : "E0";
    case Kind::E1: return "E1";
    case Kind::E1Approx: return "E1[" + level().to_string() + "]";
    case Kind::IdPlus: return "idplus";
    case Kind::IdPlusStar: return "idplus_star";
    case Kind::Cub: {
      const auto& c = cub_params();
      return std::string("cub(") + (c.mode == CubParams::Mode::Literal ? "literal" : "structural") + "," +
             (c.value_space == CubParams::ValueSpace::Binary ? "bits" : "ords") + ")";
    }
    case Kind::Jump: return "jump(" + inner().to_string() + ")";
    case Kind::Join: {
      std::string out = "join(";
      for (std::size_t i = 0; i < parts().size(); ++i) {
        if (i) out += ',';
        out += parts()[i].to_string();
      }
      return out + ")";
    }
  }
  return "?";
}

namespace {

bool bounded(const BitMap& m) { return pm_support_analysis(m).bounded_by.has_value(); }

void require_family(const Point& x, const char* rel) {
  if (!x.is_family()) throw SpaceMismatch(std::string(rel) + " needs family points");
}

}  // namespace

BitMap component_diff(const Point& x, const Point& y) {
  require_family(x, "component_diff");
  require_family(y, "component_diff");
  const auto& cx = x.components();
  const auto& cy = y.components();
  std::vector<std::vector<Bit>> neq(cx.size(), std::vector<Bit>(cy.size(), 1));
  for (std::size_t i = 0; i < cx.size(); ++i) {
    for (std::size_t j = 0; j < cy.size(); ++j) neq[i][j] = cx[i] == cy[j] ? 0 : 1;
  }
  return pm_zip(x.assignment(), y.assignment(), [&](std::uint32_t i, std::uint32_t j) { return neq[i][j]; });
}

bool decide_E0(const Point& x, const Point& y) { return bounded(diff_map(x, y)); }

bool decide_E1(const Point& x, const Point& y, const std::optional<Ordinal>& level) {
  require_family(x, "E1");
  require_family(y, "E1");
  if (level) {
    if (!level->is_limit()) throw DomainError("E1 level must be a limit, got " + level->to_string());
    return bounded(component_diff(restrict_point(x, *level), restrict_point(y, *level)));
  }
  return bounded(component_diff(x, y));
}

bool decide_idplus(const Point& x, const Point& y) {
  require_family(x, "id+");
  require_family(y, "id+");
  return x.components() == y.components();
}

bool decide_idplus_star(const Point& x, const Point& y, ComponentMatching* witness) {
  if (!decide_idplus(x, y)) return false;
  ComponentMatching m;
  for (std::uint32_t i = 0; i < x.components().size(); ++i) {
    auto cx = pm_count(x.assignment(), i);
    auto cy = pm_count(y.assignment(), i);
    if (cx != cy) return false;
    m.pairs.push_back({i, i, cx});
  }
  if (witness) *witness = std::move(m);
  return true;
}

bool decide_cub(const CubParams& params, const Point& x, const Point& y) {
  const bool binary = params.value_space == CubParams::ValueSpace::Binary;
  if (binary ? !(x.is_bits() && y.is_bits()) : !(x.is_ords() && y.is_ords())) {
    throw SpaceMismatch(binary ? "binary cub relation needs bit sequences" : "ordinal cub relation needs ordinal sequences");
  }
  auto agree = diff_map(x, y).transform([](Bit b) { return static_cast<Bit>(1 - b); });
  auto s = pm_support_analysis(agree);
  if (params.mode == CubParams::Mode::Literal) return !s.bounded_by.has_value();
  return s.contains_final_limit_segment;
}

bool decide_jump(const EqRelHandle& inner, const Point& x, const Point& y) {
  require_family(x, "jump");
  require_family(y, "jump");
  const auto& cx = x.components();
  const auto& cy = y.components();
  std::vector<char> hit_y(cy.size(), 0);
  for (const auto& a : cx) {
    bool found = false;
    for (std::size_t j = 0; j < cy.size(); ++j) {
      if (decide(inner, a, cy[j])) {
        found = true;
        hit_y[j] = 1;
      }
    }
    if (!found) return false;
  }
  return std::all_of(hit_y.begin(), hit_y.end(), [](char c) { return c != 0; });
}

bool decide_join(const std::vector<EqRelHandle>& parts, const Point& x, const Point& y) {
  if (!x.is_tagged() || !y.is_tagged()) throw SpaceMismatch("join needs tagged points");
  if (!(x.tag() == y.tag())) return false;
  if (!x.tag().is_finite() || x.tag().to_uint() >= parts.size()) {
    throw SpaceMismatch("tag " + x.tag().to_string() + " has no part in the join");
  }
  return decide(parts[x.tag().to_uint()], x.payload(), y.payload());
}

bool decide(const EqRelHandle& e, const Point& x, const Point& y) {
  e.space().require(x, "left argument");
  e.space().require(y, "right argument");
  using K = EqRelHandle::Kind;
  switch (e.kind()) {
    case K::Id: return x == y;
    case K::E0: return decide_E0(x, y);
    case K::E1: return decide_E1(x, y);
    case K::E1Approx: return decide_E1(x, y, e.level());
    case K::IdPlus: return decide_idplus(x, y);
    case K::IdPlusStar: return decide_idplus_star(x, y);
    case K::Cub: return decide_cub(e.cub_params(), x, y);
    case K::Jump: return decide_jump(e.inner(), x, y);
    case K::Join: return decide_join(e.parts(), x, y);
  }
  throw Error("unreachable");
}

EqRelHandle make_tower(const EqRelHandle& base, const Ordinal& level, std::uint64_t join_width) {
  const Ordinal w2 = Ordinal::omega_power(1, 2);
  if (!(level < w2)) throw DomainError("tower level " + level.to_string() + " not below w*2");
  if (join_width == 0) throw DomainError("join width must be positive");
  EqRelHandle e = base;
  if (level >= Ordinal::omega()) {
    std::vector<EqRelHandle> parts;
    for (std::uint64_t k = 0; k < join_width; ++k) parts.push_back(make_tower(base, Ordinal::finite(k), join_width));
    e = EqRelHandle::join(std::move(parts));
  }
  for (std::uint64_t k = 0; k < level.finite_part(); ++k) e = EqRelHandle::jump(e);
  return e;
}

}  // namespace gbs
