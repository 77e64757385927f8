#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gbs/borel.hpp"
#include "gbs/workbench.hpp"

namespace gbs {

struct LambdaStmt {
  Ordinal lambda;
  friend bool operator==(const LambdaStmt&, const LambdaStmt&) = default;
};
struct PointStmt {
  std::string name;
  Point point;
  friend bool operator==(const PointStmt&, const PointStmt&) = default;
};
struct CodeStmt {
  std::string name;
  BorelCode code;
  friend bool operator==(const CodeStmt& a, const CodeStmt& b) { return a.name == b.name && a.code == b.code; }
};
struct RelationStmt {
  std::string name;
  Relation relation;
  friend bool operator==(const RelationStmt&, const RelationStmt&) = default;
};
struct ActionStmt {
  std::string name;
  ActionSpec action;
  friend bool operator==(const ActionStmt&, const ActionStmt&) = default;
};
struct Carrier {
  std::optional<std::vector<Ordinal>> support;  // supported(...) form
  std::vector<Point> points;                    // points(...) form
  std::vector<Point> expand(const Ordinal& lambda) const;
  friend bool operator==(const Carrier&, const Carrier&) = default;
};
struct CarrierStmt {
  std::string name;
  Carrier carrier;
  friend bool operator==(const CarrierStmt&, const CarrierStmt&) = default;
};
struct ReductionStmt {
  std::string name;
  ReductionSpec spec;
  friend bool operator==(const ReductionStmt&, const ReductionStmt&) = default;
};
struct EvalStmt {
  BorelCode code;
  std::vector<Point> args;
  friend bool operator==(const EvalStmt& a, const EvalStmt& b) { return a.code == b.code && a.args == b.args; }
};
struct ApproxStmt {
  BorelCode code;
  std::vector<Point> args;
  friend bool operator==(const ApproxStmt& a, const ApproxStmt& b) { return a.code == b.code && a.args == b.args; }
};
struct OrbitStmt {
  ActionSpec action;
  Carrier carrier;
  std::uint32_t bound = 8;
  friend bool operator==(const OrbitStmt&, const OrbitStmt&) = default;
};

using Statement = std::variant<LambdaStmt, PointStmt, CodeStmt, RelationStmt, ActionStmt, CarrierStmt, ReductionStmt,
                               EvalStmt, ApproxStmt, OrbitStmt>;

struct WorkbenchSpec {
  std::vector<Statement> statements;

  /// The last lambda statement, if any.
  std::optional<Ordinal> lambda() const;
  template <class T>
  std::vector<const T*> all() const {
    std::vector<const T*> out;
    for (const auto& s : statements) {
      if (const auto* p = std::get_if<T>(&s)) out.push_back(p);
    }
    return out;
  }
  friend bool operator==(const WorkbenchSpec&, const WorkbenchSpec&) = default;
};

/// Throws ParseError with a 1-based line and column.
WorkbenchSpec parse_spec(const std::string& text);
std::string print_spec(const WorkbenchSpec& spec);

Ordinal parse_ordinal(const std::string& text);
/// A point expression ("bits{...}", "family(...) assign {...}", ...).
Point parse_point(const std::string& text);
Relation parse_relation(const std::string& text);

std::string print_ordinal(const Ordinal& a);
std::string print_point(const Point& x);
std::string print_code(const BorelCode& c);
std::string print_relation(const Relation& r);
std::string print_action(const ActionSpec& a);

/// A well-formed spec with `statements` random statements.
WorkbenchSpec random_spec(Rng& rng, std::size_t statements = 8);

}  // namespace gbs
