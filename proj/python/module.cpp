#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gbs/borel.hpp"
#include "gbs/cli.hpp"
#include "gbs/dsl.hpp"
#include "gbs/error.hpp"
#include "gbs/relations.hpp"
#include "gbs/workbench.hpp"

namespace py = pybind11;
using namespace gbs;

namespace {

const char* kind_name(Point::Kind k) {
  switch (k) {
    case Point::Kind::Bits: return "bits";
    case Point::Kind::OrdVals: return "ords";
    case Point::Kind::Family: return "family";
    case Point::Kind::Tagged: return "tagged";
  }
  return "?";
}

BorelCode code_from_text(const std::string& text) {
  const auto spec = parse_spec("code c = " + text + ";");
  return spec.all<CodeStmt>().front()->code;
}

Ordinal to_ordinal(const py::handle& h) {
  if (py::isinstance<Ordinal>(h)) return h.cast<Ordinal>();
  if (py::isinstance<py::int_>(h)) {
    const auto v = h.cast<long long>();
    if (v < 0) throw DomainError("ordinals are nonnegative");
    return Ordinal::finite(static_cast<std::uint64_t>(v));
  }
  return parse_ordinal(py::str(h).cast<std::string>());
}

py::dict report_dict(const std::string& name, const Report& r) {
  py::dict d;
  d["name"] = name;
  d["verdict"] = verdict_name(r.verdict);
  d["checked"] = r.checked;
  d["failed"] = r.failed;
  d["seed"] = r.seed;
  d["lambda"] = r.lambda.to_string();
  d["elapsedMs"] = r.elapsed_ms;
  if (r.counterexample) {
    py::dict c;
    c["x"] = print_point(r.counterexample->x);
    c["y"] = print_point(r.counterexample->y);
    c["sourceRelated"] = r.counterexample->source_related;
    c["targetRelated"] = r.counterexample->target_related;
    d["counterexample"] = c;
  }
  if (!r.message.empty()) d["message"] = r.message;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core bindings of the workbench";

  auto base = py::register_exception<Error>(m, "GbsError");
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<SpaceMismatch>(m, "SpaceMismatch", base);

  py::class_<Ordinal>(m, "Ordinal")
      .def(py::init([](const py::object& v) { return to_ordinal(v); }), py::arg("value") = 0)
      .def_property_readonly("terms",
                             [](const Ordinal& a) {
                               std::vector<std::pair<std::uint32_t, std::uint64_t>> out;
                               for (const auto& t : a.terms()) out.emplace_back(t.exponent, t.coefficient);
                               return out;
                             })
      .def("is_limit", &Ordinal::is_limit)
      .def("is_successor", &Ordinal::is_successor)
      .def("is_finite", &Ordinal::is_finite)
      .def("finite_part", &Ordinal::finite_part)
      .def("limit_part", &Ordinal::limit_part)
      .def("__add__", [](const Ordinal& a, const py::object& b) { return a + to_ordinal(b); })
      .def(py::self == py::self)
      .def(py::self < py::self)
      .def(py::self <= py::self)
      .def(py::self > py::self)
      .def(py::self >= py::self)
      .def("__hash__", [](const Ordinal& a) { return hash_value(a); })
      .def("__str__", &Ordinal::to_string)
      .def("__repr__", [](const Ordinal& a) { return "Ordinal('" + a.to_string() + "')"; });

  py::class_<Point>(m, "Point")
      .def_property_readonly("kind", [](const Point& x) { return kind_name(x.kind()); })
      .def_property_readonly("domain_bound", &Point::domain_bound)
      .def_property_readonly("key", &Point::key)
      .def_property_readonly("components", [](const Point& x) { return x.components(); })
      .def("at",
           [](const Point& x, const py::object& a) -> py::object {
             const auto o = to_ordinal(a);
             if (x.is_bits()) return py::int_(x.as_bits().at(o));
             if (x.is_ords()) return py::cast(x.as_ords().at(o));
             if (x.is_family()) return py::cast(x.component_at(o));
             throw DomainError("tagged points have no positions");
           })
      .def("restrict", [](const Point& x, const py::object& a) { return restrict_point(x, to_ordinal(a)); })
      .def(py::self == py::self)
      .def("__hash__", [](const Point& x) { return std::hash<std::string>{}(x.key()); })
      .def("__str__", [](const Point& x) { return print_point(x); })
      .def("__repr__", [](const Point& x) { return "parse_point('" + print_point(x) + "')"; });

  py::class_<Relation>(m, "Relation")
      .def("decide", &Relation::decide, py::arg("x"), py::arg("y"))
      .def_property_readonly("space", [](const Relation& r) { return r.space().to_string(); })
      .def("__str__", &Relation::to_string)
      .def(py::self == py::self);

  py::class_<WorkbenchSpec>(m, "Spec")
      .def("print", [](const WorkbenchSpec& s) { return print_spec(s); })
      .def("__len__", [](const WorkbenchSpec& s) { return s.statements.size(); })
      .def_property_readonly("lambda_",
                             [](const WorkbenchSpec& s) -> py::object {
                               if (auto l = s.lambda()) return py::cast(*l);
                               return py::none();
                             })
      .def(py::self == py::self)
      .def("__str__", [](const WorkbenchSpec& s) { return print_spec(s); });

  m.def("parse_ordinal", &parse_ordinal, py::arg("text"));
  m.def("parse_point", &parse_point, py::arg("text"));
  m.def("parse_relation", &parse_relation, py::arg("text"));
  m.def("parse_spec", &parse_spec, py::arg("text"));

  m.def(
      "decide", [](const std::string& rel, const Point& x, const Point& y) { return parse_relation(rel).decide(x, y); },
      py::arg("relation"), py::arg("x"), py::arg("y"));

  m.def("red_E1_to_E0", [](const Point& x) { return Point::ords(red_E1_to_E0(x)); }, py::arg("x"));
  m.def("red_E0_to_E1", &red_E0_to_E1, py::arg("eta"));
  m.def(
      "red_E0_to_idplus",
      [](const std::vector<py::object>& support, const Point& eta) {
        std::vector<Ordinal> s;
        for (const auto& o : support) s.push_back(to_ordinal(o));
        return red_E0_to_idplus(s, eta);
      },
      py::arg("support"), py::arg("eta"));

  m.def(
      "game_member",
      [](const std::string& code, const Point& x, std::optional<Point> y) {
        const auto c = code_from_text(code);
        const auto r = game_member(c, x, y ? &*y : nullptr);
        py::dict d;
        d["member"] = r.member;
        d["winner"] = r.strategy.player_two ? "II" : "I";
        d["strategy_verified"] = strategy_wins(c, r, x, y ? &*y : nullptr);
        return d;
      },
      py::arg("code"), py::arg("x"), py::arg("y") = py::none(),
      "Solve the membership game of a code given in the DSL ('single bits {...}').");

  m.def(
      "approx_lemma_check",
      [](const std::string& code, const Point& x, std::optional<Point> y, std::uint64_t grid_depth) {
        const auto r = approx_lemma_check(code_from_text(code), x, y ? &*y : nullptr, grid_depth);
        py::dict d;
        d["member"] = r.member;
        d["closure_bound"] = r.closure_bound.to_string();
        d["stable"] = r.stable;
        d["levels_checked"] = r.levels_checked;
        return d;
      },
      py::arg("code"), py::arg("x"), py::arg("y") = py::none(), py::arg("grid_depth") = 20);

  m.def(
      "jump_tower", [](const py::object& level) { return make_tower(EqRelHandle::id(SpaceDescriptor::bits()), to_ordinal(level)).to_string(); },
      py::arg("level"));

  m.def(
      "verify_reduction",
      [](const std::string& spec_text, std::uint64_t seed, std::optional<std::string> lambda) {
        const auto spec = parse_spec(spec_text);
        WorkbenchConfig cfg;
        cfg.seed = seed;
        if (auto l = spec.lambda()) cfg.lambda = *l;
        if (lambda) cfg.lambda = parse_ordinal(*lambda);
        py::list out;
        for (const auto* r : spec.all<ReductionStmt>()) {
          Report rep;
          {
            py::gil_scoped_release release;
            rep = verify_reduction(r->spec, cfg);
          }
          out.append(report_dict(r->name, rep));
        }
        return out;
      },
      py::arg("spec"), py::arg("seed") = 1, py::arg("lambda_") = py::none());

  m.def(
      "run_command",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_command(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the gbs command line; returns (exit_code, stdout, stderr).");
}
