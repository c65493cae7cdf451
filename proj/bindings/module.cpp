#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dml/cli.hpp"
#include "dml/codegen.hpp"
#include "dml/corpus.hpp"
#include "dml/dsl.hpp"
#include "dml/graph.hpp"
#include "dml/oo.hpp"
#include "dml/pushout.hpp"

namespace py = pybind11;
using namespace dml;

namespace {

py::dict member_dict(const Member& m) {
  py::dict out;
  out["name"] = m.name;
  out["kind"] = std::string(to_string(m.kind));
  out["signature"] = m.signature;
  out["is_generic"] = m.is_generic;
  return out;
}

py::dict violation_dict(const Violation& v) {
  py::dict out;
  out["rule"] = v.rule;
  out["entity"] = v.entity;
  out["detail"] = v.detail;
  return out;
}

py::dict pushout_dict(const PushoutResult& r) {
  py::dict out;
  out["vertex"] = r.vertex_spec.name;
  out["vertex_kind"] = std::string(to_string(r.vertex_spec.kind));
  py::dict members;
  for (const auto& [n, m] : r.vertex_spec.members) members[py::str(n)] = member_dict(m);
  out["members"] = members;
  py::dict provenance;
  for (const auto& [n, origins] : r.provenance) {
    py::list refs;
    for (const auto& o : origins)
      refs.append(py::make_tuple(o.side == Side::Left ? "left" : "right", o.member));
    provenance[py::str(n)] = refs;
  }
  out["provenance"] = provenance;
  out["left_coprojection"] = r.left_coproj.name;
  out["right_coprojection"] = r.right_coproj.name;
  return out;
}

Cone cone_from_decl(const Diagram& d, const std::string& name) {
  auto it = d.pushout_decls.find(name);
  if (it == d.pushout_decls.end()) throw UnknownEntity("no pushout declaration named '" + name + "'");
  const PushoutDecl& po = it->second;
  return Cone{Span{po.apex, po.left, po.right}, po.vertex, po.left_coproj, po.right_coproj};
}

Dialect dialect_from(const std::string& name) {
  if (name == "curly") return Dialect::Curly;
  if (name == "interface") return Dialect::Interface;
  throw UnsupportedConstruct("unknown dialect '" + name + "'");
}

Path path_from(const Diagram& d, const std::vector<std::string>& steps, const std::string& at) {
  if (steps.empty() && at.empty())
    throw InvalidDiagram("an empty path needs the specification it sits at");
  (void)d;
  return steps.empty() ? Path::identity(at) : Path{steps, {}};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Categorical diagram engine: specifications, morphisms, pushouts, "
            "code skeletons and DOT renderings.";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      std::string msg = "line " + std::to_string(e.location().line) + ", column " +
                        std::to_string(e.location().column) + ": " + e.what();
      PyErr_SetString(PyExc_ValueError, msg.c_str());
    } catch (const ValidationError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const Error& e) {
      std::string msg = e.code() + ": " + e.what();
      PyErr_SetString(PyExc_RuntimeError, msg.c_str());
    }
  });

  py::class_<Diagram>(m, "Diagram")
      .def(py::init<>())
      .def_property_readonly("specifications",
                             [](const Diagram& d) {
                               std::vector<std::string> out;
                               for (const auto& [n, _] : d.specifications) out.push_back(n);
                               return out;
                             })
      .def_property_readonly("morphisms",
                             [](const Diagram& d) {
                               std::vector<std::string> out;
                               for (const auto& [n, _] : d.morphisms) out.push_back(n);
                               return out;
                             })
      .def_property_readonly("pushouts",
                             [](const Diagram& d) {
                               std::vector<std::string> out;
                               for (const auto& [n, _] : d.pushout_decls) out.push_back(n);
                               return out;
                             })
      .def_property_readonly("equations",
                             [](const Diagram& d) {
                               std::vector<std::string> out;
                               for (const auto& eq : d.equations)
                                 out.push_back(eq.lhs.render() + " = " + eq.rhs.render());
                               return out;
                             })
      .def("members",
           [](const Diagram& d, const std::string& spec) {
             py::list out;
             for (const auto& [_, m] : d.spec(spec).members) out.append(member_dict(m));
             return out;
           })
      .def("spec_kind",
           [](const Diagram& d, const std::string& spec) {
             return std::string(to_string(d.spec(spec).kind));
           })
      .def("morphism",
           [](const Diagram& d, const std::string& name) {
             const Morphism& mo = d.morphism(name);
             py::dict out;
             out["name"] = mo.name;
             out["source"] = mo.source;
             out["target"] = mo.target;
             out["kind"] = std::string(to_string(mo.kind));
             py::dict mapping;
             for (const auto& [from, expr] : mo.mapping) mapping[py::str(from)] = expr.render();
             out["mapping"] = mapping;
             return out;
           })
      .def("__repr__", [](const Diagram& d) {
        return "<dml.Diagram: " + std::to_string(d.specifications.size()) + " specifications, " +
               std::to_string(d.morphisms.size()) + " morphisms>";
      });

  m.def("parse", [](const std::string& text) { return parse(text); },
        "Parse a .dml document into a validated diagram.");
  m.def("serialize", [](const Diagram& d) { return serialize(d); },
        "Canonical textual form of a diagram.");
  m.def("validate", [](const Diagram& d) {
    py::list out;
    for (const auto& v : validate_diagram(d)) out.append(violation_dict(v));
    return out;
  });

  m.def(
      "compute_pushout",
      [](const Diagram& d, const std::string& apex, const std::string& left,
         const std::string& right, const std::string& vertex, bool qualify_all) {
        PushoutResult r = compute_pushout(d, Span{apex, left, right}, vertex,
                                          qualify_all ? NamingPolicy::AlwaysQualified
                                                      : NamingPolicy::PreferShared);
        return py::make_tuple(pushout_dict(r), with_pushout(d, r));
      },
      py::arg("diagram"), py::arg("apex"), py::arg("left"), py::arg("right"), py::arg("vertex"),
      py::arg("qualify_all") = false,
      "Compute the pushout of a span; returns (info, extended diagram).");

  m.def("verify_pushout", [](const Diagram& d, const std::string& name) {
    Cone cone = cone_from_decl(d, name);
    PushoutCheck check = is_pushout(d, cone);
    py::dict out;
    out["ok"] = check.ok;
    out["certificate"] = std::string(to_string(check.certificate.kind));
    out["detail"] = check.certificate.detail;
    if (check.certificate.kind == Certificate::Kind::MergedPair)
      out["witness"] = py::make_tuple(check.certificate.witness_pair.first,
                                      check.certificate.witness_pair.second);
    else if (!check.certificate.witness_member.empty())
      out["witness"] = check.certificate.witness_member;
    return out;
  });

  m.def("classify", [](const Diagram& d, const std::string& name) {
    PushoutResult r = pushout_result_of(d, cone_from_decl(d, name));
    PushoutPattern pattern = classify_pushout(d, r);
    py::dict out;
    out["tag"] = std::string(to_string(pattern.tag));
    out["bindings"] = pattern.bindings;
    return out;
  });

  m.def(
      "template_instantiate",
      [](const Diagram& d, const std::string& generic, const std::string& param,
         const std::string& actual, const std::string& result_name) {
        ConstructionResult c = template_instantiate(d, generic, param, actual, result_name);
        return py::make_tuple(pushout_dict(c.pushout), c.apply(d));
      },
      py::arg("diagram"), py::arg("generic"), py::arg("param"), py::arg("actual"),
      py::arg("result_name"));

  m.def(
      "instantiate_object",
      [](const Diagram& d, const std::string& cls, const std::string& obj_name,
         const std::vector<std::pair<std::string, std::string>>& args) {
        std::vector<CtorArg> ctor_args;
        for (const auto& [literal, sort] : args) ctor_args.push_back({literal, sort});
        ConstructionResult c = instantiate_object(d, cls, obj_name, ctor_args);
        return py::make_tuple(pushout_dict(c.pushout), c.apply(d));
      },
      py::arg("diagram"), py::arg("cls"), py::arg("obj_name"),
      py::arg("args") = std::vector<std::pair<std::string, std::string>>{});

  m.def(
      "polymorphism_apply",
      [](const Diagram& d, const std::string& abstract_name, const std::string& extension,
         const std::string& derived, const std::string& result_name) {
        ConstructionResult c = polymorphism_apply(d, abstract_name, extension, derived, result_name);
        return py::make_tuple(pushout_dict(c.pushout), c.apply(d));
      },
      py::arg("diagram"), py::arg("abstract_spec"), py::arg("extension"), py::arg("derived"),
      py::arg("result_name"));

  m.def(
      "paths_equal",
      [](const Diagram& d, const std::vector<std::string>& lhs, const std::vector<std::string>& rhs,
         int depth, const std::string& at) {
        PathEquality pe = paths_equal(d, path_from(d, lhs, at), path_from(d, rhs, at), depth);
        switch (pe.verdict) {
          case Ternary::Equal: return std::string("equal");
          case Ternary::Unequal: return "unequal:" + pe.certificate_member;
          default: return std::string("unknown");
        }
      },
      py::arg("diagram"), py::arg("lhs"), py::arg("rhs"), py::arg("depth") = 8, py::arg("at") = "");

  m.def("emit_skeleton", [](const Diagram& d, const std::string& dialect) {
    py::list out;
    for (const auto& u : emit_skeleton(d, dialect_from(dialect)))
      out.append(py::make_tuple(u.spec_name, u.text));
    return out;
  });

  m.def("emit_dot",
        [](const Diagram& d) { return emit_dot_marked(d, declared_coprojections(d)); });

  m.def("corpus", [] {
    py::dict out;
    for (const auto& e : corpus::entries())
      out[py::str(std::string(e.name))] = std::string(e.text);
    return out;
  });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    cli::CommandResult r = cli::run(args);
    return py::make_tuple(r.exit_code, r.report, r.machine_report);
  });
}
