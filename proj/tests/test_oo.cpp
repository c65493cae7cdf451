#include "dml/oo.hpp"

#include "doctest.h"
#include "dml/corpus.hpp"
#include "dml/dsl.hpp"
#include "support.hpp"

using namespace dml;

namespace {

Member method(const std::string& name, std::vector<std::string> sig = {}) {
  return {name, MemberKind::Method, std::move(sig), false};
}

Member pure(const std::string& name, std::vector<std::string> sig = {}) {
  return {name, MemberKind::PureVirtualMethod, std::move(sig), false};
}

Specification make_spec(const std::string& name, std::vector<Member> members,
                        SpecKind kind = SpecKind::Class) {
  Specification s{name, kind, {}, {}};
  for (auto& m : members) s.add_member(std::move(m));
  return s;
}

Diagram corpus_diagram(std::string_view name) {
  auto text = corpus::find(name);
  REQUIRE(text);
  return parse(*text);
}

Cone corpus_cone(const Diagram& d, const std::string& decl_name) {
  const PushoutDecl& po = d.pushout_decls.at(decl_name);
  return Cone{Span{po.apex, po.left, po.right}, po.vertex, po.left_coproj, po.right_coproj};
}

// The template-passing setup: formal parameter X requiring g, generic T
// over X, actual class A.
Diagram template_setup() {
  Diagram d;
  d.add_spec(make_spec("X", {method("g")}, SpecKind::TypeParameter));
  Specification t = make_spec("T", {method("f", {"X"}), method("g")}, SpecKind::GenericClass);
  t.type_params = {"X"};
  d.add_spec(t);
  d.add_spec(make_spec("A", {method("g")}));
  return d;
}

}  // namespace

TEST_CASE("classification recognizes the corpus squares") {
  struct Case {
    std::string_view corpus;
    std::string decl;
    PatternTag expected;
  };
  for (const Case& c : {Case{"virtual_inheritance", "z_square", PatternTag::VirtualInheritance},
                        Case{"template", "ta_square", PatternTag::TemplateParameterPassing},
                        Case{"polymorphism", "poly_square", PatternTag::Polymorphism},
                        Case{"linbox_copy", "f2_square", PatternTag::ObjectInstantiation},
                        Case{"linbox_copy", "e2_square", PatternTag::ObjectInstantiation},
                        Case{"linbox_copy", "envelope_square", PatternTag::TemplateParameterPassing},
                        Case{"linbox_copy", "archetype_cone", PatternTag::ObjectInstantiation}}) {
    Diagram d = corpus_diagram(c.corpus);
    PushoutResult r = pushout_result_of(d, corpus_cone(d, c.decl));
    PushoutPattern pattern = classify_pushout(d, r);
    CHECK(pattern.tag == c.expected);
    CHECK(pattern.bindings.at("vertex") == r.cone.vertex);
    CHECK(pattern.bindings.at("gluing-point") == r.cone.base.apex);
  }
}

TEST_CASE("classification falls back to generic gluing") {
  Diagram d;
  d.add_spec(make_spec("X", {method("m")}));
  d.add_spec(make_spec("Y1", {method("m"), method("a")}));
  d.add_spec(make_spec("Y2", {method("m"), method("b")}));
  d.add_morphism({"f1", "X", "Y1", MorphismKind::Generic, {{"m", MemberExpr::single("m")}}});
  d.add_morphism({"f2", "X", "Y2", MorphismKind::Generic, {{"m", MemberExpr::single("m")}}});
  PushoutResult r = compute_pushout(d, Span{"X", "f1", "f2"}, "Z");
  CHECK(classify_pushout(d, r).tag == PatternTag::GenericGluing);
}

TEST_CASE("classification rejects non-pushouts") {
  Diagram d = corpus_diagram("virtual_inheritance");
  PushoutResult r = pushout_result_of(d, corpus_cone(d, "z_square"));
  r.vertex_spec.add_member(method("m3"));
  Diagram d2 = d;
  d2.specifications.at("Z").add_member(method("m3"));
  CHECK_THROWS_AS(classify_pushout(d2, r), NotAPushout);
}

TEST_CASE("classification is stable under renaming") {
  testutil::Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    Diagram d = corpus_diagram("virtual_inheritance");
    PushoutResult r = pushout_result_of(d, corpus_cone(d, "z_square"));
    PatternTag before = classify_pushout(d, r).tag;

    // A global injective renaming of specifications and members.
    auto rename_spec = [&](const std::string& s) { return "S_" + s + "_" + std::to_string(trial); };
    auto rename_member = [&](const std::string& m) { return "r" + m; };
    Diagram renamed;
    for (const auto& [n, s] : d.specifications) {
      Specification copy;
      copy.name = rename_spec(n);
      copy.kind = s.kind;
      copy.type_params = s.type_params;
      for (const auto& [mn, m] : s.members) {
        Member mc = m;
        mc.name = rename_member(mn);
        copy.add_member(mc);
      }
      renamed.add_spec(copy);
    }
    for (const auto& [n, m] : d.morphisms) {
      Morphism copy;
      copy.name = n;
      copy.source = rename_spec(m.source);
      copy.target = rename_spec(m.target);
      copy.kind = m.kind;
      for (const auto& [from, expr] : m.mapping) {
        MemberExpr e;
        for (const auto& step : expr.steps) e.steps.push_back(rename_member(step));
        copy.mapping[rename_member(from)] = e;
      }
      renamed.add_morphism(copy);
    }
    Cone cone = corpus_cone(d, "z_square");
    cone.base.apex = rename_spec(cone.base.apex);
    cone.vertex = rename_spec(cone.vertex);
    PushoutResult r2 = pushout_result_of(renamed, cone);
    CHECK(classify_pushout(renamed, r2).tag == before);
  }
}

TEST_CASE("template_instantiate substitutes the actual class") {
  Diagram d = template_setup();
  ConstructionResult c = template_instantiate(d, "T", "X", "A", "T<A>");
  const Specification& vertex = c.pushout.vertex_spec;
  CHECK(vertex.kind == SpecKind::Class);
  REQUIRE(vertex.members.size() == 2);
  CHECK(vertex.members.count("f"));
  CHECK(vertex.members.count("g"));
  CHECK(vertex.members.at("f").signature == std::vector<std::string>{"A"});

  Diagram applied = c.apply(d);
  CHECK(is_pushout(applied, c.pushout.cone).ok);
}

TEST_CASE("template_instantiate rewrites compound signature names") {
  Diagram d = template_setup();
  d.specifications.at("T").members.at("f").signature = {"T<X>", "X"};
  ConstructionResult c = template_instantiate(d, "T", "X", "A", "TA");
  CHECK(c.pushout.vertex_spec.members.at("f").signature ==
        std::vector<std::string>{"T<A>", "A"});
}

TEST_CASE("template_instantiate checks the required interface") {
  Diagram d = template_setup();
  d.specifications.at("A").members.erase("g");
  d.morphisms.clear();
  CHECK_THROWS_AS(template_instantiate(d, "T", "X", "A", "T<A>"), MissingInterfaceMember);
}

TEST_CASE("template_instantiate rejects non-generic classes") {
  Diagram d = template_setup();
  CHECK_THROWS_AS(template_instantiate(d, "A", "X", "A", "fail"), NotGeneric);
  CHECK_THROWS_AS(template_instantiate(d, "T", "Y", "A", "fail"), NotGeneric);
}

TEST_CASE("template_instantiate reuses declared legs from the corpus") {
  Diagram d = corpus_diagram("linbox_copy");
  // Instantiating again under a fresh name uses env_param / zp_impl.
  ConstructionResult c = template_instantiate(d, "Envelope", "Field", "Zp", "Envelope2");
  CHECK(c.created_morphisms.empty());
  CHECK(c.pushout.vertex_spec.members.count("_b"));
  CHECK(c.pushout.vertex_spec.members.at("_b").signature == std::vector<std::string>{"Zp"});
  Diagram applied = c.apply(d);
  CHECK(is_pushout(applied, c.pushout.cone).ok);
  CHECK(classify_pushout(applied, c.pushout).tag == PatternTag::TemplateParameterPassing);
}

TEST_CASE("instantiate_object builds value objects from builtins") {
  Diagram d;
  d.add_spec(make_spec("int", {}, SpecKind::BuiltinType));
  ConstructionResult c = instantiate_object(d, "int", "", {{"2", "int"}});
  CHECK(c.pushout.vertex_spec.name == "2;");
  CHECK(c.pushout.vertex_spec.kind == SpecKind::Object);
  REQUIRE(c.pushout.vertex_spec.members.count("2"));
  CHECK(c.pushout.vertex_spec.members.at("2").kind == MemberKind::Value);
  CHECK(c.pushout.left_coproj.kind == MorphismKind::Value);
  CHECK(c.pushout.left_coproj.source == "int");
  Diagram applied = c.apply(d);
  CHECK(is_pushout(applied, c.pushout.cone).ok);
}

TEST_CASE("instantiate_object glues the class with its argument object") {
  Diagram d;
  d.add_spec(make_spec("int", {}, SpecKind::BuiltinType));
  d.add_spec(make_spec("Zp", {method("add", {"Zp"}), method("mul", {"Zp"})}));
  d.add_morphism({"zp_mod", "int", "Zp", MorphismKind::Value, {}});
  ConstructionResult c = instantiate_object(d, "Zp", "F2", {{"2", "int"}});
  CHECK(c.pushout.vertex_spec.name == "Zp F2(2);");
  CHECK(c.pushout.vertex_spec.kind == SpecKind::Object);
  CHECK(c.pushout.vertex_spec.members.size() == 3);
  CHECK(c.pushout.vertex_spec.members.count("add"));
  CHECK(c.pushout.vertex_spec.members.count("mul"));
  CHECK(c.pushout.vertex_spec.members.count("2"));
  CHECK(c.pushout.left_coproj.kind == MorphismKind::Instantiation);
  Diagram applied = c.apply(d);
  CHECK(is_pushout(applied, c.pushout.cone).ok);
  CHECK(classify_pushout(applied, c.pushout).tag == PatternTag::ObjectInstantiation);
}

TEST_CASE("instantiate_object with no arguments uses the degenerate square") {
  Diagram d = template_setup();
  ConstructionResult t = template_instantiate(d, "T", "X", "A", "T<A>");
  Diagram d2 = t.apply(d);
  ConstructionResult c = instantiate_object(d2, "T<A>", "ta", {});
  CHECK(c.pushout.vertex_spec.name == "T<A> ta;");
  CHECK(c.pushout.vertex_spec.members.size() == 2);
  CHECK(c.pushout.left_coproj.kind == MorphismKind::Instantiation);
  Diagram applied = c.apply(d2);
  CHECK(is_pushout(applied, c.pushout.cone).ok);
}

TEST_CASE("instantiate_object rejects abstract classes and type parameters") {
  Diagram d;
  d.add_spec(make_spec("A", {pure("f")}, SpecKind::AbstractClass));
  d.add_spec(make_spec("X", {method("g")}, SpecKind::TypeParameter));
  CHECK_THROWS_AS(instantiate_object(d, "A", "a", {}), NotInstantiable);
  CHECK_THROWS_AS(instantiate_object(d, "X", "x", {}), NotInstantiable);
}

TEST_CASE("polymorphism_apply resolves pure members to implementations") {
  Diagram d;
  d.add_spec(make_spec("A", {pure("f")}, SpecKind::AbstractClass));
  d.add_spec(make_spec("A+g", {pure("f"), method("g", {"A"})}, SpecKind::AbstractClass));
  d.add_spec(make_spec("B", {method("f")}));
  ConstructionResult c = polymorphism_apply(d, "A", "A+g", "B", "B+g");
  const Specification& vertex = c.pushout.vertex_spec;
  REQUIRE(vertex.members.size() == 2);
  CHECK(vertex.members.at("f").kind == MemberKind::Method);
  CHECK(vertex.members.at("g").kind == MemberKind::Method);
  for (const auto& [_, m] : vertex.members) CHECK(m.kind != MemberKind::PureVirtualMethod);
  Diagram applied = c.apply(d);
  CHECK(is_pushout(applied, c.pushout.cone).ok);
  CHECK(classify_pushout(applied, c.pushout).tag == PatternTag::Polymorphism);
}

TEST_CASE("polymorphism_apply with an empty extension reproduces the derived class") {
  Diagram d;
  d.add_spec(make_spec("A", {pure("f")}, SpecKind::AbstractClass));
  d.add_spec(make_spec("A2", {pure("f")}, SpecKind::AbstractClass));
  d.add_spec(make_spec("B", {method("f"), method("extra")}));
  ConstructionResult c = polymorphism_apply(d, "A", "A2", "B", "B2");
  CHECK(c.pushout.vertex_spec.members.size() == d.spec("B").members.size());
  CHECK(c.pushout.vertex_spec.members.count("f"));
  CHECK(c.pushout.vertex_spec.members.count("extra"));
}

TEST_CASE("polymorphism_apply reports unimplemented virtual members") {
  Diagram d;
  d.add_spec(make_spec("A", {pure("f")}, SpecKind::AbstractClass));
  d.add_spec(make_spec("A+g", {pure("f"), method("g")}, SpecKind::AbstractClass));
  d.add_spec(make_spec("B", {pure("f")}, SpecKind::AbstractClass));
  CHECK_THROWS_AS(polymorphism_apply(d, "A", "A+g", "B", "B+g"), UnimplementedVirtual);
}

TEST_CASE("copy envelopes carry the parameter as a member field") {
  EnvelopeResult env = make_envelope(EnvelopeVariant::Copy, std::nullopt);
  CHECK(env.envelope.kind == SpecKind::GenericClass);
  CHECK(env.envelope.type_params == std::vector<std::string>{"B"});
  REQUIRE(env.envelope.members.count("_b"));
  CHECK(env.envelope.members.at("_b").kind == MemberKind::Field);
  CHECK(env.envelope.members.at("_b").signature == std::vector<std::string>{"B"});
  for (const auto& m : env.morphisms) CHECK(m.kind != MorphismKind::Inheritance);
}

TEST_CASE("indirect envelopes hold the parameter by pointer") {
  EnvelopeResult env = make_envelope(EnvelopeVariant::Indirect, std::nullopt);
  CHECK(env.envelope.members.at("_b").signature == std::vector<std::string>{"B*"});
  for (const auto& m : env.morphisms) CHECK(m.kind != MorphismKind::Inheritance);
}

TEST_CASE("inheritance envelopes inherit the parameter and the abstract class") {
  Specification abstract_spec =
      make_spec("Abstract", {pure("add", {"Abstract"}), pure("clone")}, SpecKind::AbstractClass);
  EnvelopeResult env = make_envelope(EnvelopeVariant::Inheritance, abstract_spec);
  bool from_b = false, from_abstract = false;
  for (const auto& m : env.morphisms) {
    if (m.kind != MorphismKind::Inheritance) continue;
    if (m.source == "B") from_b = true;
    if (m.source == "Abstract") from_abstract = true;
    CHECK(m.target == "Env");
  }
  CHECK(from_b);
  CHECK(from_abstract);
  // Every non-constructor member of B survives in the envelope.
  for (const auto& [n, m] : env.parameter.members)
    if (m.kind != MemberKind::Constructor && m.kind != MemberKind::Destructor)
      CHECK(env.envelope.members.count(n));
  CHECK(!env.envelope.members.count("_b"));
}

TEST_CASE("inheritance envelopes re-expose generic methods of the parameter") {
  EnvelopeResult env = make_envelope(EnvelopeVariant::Inheritance, std::nullopt);
  REQUIRE(env.parameter.members.count("mygenericmethod"));
  CHECK(env.parameter.members.at("mygenericmethod").is_generic);
  REQUIRE(env.envelope.members.count("mygenericmethod"));
  CHECK(env.envelope.members.at("mygenericmethod").is_generic);
}

TEST_CASE("constructor_adjustment returns inherited constructors") {
  Diagram d;
  d.add_spec(make_spec("X", {method("m0")}));
  d.add_spec(make_spec("Y1", {method("m0"), {"ctor", MemberKind::Constructor, {"int"}, false}}));
  d.add_spec(make_spec("Y2", {method("m0")}));
  auto like = [&](const std::string& name, const std::string& src, const std::string& tgt) {
    Morphism m{name, src, tgt, MorphismKind::Inheritance, {}};
    for (const auto& [n, _] : d.spec(src).members) m.mapping[n] = MemberExpr::single(n);
    return m;
  };
  d.add_morphism(like("f1", "X", "Y1"));
  d.add_morphism(like("f2", "X", "Y2"));
  PushoutResult r = compute_pushout(d, Span{"X", "f1", "f2"}, "Z");
  std::vector<Member> adjusted = constructor_adjustment(r);
  REQUIRE(adjusted.size() == 1);
  CHECK(adjusted.front().name == "ctor");

  SUBCASE("plain methods need no adjustment") {
    Diagram plain = corpus_diagram("virtual_inheritance");
    PushoutResult z = pushout_result_of(plain, corpus_cone(plain, "z_square"));
    CHECK(constructor_adjustment(z).empty());
  }

  SUBCASE("an empty vertex needs no adjustment") {
    PushoutResult empty;
    empty.vertex_spec = Specification{"E", SpecKind::Class, {}, {}};
    CHECK(constructor_adjustment(empty).empty());
  }
}
