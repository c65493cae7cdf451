#include "dml/core.hpp"

#include "doctest.h"
#include "support.hpp"

using namespace dml;

namespace {

Specification make_spec(const std::string& name, std::vector<Member> members,
                        SpecKind kind = SpecKind::Class) {
  Specification s{name, kind, {}, {}};
  for (auto& m : members) s.add_member(std::move(m));
  return s;
}

Member method(const std::string& name) { return {name, MemberKind::Method, {}, false}; }

}  // namespace

TEST_CASE("identity morphism maps each member to itself") {
  Specification x = make_spec("X", {method("m0")});
  Morphism id = identity_morphism(x);
  CHECK(id.kind == MorphismKind::Identity);
  CHECK(id.source == "X");
  CHECK(id.target == "X");
  REQUIRE(id.mapping.size() == 1);
  CHECK(id.mapping.at("m0") == MemberExpr::single("m0"));

  Specification unit = make_spec("U", {}, SpecKind::Unit);
  CHECK(identity_morphism(unit).mapping.empty());

  Specification y1 = make_spec("Y1", {method("m0"), method("m1")});
  Morphism id_y1 = identity_morphism(y1);
  CHECK(id_y1.mapping.at("m0") == MemberExpr::single("m0"));
  CHECK(id_y1.mapping.at("m1") == MemberExpr::single("m1"));
}

TEST_CASE("composition concatenates substituted member expressions") {
  Diagram d;
  d.add_spec(make_spec("X", {method("m0")}));
  d.add_spec(make_spec("Y1", {method("m0"), method("m1")}));
  d.add_spec(make_spec("Z", {method("m0"), method("m1")}));
  d.add_morphism({"f1", "X", "Y1", MorphismKind::Inheritance, {{"m0", MemberExpr::single("m0")}}});
  d.add_morphism({"g1", "Y1", "Z", MorphismKind::Inheritance,
                  {{"m0", MemberExpr::single("m0")}, {"m1", MemberExpr::single("m1")}}});
  Morphism composite = compose_morphisms(d.morphism("f1"), d.morphism("g1"));
  CHECK(composite.source == "X");
  CHECK(composite.target == "Z");
  CHECK(composite.mapping.at("m0") == MemberExpr::single("m0"));
  CHECK(composite.kind == MorphismKind::Inheritance);
}

TEST_CASE("composition with identity keeps the mapping") {
  Specification a = make_spec("A", {method("m"), method("n")});
  Specification b = make_spec("B", {method("p"), method("q")});
  Morphism f{"f", "A", "B", MorphismKind::Implementation,
             {{"m", MemberExpr{{"p", "q"}}}, {"n", MemberExpr::single("q")}}};
  Morphism left = compose_morphisms(identity_morphism(a), f);
  Morphism right = compose_morphisms(f, identity_morphism(b));
  CHECK(left.mapping == f.mapping);
  CHECK(right.mapping == f.mapping);
  CHECK(left.kind == f.kind);
  CHECK(right.kind == f.kind);
}

TEST_CASE("composite member expressions flatten through the second mapping") {
  Morphism f{"f", "A", "B", MorphismKind::Generic, {{"m", MemberExpr{{"p", "q"}}}}};
  Morphism g{"g", "B", "C", MorphismKind::Generic,
             {{"p", MemberExpr::single("r")}, {"q", MemberExpr{{"s", "t"}}}}};
  Morphism composite = compose_morphisms(f, g);
  CHECK(composite.mapping.at("m") == MemberExpr{{"r", "s", "t"}});

  // Independent expansion oracle (textual substitution).
  std::map<std::string, std::string> table{{"p", "r"}, {"q", "s.t"}};
  CHECK(testutil::expand_through("p.q", table) == "r.s.t");
  CHECK(composite.mapping.at("m").render() == testutil::expand_through("p.q", table));
}

TEST_CASE("composition requires consecutive endpoints") {
  Morphism f{"f", "A", "B", MorphismKind::Generic, {}};
  Morphism g{"g", "C", "D", MorphismKind::Generic, {}};
  CHECK_THROWS_AS(compose_morphisms(f, g), NonComposable);
}

TEST_CASE("composition is associative on random chains") {
  testutil::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto spec_of = [&](const std::string& name, int n) {
      Specification s{name, SpecKind::Class, {}, {}};
      for (int i = 0; i < n; ++i) s.add_member(method(name + std::to_string(i)));
      return s;
    };
    int na = testutil::irand(rng, 1, 4), nb = testutil::irand(rng, 1, 4),
        nc = testutil::irand(rng, 1, 4), nd = testutil::irand(rng, 1, 4);
    Specification a = spec_of("a", na), b = spec_of("b", nb), c = spec_of("c", nc),
                  e = spec_of("e", nd);
    auto arrow = [&](const std::string& name, const Specification& from, const Specification& to) {
      Morphism m{name, from.name, to.name, MorphismKind::Generic, {}};
      for (const auto& [n, _] : from.members) {
        MemberExpr expr;
        int len = testutil::irand(rng, 1, 2);
        for (int i = 0; i < len; ++i) {
          auto it = to.members.begin();
          std::advance(it, testutil::irand(rng, 0, int(to.members.size()) - 1));
          expr.steps.push_back(it->first);
        }
        m.mapping[n] = expr;
      }
      return m;
    };
    Morphism f = arrow("f", a, b), g = arrow("g", b, c), h = arrow("h", c, e);
    Morphism left = compose_morphisms(compose_morphisms(f, g), h);
    Morphism right = compose_morphisms(f, compose_morphisms(g, h));
    CHECK(left.mapping == right.mapping);
  }
}

TEST_CASE("validate_diagram accepts the virtual inheritance square") {
  Diagram d;
  d.add_spec(make_spec("X", {method("m0")}));
  d.add_spec(make_spec("Y1", {method("m0"), method("m1")}));
  d.add_spec(make_spec("Y2", {method("m0"), method("m2")}));
  d.add_spec(make_spec("Z", {method("m0"), method("m1"), method("m2")}));
  auto like_named = [&](const std::string& name, const std::string& src, const std::string& tgt) {
    Morphism m{name, src, tgt, MorphismKind::Inheritance, {}};
    for (const auto& [n, _] : d.spec(src).members) m.mapping[n] = MemberExpr::single(n);
    return m;
  };
  d.add_morphism(like_named("f1", "X", "Y1"));
  d.add_morphism(like_named("f2", "X", "Y2"));
  d.add_morphism(like_named("g1", "Y1", "Z"));
  d.add_morphism(like_named("g2", "Y2", "Z"));
  d.equations.push_back({Path{{"f1", "g1"}, {}}, Path{{"f2", "g2"}, {}}});
  CHECK(validate_diagram(d).empty());

  SUBCASE("a mapping to a missing member is reported") {
    d.morphisms.at("f1").mapping["m0"] = MemberExpr::single("m9");
    auto violations = validate_diagram(d);
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& v : violations)
      if (v.rule == "unknown-member" && v.entity == "m9") found = true;
    CHECK(found);
  }

  SUBCASE("non-parallel equations are reported") {
    d.equations.push_back({Path{{"f1"}, {}}, Path{{"f2"}, {}}});
    auto violations = validate_diagram(d);
    REQUIRE(!violations.empty());
    CHECK(violations.front().rule == "non-parallel-equation");
  }

  SUBCASE("missing mappings are reported as totality violations") {
    d.morphisms.at("g1").mapping.erase("m1");
    auto violations = validate_diagram(d);
    REQUIRE(!violations.empty());
    CHECK(violations.front().rule == "not-total");
  }

  SUBCASE("abstract classes need a pure virtual member") {
    d.specifications.at("X").kind = SpecKind::AbstractClass;
    auto violations = validate_diagram(d);
    REQUIRE(!violations.empty());
    CHECK(violations.front().rule == "abstract-without-pure-virtual");
  }

  SUBCASE("inheritance morphisms must be like-named") {
    d.morphisms.at("g1").mapping["m1"] = MemberExpr::single("m2");
    auto violations = validate_diagram(d);
    REQUIRE(!violations.empty());
    CHECK(violations.front().rule == "inheritance-mapping");
  }

  SUBCASE("identity morphisms must be self-mappings at one specification") {
    Morphism bad = identity_morphism(d.spec("X"));
    bad.name = "not_id";
    bad.target = "Y1";
    d.add_morphism(bad);
    auto violations = validate_diagram(d);
    REQUIRE(!violations.empty());
    CHECK(violations.front().rule == "identity-mapping");
  }
}

namespace {

// The ordinary vs. virtual inheritance diagrams share this shape; `merged`
// selects whether Z identifies the two inherited copies of m0.
Diagram double_inheritance(bool merged) {
  Diagram d;
  d.add_spec(make_spec("X", {method("m0")}));
  d.add_spec(make_spec("Y1", {method("m0"), method("m1")}));
  d.add_spec(make_spec("Y2", {method("m0"), method("m2")}));
  std::vector<Member> z_members = merged
      ? std::vector<Member>{method("m0"), method("m1"), method("m2")}
      : std::vector<Member>{method("m0"), method("m0'"), method("m1"), method("m2")};
  d.add_spec(make_spec("Z", z_members));
  d.add_morphism({"f1", "X", "Y1", MorphismKind::Inheritance, {{"m0", MemberExpr::single("m0")}}});
  d.add_morphism({"f2", "X", "Y2", MorphismKind::Inheritance, {{"m0", MemberExpr::single("m0")}}});
  Morphism g1{"g1", "Y1", "Z", MorphismKind::Inheritance,
              {{"m0", MemberExpr::single("m0")}, {"m1", MemberExpr::single("m1")}}};
  Morphism g2{"g2", "Y2", "Z",
              merged ? MorphismKind::Inheritance : MorphismKind::Generic,
              {{"m0", MemberExpr::single(merged ? "m0" : "m0'")},
               {"m2", MemberExpr::single("m2")}}};
  d.add_morphism(g1);
  d.add_morphism(g2);
  if (merged) d.equations.push_back({Path{{"f1", "g1"}, {}}, Path{{"f2", "g2"}, {}}});
  return d;
}

}  // namespace

TEST_CASE("paths_equal answers equal through the declared equation") {
  Diagram d = double_inheritance(true);
  PathEquality pe = paths_equal(d, Path{{"f1", "g1"}, {}}, Path{{"f2", "g2"}, {}}, 8);
  CHECK(pe.verdict == Ternary::Equal);
}

TEST_CASE("paths_equal certifies inequality by a distinguishing member") {
  Diagram d = double_inheritance(false);
  PathEquality pe = paths_equal(d, Path{{"f1", "g1"}, {}}, Path{{"f2", "g2"}, {}}, 8);
  CHECK(pe.verdict == Ternary::Unequal);
  CHECK(pe.certificate_member == "m0");
}

TEST_CASE("paths_equal is reflexive at any depth") {
  Diagram d = double_inheritance(true);
  Path p{{"f1", "g1"}, {}};
  CHECK(paths_equal(d, p, p, 0).verdict == Ternary::Equal);
  CHECK(paths_equal(d, p, p, 8).verdict == Ternary::Equal);
}

TEST_CASE("paths_equal answers unknown without a connecting equation") {
  Diagram d = double_inheritance(true);
  d.equations.clear();
  PathEquality pe = paths_equal(d, Path{{"f1", "g1"}, {}}, Path{{"f2", "g2"}, {}}, 8);
  CHECK(pe.verdict == Ternary::Unknown);
}

TEST_CASE("paths_equal requires parallel paths") {
  Diagram d = double_inheritance(true);
  CHECK_THROWS_AS(paths_equal(d, Path{{"f1"}, {}}, Path{{"f2"}, {}}, 8), NonParallelPaths);
}

TEST_CASE("paths_equal handles identity paths and unit rewrites") {
  Diagram d = double_inheritance(true);
  Morphism id = identity_morphism(d.spec("X"));
  d.add_morphism(id);
  // id;f1;g1 reduces to f1;g1 which the declared equation closes.
  PathEquality pe = paths_equal(d, Path{{"id_X", "f1", "g1"}, {}}, Path{{"f2", "g2"}, {}}, 8);
  CHECK(pe.verdict == Ternary::Equal);
  CHECK(paths_equal(d, Path::identity("X"), Path::identity("X"), 1).verdict == Ternary::Equal);
}

TEST_CASE("paths_equal soundness: equal verdicts have identical mappings") {
  testutil::Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    testutil::SpanFixture fx = testutil::random_span(rng, 4, 5);
    PushoutResult r = compute_pushout(fx.diagram, fx.span, "Z");
    Diagram d = with_pushout(fx.diagram, r);
    Path p{{fx.span.left, r.cone.left_coproj}, {}};
    Path q{{fx.span.right, r.cone.right_coproj}, {}};
    PathEquality pe = paths_equal(d, p, q, 8);
    if (pe.verdict == Ternary::Equal)
      CHECK(compose_path(d, p).mapping == compose_path(d, q).mapping);
    if (pe.verdict == Ternary::Unequal) {
      const auto& m = pe.certificate_member;
      CHECK(!(compose_path(d, p).mapping.at(m) == compose_path(d, q).mapping.at(m)));
    }
  }
}
