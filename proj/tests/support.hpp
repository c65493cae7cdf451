#pragma once

#include <array>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dml/core.hpp"
#include "dml/pushout.hpp"

// Shared test machinery: random fixtures and the independent oracles the
// engine is checked against. Oracles deliberately avoid the union-find and
// substitution code paths of the implementation.

namespace dml::testutil {

using Rng = std::mt19937_64;

inline int irand(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

struct SpanFixture {
  Diagram diagram;
  Span span;
};

// A random span whose members are all methods (kind clashes are exercised
// separately): apex with up to max_apex members, legs with up to max_leg
// members each, leg mappings drawn uniformly.
inline SpanFixture random_span(Rng& rng, int max_apex = 8, int max_leg = 12) {
  SpanFixture fx;
  int apex_n = irand(rng, 0, max_apex);
  int left_n = irand(rng, 1, max_leg);
  int right_n = irand(rng, 1, max_leg);

  Specification apex{"X", SpecKind::Class, {}, {}};
  for (int i = 0; i < apex_n; ++i) apex.add_member({"x" + std::to_string(i), MemberKind::Method, {}, false});
  Specification y1{"Y1", SpecKind::Class, {}, {}};
  for (int i = 0; i < left_n; ++i) y1.add_member({"a" + std::to_string(i), MemberKind::Method, {}, false});
  Specification y2{"Y2", SpecKind::Class, {}, {}};
  for (int i = 0; i < right_n; ++i) y2.add_member({"b" + std::to_string(i), MemberKind::Method, {}, false});

  Morphism f1{"f1", "X", "Y1", MorphismKind::Generic, {}};
  Morphism f2{"f2", "X", "Y2", MorphismKind::Generic, {}};
  for (int i = 0; i < apex_n; ++i) {
    f1.mapping["x" + std::to_string(i)] =
        MemberExpr::single("a" + std::to_string(irand(rng, 0, left_n - 1)));
    f2.mapping["x" + std::to_string(i)] =
        MemberExpr::single("b" + std::to_string(irand(rng, 0, right_n - 1)));
  }
  fx.diagram.add_spec(apex);
  fx.diagram.add_spec(y1);
  fx.diagram.add_spec(y2);
  fx.diagram.add_morphism(f1);
  fx.diagram.add_morphism(f2);
  fx.span = Span{"X", "f1", "f2"};
  return fx;
}

using Item = std::pair<int, std::string>;  // 0 = left leg target, 1 = right
using Partition = std::set<std::set<Item>>;

// Brute-force oracle: build the gluing pairs as graph edges and take
// connected components by breadth-first search.
inline Partition oracle_partition(const Diagram& d, const Span& s) {
  const Morphism& f1 = d.morphism(s.left);
  const Morphism& f2 = d.morphism(s.right);
  std::set<Item> items;
  for (const auto& [n, _] : d.spec(f1.target).members) items.insert({0, n});
  for (const auto& [n, _] : d.spec(f2.target).members) items.insert({1, n});
  std::map<Item, std::set<Item>> adjacent;
  for (const auto& [x, _] : d.spec(s.apex).members) {
    Item a{0, f1.mapping.at(x).steps[0]};
    Item b{1, f2.mapping.at(x).steps[0]};
    adjacent[a].insert(b);
    adjacent[b].insert(a);
  }
  Partition out;
  std::set<Item> done;
  for (const Item& start : items) {
    if (done.count(start)) continue;
    std::set<Item> component;
    std::deque<Item> queue{start};
    while (!queue.empty()) {
      Item cur = queue.front();
      queue.pop_front();
      if (!component.insert(cur).second) continue;
      for (const Item& next : adjacent[cur])
        if (!component.count(next)) queue.push_back(next);
    }
    done.insert(component.begin(), component.end());
    out.insert(std::move(component));
  }
  return out;
}

inline Partition result_partition(const PushoutResult& r) {
  Partition out;
  for (const auto& [_, origins] : r.provenance) {
    std::set<Item> cls;
    for (const auto& o : origins) cls.insert({o.side == Side::Left ? 0 : 1, o.member});
    out.insert(std::move(cls));
  }
  return out;
}

// A random valid diagram with awkward names (spaces, quotes, angle
// brackets, keywords) to stress the textual round trip.
inline Diagram random_diagram(Rng& rng) {
  static const std::vector<std::string> weird = {
      "Zp F2(2);", "Y1::m1", "a b", "2", "Envelope<Zp>", "T<A> ta;", "&F2",
      "pure",      "x#3",    "id",  "we\"ird", "T<A,B>",
  };
  Diagram d;
  int spec_n = irand(rng, 1, 6);
  for (int i = 0; i < spec_n; ++i) {
    Specification s;
    s.name = chance(rng, 0.4) ? weird[irand(rng, 0, int(weird.size()) - 1)] + "#" + std::to_string(i)
                              : "N" + std::to_string(i);
    int kind_pick = irand(rng, 0, 6);
    s.kind = std::array<SpecKind, 7>{SpecKind::Class, SpecKind::AbstractClass, SpecKind::GenericClass,
                                     SpecKind::BuiltinType, SpecKind::Object, SpecKind::TypeParameter,
                                     SpecKind::Unit}[kind_pick];
    if (s.kind == SpecKind::GenericClass)
      for (int p = 0, n = irand(rng, 1, 2); p < n; ++p) s.type_params.push_back("P" + std::to_string(p));
    int member_n = s.kind == SpecKind::Unit ? 0 : irand(rng, 0, 4);
    for (int m = 0; m < member_n; ++m) {
      Member mem;
      mem.name = chance(rng, 0.3) ? weird[irand(rng, 0, int(weird.size()) - 1)] + std::to_string(m)
                                  : "m" + std::to_string(m);
      switch (irand(rng, 0, 5)) {
        case 0: mem.kind = MemberKind::Method; break;
        case 1: mem.kind = MemberKind::PureVirtualMethod; break;
        case 2: mem.kind = MemberKind::Field; break;
        case 3: mem.kind = MemberKind::Value; break;
        case 4: mem.kind = MemberKind::TypeMember; break;
        default:
          mem.kind = MemberKind::Constructor;
          mem.name = "ctor";
          break;
      }
      if (mem.kind == MemberKind::Method && chance(rng, 0.2)) mem.is_generic = true;
      if (mem.kind == MemberKind::Method || mem.kind == MemberKind::PureVirtualMethod ||
          mem.kind == MemberKind::Constructor)
        for (int a = 0, n = irand(rng, 0, 2); a < n; ++a)
          mem.signature.push_back(weird[irand(rng, 0, int(weird.size()) - 1)]);
      if (mem.kind == MemberKind::Field)
        mem.signature = {weird[irand(rng, 0, int(weird.size()) - 1)]};
      if (mem.kind == MemberKind::Value)
        mem.signature = {chance(rng, 0.5) ? std::to_string(irand(rng, 0, 99))
                                          : weird[irand(rng, 0, int(weird.size()) - 1)]};
      if (!d.specifications.count(s.name) && !s.members.count(mem.name)) s.add_member(mem);
    }
    if (s.kind == SpecKind::AbstractClass) {
      Member p{"must_override", MemberKind::PureVirtualMethod, {}, false};
      if (!s.members.count(p.name)) s.add_member(p);
    }
    if (!d.specifications.count(s.name)) d.add_spec(s);
  }
  std::vector<std::string> names;
  for (const auto& [n, _] : d.specifications) names.push_back(n);
  int morphism_n = irand(rng, 0, 2 * spec_n);
  for (int i = 0; i < morphism_n; ++i) {
    const Specification& src = d.spec(names[irand(rng, 0, int(names.size()) - 1)]);
    const Specification& tgt = d.spec(names[irand(rng, 0, int(names.size()) - 1)]);
    if (!src.members.empty() && tgt.members.empty()) continue;
    Morphism m;
    m.name = "mor" + std::to_string(i);
    m.source = src.name;
    m.target = tgt.name;
    m.kind = std::array<MorphismKind, 6>{
        MorphismKind::Implementation, MorphismKind::TemplateParameter, MorphismKind::Instantiation,
        MorphismKind::Value,          MorphismKind::Coprojection,      MorphismKind::Generic,
    }[irand(rng, 0, 5)];
    std::vector<std::string> tgt_members;
    for (const auto& [n, _] : tgt.members) tgt_members.push_back(n);
    for (const auto& [n, _] : src.members) {
      MemberExpr expr;
      for (int s2 = 0, len = irand(rng, 1, 2); s2 < len; ++s2)
        expr.steps.push_back(tgt_members[irand(rng, 0, int(tgt_members.size()) - 1)]);
      m.mapping[n] = expr;
    }
    d.add_morphism(m);
  }
  std::vector<std::string> morphism_names;
  for (const auto& [n, _] : d.morphisms) morphism_names.push_back(n);
  if (!morphism_names.empty()) {
    for (int i = 0, n = irand(rng, 0, 3); i < n; ++i) {
      const Morphism& f = d.morphism(morphism_names[irand(rng, 0, int(morphism_names.size()) - 1)]);
      if (chance(rng, 0.3)) {
        d.equations.push_back({Path{{f.name}, {}}, Path{{f.name}, {}}});
        continue;
      }
      for (const auto& [n2, g] : d.morphisms)
        if (g.source == f.source && g.target == f.target && n2 != f.name) {
          d.equations.push_back({Path{{f.name}, {}}, Path{{n2}, {}}});
          break;
        }
    }
    // Span declarations over single-step legs that share a source.
    auto single_step = [](const Morphism& m) {
      for (const auto& [_, expr] : m.mapping)
        if (!expr.is_single()) return false;
      return true;
    };
    for (const auto& [n1, f] : d.morphisms) {
      for (const auto& [n2, g] : d.morphisms) {
        if (n1 >= n2 || f.source != g.source) continue;
        if (!single_step(f) || !single_step(g)) continue;
        if (!chance(rng, 0.2)) continue;
        SpanDecl sp{"span_" + n1 + "_" + n2, f.source, n1, n2};
        if (!d.spans.count(sp.name)) d.spans.emplace(sp.name, sp);
      }
    }
  }
  if (chance(rng, 0.3) && !names.empty()) {
    // Identity equations at a random specification.
    d.equations.push_back({Path::identity(names[0]), Path::identity(names[0])});
  }
  return d;
}

// Independent expansion oracle for morphism composition: textual
// substitution of dotted member expressions.
inline std::string expand_through(const std::string& dotted,
                                  const std::map<std::string, std::string>& table) {
  std::string out;
  std::string step;
  auto flush = [&] {
    if (!out.empty()) out += '.';
    out += table.at(step);
    step.clear();
  };
  for (char c : dotted) {
    if (c == '.')
      flush();
    else
      step += c;
  }
  flush();
  return out;
}

}  // namespace dml::testutil
