#include "dml/pushout.hpp"

#include <algorithm>
#include <set>

namespace dml {

std::string_view to_string(Certificate::Kind k) {
  switch (k) {
    case Certificate::Kind::Isomorphism: return "isomorphism";
    case Certificate::Kind::ExtraMember: return "extra-member";
    case Certificate::Kind::MergedPair: return "merged-pair";
    case Certificate::Kind::KindMismatch: return "kind-mismatch";
    case Certificate::Kind::CompositeImage: return "composite-image";
  }
  return "?";
}

namespace {

struct UnionFind {
  std::vector<int> parent;

  int make() {
    parent.push_back(int(parent.size()));
    return int(parent.size()) - 1;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct ResolvedSpan {
  const Morphism* f1;
  const Morphism* f2;
  const Specification* apex;
  const Specification* y1;
  const Specification* y2;
};

ResolvedSpan resolve_span(const Diagram& d, const Span& s) {
  ResolvedSpan r;
  r.f1 = &d.morphism(s.left);
  r.f2 = &d.morphism(s.right);
  r.apex = &d.spec(s.apex);
  if (r.f1->source != s.apex || r.f2->source != s.apex)
    throw InvalidDiagram("span legs '" + s.left + "', '" + s.right + "' must share the apex '" +
                         s.apex + "'");
  r.y1 = &d.spec(r.f1->target);
  r.y2 = &d.spec(r.f2->target);
  return r;
}

const std::string& leg_image(const Morphism& leg, const std::string& member) {
  auto it = leg.mapping.find(member);
  if (it == leg.mapping.end())
    throw UnknownEntity("leg '" + leg.name + "' has no mapping for apex member '" + member + "'");
  if (!it->second.is_single())
    throw CompositeLegTarget("leg '" + leg.name + "' maps '" + member +
                             "' to the composite '" + it->second.render() +
                             "'; span legs must map to single members");
  return it->second.steps[0];
}

MemberKind unify_kinds(MemberKind a, MemberKind b, const std::string& detail) {
  if (a == b) return a;
  // An implementation absorbs the pure-virtual member it implements.
  if ((a == MemberKind::PureVirtualMethod && b == MemberKind::Method) ||
      (b == MemberKind::PureVirtualMethod && a == MemberKind::Method))
    return MemberKind::Method;
  throw KindClash("cannot merge members of kind '" + std::string(to_string(a)) + "' and '" +
                  std::string(to_string(b)) + "' (" + detail + ")");
}

std::string unique_morphism_name(const Diagram& d, std::string base) {
  std::string name = base;
  int n = 2;
  while (d.has_morphism(name)) name = base + "#" + std::to_string(n++);
  return name;
}

}  // namespace

PushoutResult compute_pushout(const Diagram& d, const Span& s, const std::string& vertex_name,
                              NamingPolicy policy) {
  if (vertex_name.empty()) throw InvalidDiagram("pushout vertex name must not be empty");
  if (d.has_spec(vertex_name)) throw NameTaken("specification '" + vertex_name + "' already exists");
  ResolvedSpan rs = resolve_span(d, s);

  // Tagged disjoint union of both leg targets.
  std::map<std::pair<int, std::string>, int> index;  // (side, member) -> uf node
  UnionFind uf;
  std::vector<std::pair<Side, const Member*>> items;
  auto add_items = [&](Side side, const Specification& spec) {
    for (const auto& [n, m] : spec.members) {
      index[{int(side), n}] = uf.make();
      items.push_back({side, &m});
    }
  };
  add_items(Side::Left, *rs.y1);
  add_items(Side::Right, *rs.y2);

  // Quotient by the equivalence generated by f1(x) ~ f2(x).
  for (const auto& [x, _] : rs.apex->members) {
    const std::string& m1 = leg_image(*rs.f1, x);
    const std::string& m2 = leg_image(*rs.f2, x);
    auto i1 = index.find({int(Side::Left), m1});
    auto i2 = index.find({int(Side::Right), m2});
    if (i1 == index.end() || i2 == index.end())
      throw UnknownEntity("span over '" + s.apex + "' maps '" + x + "' outside the leg targets");
    uf.unite(i1->second, i2->second);
  }

  // Gather classes with deterministic member order (left side first).
  std::map<int, std::vector<std::pair<Side, const Member*>>> classes;
  for (size_t i = 0; i < items.size(); ++i) {
    int root = uf.find(int(i));
    classes[root].push_back(items[i]);
  }
  for (auto& [_, mems] : classes)
    std::sort(mems.begin(), mems.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first == Side::Left;
      return a.second->name < b.second->name;
    });

  struct ClassInfo {
    std::vector<std::pair<Side, const Member*>> origins;
    MemberKind kind;
    std::string desired_name;
    std::string final_name;
  };
  std::vector<ClassInfo> infos;
  for (auto& [_, mems] : classes) {
    ClassInfo info;
    info.origins = mems;
    info.kind = mems[0].second->kind;
    for (size_t i = 1; i < mems.size(); ++i) {
      std::string detail = mems[0].second->name + " / " + mems[i].second->name;
      info.kind = unify_kinds(info.kind, mems[i].second->kind, detail);
    }
    bool shared = std::all_of(mems.begin(), mems.end(), [&](const auto& e) {
      return e.second->name == mems[0].second->name;
    });
    const auto& rep = mems[0];
    const std::string& origin_spec = rep.first == Side::Left ? rs.y1->name : rs.y2->name;
    if (shared && policy == NamingPolicy::PreferShared)
      info.desired_name = rep.second->name;
    else
      info.desired_name = origin_spec + "::" + rep.second->name;
    infos.push_back(std::move(info));
  }
  std::sort(infos.begin(), infos.end(), [](const ClassInfo& a, const ClassInfo& b) {
    const auto& ra = a.origins[0];
    const auto& rb = b.origins[0];
    if (ra.first != rb.first) return ra.first == Side::Left;
    return ra.second->name < rb.second->name;
  });

  // Resolve name collisions: qualify every claimant of a contested name.
  std::map<std::string, int> claims;
  for (const auto& i : infos) ++claims[i.desired_name];
  std::set<std::string> taken;
  for (ClassInfo& info : infos) {
    std::string name = info.desired_name;
    if (claims[name] > 1) {
      const auto& rep = info.origins[0];
      name = (rep.first == Side::Left ? rs.y1->name : rs.y2->name) + "::" + rep.second->name;
    }
    std::string candidate = name;
    int n = 2;
    while (!taken.insert(candidate).second) candidate = name + "#" + std::to_string(n++);
    info.final_name = candidate;
  }

  PushoutResult result;
  result.vertex_spec.name = vertex_name;

  bool any_pure = false;
  for (const ClassInfo& info : infos) {
    Member merged;
    merged.name = info.final_name;
    merged.kind = info.kind;
    // Signature and genericity come from a member matching the merged kind
    // (so an implementation wins over the pure-virtual it absorbs).
    const Member* rep = info.origins[0].second;
    for (const auto& [side, m] : info.origins)
      if (m->kind == info.kind) {
        rep = m;
        break;
      }
    merged.signature = rep->signature;
    merged.is_generic = rep->is_generic;
    if (merged.kind == MemberKind::PureVirtualMethod) any_pure = true;
    result.vertex_spec.add_member(merged);
    std::vector<OriginRef> refs;
    for (const auto& [side, m] : info.origins) refs.push_back({side, m->name});
    result.provenance.emplace(info.final_name, std::move(refs));
  }
  if (rs.y1->kind == SpecKind::Object || rs.y2->kind == SpecKind::Object)
    result.vertex_spec.kind = SpecKind::Object;
  else if (any_pure)
    result.vertex_spec.kind = SpecKind::AbstractClass;
  else
    result.vertex_spec.kind = SpecKind::Class;

  auto coproj = [&](Side side, const Specification& from, std::string base_name) {
    Morphism g;
    g.name = unique_morphism_name(d, std::move(base_name));
    g.source = from.name;
    g.target = vertex_name;
    g.kind = MorphismKind::Coprojection;
    for (const ClassInfo& info : infos)
      for (const auto& [oside, m] : info.origins)
        if (oside == side) g.mapping[m->name] = MemberExpr::single(info.final_name);
    return g;
  };
  result.left_coproj = coproj(Side::Left, *rs.y1, "g1." + vertex_name);
  result.right_coproj = coproj(Side::Right, *rs.y2, "g2." + vertex_name);
  if (result.right_coproj.name == result.left_coproj.name)
    result.right_coproj.name += "'";

  result.cone.base = s;
  result.cone.vertex = vertex_name;
  result.cone.left_coproj = result.left_coproj.name;
  result.cone.right_coproj = result.right_coproj.name;
  result.added_equation =
      Equation{Path{{s.left, result.left_coproj.name}, {}}, Path{{s.right, result.right_coproj.name}, {}}};
  return result;
}

Diagram with_pushout(Diagram d, const PushoutResult& r) {
  d.add_spec(r.vertex_spec);
  d.add_morphism(r.left_coproj);
  d.add_morphism(r.right_coproj);
  d.equations.push_back(r.added_equation);
  return d;
}

bool verify_cone_commutes(const Diagram& d, const Cone& c) {
  const Morphism& f1 = d.morphism(c.base.left);
  const Morphism& f2 = d.morphism(c.base.right);
  const Morphism& g1 = d.morphism(c.left_coproj);
  const Morphism& g2 = d.morphism(c.right_coproj);
  if (!d.has_spec(c.base.apex) || !d.has_spec(c.vertex))
    throw UnknownEntity("cone over '" + c.base.apex + "' references unknown specifications");
  Morphism lhs = compose_morphisms(f1, g1);
  Morphism rhs = compose_morphisms(f2, g2);
  return lhs.mapping == rhs.mapping;
}

namespace {

std::string fresh_spec_name(const Diagram& d, const std::string& base) {
  std::string name = base;
  int n = 2;
  while (d.has_spec(name)) name = base + "#" + std::to_string(n++);
  return name;
}

}  // namespace

PushoutCheck is_pushout(const Diagram& d, const Cone& c) {
  if (!verify_cone_commutes(d, c))
    throw NonCommutingCone("cone at vertex '" + c.vertex + "' does not commute");
  PushoutResult canonical = compute_pushout(d, c.base, fresh_spec_name(d, "__pushout"));
  const Morphism& g1 = d.morphism(c.left_coproj);
  const Morphism& g2 = d.morphism(c.right_coproj);
  const Specification& vertex = d.spec(c.vertex);

  PushoutCheck check;
  Certificate& cert = check.certificate;

  // The comparison map is fully determined by provenance.
  std::map<std::string, std::string> image;       // canonical member -> cone member
  std::map<std::string, std::string> hit_by;      // cone member -> canonical member
  for (const auto& [z, origins] : canonical.provenance) {
    const auto& [side, member] = origins.front();
    const Morphism& g = side == Side::Left ? g1 : g2;
    const MemberExpr& expr = g.mapping.at(member);
    if (!expr.is_single()) {
      cert.kind = Certificate::Kind::CompositeImage;
      cert.witness_member = member;
      cert.detail = "coprojection '" + g.name + "' maps '" + member + "' to a composite";
      return check;
    }
    const std::string& img = expr.steps[0];
    image[z] = img;
    auto [it, inserted] = hit_by.emplace(img, z);
    if (!inserted) {
      cert.kind = Certificate::Kind::MergedPair;
      cert.witness_pair = {it->second, z};
      cert.detail = "members '" + it->second + "' and '" + z +
                    "' are identified in '" + c.vertex + "' but not forced by the gluing point";
      return check;
    }
    const Member* target = vertex.find_member(img);
    if (!target) {
      cert.kind = Certificate::Kind::ExtraMember;
      cert.witness_member = img;
      cert.detail = "coprojection image '" + img + "' is not a member of '" + c.vertex + "'";
      return check;
    }
    MemberKind canonical_kind = canonical.vertex_spec.members.at(z).kind;
    if (target->kind != canonical_kind) {
      cert.kind = Certificate::Kind::KindMismatch;
      cert.witness_member = img;
      cert.detail = "member '" + img + "' has kind '" + std::string(to_string(target->kind)) +
                    "' but the pushout requires '" + std::string(to_string(canonical_kind)) + "'";
      return check;
    }
  }
  for (const auto& [n, _] : vertex.members) {
    if (!hit_by.count(n)) {
      cert.kind = Certificate::Kind::ExtraMember;
      cert.witness_member = n;
      cert.detail = "member '" + n + "' of '" + c.vertex +
                    "' is not in the image of either coprojection";
      return check;
    }
  }
  cert.kind = Certificate::Kind::Isomorphism;
  cert.iso = std::move(image);
  check.ok = true;
  return check;
}

Morphism mediating_morphism(const Diagram& d, const PushoutResult& p, const Cone& other) {
  if (!(other.base == p.cone.base))
    throw BaseMismatch("cone at '" + other.vertex + "' is not over the span of '" +
                       p.cone.vertex + "'");
  if (!verify_cone_commutes(d, other))
    throw NonCommutingCone("cone at vertex '" + other.vertex + "' does not commute");
  const Morphism& g1 = d.morphism(other.left_coproj);
  const Morphism& g2 = d.morphism(other.right_coproj);

  Morphism h;
  h.name = "h." + p.cone.vertex + "." + other.vertex;
  h.source = p.vertex_spec.name;
  h.target = other.vertex;
  h.kind = MorphismKind::Mediating;
  for (const auto& [z, origins] : p.provenance) {
    const MemberExpr* chosen = nullptr;
    for (const auto& [side, member] : origins) {
      const Morphism& g = side == Side::Left ? g1 : g2;
      const MemberExpr& expr = g.mapping.at(member);
      if (!chosen)
        chosen = &expr;
      else if (!(*chosen == expr))
        throw NonCommutingCone("cone at '" + other.vertex + "' does not identify members merged by '" +
                               z + "'");
    }
    h.mapping[z] = *chosen;
  }
  return h;
}

PushoutResult pushout_result_of(const Diagram& d, const Cone& c) {
  PushoutCheck check = is_pushout(d, c);
  if (!check.ok)
    throw NotAPushout("cone at vertex '" + c.vertex + "' is not a pushout: " + check.certificate.detail);
  PushoutResult canonical = compute_pushout(d, c.base, fresh_spec_name(d, "__pushout"));
  PushoutResult r;
  r.cone = c;
  r.vertex_spec = d.spec(c.vertex);
  r.left_coproj = d.morphism(c.left_coproj);
  r.right_coproj = d.morphism(c.right_coproj);
  for (const auto& [z, img] : check.certificate.iso) r.provenance[img] = canonical.provenance.at(z);
  r.added_equation = Equation{Path{{c.base.left, c.left_coproj}, {}}, Path{{c.base.right, c.right_coproj}, {}}};
  return r;
}

}  // namespace dml
