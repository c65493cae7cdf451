#include "dml/core.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace dml {

namespace {

struct KindName {
  std::string_view name;
  int value;
};

constexpr KindName kMemberKinds[] = {
    {"method", int(MemberKind::Method)},
    {"pure-virtual-method", int(MemberKind::PureVirtualMethod)},
    {"constructor", int(MemberKind::Constructor)},
    {"destructor", int(MemberKind::Destructor)},
    {"field", int(MemberKind::Field)},
    {"type-member", int(MemberKind::TypeMember)},
    {"value", int(MemberKind::Value)},
};

constexpr KindName kSpecKinds[] = {
    {"class", int(SpecKind::Class)},
    {"abstract-class", int(SpecKind::AbstractClass)},
    {"generic-class", int(SpecKind::GenericClass)},
    {"builtin-type", int(SpecKind::BuiltinType)},
    {"object", int(SpecKind::Object)},
    {"type-parameter", int(SpecKind::TypeParameter)},
    {"unit", int(SpecKind::Unit)},
};

constexpr KindName kMorphismKinds[] = {
    {"identity", int(MorphismKind::Identity)},
    {"inheritance", int(MorphismKind::Inheritance)},
    {"implementation", int(MorphismKind::Implementation)},
    {"template-parameter", int(MorphismKind::TemplateParameter)},
    {"instantiation", int(MorphismKind::Instantiation)},
    {"value", int(MorphismKind::Value)},
    {"coprojection", int(MorphismKind::Coprojection)},
    {"mediating", int(MorphismKind::Mediating)},
    {"generic", int(MorphismKind::Generic)},
};

template <size_t N>
std::string_view name_of(const KindName (&table)[N], int v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

template <size_t N>
std::optional<int> value_of(const KindName (&table)[N], std::string_view s) {
  for (const auto& e : table)
    if (e.name == s) return e.value;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(MemberKind k) { return name_of(kMemberKinds, int(k)); }
std::string_view to_string(SpecKind k) { return name_of(kSpecKinds, int(k)); }
std::string_view to_string(MorphismKind k) { return name_of(kMorphismKinds, int(k)); }

std::optional<MemberKind> member_kind_from(std::string_view s) {
  auto v = value_of(kMemberKinds, s);
  if (!v) return std::nullopt;
  return MemberKind(*v);
}

std::optional<SpecKind> spec_kind_from(std::string_view s) {
  auto v = value_of(kSpecKinds, s);
  if (!v) return std::nullopt;
  return SpecKind(*v);
}

std::optional<MorphismKind> morphism_kind_from(std::string_view s) {
  auto v = value_of(kMorphismKinds, s);
  if (!v) return std::nullopt;
  return MorphismKind(*v);
}

void Specification::add_member(Member m) {
  if (members.count(m.name))
    throw NameTaken("member '" + m.name + "' already declared in specification '" + name + "'");
  members.emplace(m.name, std::move(m));
}

const Member* Specification::find_member(const std::string& n) const {
  auto it = members.find(n);
  return it == members.end() ? nullptr : &it->second;
}

std::string MemberExpr::render() const {
  std::string out;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (i) out += '.';
    out += steps[i];
  }
  return out;
}

std::string Path::render() const {
  if (steps.empty()) return "id(" + at + ")";
  std::string out;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ';';
    out += steps[i];
  }
  return out;
}

const Specification& Diagram::spec(const std::string& n) const {
  auto it = specifications.find(n);
  if (it == specifications.end()) throw UnknownEntity("unknown specification '" + n + "'");
  return it->second;
}

const Morphism& Diagram::morphism(const std::string& n) const {
  auto it = morphisms.find(n);
  if (it == morphisms.end()) throw UnknownEntity("unknown morphism '" + n + "'");
  return it->second;
}

void Diagram::add_spec(Specification s) {
  if (has_spec(s.name)) throw NameTaken("specification '" + s.name + "' already declared");
  specifications.emplace(s.name, std::move(s));
}

void Diagram::add_morphism(Morphism m) {
  if (has_morphism(m.name)) throw NameTaken("morphism '" + m.name + "' already declared");
  morphisms.emplace(m.name, std::move(m));
}

Morphism identity_morphism(const Specification& spec) {
  Morphism id;
  id.name = "id_" + spec.name;
  id.source = spec.name;
  id.target = spec.name;
  id.kind = MorphismKind::Identity;
  for (const auto& [n, m] : spec.members) id.mapping.emplace(n, MemberExpr::single(n));
  return id;
}

Morphism compose_morphisms(const Morphism& f, const Morphism& g) {
  if (f.target != g.source)
    throw NonComposable("cannot compose " + f.name + " : " + f.source + " -> " + f.target +
                        " with " + g.name + " : " + g.source + " -> " + g.target);
  Morphism r;
  r.name = g.name + "." + f.name;
  r.source = f.source;
  r.target = g.target;
  if (f.kind == MorphismKind::Identity)
    r.kind = g.kind;
  else if (g.kind == MorphismKind::Identity)
    r.kind = f.kind;
  else if (f.kind == g.kind && f.kind == MorphismKind::Inheritance)
    r.kind = MorphismKind::Inheritance;  // transitivity of inheritance
  else
    r.kind = MorphismKind::Generic;
  for (const auto& [m, expr] : f.mapping) {
    MemberExpr out;
    for (const auto& step : expr.steps) {
      auto it = g.mapping.find(step);
      if (it == g.mapping.end())
        throw UnknownEntity("composition of " + f.name + " and " + g.name +
                            ": no mapping for member '" + step + "' in " + g.name);
      out.steps.insert(out.steps.end(), it->second.steps.begin(), it->second.steps.end());
    }
    r.mapping.emplace(m, std::move(out));
  }
  return r;
}

namespace {

void validate_spec(const Specification& s, std::vector<Violation>& out) {
  if (s.name.empty()) out.push_back({"empty-name", s.name, "specification with empty name"});
  bool has_pure = false;
  for (const auto& [n, m] : s.members) {
    if (n.empty() || m.name.empty())
      out.push_back({"empty-name", s.name, "member with empty name in '" + s.name + "'"});
    if (m.name != n)
      out.push_back({"member-key-mismatch", s.name, "member keyed '" + n + "' is named '" + m.name + "'"});
    if (m.kind == MemberKind::PureVirtualMethod) has_pure = true;
  }
  if (s.kind == SpecKind::AbstractClass && !has_pure)
    out.push_back({"abstract-without-pure-virtual", s.name,
                   "abstract-class '" + s.name + "' has no pure-virtual-method member"});
  if (s.kind == SpecKind::Unit && !s.members.empty())
    out.push_back({"unit-with-members", s.name, "unit specification '" + s.name + "' must be empty"});
  if ((s.kind == SpecKind::GenericClass) != !s.type_params.empty())
    out.push_back({"generic-params-mismatch", s.name,
                   "type parameters are required exactly for generic-class specifications"});
}

void validate_morphism(const Diagram& d, const Morphism& mo, std::vector<Violation>& out) {
  if (mo.name.empty()) out.push_back({"empty-name", mo.name, "morphism with empty name"});
  if (!d.has_spec(mo.source)) {
    out.push_back({"unknown-specification", mo.source,
                   "morphism '" + mo.name + "' has unknown source '" + mo.source + "'"});
    return;
  }
  if (!d.has_spec(mo.target)) {
    out.push_back({"unknown-specification", mo.target,
                   "morphism '" + mo.name + "' has unknown target '" + mo.target + "'"});
    return;
  }
  const Specification& src = d.spec(mo.source);
  const Specification& tgt = d.spec(mo.target);
  for (const auto& [n, _] : src.members)
    if (!mo.mapping.count(n))
      out.push_back({"not-total", mo.name,
                     "morphism '" + mo.name + "' has no mapping for member '" + n + "'"});
  for (const auto& [n, expr] : mo.mapping) {
    if (!src.members.count(n))
      out.push_back({"unknown-member", n,
                     "morphism '" + mo.name + "' maps '" + n + "' which is not a member of '" +
                         mo.source + "'"});
    if (expr.steps.empty())
      out.push_back({"empty-expr", mo.name, "morphism '" + mo.name + "' maps '" + n + "' to an empty expression"});
    for (const auto& step : expr.steps)
      if (!tgt.members.count(step))
        out.push_back({"unknown-member", step,
                       "morphism '" + mo.name + "' refers to '" + step + "' which is not a member of '" +
                           mo.target + "'"});
  }
  if (mo.kind == MorphismKind::Identity) {
    if (mo.source != mo.target)
      out.push_back({"identity-mapping", mo.name, "identity morphism endpoints differ"});
    for (const auto& [n, expr] : mo.mapping)
      if (!(expr.is_single() && expr.steps[0] == n))
        out.push_back({"identity-mapping", mo.name,
                       "identity morphism '" + mo.name + "' does not map '" + n + "' to itself"});
  }
  if (mo.kind == MorphismKind::Inheritance) {
    for (const auto& [n, expr] : mo.mapping)
      if (!(expr.is_single() && expr.steps[0] == n))
        out.push_back({"inheritance-mapping", mo.name,
                       "inheritance morphism '" + mo.name + "' must map '" + n +
                           "' to the like-named member"});
  }
}

// Checks consecutiveness and records a violation instead of throwing.
bool path_ok(const Diagram& d, const Path& p, const std::string& ctx, std::vector<Violation>& out) {
  if (p.is_identity()) {
    if (!d.has_spec(p.at)) {
      out.push_back({"unknown-specification", p.at, ctx + ": identity path at unknown specification"});
      return false;
    }
    return true;
  }
  std::string cursor;
  for (size_t i = 0; i < p.steps.size(); ++i) {
    if (!d.has_morphism(p.steps[i])) {
      out.push_back({"unknown-morphism", p.steps[i], ctx + ": unknown morphism in path"});
      return false;
    }
    const Morphism& m = d.morphism(p.steps[i]);
    if (i && m.source != cursor) {
      out.push_back({"non-consecutive-path", p.steps[i],
                     ctx + ": step '" + p.steps[i] + "' does not start at '" + cursor + "'"});
      return false;
    }
    cursor = m.target;
  }
  return true;
}

}  // namespace

std::vector<Violation> validate_diagram(const Diagram& d) {
  std::vector<Violation> out;
  for (const auto& [_, s] : d.specifications) validate_spec(s, out);
  for (const auto& [_, m] : d.morphisms) validate_morphism(d, m, out);
  for (size_t i = 0; i < d.equations.size(); ++i) {
    const Equation& eq = d.equations[i];
    std::string ctx = "equation #" + std::to_string(i + 1);
    if (!path_ok(d, eq.lhs, ctx, out) || !path_ok(d, eq.rhs, ctx, out)) continue;
    if (path_source(d, eq.lhs) != path_source(d, eq.rhs) ||
        path_target(d, eq.lhs) != path_target(d, eq.rhs))
      out.push_back({"non-parallel-equation", eq.lhs.render() + " = " + eq.rhs.render(),
                     ctx + ": sides are not parallel"});
  }
  auto check_leg = [&](const std::string& owner, const std::string& apex, const std::string& leg) {
    if (!d.has_morphism(leg)) {
      out.push_back({"unknown-morphism", leg, owner + ": unknown leg"});
      return;
    }
    const Morphism& m = d.morphism(leg);
    if (m.source != apex)
      out.push_back({"span-apex-mismatch", owner, owner + ": leg '" + leg + "' does not start at the apex"});
    for (const auto& [from, expr] : m.mapping)
      if (!expr.is_single()) {
        out.push_back({"composite-leg", leg,
                       owner + ": leg '" + leg + "' maps '" + from + "' to a composite expression"});
        return;
      }
  };
  for (const auto& [name, sp] : d.spans) {
    if (!d.has_spec(sp.apex)) {
      out.push_back({"unknown-specification", sp.apex, "span '" + name + "': unknown apex"});
      continue;
    }
    check_leg("span '" + name + "'", sp.apex, sp.left);
    check_leg("span '" + name + "'", sp.apex, sp.right);
  }
  for (const auto& [name, po] : d.pushout_decls) {
    std::string ctx = "pushout '" + name + "'";
    if (!d.has_spec(po.apex)) {
      out.push_back({"unknown-specification", po.apex, ctx + ": unknown apex"});
      continue;
    }
    check_leg(ctx, po.apex, po.left);
    check_leg(ctx, po.apex, po.right);
    if (!d.has_spec(po.vertex))
      out.push_back({"unknown-specification", po.vertex, ctx + ": unknown vertex"});
    auto check_coproj = [&](const std::string& g, const std::string& leg) {
      if (g.empty()) return;
      if (!d.has_morphism(g)) {
        out.push_back({"unknown-morphism", g, ctx + ": unknown coprojection"});
        return;
      }
      const Morphism& gm = d.morphism(g);
      if (gm.target != po.vertex)
        out.push_back({"pushout-decl-invalid", name, ctx + ": coprojection '" + g + "' does not end at the vertex"});
      if (d.has_morphism(leg) && gm.source != d.morphism(leg).target)
        out.push_back({"pushout-decl-invalid", name,
                       ctx + ": coprojection '" + g + "' does not start at the leg target"});
    };
    check_coproj(po.left_coproj, po.left);
    check_coproj(po.right_coproj, po.right);
  }
  return out;
}

std::string path_source(const Diagram& d, const Path& p) {
  if (p.is_identity()) {
    if (!d.has_spec(p.at)) throw UnknownEntity("identity path at unknown specification '" + p.at + "'");
    return p.at;
  }
  return d.morphism(p.steps.front()).source;
}

std::string path_target(const Diagram& d, const Path& p) {
  if (p.is_identity()) {
    if (!d.has_spec(p.at)) throw UnknownEntity("identity path at unknown specification '" + p.at + "'");
    return p.at;
  }
  return d.morphism(p.steps.back()).target;
}

Morphism compose_path(const Diagram& d, const Path& p) {
  if (p.is_identity()) return identity_morphism(d.spec(p.at));
  Morphism acc = d.morphism(p.steps.front());
  for (size_t i = 1; i < p.steps.size(); ++i) acc = compose_morphisms(acc, d.morphism(p.steps[i]));
  return acc;
}

namespace {

// Rewriting works on identity-free step sequences.
struct NormalPath {
  std::vector<std::string> steps;
  std::string at;  // object when steps is empty
};

NormalPath normalize_path(const Diagram& d, const Path& p) {
  NormalPath n;
  n.at = path_source(d, p);
  std::string cursor = n.at;
  for (const auto& s : p.steps) {
    const Morphism& m = d.morphism(s);
    if (m.source != cursor)
      throw InvalidDiagram("path '" + p.render() + "' is not consecutive at '" + s + "'");
    cursor = m.target;
    if (m.kind != MorphismKind::Identity) n.steps.push_back(s);
  }
  return n;
}

std::string key_of(const std::vector<std::string>& steps) {
  std::string k;
  for (const auto& s : steps) {
    k += s;
    k += '\x1f';
  }
  return k;
}

// The object sitting at insertion position `i` of `steps` (0..steps.size()).
std::string object_at(const Diagram& d, const NormalPath& base, const std::vector<std::string>& steps,
                      size_t i) {
  if (steps.empty()) return base.at;
  if (i < steps.size()) return d.morphism(steps[i]).source;
  return d.morphism(steps.back()).target;
}

}  // namespace

PathEquality paths_equal(const Diagram& d, const Path& p, const Path& q, int depth) {
  if (path_source(d, p) != path_source(d, q) || path_target(d, p) != path_target(d, q))
    throw NonParallelPaths("paths '" + p.render() + "' and '" + q.render() + "' are not parallel");

  // Mappings decide inequality outright; equality claims then never
  // contradict the induced member maps.
  Morphism mp = compose_path(d, p);
  Morphism mq = compose_path(d, q);
  for (const auto& [m, expr] : mp.mapping) {
    auto it = mq.mapping.find(m);
    if (it == mq.mapping.end() || !(it->second == expr)) return {Ternary::Unequal, m};
  }

  NormalPath np = normalize_path(d, p);
  NormalPath nq = normalize_path(d, q);
  if (np.steps == nq.steps) return {Ternary::Equal, {}};
  if (depth <= 0) return {Ternary::Unknown, {}};

  // Declared equations as bidirectional rewrite rules over identity-free
  // sequences; congruence closure is subsequence replacement.
  struct Rule {
    std::vector<std::string> from, to;
    std::string at;  // object of the empty side, when one side is empty
  };
  std::vector<Rule> rules;
  for (const Equation& eq : d.equations) {
    NormalPath l = normalize_path(d, eq.lhs);
    NormalPath r = normalize_path(d, eq.rhs);
    if (l.steps == r.steps) continue;
    rules.push_back({l.steps, r.steps, l.at});
    rules.push_back({r.steps, l.steps, r.at});
  }
  if (rules.empty()) return {Ternary::Unknown, {}};

  constexpr size_t kMaxStates = 200000;
  std::set<std::string> seen;
  std::deque<std::pair<std::vector<std::string>, int>> queue;
  const std::string goal = key_of(nq.steps);
  seen.insert(key_of(np.steps));
  queue.emplace_back(np.steps, 0);
  while (!queue.empty()) {
    auto [steps, dist] = queue.front();
    queue.pop_front();
    if (dist >= depth) continue;
    for (const Rule& rule : rules) {
      if (rule.from.empty()) {
        // Insert the nonempty side wherever the path passes through its object.
        for (size_t i = 0; i + 0 <= steps.size(); ++i) {
          if (object_at(d, np, steps, i) != rule.at) continue;
          std::vector<std::string> next(steps.begin(), steps.begin() + i);
          next.insert(next.end(), rule.to.begin(), rule.to.end());
          next.insert(next.end(), steps.begin() + i, steps.end());
          std::string k = key_of(next);
          if (k == goal) return {Ternary::Equal, {}};
          if (seen.size() < kMaxStates && seen.insert(k).second) queue.emplace_back(std::move(next), dist + 1);
        }
        continue;
      }
      if (rule.from.size() > steps.size()) continue;
      for (size_t i = 0; i + rule.from.size() <= steps.size(); ++i) {
        if (!std::equal(rule.from.begin(), rule.from.end(), steps.begin() + i)) continue;
        std::vector<std::string> next(steps.begin(), steps.begin() + i);
        next.insert(next.end(), rule.to.begin(), rule.to.end());
        next.insert(next.end(), steps.begin() + i + rule.from.size(), steps.end());
        std::string k = key_of(next);
        if (k == goal) return {Ternary::Equal, {}};
        if (seen.size() < kMaxStates && seen.insert(k).second) queue.emplace_back(std::move(next), dist + 1);
      }
    }
  }
  return {Ternary::Unknown, {}};
}

}  // namespace dml
