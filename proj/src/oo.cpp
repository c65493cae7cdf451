#include "dml/oo.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace dml {

std::string_view to_string(PatternTag t) {
  switch (t) {
    case PatternTag::VirtualInheritance: return "virtual-inheritance";
    case PatternTag::TemplateParameterPassing: return "template-parameter-passing";
    case PatternTag::ObjectInstantiation: return "object-instantiation";
    case PatternTag::Polymorphism: return "polymorphism";
    case PatternTag::GenericGluing: return "generic-gluing";
  }
  return "?";
}

std::string_view to_string(EnvelopeVariant v) {
  switch (v) {
    case EnvelopeVariant::Copy: return "copy";
    case EnvelopeVariant::Indirect: return "indirect";
    case EnvelopeVariant::Inheritance: return "inheritance";
  }
  return "?";
}

Diagram ConstructionResult::apply(Diagram d) const {
  for (const auto& s : created_specs)
    if (!d.has_spec(s.name)) d.add_spec(s);
  for (const auto& m : created_morphisms)
    if (!d.has_morphism(m.name)) d.add_morphism(m);
  return with_pushout(std::move(d), pushout);
}

namespace {

// A leg is an extension of the apex when it embeds every apex member and
// the target strictly adds members.
bool is_extension_leg(const Specification& apex, const Morphism& leg, const Specification& target) {
  std::set<std::string> images;
  for (const auto& [x, expr] : leg.mapping) {
    if (!expr.is_single()) return false;
    if (!images.insert(expr.steps[0]).second) return false;
  }
  return target.members.size() > apex.members.size();
}

Diagram ensure_in_diagram(const Diagram& d, const PushoutResult& p) {
  Diagram local = d;
  if (!local.has_spec(p.vertex_spec.name)) local.add_spec(p.vertex_spec);
  if (!local.has_morphism(p.left_coproj.name)) local.add_morphism(p.left_coproj);
  if (!local.has_morphism(p.right_coproj.name)) local.add_morphism(p.right_coproj);
  return local;
}

}  // namespace

PushoutPattern classify_pushout(const Diagram& d, const PushoutResult& p) {
  Diagram local = ensure_in_diagram(d, p);
  PushoutCheck check = is_pushout(local, p.cone);
  if (!check.ok)
    throw NotAPushout("cone at vertex '" + p.cone.vertex + "' is not a pushout: " +
                      check.certificate.detail);

  const Morphism& f1 = local.morphism(p.cone.base.left);
  const Morphism& f2 = local.morphism(p.cone.base.right);
  const Specification& apex = local.spec(p.cone.base.apex);
  const Specification& y1 = local.spec(f1.target);
  const Specification& y2 = local.spec(f2.target);

  PushoutPattern out;
  out.bindings = {{"gluing-point", apex.name},
                  {"left", y1.name},
                  {"right", y2.name},
                  {"vertex", p.cone.vertex}};

  auto instantiating = [](MorphismKind k) {
    // A "value" arrow is the builtin-type flavour of instantiation.
    return k == MorphismKind::Instantiation || k == MorphismKind::Value;
  };

  if (f1.kind == MorphismKind::Inheritance && f2.kind == MorphismKind::Inheritance)
    out.tag = PatternTag::VirtualInheritance;
  else if (apex.kind == SpecKind::TypeParameter &&
           ((f1.kind == MorphismKind::TemplateParameter && y1.kind == SpecKind::GenericClass &&
             y2.kind == SpecKind::Class) ||
            (f2.kind == MorphismKind::TemplateParameter && y2.kind == SpecKind::GenericClass &&
             y1.kind == SpecKind::Class)))
    out.tag = PatternTag::TemplateParameterPassing;
  else if (instantiating(f1.kind) || instantiating(f2.kind))
    out.tag = PatternTag::ObjectInstantiation;
  else if (apex.kind == SpecKind::AbstractClass &&
           ((f1.kind == MorphismKind::Inheritance && is_extension_leg(apex, f2, y2)) ||
            (f2.kind == MorphismKind::Inheritance && is_extension_leg(apex, f1, y1))))
    out.tag = PatternTag::Polymorphism;
  else
    out.tag = PatternTag::GenericGluing;
  return out;
}

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Whole-token substitution inside possibly compound names like "T<X>".
std::string rewrite_token(const std::string& text, const std::string& from, const std::string& to) {
  std::string out;
  size_t i = 0;
  while (i < text.size()) {
    if (ident_char(text[i])) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string token = text.substr(i, j - i);
      out += (token == from) ? to : token;
      i = j;
    } else {
      out += text[i++];
    }
  }
  return out;
}

std::string unique_name(const Diagram& d, std::string base) {
  std::string name = base;
  int n = 2;
  while (d.has_morphism(name)) name = base + "#" + std::to_string(n++);
  return name;
}

// Finds an existing single-step morphism between the given endpoints,
// preferring the requested kind; alphabetical tie-break.
const Morphism* find_arrow(const Diagram& d, const std::string& src, const std::string& tgt,
                           std::optional<MorphismKind> kind) {
  const Morphism* found = nullptr;
  for (const auto& [_, m] : d.morphisms) {
    if (m.source != src || m.target != tgt) continue;
    bool single = std::all_of(m.mapping.begin(), m.mapping.end(),
                              [](const auto& e) { return e.second.is_single(); });
    if (!single) continue;
    if (kind && m.kind != *kind) continue;
    if (!found) found = &m;
  }
  return found;
}

Morphism like_named_morphism(const Diagram& d, std::string name, const std::string& src,
                             const std::string& tgt, MorphismKind kind, const std::string& why) {
  const Specification& source = d.spec(src);
  const Specification& target = d.spec(tgt);
  Morphism m;
  m.name = std::move(name);
  m.source = src;
  m.target = tgt;
  m.kind = kind;
  for (const auto& [n, _] : source.members) {
    if (!target.members.count(n))
      throw InvalidDiagram(why + ": '" + tgt + "' lacks member '" + n + "'");
    m.mapping.emplace(n, MemberExpr::single(n));
  }
  return m;
}

}  // namespace

ConstructionResult template_instantiate(const Diagram& d, const std::string& generic_name,
                                        const std::string& param, const std::string& actual,
                                        const std::string& result_name) {
  const Specification& generic = d.spec(generic_name);
  if (generic.kind != SpecKind::GenericClass)
    throw NotGeneric("'" + generic_name + "' is not a generic-class");
  if (std::find(generic.type_params.begin(), generic.type_params.end(), param) ==
      generic.type_params.end())
    throw NotGeneric("'" + generic_name + "' has no type parameter '" + param + "'");
  const Specification& param_spec = d.spec(param);
  if (param_spec.kind != SpecKind::TypeParameter)
    throw NotGeneric("'" + param + "' is not a type-parameter specification");
  const Specification& actual_spec = d.spec(actual);

  for (const auto& [n, required] : param_spec.members) {
    const Member* provided = actual_spec.find_member(n);
    if (!provided)
      throw MissingInterfaceMember("'" + actual + "' lacks required member '" + n + "'");
    bool ok = provided->kind == required.kind ||
              (required.kind == MemberKind::PureVirtualMethod && provided->kind == MemberKind::Method) ||
              (required.kind == MemberKind::Method && provided->kind == MemberKind::PureVirtualMethod);
    if (!ok)
      throw MissingInterfaceMember("'" + actual + "' member '" + n + "' has kind '" +
                                   std::string(to_string(provided->kind)) + "', required '" +
                                   std::string(to_string(required.kind)) + "'");
  }

  ConstructionResult out;
  Diagram local = d;
  const Morphism* leg1 = find_arrow(local, param, generic_name, MorphismKind::TemplateParameter);
  if (!leg1) {
    Morphism m = like_named_morphism(local, unique_name(local, "tp." + param + "." + generic_name),
                                     param, generic_name, MorphismKind::TemplateParameter,
                                     "template parameterization of '" + generic_name + "'");
    out.created_morphisms.push_back(m);
    local.add_morphism(std::move(m));
    leg1 = &local.morphism(out.created_morphisms.back().name);
  }
  const Morphism* leg2 = find_arrow(local, param, actual, std::nullopt);
  if (!leg2) {
    Morphism m = like_named_morphism(local, unique_name(local, "impl." + param + "." + actual), param,
                                     actual, MorphismKind::Implementation,
                                     "interface of parameter '" + param + "'");
    out.created_morphisms.push_back(m);
    local.add_morphism(std::move(m));
    leg2 = &local.morphism(out.created_morphisms.back().name);
  }

  Span span{param, leg1->name, leg2->name};
  out.pushout = compute_pushout(local, span, result_name);
  out.pushout.vertex_spec.kind = SpecKind::Class;
  out.pushout.vertex_spec.type_params.clear();
  for (auto& [_, member] : out.pushout.vertex_spec.members)
    for (auto& sort : member.signature) sort = rewrite_token(sort, param, actual);
  return out;
}

ConstructionResult instantiate_object(const Diagram& d, const std::string& cls,
                                      const std::string& obj_name, const std::vector<CtorArg>& args) {
  const Specification& c = d.spec(cls);
  if (c.kind != SpecKind::Class && c.kind != SpecKind::BuiltinType)
    throw NotInstantiable("cannot instantiate '" + cls + "' of kind '" +
                          std::string(to_string(c.kind)) + "'");

  std::string name;
  if (c.kind == SpecKind::BuiltinType && args.size() == 1) {
    name = args[0].literal + ";";
  } else if (args.empty()) {
    name = cls + " " + obj_name + ";";
  } else {
    name = cls + " " + obj_name + "(";
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) name += ", ";
      name += args[i].literal;
    }
    name += ");";
  }
  if (d.has_spec(name)) throw NameTaken("object '" + name + "' already exists");

  ConstructionResult out;
  Diagram local = d;

  // The parameterized square of object instantiation: glue the class with
  // the argument object over the argument's type. Available only when the
  // diagram relates the argument sort to the class; otherwise (and for
  // builtin values, where the object is the argument itself) the square
  // degenerates to gluing along the identity.
  const Morphism* class_arrow = nullptr;
  std::string arg_sort;
  if (args.size() == 1 && c.kind != SpecKind::BuiltinType && local.has_spec(args[0].sort)) {
    arg_sort = args[0].sort;
    class_arrow = find_arrow(local, arg_sort, cls, std::nullopt);
  }

  if (class_arrow) {
    const Specification& sort_spec = local.spec(arg_sort);
    std::string arg_obj_name = args[0].literal + ";";
    if (!local.has_spec(arg_obj_name)) {
      Specification arg_obj;
      arg_obj.name = arg_obj_name;
      arg_obj.kind = SpecKind::Object;
      for (const auto& [n, m] : sort_spec.members) arg_obj.add_member(m);
      Member lit{args[0].literal, MemberKind::Value, {args[0].literal}, false};
      if (!arg_obj.members.count(lit.name)) arg_obj.add_member(lit);
      out.created_specs.push_back(arg_obj);
      local.add_spec(arg_obj);
      Morphism val = like_named_morphism(local, unique_name(local, "val." + args[0].literal),
                                         arg_sort, arg_obj_name, MorphismKind::Value,
                                         "value object '" + arg_obj_name + "'");
      out.created_morphisms.push_back(val);
      local.add_morphism(val);
    }
    const Morphism* val_arrow = find_arrow(local, arg_sort, arg_obj_name, std::nullopt);
    if (!val_arrow) throw UnknownEntity("no arrow from '" + arg_sort + "' into '" + arg_obj_name + "'");

    std::string class_arrow_name = class_arrow->name;
    Span span{arg_sort, class_arrow_name, val_arrow->name};
    out.pushout = compute_pushout(local, span, name);
  } else {
    // Degenerate square: span (id, iota), vertex the object itself.
    Specification obj;
    obj.name = name;
    obj.kind = SpecKind::Object;
    for (const auto& [n, m] : c.members) obj.add_member(m);
    for (const auto& arg : args) {
      Member lit{arg.literal, MemberKind::Value, {arg.literal}, false};
      std::string base = lit.name;
      int n2 = 2;
      while (obj.members.count(lit.name)) lit.name = base + "#" + std::to_string(n2++);
      obj.add_member(lit);
    }

    Morphism id = identity_morphism(c);
    if (!local.has_morphism(id.name)) {
      out.created_morphisms.push_back(id);
      local.add_morphism(id);
    }
    Morphism iota;
    iota.name = unique_name(local, "inst." + (obj_name.empty() ? name : obj_name));
    iota.source = cls;
    iota.target = name;
    iota.kind = c.kind == SpecKind::BuiltinType ? MorphismKind::Value : MorphismKind::Instantiation;
    for (const auto& [n, _] : c.members) iota.mapping.emplace(n, MemberExpr::single(n));

    Morphism obj_id = identity_morphism(obj);

    PushoutResult& p = out.pushout;
    p.vertex_spec = obj;
    p.left_coproj = iota;
    p.right_coproj = obj_id;
    p.cone = Cone{Span{cls, id.name, iota.name}, name, iota.name, obj_id.name};
    for (const auto& [n, m] : obj.members) {
      std::vector<OriginRef> origins;
      if (c.members.count(n)) origins.push_back({Side::Left, n});
      origins.push_back({Side::Right, n});
      p.provenance.emplace(n, std::move(origins));
    }
    p.added_equation = Equation{Path{{id.name, iota.name}, {}}, Path{{iota.name, obj_id.name}, {}}};
    // iota and the object identity enter the diagram as the coprojections.
    return out;
  }

  // Retag the computed square as an instantiation: the class-side
  // coprojection is the instantiation arrow of the new object.
  out.pushout.vertex_spec.kind = SpecKind::Object;
  out.pushout.left_coproj.kind =
      c.kind == SpecKind::BuiltinType ? MorphismKind::Value : MorphismKind::Instantiation;
  return out;
}

ConstructionResult polymorphism_apply(const Diagram& d, const std::string& abstract_name,
                                      const std::string& extension, const std::string& derived,
                                      const std::string& result_name) {
  const Specification& abstract_spec = d.spec(abstract_name);
  if (abstract_spec.kind != SpecKind::AbstractClass)
    throw InvalidDiagram("'" + abstract_name + "' must be an abstract-class");
  const Specification& ext = d.spec(extension);
  const Specification& der = d.spec(derived);

  for (const auto& [n, m] : abstract_spec.members) {
    if (!ext.members.count(n))
      throw InvalidDiagram("extension '" + extension + "' lacks member '" + n + "' of '" +
                           abstract_name + "'");
    const Member* impl = der.find_member(n);
    if (!impl)
      throw InvalidDiagram("derived '" + derived + "' lacks member '" + n + "' of '" +
                           abstract_name + "'");
    if (m.kind == MemberKind::PureVirtualMethod && impl->kind != MemberKind::Method)
      throw UnimplementedVirtual("derived '" + derived + "' leaves '" + n + "' unimplemented");
  }

  ConstructionResult out;
  Diagram local = d;
  const Morphism* inh = find_arrow(local, abstract_name, derived, MorphismKind::Inheritance);
  if (!inh) {
    Morphism m = like_named_morphism(local, unique_name(local, "inh." + abstract_name + "." + derived),
                                     abstract_name, derived, MorphismKind::Inheritance,
                                     "inheritance from '" + abstract_name + "'");
    out.created_morphisms.push_back(m);
    local.add_morphism(std::move(m));
    inh = &local.morphism(out.created_morphisms.back().name);
  }
  const Morphism* ext_leg = find_arrow(local, abstract_name, extension, std::nullopt);
  if (!ext_leg) {
    Morphism m = like_named_morphism(local, unique_name(local, "ext." + abstract_name + "." + extension),
                                     abstract_name, extension, MorphismKind::Generic,
                                     "extension '" + extension + "'");
    out.created_morphisms.push_back(m);
    local.add_morphism(std::move(m));
    ext_leg = &local.morphism(out.created_morphisms.back().name);
  }

  Span span{abstract_name, inh->name, ext_leg->name};
  out.pushout = compute_pushout(local, span, result_name);
  return out;
}

EnvelopeResult make_envelope(EnvelopeVariant variant,
                             const std::optional<Specification>& abstract_spec) {
  EnvelopeResult out;
  out.parameter.name = "B";
  out.parameter.kind = SpecKind::TypeParameter;
  if (abstract_spec) {
    // The envelope forwards the abstract interface to the wrapped object,
    // so the parameter must provide it (as ordinary methods).
    for (const auto& [n, m] : abstract_spec->members) {
      Member required = m;
      if (required.kind == MemberKind::PureVirtualMethod) required.kind = MemberKind::Method;
      out.parameter.add_member(required);
    }
  } else if (variant == EnvelopeVariant::Inheritance) {
    out.parameter.add_member(Member{"mygenericmethod", MemberKind::Method, {"V"}, true});
  }

  out.envelope.name = "Env";
  out.envelope.kind = SpecKind::GenericClass;
  out.envelope.type_params = {"B"};
  if (variant == EnvelopeVariant::Inheritance) {
    // Every template characteristic of B survives except constructors
    // and destructors; the envelope declares its own.
    for (const auto& [n, m] : out.parameter.members)
      if (m.kind != MemberKind::Constructor && m.kind != MemberKind::Destructor)
        out.envelope.add_member(m);
  } else {
    for (const auto& [n, m] : out.parameter.members)
      if (!out.envelope.members.count(n)) out.envelope.add_member(m);
    std::string sort = variant == EnvelopeVariant::Copy ? "B" : "B*";
    out.envelope.add_member(Member{"_b", MemberKind::Field, {sort}, false});
  }
  if (abstract_spec)
    for (const auto& [n, m] : abstract_spec->members)
      if (!out.envelope.members.count(n)) {
        Member impl = m;
        if (impl.kind == MemberKind::PureVirtualMethod) impl.kind = MemberKind::Method;
        out.envelope.add_member(impl);
      }

  Morphism param_arrow;
  param_arrow.name = variant == EnvelopeVariant::Inheritance ? "inh.B.Env" : "tp.B.Env";
  param_arrow.source = "B";
  param_arrow.target = "Env";
  param_arrow.kind = variant == EnvelopeVariant::Inheritance ? MorphismKind::Inheritance
                                                             : MorphismKind::TemplateParameter;
  for (const auto& [n, _] : out.parameter.members)
    param_arrow.mapping.emplace(n, MemberExpr::single(n));
  out.morphisms.push_back(std::move(param_arrow));

  if (abstract_spec) {
    Morphism inh_abs;
    inh_abs.name = "inh." + abstract_spec->name + ".Env";
    inh_abs.source = abstract_spec->name;
    inh_abs.target = "Env";
    inh_abs.kind = MorphismKind::Inheritance;
    for (const auto& [n, _] : abstract_spec->members)
      inh_abs.mapping.emplace(n, MemberExpr::single(n));
    out.morphisms.push_back(std::move(inh_abs));
  }
  return out;
}

std::vector<Member> constructor_adjustment(const PushoutResult& p) {
  std::vector<Member> out;
  for (const auto& [_, m] : p.vertex_spec.members)
    if (m.kind == MemberKind::Constructor || m.kind == MemberKind::Destructor) out.push_back(m);
  return out;
}

}  // namespace dml
