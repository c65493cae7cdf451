#include "dml/codegen.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace dml {

std::string_view to_string(Dialect d) {
  switch (d) {
    case Dialect::Curly: return "curly";
    case Dialect::Interface: return "interface";
  }
  return "?";
}

namespace {

// Topological order along morphisms (sources first), alphabetical
// tie-break, cycles appended alphabetically.
std::vector<std::string> emission_order(const Diagram& d) {
  std::map<std::string, std::set<std::string>> preds;
  for (const auto& [n, _] : d.specifications) preds[n];
  for (const auto& [_, m] : d.morphisms)
    if (m.source != m.target) preds[m.target].insert(m.source);
  std::vector<std::string> order;
  std::set<std::string> done;
  while (order.size() < preds.size()) {
    bool progressed = false;
    for (auto& [n, ps] : preds) {
      if (done.count(n)) continue;
      bool ready = std::all_of(ps.begin(), ps.end(), [&](const auto& p) { return done.count(p); });
      if (ready) {
        order.push_back(n);
        done.insert(n);
        progressed = true;
      }
    }
    if (!progressed) {
      for (auto& [n, _] : preds)
        if (!done.count(n)) {
          order.push_back(n);
          done.insert(n);
        }
    }
  }
  return order;
}

// Inheritance morphisms taking part in a declared virtual-inheritance
// square (both legs inheritance) get the virtual marker.
std::set<std::string> virtual_marked(const Diagram& d) {
  std::set<std::string> marked;
  for (const auto& [_, po] : d.pushout_decls) {
    if (!d.has_morphism(po.left) || !d.has_morphism(po.right)) continue;
    if (d.morphism(po.left).kind != MorphismKind::Inheritance ||
        d.morphism(po.right).kind != MorphismKind::Inheritance)
      continue;
    for (const std::string* name : {&po.left, &po.right, &po.left_coproj, &po.right_coproj})
      if (!name->empty() && d.has_morphism(*name) &&
          d.morphism(*name).kind == MorphismKind::Inheritance)
        marked.insert(*name);
  }
  return marked;
}

struct IncomingBase {
  std::string base;      // source specification
  MorphismKind kind;     // Inheritance or Implementation
  bool virtual_mark;
  std::string morphism;
};

std::vector<IncomingBase> bases_of(const Diagram& d, const std::string& spec,
                                   const std::set<std::string>& vmarks) {
  std::vector<IncomingBase> out;
  for (const auto& [n, m] : d.morphisms) {
    if (m.target != spec) continue;
    if (m.kind != MorphismKind::Inheritance && m.kind != MorphismKind::Implementation) continue;
    out.push_back({m.source, m.kind, vmarks.count(n) != 0, n});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.base != b.base) return a.base < b.base;
    return a.morphism < b.morphism;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) { return a.base == b.base; }),
            out.end());
  return out;
}

// A member is suppressed when it is inherited as-is through an incoming
// inheritance/implementation arrow. Constructors, destructors and
// implementations of pure-virtual members stay declared.
std::set<std::string> suppressed_members(const Diagram& d, const Specification& s) {
  std::set<std::string> out;
  for (const auto& [_, m] : d.morphisms) {
    if (m.target != s.name) continue;
    if (m.kind != MorphismKind::Inheritance && m.kind != MorphismKind::Implementation) continue;
    if (!d.has_spec(m.source)) continue;
    const Specification& src = d.spec(m.source);
    for (const auto& [from, expr] : m.mapping) {
      if (!expr.is_single()) continue;
      const Member* source_member = src.find_member(from);
      const Member* target_member = s.find_member(expr.steps[0]);
      if (!source_member || !target_member) continue;
      if (target_member->kind == MemberKind::Constructor ||
          target_member->kind == MemberKind::Destructor)
        continue;
      if (source_member->kind == MemberKind::PureVirtualMethod &&
          target_member->kind == MemberKind::Method)
        continue;  // an override must appear
      out.insert(target_member->name);
    }
  }
  return out;
}

std::string params(const std::vector<std::string>& sig) {
  std::string out;
  for (size_t i = 0; i < sig.size(); ++i) {
    if (i) out += ", ";
    out += sig[i] + " a" + std::to_string(i);
  }
  return out;
}

void curly_member(std::ostringstream& out, const Specification& s, const Member& m) {
  switch (m.kind) {
    case MemberKind::Method:
      if (m.is_generic) out << "  template <typename V>\n";
      out << "  void " << m.name << "(" << params(m.signature) << ") { /* TODO */ }\n";
      break;
    case MemberKind::PureVirtualMethod:
      out << "  virtual void " << m.name << "(" << params(m.signature) << ") = 0;\n";
      break;
    case MemberKind::Constructor:
      out << "  " << s.name << "(" << params(m.signature) << ") { /* TODO */ }\n";
      break;
    case MemberKind::Destructor:
      out << "  ~" << s.name << "() { /* TODO */ }\n";
      break;
    case MemberKind::Field:
      out << "  " << (m.signature.empty() ? std::string("void*") : m.signature[0]) << " " << m.name
          << ";\n";
      break;
    case MemberKind::Value:
      out << "  /* value " << m.name << " = " << (m.signature.empty() ? m.name : m.signature[0])
          << " */\n";
      break;
    case MemberKind::TypeMember:
      out << "  using " << m.name << " = void; /* TODO */\n";
      break;
  }
}

std::string java_ident(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  return out;
}

void interface_member(std::ostringstream& out, const Specification& s, const Member& m,
                      bool in_interface) {
  switch (m.kind) {
    case MemberKind::Method:
      if (m.is_generic) out << "  <V> ";
      else out << "  ";
      out << "void " << m.name << "(" << params(m.signature) << ")";
      out << (in_interface ? ";\n" : " { /* TODO */ }\n");
      break;
    case MemberKind::PureVirtualMethod:
      out << "  void " << m.name << "(" << params(m.signature) << ");\n";
      break;
    case MemberKind::Constructor:
      out << "  " << java_ident(s.name) << "(" << params(m.signature) << ") { /* TODO */ }\n";
      break;
    case MemberKind::Destructor:
      break;  // no destructors in this dialect
    case MemberKind::Field:
      out << "  " << (m.signature.empty() ? std::string("Object") : m.signature[0]) << " " << m.name
          << ";\n";
      break;
    case MemberKind::Value:
      out << "  /* value " << m.name << " = " << (m.signature.empty() ? m.name : m.signature[0])
          << " */\n";
      break;
    case MemberKind::TypeMember:
      out << "  /* nested type " << m.name << " */\n";
      break;
  }
}

std::string curly_unit(const Diagram& d, const Specification& s, const std::set<std::string>& vmarks) {
  std::ostringstream out;
  switch (s.kind) {
    case SpecKind::BuiltinType:
      out << "// builtin type: " << s.name << "\n";
      return out.str();
    case SpecKind::TypeParameter: {
      out << "// formal type parameter: " << s.name << "\n";
      for (const auto& [_, m] : s.members)
        out << "//   requires " << m.name << "(" << params(m.signature) << ")\n";
      return out.str();
    }
    case SpecKind::Unit:
      return "";
    default:
      break;
  }
  if (s.kind == SpecKind::GenericClass) {
    out << "template <";
    for (size_t i = 0; i < s.type_params.size(); ++i) {
      if (i) out << ", ";
      out << "typename " << s.type_params[i];
    }
    out << ">\n";
  }
  out << "struct " << s.name;
  auto bases = bases_of(d, s.name, vmarks);
  for (size_t i = 0; i < bases.size(); ++i) {
    out << (i ? ", " : " : ");
    out << "public " << (bases[i].virtual_mark ? "virtual " : "") << bases[i].base;
  }
  out << " {\n";
  std::set<std::string> hidden = suppressed_members(d, s);
  for (const auto& [n, m] : s.members)
    if (!hidden.count(n)) curly_member(out, s, m);
  out << "};\n";
  return out.str();
}

std::string interface_unit(const Diagram& d, const Specification& s,
                           const std::set<std::string>& vmarks) {
  std::ostringstream out;
  switch (s.kind) {
    case SpecKind::BuiltinType:
      out << "// builtin type: " << s.name << "\n";
      return out.str();
    case SpecKind::TypeParameter: {
      out << "// formal type parameter: " << s.name << "\n";
      for (const auto& [_, m] : s.members)
        out << "//   requires " << m.name << "(" << params(m.signature) << ")\n";
      return out.str();
    }
    case SpecKind::GenericClass:
      // This dialect has no class templates; the construct is reported as
      // a documented limitation instead of being dropped.
      out << "// " << s.name << " is a generic class over <";
      for (size_t i = 0; i < s.type_params.size(); ++i) {
        if (i) out << ", ";
        out << s.type_params[i];
      }
      out << ">;\n// the interface dialect cannot express it. Instantiate per parameter instead.\n";
      return out.str();
    case SpecKind::Unit:
      return "";
    default:
      break;
  }
  bool is_interface = s.kind == SpecKind::AbstractClass;
  out << (is_interface ? "interface " : "class ") << java_ident(s.name);
  auto bases = bases_of(d, s.name, vmarks);
  std::vector<std::string> extends, implements;
  for (const auto& b : bases)
    (b.kind == MorphismKind::Inheritance ? extends : implements).push_back(java_ident(b.base));
  for (size_t i = 0; i < extends.size(); ++i) out << (i ? ", " : " extends ") << extends[i];
  for (size_t i = 0; i < implements.size(); ++i) out << (i ? ", " : " implements ") << implements[i];
  out << " {\n";
  std::set<std::string> hidden = suppressed_members(d, s);
  for (const auto& [n, m] : s.members)
    if (!hidden.count(n)) interface_member(out, s, m, is_interface);
  out << "}\n";
  return out.str();
}

// Objects become statements in one main-like block, ordered by the
// instantiation dependencies between them.
std::string main_unit(const std::vector<std::string>& object_order, Dialect dialect) {
  std::ostringstream out;
  if (dialect == Dialect::Curly) {
    out << "int main() {\n";
    for (const auto& name : object_order) {
      out << "  " << name;
      if (name.empty() || name.back() != ';') out << ";";
      out << "\n";
    }
    out << "  return 0;\n}\n";
  } else {
    out << "class Main {\n  public static void main(String[] args) {\n";
    for (const auto& name : object_order) {
      out << "    " << name;
      if (name.empty() || name.back() != ';') out << ";";
      out << "\n";
    }
    out << "  }\n}\n";
  }
  return out.str();
}

}  // namespace

std::vector<SkeletonUnit> emit_skeleton(const Diagram& d, Dialect dialect) {
  std::vector<Violation> violations = validate_diagram(d);
  if (!violations.empty())
    throw InvalidDiagram("cannot emit skeletons: [" + violations.front().rule + "] " +
                         violations.front().detail);
  std::set<std::string> vmarks = virtual_marked(d);
  std::vector<SkeletonUnit> units;
  std::vector<std::string> objects;
  for (const auto& name : emission_order(d)) {
    const Specification& s = d.spec(name);
    if (s.kind == SpecKind::Object) {
      objects.push_back(name);
      continue;
    }
    SkeletonUnit u;
    u.spec_name = name;
    u.dialect = dialect;
    u.text = dialect == Dialect::Curly ? curly_unit(d, s, vmarks) : interface_unit(d, s, vmarks);
    units.push_back(std::move(u));
  }
  if (!objects.empty())
    units.push_back({"main", dialect, main_unit(objects, dialect)});
  return units;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string_view node_shape(SpecKind k) {
  switch (k) {
    case SpecKind::Class: return "box";
    case SpecKind::AbstractClass: return "octagon";
    case SpecKind::GenericClass: return "box3d";
    case SpecKind::BuiltinType: return "ellipse";
    case SpecKind::Object: return "note";
    case SpecKind::TypeParameter: return "diamond";
    case SpecKind::Unit: return "circle";
  }
  return "box";
}

}  // namespace

std::set<std::string> declared_coprojections(const Diagram& d) {
  std::set<std::string> out;
  for (const auto& [_, po] : d.pushout_decls) {
    if (!po.left_coproj.empty()) out.insert(po.left_coproj);
    if (!po.right_coproj.empty()) out.insert(po.right_coproj);
  }
  return out;
}

std::string emit_dot_marked(const Diagram& d, const std::set<std::string>& dashed_morphisms) {
  std::vector<Violation> violations = validate_diagram(d);
  if (!violations.empty())
    throw InvalidDiagram("cannot render: [" + violations.front().rule + "] " +
                         violations.front().detail);
  std::ostringstream out;
  out << "digraph dml {\n";
  out << "  rankdir=LR;\n";
  out << "  node [fontsize=11];\n";
  out << "  edge [fontsize=9];\n";
  for (const auto& [n, s] : d.specifications)
    out << "  \"" << dot_escape(n) << "\" [shape=" << node_shape(s.kind) << "];\n";
  for (const auto& [n, m] : d.morphisms) {
    out << "  \"" << dot_escape(m.source) << "\" -> \"" << dot_escape(m.target) << "\" [label=\""
        << dot_escape(std::string(to_string(m.kind))) << "\"";
    if (dashed_morphisms.count(n)) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string emit_dot(const Diagram& d, const std::vector<PushoutResult>& marked) {
  std::set<std::string> dashed;
  for (const auto& p : marked) {
    dashed.insert(p.cone.left_coproj);
    dashed.insert(p.cone.right_coproj);
  }
  return emit_dot_marked(d, dashed);
}

std::string skeleton_file_name(const SkeletonUnit& unit) {
  std::string safe;
  for (char c : unit.spec_name)
    safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
  return safe + ".skeleton." + std::string(to_string(unit.dialect));
}

}  // namespace dml
