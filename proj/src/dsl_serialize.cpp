#include <algorithm>
#include <cctype>
#include <sstream>

#include "dml/dsl.hpp"

namespace dml {

namespace {

bool plain_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  size_t i = 0;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
  if (i == s.size()) {
    // Bare identifiers that collide with keywords must be quoted.
    static const char* kReserved[] = {"spec", "generic", "morphism", "equation", "span",
                                      "pushout", "method", "pure", "ctor", "dtor",
                                      "field", "value", "type", "kind", "from",
                                      "coprojections", "as", "id"};
    for (const char* k : kReserved)
      if (s == k) return false;
    return true;
  }
  // Identifier followed by one balanced angle group: T<A>, Envelope<Zp>.
  if (s[i] != '<') return false;
  int depth = 0;
  for (; i < s.size(); ++i) {
    if (s[i] == '<')
      ++depth;
    else if (s[i] == '>') {
      --depth;
      if (depth == 0) return i + 1 == s.size();
    } else if (s[i] == '"' || s[i] == '\\' || s[i] == '#') {
      return false;
    }
  }
  return false;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string name(const std::string& s) { return plain_name(s) ? s : quoted(s); }

// Bare literals must re-lex as one number token: digits with interior
// dots, each dot followed by a digit.
std::string literal(const std::string& s) {
  if (plain_name(s)) return s;
  bool number_like = !s.empty() && std::isdigit(static_cast<unsigned char>(s[0]));
  for (size_t i = 0; number_like && i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) continue;
    if (s[i] == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))
      continue;
    number_like = false;
  }
  if (number_like) return s;
  return quoted(s);
}

std::string signature(const std::vector<std::string>& sig) {
  std::string out = "(";
  for (size_t i = 0; i < sig.size(); ++i) {
    if (i) out += ", ";
    out += name(sig[i]);
  }
  return out + ")";
}

void emit_member(std::ostringstream& out, const Member& m) {
  out << "  ";
  switch (m.kind) {
    case MemberKind::Method:
    case MemberKind::PureVirtualMethod:
      if (m.kind == MemberKind::PureVirtualMethod) out << "pure ";
      if (m.is_generic) out << "generic ";
      out << "method " << name(m.name) << signature(m.signature);
      break;
    case MemberKind::Constructor:
      out << "ctor" << signature(m.signature);
      break;
    case MemberKind::Destructor:
      out << "dtor" << signature(m.signature);
      break;
    case MemberKind::Field:
      out << "field " << name(m.name) << ": " << name(m.signature.empty() ? "" : m.signature[0]);
      break;
    case MemberKind::Value:
      out << "value " << name(m.name) << " = "
          << literal(m.signature.empty() ? m.name : m.signature[0]);
      break;
    case MemberKind::TypeMember:
      out << "type " << name(m.name);
      break;
  }
  out << "\n";
}

std::string render_path(const Path& p) {
  if (p.is_identity()) return "id(" + name(p.at) + ")";
  std::string out;
  for (size_t i = 0; i < p.steps.size(); ++i) {
    if (i) out += ";";
    out += name(p.steps[i]);
  }
  return out;
}

}  // namespace

std::string serialize(const Diagram& d) {
  std::vector<Violation> violations = validate_diagram(d);
  if (!violations.empty())
    throw InvalidDiagram("cannot serialize: [" + violations.front().rule + "] " +
                         violations.front().detail);

  std::ostringstream out;
  out << "# dml\n";
  for (const auto& [_, s] : d.specifications) {
    if (s.kind == SpecKind::GenericClass) {
      out << "\ngeneric " << name(s.name);
      for (const auto& p : s.type_params) out << " " << name(p);
    } else {
      out << "\nspec " << name(s.name) << " " << to_string(s.kind);
    }
    if (s.members.empty()) {
      out << " {}\n";
      continue;
    }
    out << " {\n";
    for (const auto& [_, m] : s.members) emit_member(out, m);
    out << "}\n";
  }

  for (const auto& [_, m] : d.morphisms) {
    out << "\nmorphism " << name(m.name) << " : " << name(m.source) << " -> " << name(m.target)
        << " kind=" << to_string(m.kind);
    // Only non-default entries are written; like-named mappings are implied.
    std::vector<std::pair<std::string, const MemberExpr*>> explicit_entries;
    for (const auto& [from, expr] : m.mapping)
      if (!(expr.is_single() && expr.steps[0] == from)) explicit_entries.push_back({from, &expr});
    if (explicit_entries.empty()) {
      out << "\n";
      continue;
    }
    out << " {\n";
    for (const auto& [from, expr] : explicit_entries) {
      out << "  " << name(from) << " -> ";
      for (size_t i = 0; i < expr->steps.size(); ++i) {
        if (i) out << ".";
        out << name(expr->steps[i]);
      }
      out << "\n";
    }
    out << "}\n";
  }

  std::vector<std::string> equations;
  for (const auto& eq : d.equations)
    equations.push_back(render_path(eq.lhs) + " = " + render_path(eq.rhs));
  std::sort(equations.begin(), equations.end());
  if (!equations.empty()) out << "\n";
  for (const auto& eq : equations) out << "equation " << eq << "\n";

  if (!d.spans.empty()) out << "\n";
  for (const auto& [_, sp] : d.spans)
    out << "span " << name(sp.name) << " (" << name(sp.apex) << ", " << name(sp.left) << ", "
        << name(sp.right) << ")\n";

  if (!d.pushout_decls.empty()) out << "\n";
  for (const auto& [_, po] : d.pushout_decls) {
    out << "pushout " << name(po.vertex) << " from span(" << name(po.apex) << ", " << name(po.left)
        << ", " << name(po.right) << ")";
    if (!po.left_coproj.empty() && !po.right_coproj.empty())
      out << " coprojections(" << name(po.left_coproj) << ", " << name(po.right_coproj) << ")";
    if (po.name != po.vertex) out << " as " << name(po.name);
    out << "\n";
  }
  return out.str();
}

}  // namespace dml
