#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Core data model: specifications (points), morphisms (arrows), diagrams
// (finitely presented categories), plus composition, identities and bounded
// path equality.

namespace dml {

enum class MemberKind {
  Method,
  PureVirtualMethod,
  Constructor,
  Destructor,
  Field,
  TypeMember,
  Value,
};

enum class SpecKind {
  Class,
  AbstractClass,
  GenericClass,
  BuiltinType,
  Object,
  TypeParameter,
  Unit,
};

enum class MorphismKind {
  Identity,
  Inheritance,
  Implementation,
  TemplateParameter,
  Instantiation,
  Value,
  Coprojection,
  Mediating,
  Generic,
};

std::string_view to_string(MemberKind k);
std::string_view to_string(SpecKind k);
std::string_view to_string(MorphismKind k);
std::optional<MemberKind> member_kind_from(std::string_view s);
std::optional<SpecKind> spec_kind_from(std::string_view s);
std::optional<MorphismKind> morphism_kind_from(std::string_view s);

/// Base class for all operation failures. `code` is a stable identifier
/// (e.g. "NonComposable") used by the CLI's machine reports.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

#define DML_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                         \
  public:                                                             \
    explicit Name(const std::string& msg) : Error(#Name, msg) {}      \
  }

DML_DEFINE_ERROR(NonComposable);
DML_DEFINE_ERROR(NonParallelPaths);
DML_DEFINE_ERROR(UnknownEntity);
DML_DEFINE_ERROR(CompositeLegTarget);
DML_DEFINE_ERROR(KindClash);
DML_DEFINE_ERROR(NameTaken);
DML_DEFINE_ERROR(NonCommutingCone);
DML_DEFINE_ERROR(BaseMismatch);
DML_DEFINE_ERROR(NotAPushout);
DML_DEFINE_ERROR(MissingInterfaceMember);
DML_DEFINE_ERROR(NotGeneric);
DML_DEFINE_ERROR(NotInstantiable);
DML_DEFINE_ERROR(UnimplementedVirtual);
DML_DEFINE_ERROR(IllFormedGraphMorphism);
DML_DEFINE_ERROR(NoSharedApex);
DML_DEFINE_ERROR(InvalidDiagram);
DML_DEFINE_ERROR(UnsupportedConstruct);

#undef DML_DEFINE_ERROR

/// A named constituent of a specification. For kind == Value the literal
/// text is carried in signature[0] (the member name doubles as the display
/// name); other kinds use `signature` as the ordered list of parameter
/// sorts. Sorts are plain names and are not resolved against the diagram.
struct Member {
  std::string name;
  MemberKind kind = MemberKind::Method;
  std::vector<std::string> signature;
  bool is_generic = false;  // a method with its own type parameter

  friend bool operator==(const Member&, const Member&) = default;
};

struct Specification {
  std::string name;
  SpecKind kind = SpecKind::Class;
  std::map<std::string, Member> members;  // keyed by member name
  std::vector<std::string> type_params;   // nonempty iff kind == GenericClass

  void add_member(Member m);
  const Member* find_member(const std::string& n) const;

  friend bool operator==(const Specification&, const Specification&) = default;
};

/// A member of the target, or a composition of members of the target.
struct MemberExpr {
  std::vector<std::string> steps;

  static MemberExpr single(std::string step) { return MemberExpr{{std::move(step)}}; }
  bool is_single() const { return steps.size() == 1; }
  std::string render() const;

  friend bool operator==(const MemberExpr&, const MemberExpr&) = default;
};

struct Morphism {
  std::string name;
  std::string source;
  std::string target;
  MorphismKind kind = MorphismKind::Generic;
  std::map<std::string, MemberExpr> mapping;  // total over source members

  friend bool operator==(const Morphism&, const Morphism&) = default;
};

/// A composable sequence of morphism names. An empty step list denotes the
/// identity path at specification `at`.
struct Path {
  std::vector<std::string> steps;
  std::string at;

  static Path identity(std::string spec) { return Path{{}, std::move(spec)}; }
  bool is_identity() const { return steps.empty(); }
  std::string render() const;

  friend bool operator==(const Path&, const Path&) = default;
};

struct Equation {
  Path lhs;
  Path rhs;

  friend bool operator==(const Equation&, const Equation&) = default;
};

/// A named span declaration (apex plus two leg morphism names).
struct SpanDecl {
  std::string name;
  std::string apex;
  std::string left;
  std::string right;

  friend bool operator==(const SpanDecl&, const SpanDecl&) = default;
};

/// A pushout square declaration. When the named vertex and coprojections
/// already exist in the diagram the declaration is verified; the engine can
/// also elaborate it by computing the vertex.
struct PushoutDecl {
  std::string name;  // defaults to the vertex name
  std::string vertex;
  std::string apex;
  std::string left;
  std::string right;
  std::string left_coproj;   // empty: discover or compute
  std::string right_coproj;  // empty: discover or compute

  friend bool operator==(const PushoutDecl&, const PushoutDecl&) = default;
};

struct Diagram {
  std::map<std::string, Specification> specifications;
  std::map<std::string, Morphism> morphisms;
  std::vector<Equation> equations;
  std::map<std::string, SpanDecl> spans;
  std::map<std::string, PushoutDecl> pushout_decls;

  bool has_spec(const std::string& n) const { return specifications.count(n) != 0; }
  bool has_morphism(const std::string& n) const { return morphisms.count(n) != 0; }
  const Specification& spec(const std::string& n) const;
  const Morphism& morphism(const std::string& n) const;
  void add_spec(Specification s);
  void add_morphism(Morphism m);
};

/// A broken invariant, reported as data. `rule` is a stable kebab-case
/// identifier, `entity` names the offending entity.
struct Violation {
  std::string rule;
  std::string entity;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

Morphism identity_morphism(const Specification& spec);

/// Diagrammatic composition: f : X -> Y, then g : Y -> Z. Member
/// expressions of f are expanded step-by-step through g's mapping and
/// flattened. Throws NonComposable on endpoint mismatch.
Morphism compose_morphisms(const Morphism& f, const Morphism& g);

std::vector<Violation> validate_diagram(const Diagram& d);

enum class Ternary { Equal, Unequal, Unknown };

struct PathEquality {
  Ternary verdict = Ternary::Unknown;
  std::string certificate_member;  // set when verdict == Unequal
};

/// Bounded three-valued path equality: "equal" when the paths are connected
/// by declared equations (plus unit rewrites) within `depth` rewrite steps,
/// "unequal" when the induced member mappings differ (with a certificate
/// member), "unknown" otherwise.
PathEquality paths_equal(const Diagram& d, const Path& p, const Path& q, int depth = 8);

std::string path_source(const Diagram& d, const Path& p);
std::string path_target(const Diagram& d, const Path& p);

/// The morphism induced by composing a path left to right.
Morphism compose_path(const Diagram& d, const Path& p);

}  // namespace dml
