#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dml/core.hpp"
#include "dml/pushout.hpp"

// Builders and classifiers for the object-oriented readings of pushouts:
// virtual inheritance, template parameter passing, object instantiation,
// polymorphism and envelopes.

namespace dml {

enum class PatternTag {
  VirtualInheritance,
  TemplateParameterPassing,
  ObjectInstantiation,
  Polymorphism,
  GenericGluing,
};

std::string_view to_string(PatternTag t);

struct PushoutPattern {
  PatternTag tag = PatternTag::GenericGluing;
  std::map<std::string, std::string> bindings;  // gluing-point / left / right / vertex
};

/// First-match classification of a verified pushout. Throws NotAPushout
/// when the result fails re-verification.
PushoutPattern classify_pushout(const Diagram& d, const PushoutResult& p);

/// A pushout plus the auxiliary entities an OO builder had to create
/// (legs, parameter objects). `apply` inserts everything into a copy of
/// the diagram.
struct ConstructionResult {
  PushoutResult pushout;
  std::vector<Specification> created_specs;
  std::vector<Morphism> created_morphisms;

  Diagram apply(Diagram d) const;
};

ConstructionResult template_instantiate(const Diagram& d, const std::string& generic_name,
                                        const std::string& param, const std::string& actual,
                                        const std::string& result_name);

struct CtorArg {
  std::string literal;
  std::string sort;  // name of a builtin or parameter type
};

ConstructionResult instantiate_object(const Diagram& d, const std::string& cls,
                                      const std::string& obj_name, const std::vector<CtorArg>& args);

ConstructionResult polymorphism_apply(const Diagram& d, const std::string& abstract_name,
                                      const std::string& extension, const std::string& derived,
                                      const std::string& result_name);

enum class EnvelopeVariant { Copy, Indirect, Inheritance };

std::string_view to_string(EnvelopeVariant v);

/// A generic adaptor over a formal parameter B, plus the type-parameter
/// specification for B and the arrows tying the pieces together.
struct EnvelopeResult {
  Specification envelope;
  Specification parameter;
  std::vector<Morphism> morphisms;
};

EnvelopeResult make_envelope(EnvelopeVariant variant,
                             const std::optional<Specification>& abstract_spec);

/// Constructors and destructors of a pushout vertex; these are not
/// inherited and must be re-declared explicitly by code generation.
std::vector<Member> constructor_adjustment(const PushoutResult& p);

}  // namespace dml
