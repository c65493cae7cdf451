#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dml/core.hpp"

// Pushouts of spans by amalgamated union, universal-property verification
// and mediating morphisms.

namespace dml {

struct Span {
  std::string apex;   // specification name (the gluing point)
  std::string left;   // morphism name, apex -> Y1
  std::string right;  // morphism name, apex -> Y2

  friend bool operator==(const Span&, const Span&) = default;
};

struct Cone {
  Span base;
  std::string vertex;        // specification name
  std::string left_coproj;   // morphism name, Y1 -> vertex
  std::string right_coproj;  // morphism name, Y2 -> vertex

  friend bool operator==(const Cone&, const Cone&) = default;
};

enum class Side { Left, Right };

struct OriginRef {
  Side side;
  std::string member;

  friend auto operator<=>(const OriginRef&, const OriginRef&) = default;
};

/// The diagram delta produced by a pushout computation: the fresh vertex,
/// both coprojections, per-member provenance and the commuting equation.
struct PushoutResult {
  Cone cone;
  Specification vertex_spec;
  Morphism left_coproj;
  Morphism right_coproj;
  std::map<std::string, std::vector<OriginRef>> provenance;
  Equation added_equation;
};

enum class NamingPolicy {
  PreferShared,     // keep the shared name, qualify only on collision
  AlwaysQualified,  // every vertex member gets an "Origin::name" form
};

PushoutResult compute_pushout(const Diagram& d, const Span& s, const std::string& vertex_name,
                              NamingPolicy policy = NamingPolicy::PreferShared);

/// Inserts the result's vertex, coprojections and equation into a copy of d.
Diagram with_pushout(Diagram d, const PushoutResult& r);

bool verify_cone_commutes(const Diagram& d, const Cone& c);

struct Certificate {
  enum class Kind { Isomorphism, ExtraMember, MergedPair, KindMismatch, CompositeImage };
  Kind kind = Kind::Isomorphism;
  std::map<std::string, std::string> iso;  // canonical vertex member -> cone vertex member
  std::string witness_member;
  std::pair<std::string, std::string> witness_pair;
  std::string detail;
};

std::string_view to_string(Certificate::Kind k);

struct PushoutCheck {
  bool ok = false;
  Certificate certificate;
};

/// Universal-property check via the canonical comparison map: true iff the
/// map from the computed pushout vertex onto the cone's vertex is a
/// kind-preserving bijection. Throws NonCommutingCone when c does not
/// commute.
PushoutCheck is_pushout(const Diagram& d, const Cone& c);

/// The unique arrow from the pushout vertex into another commuting cone
/// over the same base.
Morphism mediating_morphism(const Diagram& d, const PushoutResult& p, const Cone& other);

/// Reconstructs the PushoutResult standing behind an already-declared cone
/// (provenance transported through the comparison isomorphism). Throws
/// NotAPushout when the cone fails verification.
PushoutResult pushout_result_of(const Diagram& d, const Cone& c);

}  // namespace dml
