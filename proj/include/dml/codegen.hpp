#pragma once

#include <set>
#include <string>
#include <vector>

#include "dml/core.hpp"
#include "dml/pushout.hpp"

// Skeleton emission in two dialects plus DOT rendering of diagrams. All
// emitters are deterministic: equal diagrams give byte-identical output.

namespace dml {

enum class Dialect { Curly, Interface };

std::string_view to_string(Dialect d);

/// One generated source-text artifact. Object specifications are gathered
/// into a synthetic "main" unit rather than emitted standalone.
struct SkeletonUnit {
  std::string spec_name;
  Dialect dialect = Dialect::Curly;
  std::string text;
};

std::vector<SkeletonUnit> emit_skeleton(const Diagram& d, Dialect dialect);

std::string emit_dot(const Diagram& d, const std::vector<PushoutResult>& marked);

/// DOT emission with an explicit set of morphism names to render dashed.
std::string emit_dot_marked(const Diagram& d, const std::set<std::string>& dashed_morphisms);

/// Coprojection morphism names of every pushout declared in the diagram
/// (what the default rendering dashes).
std::set<std::string> declared_coprojections(const Diagram& d);

/// Filesystem-safe unit file name: "<spec>.skeleton.<dialect>".
std::string skeleton_file_name(const SkeletonUnit& unit);

}  // namespace dml
