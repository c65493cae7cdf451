#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dml/core.hpp"

// Pushouts in the category of directed multigraphs, and the constant
// composition rule they support (parameter passing).

namespace dml {

struct GraphEdge {
  std::string name;
  std::string source;
  std::string target;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct PlainGraph {
  std::set<std::string> nodes;
  std::map<std::string, GraphEdge> edges;

  void add_node(std::string n) { nodes.insert(std::move(n)); }
  void add_edge(std::string name, std::string source, std::string target);

  friend bool operator==(const PlainGraph&, const PlainGraph&) = default;
};

/// A structure-preserving map of graphs; must be total on the source graph
/// and preserve edge endpoints.
struct GraphMorphism {
  std::map<std::string, std::string> nodes;
  std::map<std::string, std::string> edges;
};

struct GraphSpan {
  PlainGraph apex;
  PlainGraph left;
  PlainGraph right;
  GraphMorphism into_left;
  GraphMorphism into_right;
};

struct GraphPushout {
  PlainGraph graph;
  GraphMorphism from_left;
  GraphMorphism from_right;
};

GraphPushout graph_pushout(const GraphSpan& s);

/// A composite constant arrow, kept as a normalized chain of atomic labels
/// (identity atoms dropped).
struct ArrowDescriptor {
  std::vector<std::string> chain;
  std::string source;
  std::string target;

  std::string label() const;
};

/// Glues the graph carrying f : X -> Y with the graph carrying a : U -> X
/// over the shared node X, then reads the composite constant f.a : U -> Y
/// off the resulting two-edge path.
ArrowDescriptor parameter_passing(const PlainGraph& f_graph, const std::string& f_edge,
                                  const PlainGraph& a_graph, const std::string& a_edge);

/// The underlying graph of a diagram: one node per specification, one edge
/// per morphism.
PlainGraph graph_of(const Diagram& d);

}  // namespace dml
