#include "dml/graph.hpp"

#include <algorithm>

namespace dml {

void PlainGraph::add_edge(std::string name, std::string source, std::string target) {
  if (!nodes.count(source) || !nodes.count(target))
    throw UnknownEntity("edge '" + name + "' endpoints must be existing nodes");
  GraphEdge e{name, std::move(source), std::move(target)};
  if (!edges.emplace(e.name, e).second) throw NameTaken("edge '" + e.name + "' already exists");
}

namespace {

void check_graph_morphism(const PlainGraph& from, const PlainGraph& to, const GraphMorphism& m,
                          const std::string& which) {
  for (const auto& n : from.nodes) {
    auto it = m.nodes.find(n);
    if (it == m.nodes.end())
      throw IllFormedGraphMorphism(which + ": no image for node '" + n + "'");
    if (!to.nodes.count(it->second))
      throw IllFormedGraphMorphism(which + ": node image '" + it->second + "' does not exist");
  }
  for (const auto& [name, e] : from.edges) {
    auto it = m.edges.find(name);
    if (it == m.edges.end())
      throw IllFormedGraphMorphism(which + ": no image for edge '" + name + "'");
    auto img = to.edges.find(it->second);
    if (img == to.edges.end())
      throw IllFormedGraphMorphism(which + ": edge image '" + it->second + "' does not exist");
    if (img->second.source != m.nodes.at(e.source) || img->second.target != m.nodes.at(e.target))
      throw IllFormedGraphMorphism(which + ": edge '" + name + "' endpoints are not preserved");
  }
}

// Shared quotient core: tags items by side, glues via the apex, and picks
// collision-free names (shared name when unanimous, side-qualified otherwise).
struct Quotient {
  std::map<std::pair<int, std::string>, std::string> names;  // (side, item) -> class name
  std::vector<std::vector<std::pair<int, std::string>>> classes;

  Quotient(const std::set<std::string>& left, const std::set<std::string>& right,
           const std::vector<std::pair<std::string, std::string>>& glue) {
    std::map<std::pair<int, std::string>, int> index;
    std::vector<int> parent;
    auto make = [&](int side, const std::string& item) {
      index[{side, item}] = int(parent.size());
      parent.push_back(int(parent.size()));
    };
    for (const auto& n : left) make(0, n);
    for (const auto& n : right) make(1, n);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& [l, r] : glue) parent[find(index.at({0, l}))] = find(index.at({1, r}));

    std::map<int, std::vector<std::pair<int, std::string>>> grouped;
    for (const auto& [key, idx] : index) grouped[find(idx)].push_back(key);
    std::vector<std::pair<std::vector<std::pair<int, std::string>>, std::string>> infos;
    for (auto& [_, items] : grouped) {
      std::sort(items.begin(), items.end());
      bool shared = std::all_of(items.begin(), items.end(),
                                [&](const auto& e) { return e.second == items[0].second; });
      std::string desired = shared ? items[0].second
                                   : (items[0].first == 0 ? "left::" : "right::") + items[0].second;
      infos.push_back({items, desired});
    }
    std::sort(infos.begin(), infos.end(),
              [](const auto& a, const auto& b) { return a.first[0] < b.first[0]; });
    std::map<std::string, int> claims;
    for (const auto& [_, desired] : infos) ++claims[desired];
    std::set<std::string> taken;
    for (auto& [items, desired] : infos) {
      std::string name = desired;
      if (claims[desired] > 1)
        name = (items[0].first == 0 ? "left::" : "right::") + items[0].second;
      std::string candidate = name;
      int n = 2;
      while (!taken.insert(candidate).second) candidate = name + "#" + std::to_string(n++);
      for (const auto& item : items) names[item] = candidate;
      classes.push_back(items);
    }
  }
};

}  // namespace

GraphPushout graph_pushout(const GraphSpan& s) {
  check_graph_morphism(s.apex, s.left, s.into_left, "left graph morphism");
  check_graph_morphism(s.apex, s.right, s.into_right, "right graph morphism");

  std::vector<std::pair<std::string, std::string>> node_glue;
  for (const auto& n : s.apex.nodes)
    node_glue.push_back({s.into_left.nodes.at(n), s.into_right.nodes.at(n)});
  std::set<std::string> left_edge_names, right_edge_names;
  for (const auto& [n, _] : s.left.edges) left_edge_names.insert(n);
  for (const auto& [n, _] : s.right.edges) right_edge_names.insert(n);
  std::vector<std::pair<std::string, std::string>> edge_glue;
  for (const auto& [n, _] : s.apex.edges)
    edge_glue.push_back({s.into_left.edges.at(n), s.into_right.edges.at(n)});

  Quotient nodes(s.left.nodes, s.right.nodes, node_glue);
  Quotient edges(left_edge_names, right_edge_names, edge_glue);

  GraphPushout out;
  for (const auto& [_, name] : nodes.names) out.graph.nodes.insert(name);
  for (const auto& cls : edges.classes) {
    auto [side, edge_name] = cls[0];
    const GraphEdge& e = (side == 0 ? s.left : s.right).edges.at(edge_name);
    out.graph.edges.emplace(edges.names.at(cls[0]),
                            GraphEdge{edges.names.at(cls[0]), nodes.names.at({side, e.source}),
                                      nodes.names.at({side, e.target})});
  }
  for (const auto& n : s.left.nodes) out.from_left.nodes[n] = nodes.names.at({0, n});
  for (const auto& n : s.right.nodes) out.from_right.nodes[n] = nodes.names.at({1, n});
  for (const auto& [n, _] : s.left.edges) out.from_left.edges[n] = edges.names.at({0, n});
  for (const auto& [n, _] : s.right.edges) out.from_right.edges[n] = edges.names.at({1, n});
  return out;
}

std::string ArrowDescriptor::label() const {
  if (chain.empty()) return "id_" + source;
  std::string out;
  for (size_t i = 0; i < chain.size(); ++i) {
    if (i) out += '.';
    out += chain[i];
  }
  return out;
}

namespace {

bool is_identity_atom(const std::string& atom) {
  return atom == "id" || atom.rfind("id_", 0) == 0;
}

// Labels compose by dot-chain concatenation; splitting makes the chain
// associative and lets the unit law drop identity atoms.
void append_atoms(std::vector<std::string>& chain, const std::string& label) {
  std::string atom;
  auto flush = [&] {
    if (!atom.empty() && !is_identity_atom(atom)) chain.push_back(atom);
    atom.clear();
  };
  for (char c : label) {
    if (c == '.')
      flush();
    else
      atom += c;
  }
  flush();
}

}  // namespace

ArrowDescriptor parameter_passing(const PlainGraph& f_graph, const std::string& f_edge,
                                  const PlainGraph& a_graph, const std::string& a_edge) {
  auto fit = f_graph.edges.find(f_edge);
  if (fit == f_graph.edges.end()) throw UnknownEntity("unknown edge '" + f_edge + "'");
  auto ait = a_graph.edges.find(a_edge);
  if (ait == a_graph.edges.end()) throw UnknownEntity("unknown edge '" + a_edge + "'");
  const GraphEdge& f = fit->second;
  const GraphEdge& a = ait->second;
  if (a.target != f.source)
    throw NoSharedApex("edge '" + a_edge + "' ends at '" + a.target + "' but edge '" + f_edge +
                       "' starts at '" + f.source + "'");

  GraphSpan span;
  span.apex.add_node(f.source);
  span.left = f_graph;
  span.right = a_graph;
  span.into_left.nodes[f.source] = f.source;
  span.into_right.nodes[f.source] = a.target;
  GraphPushout po = graph_pushout(span);

  ArrowDescriptor out;
  append_atoms(out.chain, f.name);
  append_atoms(out.chain, a.name);
  out.source = po.from_right.nodes.at(a.source);
  out.target = po.from_left.nodes.at(f.target);
  return out;
}

PlainGraph graph_of(const Diagram& d) {
  PlainGraph g;
  for (const auto& [n, _] : d.specifications) g.add_node(n);
  for (const auto& [n, m] : d.morphisms) g.add_edge(n, m.source, m.target);
  return g;
}

}  // namespace dml
