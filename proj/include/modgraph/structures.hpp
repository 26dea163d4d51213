#pragma once

#include <string>
#include <vector>

#include "modgraph/cms.hpp"
#include "modgraph/graph.hpp"
#include "modgraph/isomorphism.hpp"
#include "modgraph/mdec.hpp"
#include "modgraph/signature.hpp"

namespace modgraph {

inline std::string label_predicate(const std::string& symbol_or_op) { return "label_" + symbol_or_op; }
inline std::string children_predicate(const std::string& op) { return "children_" + op; }
inline std::string dist_child_predicate(const std::string& op) { return "dist-child_" + op; }

/// edge/2 plus label_<a>/1 for every letter.
inline RelationalSignature graph_relational_signature(const Alphabet& alphabet) {
  RelationalSignature rs;
  rs.add("edge", 2);
  for (const auto& a : alphabet.symbols()) rs.add(label_predicate(a), 1);
  return rs;
}

/// Domain is the vertex set in increasing id order.
inline Structure graph_structure(const LabeledGraph& g) {
  std::vector<std::string> names;
  for (Vertex v : g.vertices()) names.push_back(std::to_string(v));
  Structure s(graph_relational_signature(g.alphabet()), names);
  const int n = static_cast<int>(g.size());
  for (int i = 0; i < n; ++i) {
    s.add(label_predicate(g.label_at(i)), {i});
    for (int j = 0; j < n; ++j)
      if (g.adjacent_at(i, j)) s.add("edge", {i, j});
  }
  return s;
}

/// Predicates of mdec'-trees over sig.
inline RelationalSignature tree_relational_signature(const Signature& sig) {
  RelationalSignature rs;
  rs.add("child", 2);
  rs.add("first-child", 2);
  for (const auto& a : sig.alphabet().symbols()) rs.add(label_predicate(a), 1);
  rs.add(label_predicate(kParName), 1);
  rs.add(label_predicate(kCliqueName), 1);
  rs.add(label_predicate(kSeqName), 1);
  for (const SignatureOp* op : sig.prime_ops()) {
    rs.add(label_predicate(op->name()), 1);
    rs.add(children_predicate(op->name()), op->arity() + 1);
    rs.add(dist_child_predicate(op->name()), 2);
  }
  return rs;
}

/// Names tree nodes by their modules, which are distinct in mdec'.
inline std::vector<std::string> tree_element_names(const MDecTree& t) {
  std::vector<std::string> names;
  for (const auto& n : t.nodes) names.push_back(to_string(n.module));
  return names;
}

/// Adds the tuples describing node x of t (labels, child relations and, for
/// prime nodes, every Aut(H)-image of the children tuple). ids maps tree
/// nodes to domain elements.
inline void add_tree_node_tuples(Structure& s, const MDecPrimeTree& t, const Signature& sig, int x,
                                 const std::vector<int>& ids) {
  const MDecNode& n = t.at(x);
  const int me = ids[static_cast<std::size_t>(x)];
  switch (n.kind) {
    case NodeKind::kLeaf: s.add(label_predicate(n.label), {me}); return;
    case NodeKind::kParallel: s.add(label_predicate(kParName), {me}); break;
    case NodeKind::kClique: s.add(label_predicate(kCliqueName), {me}); break;
    case NodeKind::kSequential: s.add(label_predicate(kSeqName), {me}); break;
    case NodeKind::kPrime: s.add(label_predicate(n.label), {me}); break;
  }
  for (int c : n.children) s.add("child", {me, ids[static_cast<std::size_t>(c)]});
  if (n.kind == NodeKind::kSequential) s.add("first-child", {me, ids[static_cast<std::size_t>(n.children[0])]});
  if (n.kind == NodeKind::kPrime) {
    const SignatureOp& op = sig.at(n.label);
    const AutomorphismGroup aut = automorphism_group(op.graph(), false, sig.limits());
    for (const Permutation& p : aut.elements) {
      std::vector<int> tuple{me};
      for (int i = 1; i <= op.arity(); ++i) tuple.push_back(ids[static_cast<std::size_t>(n.children[p(i) - 1])]);
      s.add(children_predicate(op.name()), tuple);
    }
    // transitive ops have no distinguished vertices
    if (aut.orbits.size() > 1)
      for (Vertex i : aut.orbit_of(1))
        s.add(dist_child_predicate(op.name()), {me, ids[static_cast<std::size_t>(n.children[i - 1])]});
  }
}

/// mdec'(G) as a relational structure; the domain is the node list of t.
inline Structure tree_structure(const MDecPrimeTree& t, const Signature& sig) {
  for (const auto& n : t.nodes)
    if (n.kind != NodeKind::kLeaf && !sig.find(n.label))
      throw Error(ErrorCode::kNotInSignature, "tree uses operation '" + n.label + "' outside signature '" + sig.name() + "'");
  Structure s(tree_relational_signature(sig), tree_element_names(t));
  std::vector<int> ids(t.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < t.size(); ++i) add_tree_node_tuples(s, t, sig, static_cast<int>(i), ids);
  return s;
}

}  // namespace modgraph
