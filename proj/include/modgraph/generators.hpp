#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "modgraph/algebra.hpp"
#include "modgraph/graph.hpp"
#include "modgraph/isomorphism.hpp"
#include "modgraph/random.hpp"
#include "modgraph/signature.hpp"
#include "modgraph/term.hpp"

namespace modgraph {

/// 1->2 <-3-> 4 <-5, the smallest weakly rigid prime dag used throughout.
inline LabeledGraph w5_graph() { return unlabeled_graph(5, {{1, 2}, {3, 2}, {3, 4}, {5, 4}}); }

/// Path 1->2->3.
inline LabeledGraph p3_graph() { return unlabeled_graph(3, {{1, 2}, {2, 3}}); }

inline Signature sp_signature(const Alphabet& ab = Alphabet({"a", "b"})) {
  return Signature("sp", ab, {SignatureOp::sequential(), SignatureOp::parallel()});
}

/// {seq, par, W5}, or {seq, clique, W5} when dual.
inline Signature w5_signature(bool dual = false, const Alphabet& ab = Alphabet({"a", "b"})) {
  return Signature(dual ? "w5-clique" : "w5", ab,
                   {SignatureOp::sequential(), dual ? SignatureOp::clique() : SignatureOp::parallel(), SignatureOp::prime("W5", w5_graph())});
}

/// Random term with at most max_leaves leaves and depth at most max_depth.
/// Prime ops are only drawn when enough leaves are left for all arguments.
inline Term random_term(const Signature& sig, Rng& rng, int max_depth, int max_leaves) {
  const auto& letters = sig.alphabet().symbols();
  std::function<Term(int, int)> grow = [&](int depth, int budget) -> Term {
    std::vector<const SignatureOp*> fit;
    for (const auto& op : sig.ops())
      if ((op.is_builtin() ? 2 : op.arity()) <= budget) fit.push_back(&op);
    if (depth == 0 || fit.empty() || rng.coin(0.25)) return Term::leaf(letters[rng.index(letters.size())]);
    const SignatureOp& op = *fit[rng.index(fit.size())];
    const int k = op.is_builtin() ? rng.uniform(2, std::min(budget, 4)) : op.arity();
    std::vector<Term> kids;
    int left = budget;
    for (int i = 0; i < k; ++i) {
      const int reserve = k - i - 1;
      Term c = grow(depth - 1, left - reserve);
      left -= static_cast<int>(c.leaf_count());
      kids.push_back(std::move(c));
    }
    return Term::node(op.name(), std::move(kids));
  };
  return grow(max_depth, std::max(1, max_leaves));
}

/// Erdos-Renyi digraph on [n] with uniformly drawn labels.
inline LabeledGraph random_digraph(const Alphabet& ab, Rng& rng, int n, double p = 0.4) {
  std::map<Vertex, std::string> lab;
  for (Vertex v = 1; v <= n; ++v) lab[v] = ab.symbols()[rng.index(ab.size())];
  std::set<Edge> edges;
  for (Vertex u = 1; u <= n; ++u)
    for (Vertex v = 1; v <= n; ++v)
      if (u != v && rng.coin(p)) edges.emplace(u, v);
  return LabeledGraph(ab, lab, edges);
}

/// The digraph on [n] whose edge set is bit k of code, pairs (i,j), i != j,
/// taken in row-major order. Labels cycle through the alphabet.
inline LabeledGraph digraph_from_code(const Alphabet& ab, int n, std::uint64_t code) {
  std::map<Vertex, std::string> lab;
  for (Vertex v = 1; v <= n; ++v) lab[v] = ab.symbols()[static_cast<std::size_t>(v - 1) % ab.size()];
  std::set<Edge> edges;
  int k = 0;
  for (Vertex u = 1; u <= n; ++u)
    for (Vertex v = 1; v <= n; ++v)
      if (u != v && (code >> k++ & 1)) edges.emplace(u, v);
  return LabeledGraph(ab, lab, edges);
}

/// Same graph with every vertex id increased by offset.
inline LabeledGraph shift_ids(const LabeledGraph& g, Vertex offset) {
  std::map<Vertex, std::string> lab;
  for (Vertex v : g.vertices()) lab[v + offset] = g.label(v);
  std::set<Edge> edges;
  for (const auto& [u, v] : g.edges()) edges.emplace(u + offset, v + offset);
  return LabeledGraph(g.alphabet(), lab, edges);
}

/// Z/q counter of the vertices whose label is in counted. Every operation
/// adds, so all laws hold.
inline FiniteAlgebra counting_algebra(const Signature& sig, const std::set<std::string>& counted, int q,
                                      const std::set<int>& accept = {0}) {
  std::vector<std::string> carrier;
  for (int r = 0; r < q; ++r) carrier.push_back("r" + std::to_string(r));
  FiniteAlgebra alg("count" + std::to_string(q), sig.name(), carrier);
  for (const auto& a : sig.alphabet().symbols()) alg.set_letter(a, counted.count(a) ? 1 % q : 0);
  for (const auto& op : sig.ops()) {
    const int n = op.is_builtin() ? 2 : op.arity();
    alg.declare_op(op.name(), n);
    for (std::size_t cell = 0; cell < alg.table_size(op.name()); ++cell) {
      auto args = alg.decode(n, cell);
      int s = 0;
      for (int x : args) s += x;
      alg.set(op.name(), args, s % q);
    }
  }
  for (int r : accept) alg.accepting().insert(r);
  return alg;
}

/// Carrier = alphabet. seq keeps its left operand, par and clique take the
/// minimum, a prime op takes the minimum over the orbit of its first vertex.
/// Sensitive to seq order, so it catches re-orderings that are not allowed.
inline FiniteAlgebra head_algebra(const Signature& sig) {
  const auto& letters = sig.alphabet().symbols();
  FiniteAlgebra alg("head", sig.name(), letters);
  for (std::size_t i = 0; i < letters.size(); ++i) alg.set_letter(letters[i], static_cast<int>(i));
  for (const auto& op : sig.ops()) {
    const int n = op.is_builtin() ? 2 : op.arity();
    VertexSet orbit{1};
    if (!op.is_builtin()) orbit = automorphism_group(op.graph(), false, sig.limits()).orbit_of(1);
    alg.declare_op(op.name(), n);
    for (std::size_t cell = 0; cell < alg.table_size(op.name()); ++cell) {
      auto args = alg.decode(n, cell);
      int r = 0;
      if (op.kind() == OpKind::kSequential) {
        r = args[0];
      } else if (op.is_builtin()) {
        r = std::min(args[0], args[1]);
      } else {
        r = args[static_cast<std::size_t>(orbit[0] - 1)];
        for (Vertex v : orbit) r = std::min(r, args[static_cast<std::size_t>(v - 1)]);
      }
      alg.set(op.name(), args, r);
    }
  }
  alg.accepting().insert(0);
  return alg;
}

}  // namespace modgraph
