#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modgraph/error.hpp"

namespace modgraph {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;

/// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<Vertex>;

inline VertexSet make_vertex_set(std::vector<Vertex> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

inline bool is_subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool intersects(const VertexSet& a, const VertexSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

inline std::string to_string(const VertexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s[i]);
  }
  return out + "}";
}

/// Ordered finite set of label names.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw Error(ErrorCode::kInvalidArgument, "alphabet must be non-empty");
    std::set<std::string> seen;
    for (const auto& s : symbols_) {
      if (s.empty()) throw Error(ErrorCode::kInvalidArgument, "empty alphabet symbol");
      if (!seen.insert(s).second)
        throw Error(ErrorCode::kInvalidArgument, "duplicate alphabet symbol '" + s + "'");
    }
  }

  const std::vector<std::string>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }

  bool contains(const std::string& s) const {
    return std::find(symbols_.begin(), symbols_.end(), s) != symbols_.end();
  }

  int index_of(const std::string& s) const {
    auto it = std::find(symbols_.begin(), symbols_.end(), s);
    return it == symbols_.end() ? -1 : static_cast<int>(it - symbols_.begin());
  }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> symbols_;
};

/// Label used for the vertices of unlabeled operation graphs.
inline const std::string kNoLabel = "_";

/// Finite directed vertex-labeled graph without self-loops.
///
/// Stored densely: vertices sorted by id, an n*n adjacency matrix over vertex
/// positions and one label index per position. Immutable once built.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  LabeledGraph(Alphabet alphabet, const std::map<Vertex, std::string>& labeling,
               const std::set<Edge>& edges)
      : alphabet_(std::move(alphabet)) {
    ids_.reserve(labeling.size());
    for (const auto& [v, sym] : labeling) {
      if (v <= 0) throw Error(ErrorCode::kInvalidGraph, "vertex ids must be positive, got " + std::to_string(v));
      int li = alphabet_.index_of(sym);
      if (li < 0) throw Error(ErrorCode::kUnknownSymbol, "label '" + sym + "' of vertex " + std::to_string(v) + " is not in the alphabet");
      ids_.push_back(v);
      labels_.push_back(li);
    }
    const std::size_t n = ids_.size();
    adj_.assign(n * n, 0);
    for (const auto& [u, v] : edges) {
      if (u == v) throw Error(ErrorCode::kInvalidGraph, "self-loop at vertex " + std::to_string(u));
      int iu = position(u);
      int iv = position(v);
      if (iu < 0 || iv < 0)
        throw Error(ErrorCode::kVertexNotInGraph, "edge (" + std::to_string(u) + "," + std::to_string(v) + ") has an endpoint outside the vertex set");
      adj_[iu * n + iv] = 1;
    }
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  /// Vertex ids in increasing order.
  const std::vector<Vertex>& vertices() const { return ids_; }
  Vertex vertex_at(int pos) const { return ids_[pos]; }

  /// Position of a vertex id in vertices(), or -1.
  int position(Vertex v) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
    return (it != ids_.end() && *it == v) ? static_cast<int>(it - ids_.begin()) : -1;
  }

  bool has_vertex(Vertex v) const { return position(v) >= 0; }

  bool adjacent_at(int i, int j) const { return adj_[static_cast<std::size_t>(i) * ids_.size() + j] != 0; }

  bool has_edge(Vertex u, Vertex v) const {
    int i = position(u);
    int j = position(v);
    return i >= 0 && j >= 0 && adjacent_at(i, j);
  }

  int label_index_at(int pos) const { return labels_[pos]; }
  const std::string& label_at(int pos) const { return alphabet_.symbols()[labels_[pos]]; }

  const std::string& label(Vertex v) const {
    int i = position(v);
    if (i < 0) throw Error(ErrorCode::kVertexNotInGraph, "vertex " + std::to_string(v));
    return label_at(i);
  }

  std::set<Edge> edges() const {
    std::set<Edge> out;
    const std::size_t n = ids_.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (adj_[i * n + j]) out.emplace(ids_[i], ids_[j]);
    return out;
  }

  std::size_t edge_count() const {
    return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), 1));
  }

  std::map<Vertex, std::string> labeling() const {
    std::map<Vertex, std::string> out;
    for (std::size_t i = 0; i < ids_.size(); ++i) out.emplace(ids_[i], label_at(static_cast<int>(i)));
    return out;
  }

  int out_degree_at(int i) const {
    int d = 0;
    for (std::size_t j = 0; j < ids_.size(); ++j) d += adjacent_at(i, static_cast<int>(j));
    return d;
  }

  int in_degree_at(int j) const {
    int d = 0;
    for (std::size_t i = 0; i < ids_.size(); ++i) d += adjacent_at(static_cast<int>(i), j);
    return d;
  }

  /// Set equality of vertices, edges and labeling. The alphabet is not compared.
  friend bool operator==(const LabeledGraph& a, const LabeledGraph& b) {
    if (a.ids_ != b.ids_ || a.adj_ != b.adj_) return false;
    for (std::size_t i = 0; i < a.ids_.size(); ++i)
      if (a.label_at(static_cast<int>(i)) != b.label_at(static_cast<int>(i))) return false;
    return true;
  }

 private:
  Alphabet alphabet_;
  std::vector<Vertex> ids_;
  std::vector<int> labels_;
  std::vector<char> adj_;
};

/// Unlabeled concrete graph on [n], as used to define composition operations.
inline LabeledGraph unlabeled_graph(int n, const std::vector<Edge>& edges) {
  std::map<Vertex, std::string> labeling;
  for (int v = 1; v <= n; ++v) labeling.emplace(v, kNoLabel);
  return LabeledGraph(Alphabet({kNoLabel}), labeling, std::set<Edge>(edges.begin(), edges.end()));
}

/// Directed cycle 1->2->...->n->1.
inline LabeledGraph directed_cycle(int n) {
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) edges.emplace_back(i, i % n + 1);
  return unlabeled_graph(n, edges);
}

/// Drops every label; the result uses the single placeholder symbol.
inline LabeledGraph strip_labels(const LabeledGraph& g) {
  std::map<Vertex, std::string> labeling;
  for (Vertex v : g.vertices()) labeling.emplace(v, kNoLabel);
  return LabeledGraph(Alphabet({kNoLabel}), labeling, g.edges());
}

/// Induced subgraph on a subset of the vertices.
inline LabeledGraph induced_subgraph(const LabeledGraph& g, const VertexSet& x) {
  std::map<Vertex, std::string> labeling;
  for (Vertex v : x) labeling.emplace(v, g.label(v));
  std::set<Edge> edges;
  for (Vertex u : x)
    for (Vertex v : x)
      if (g.has_edge(u, v)) edges.emplace(u, v);
  return LabeledGraph(g.alphabet(), labeling, edges);
}

/// Checks that x is a subset of the vertex set and returns the positions.
inline std::vector<int> positions_of(const LabeledGraph& g, const VertexSet& x) {
  std::vector<int> pos;
  pos.reserve(x.size());
  for (Vertex v : x) {
    int p = g.position(v);
    if (p < 0) throw Error(ErrorCode::kVertexNotInGraph, "vertex " + std::to_string(v) + " is not in the graph");
    pos.push_back(p);
  }
  return pos;
}

/// True iff every vertex outside x sees all of x or none of it, separately for
/// incoming and outgoing edges.
inline bool is_module(const LabeledGraph& g, const VertexSet& x) {
  std::vector<int> pos = positions_of(g, make_vertex_set(x));
  if (pos.size() <= 1) return true;
  std::vector<char> inside(g.size(), 0);
  for (int p : pos) inside[p] = 1;
  for (int v = 0; v < static_cast<int>(g.size()); ++v) {
    if (inside[v]) continue;
    const bool to = g.adjacent_at(v, pos[0]);
    const bool from = g.adjacent_at(pos[0], v);
    for (std::size_t k = 1; k < pos.size(); ++k) {
      if (g.adjacent_at(v, pos[k]) != to || g.adjacent_at(pos[k], v) != from) return false;
    }
  }
  return true;
}

/// True iff x splits into two non-empty parts with no edge between them in
/// either direction.
inline bool is_internally_disconnected(const LabeledGraph& g, const VertexSet& x) {
  if (x.empty()) throw Error(ErrorCode::kEmptySet, "is_internally_disconnected needs a non-empty set");
  std::vector<int> pos = positions_of(g, make_vertex_set(x));
  std::vector<char> seen(pos.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t b = 0; b < pos.size(); ++b) {
      if (seen[b]) continue;
      if (g.adjacent_at(pos[a], pos[b]) || g.adjacent_at(pos[b], pos[a])) {
        seen[b] = 1;
        ++reached;
        stack.push_back(b);
      }
    }
  }
  return reached < pos.size();
}

inline bool is_dag(const LabeledGraph& g) {
  const int n = static_cast<int>(g.size());
  std::vector<int> indeg(n, 0);
  for (int j = 0; j < n; ++j) indeg[j] = g.in_degree_at(j);
  std::vector<int> ready;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  int removed = 0;
  while (!ready.empty()) {
    int u = ready.back();
    ready.pop_back();
    ++removed;
    for (int v = 0; v < n; ++v)
      if (g.adjacent_at(u, v) && --indeg[v] == 0) ready.push_back(v);
  }
  return removed == n;
}

inline bool is_transitive(const LabeledGraph& g) {
  const int n = static_cast<int>(g.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (!g.adjacent_at(a, b)) continue;
      for (int c = 0; c < n; ++c)
        if (c != a && g.adjacent_at(b, c) && !g.adjacent_at(a, c)) return false;
    }
  return true;
}

}  // namespace modgraph
