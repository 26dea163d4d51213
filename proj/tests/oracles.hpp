#pragma once

// Brute-force reference implementations used only by the tests. They work
// from the definitions directly and share no code with the library beyond
// the graph container.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "modgraph/graph.hpp"
#include "modgraph/term.hpp"

namespace oracle {

using modgraph::LabeledGraph;
using modgraph::Vertex;
using modgraph::VertexSet;

inline std::vector<std::vector<char>> adjacency(const LabeledGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<char>> a(n, std::vector<char>(n, 0));
  auto ids = g.vertices();
  for (const auto& [u, v] : g.edges()) {
    auto pu = std::find(ids.begin(), ids.end(), u) - ids.begin();
    auto pv = std::find(ids.begin(), ids.end(), v) - ids.begin();
    a[static_cast<std::size_t>(pu)][static_cast<std::size_t>(pv)] = 1;
  }
  return a;
}

/// X is a module iff every outside vertex relates to all of X in the same way.
inline bool module_mask(const std::vector<std::vector<char>>& a, std::uint32_t x) {
  const std::size_t n = a.size();
  for (std::size_t z = 0; z < n; ++z) {
    if (x >> z & 1) continue;
    int in = -1, out = -1;
    for (std::size_t y = 0; y < n; ++y) {
      if (!(x >> y & 1)) continue;
      if (in < 0) {
        in = a[z][y];
        out = a[y][z];
      } else if (a[z][y] != in || a[y][z] != out) {
        return false;
      }
    }
  }
  return true;
}

inline VertexSet to_set(const LabeledGraph& g, std::uint32_t m) {
  VertexSet s;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (m >> i & 1) s.push_back(g.vertices()[i]);
  return s;
}

/// Modules X != V (non-empty) that overlap no module.
inline std::vector<VertexSet> strong_modules_except_root(const LabeledGraph& g) {
  const auto a = adjacency(g);
  const std::uint32_t full = (1u << g.size()) - 1;
  std::vector<std::uint32_t> mods;
  for (std::uint32_t x = 1; x <= full; ++x)
    if (module_mask(a, x)) mods.push_back(x);
  std::vector<VertexSet> out;
  for (std::uint32_t x : mods) {
    if (x == full) continue;
    bool overlaps = false;
    for (std::uint32_t y : mods)
      if ((x & y) && (x & y) != x && (x & y) != y) overlaps = true;
    if (!overlaps) out.push_back(to_set(g, x));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// All bijections (as position images) carrying g onto h, by trying every
/// permutation.
inline std::vector<std::vector<int>> isomorphisms(const LabeledGraph& g, const LabeledGraph& h, bool labels) {
  std::vector<std::vector<int>> out;
  if (g.size() != h.size()) return out;
  const auto a = adjacency(g), b = adjacency(h);
  const std::size_t n = g.size();
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (labels && g.label(g.vertices()[i]) != h.label(h.vertices()[static_cast<std::size_t>(p[i])])) ok = false;
      for (std::size_t j = 0; j < n && ok; ++j)
        if (a[i][j] != b[static_cast<std::size_t>(p[i])][static_cast<std::size_t>(p[j])]) ok = false;
    }
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Smallest edge code over all relabellings: equal iff isomorphic (unlabelled).
inline std::uint64_t canonical_code(const LabeledGraph& g) {
  const auto a = adjacency(g);
  const std::size_t n = g.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::uint64_t best = ~0ull;
  do {
    std::uint64_t code = 0;
    int k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) code |= static_cast<std::uint64_t>(a[p[i]][p[j]]) << k++;
    best = std::min(best, code);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

/// Graph of a term by direct recursion: leaves numbered left to right, and
/// every block pair joined according to the op.
inline std::pair<std::map<Vertex, std::string>, std::set<modgraph::Edge>> term_graph(const modgraph::Signature& sig,
                                                                                     const modgraph::Term& t) {
  std::map<Vertex, std::string> lab;
  std::set<modgraph::Edge> edges;
  Vertex next = 1;
  std::function<std::vector<Vertex>(const modgraph::Term&)> rec = [&](const modgraph::Term& s) -> std::vector<Vertex> {
    if (s.is_leaf()) {
      lab[next] = s.head;
      return {next++};
    }
    std::vector<std::vector<Vertex>> blocks;
    for (const auto& c : s.children) blocks.push_back(rec(c));
    const auto& op = sig.at(s.head);
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (i == j) continue;
        bool join = false;
        switch (op.kind()) {
          case modgraph::OpKind::kParallel: join = false; break;
          case modgraph::OpKind::kClique: join = true; break;
          case modgraph::OpKind::kSequential: join = i < j; break;
          case modgraph::OpKind::kPrime: join = op.graph().has_edge(static_cast<Vertex>(i + 1), static_cast<Vertex>(j + 1)); break;
        }
        if (join)
          for (Vertex u : blocks[i])
            for (Vertex v : blocks[j]) edges.emplace(u, v);
      }
    std::vector<Vertex> all;
    for (const auto& b : blocks) all.insert(all.end(), b.begin(), b.end());
    return all;
  };
  rec(t);
  return {lab, edges};
}

inline int count_label(const LabeledGraph& g, const std::string& a) {
  int k = 0;
  for (Vertex v : g.vertices()) k += g.label(v) == a;
  return k;
}

}  // namespace oracle
