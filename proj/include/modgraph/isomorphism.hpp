#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "modgraph/graph.hpp"
#include "modgraph/permutation.hpp"

namespace modgraph {

inline constexpr int kDefaultSearchBound = 8;

struct SearchLimits {
  int max_vertices = kDefaultSearchBound;
};

namespace detail {

inline void check_bound(const LabeledGraph& g, const SearchLimits& limits) {
  if (static_cast<int>(g.size()) > limits.max_vertices)
    throw Error(ErrorCode::kSizeLimitExceeded,
                "graph has " + std::to_string(g.size()) + " vertices, search bound is " +
                    std::to_string(limits.max_vertices));
}

// Backtracking over vertex positions. Vertices of g are visited by decreasing
// total degree (ties by id); for each one the candidate with the same position
// in h is tried first, then the rest in increasing order.
class IsoSearch {
 public:
  IsoSearch(const LabeledGraph& g, const LabeledGraph& h, bool respect_labels)
      : g_(g), h_(h), respect_(respect_labels), n_(static_cast<int>(g.size())) {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<int> deg(n_);
    for (int i = 0; i < n_; ++i) deg[i] = g.in_degree_at(i) + g.out_degree_at(i);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return deg[a] > deg[b]; });
    gin_.resize(n_); gout_.resize(n_); hin_.resize(n_); hout_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      gin_[i] = g.in_degree_at(i); gout_[i] = g.out_degree_at(i);
      hin_[i] = h.in_degree_at(i); hout_[i] = h.out_degree_at(i);
    }
    map_.assign(n_, -1);
    used_.assign(n_, 0);
  }

  /// Calls visit for every isomorphism until it returns false.
  void run(const std::function<bool(const std::vector<int>&)>& visit) {
    if (g_.size() != h_.size() || g_.edge_count() != h_.edge_count()) return;
    stop_ = false;
    extend(0, visit);
  }

 private:
  bool feasible(int u, int w) const {
    if (used_[w]) return false;
    if (gin_[u] != hin_[w] || gout_[u] != hout_[w]) return false;
    if (respect_ && g_.label_at(u) != h_.label_at(w)) return false;
    for (int k = 0; k < n_; ++k) {
      int img = map_[k];
      if (img < 0) continue;
      if (g_.adjacent_at(u, k) != h_.adjacent_at(w, img)) return false;
      if (g_.adjacent_at(k, u) != h_.adjacent_at(img, w)) return false;
    }
    return true;
  }

  void extend(int depth, const std::function<bool(const std::vector<int>&)>& visit) {
    if (stop_) return;
    if (depth == n_) {
      if (!visit(map_)) stop_ = true;
      return;
    }
    const int u = order_[depth];
    auto attempt = [&](int w) {
      if (stop_ || !feasible(u, w)) return;
      map_[u] = w;
      used_[w] = 1;
      extend(depth + 1, visit);
      used_[w] = 0;
      map_[u] = -1;
    };
    attempt(u);
    for (int w = 0; w < n_; ++w)
      if (w != u) attempt(w);
  }

  const LabeledGraph& g_;
  const LabeledGraph& h_;
  bool respect_;
  int n_;
  std::vector<int> order_, gin_, gout_, hin_, hout_, map_;
  std::vector<char> used_;
  bool stop_ = false;
};

inline Permutation to_permutation(const std::vector<int>& zero_based) {
  std::vector<int> images(zero_based.size());
  for (std::size_t i = 0; i < zero_based.size(); ++i) images[i] = zero_based[i] + 1;
  return Permutation(images);
}

}  // namespace detail

/// Returns a bijection carrying g exactly onto h, or nothing. The permutation
/// maps the k-th smallest vertex of g to the sigma(k)-th smallest vertex of h,
/// which for graphs on [n] is the vertex map itself.
inline std::optional<Permutation> find_isomorphism(const LabeledGraph& g, const LabeledGraph& h,
                                                   bool respect_labels, SearchLimits limits = {}) {
  detail::check_bound(g, limits);
  detail::check_bound(h, limits);
  std::optional<Permutation> found;
  detail::IsoSearch search(g, h, respect_labels);
  search.run([&](const std::vector<int>& m) {
    found = detail::to_permutation(m);
    return false;
  });
  return found;
}

/// Every isomorphism from g onto h, sorted.
inline std::vector<Permutation> all_isomorphisms(const LabeledGraph& g, const LabeledGraph& h,
                                                 bool respect_labels, SearchLimits limits = {}) {
  detail::check_bound(g, limits);
  detail::check_bound(h, limits);
  std::vector<Permutation> out;
  detail::IsoSearch search(g, h, respect_labels);
  search.run([&](const std::vector<int>& m) {
    out.push_back(detail::to_permutation(m));
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

/// Renames the vertices of g so that g's k-th vertex becomes target_ids[sigma(k)-1].
inline LabeledGraph apply_vertex_map(const LabeledGraph& g, const Permutation& sigma,
                                     const std::vector<Vertex>& target_ids) {
  auto rename = [&](Vertex v) { return target_ids[sigma.at(g.position(v))]; };
  std::map<Vertex, std::string> labeling;
  for (Vertex v : g.vertices()) labeling.emplace(rename(v), g.label(v));
  std::set<Edge> edges;
  for (const auto& [u, v] : g.edges()) edges.emplace(rename(u), rename(v));
  return LabeledGraph(g.alphabet(), labeling, edges);
}

/// Full automorphism group of a graph, with its orbit partition.
struct AutomorphismGroup {
  std::vector<Vertex> base_vertices;
  std::vector<Permutation> elements;  // sorted; the identity comes first
  std::vector<VertexSet> orbits;      // sorted by smallest member

  std::size_t order() const { return elements.size(); }

  bool contains(const Permutation& p) const {
    return std::binary_search(elements.begin(), elements.end(), p);
  }

  const VertexSet& orbit_of(Vertex v) const {
    for (const auto& o : orbits)
      if (std::binary_search(o.begin(), o.end(), v)) return o;
    throw Error(ErrorCode::kVertexNotInGraph, "vertex " + std::to_string(v));
  }
};

inline AutomorphismGroup automorphism_group(const LabeledGraph& h, bool respect_labels = false,
                                            SearchLimits limits = {}) {
  AutomorphismGroup group;
  group.base_vertices = h.vertices();
  group.elements = all_isomorphisms(h, h, respect_labels, limits);
  const int n = static_cast<int>(h.size());
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&](int x) { return root[x] == x ? x : root[x] = find(root[x]); };
  for (const auto& p : group.elements)
    for (int i = 0; i < n; ++i) {
      int a = find(i), b = find(p.at(i));
      if (a != b) root[std::max(a, b)] = std::min(a, b);
    }
  std::map<int, VertexSet> classes;
  for (int i = 0; i < n; ++i) classes[find(i)].push_back(h.vertex_at(i));
  for (auto& [r, members] : classes) group.orbits.push_back(std::move(members));
  return group;
}

inline bool is_vertex_transitive(const LabeledGraph& g, SearchLimits limits = {}) {
  return automorphism_group(g, false, limits).orbits.size() <= 1;
}

}  // namespace modgraph
