#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "modgraph/graph.hpp"
#include "modgraph/isomorphism.hpp"
#include "modgraph/random.hpp"
#include "modgraph/signature.hpp"
#include "modgraph/term.hpp"

namespace modgraph {

/// Which of the four decomposition cases applies to a vertex set.
enum class SplitKind { kParallel, kClique, kSequential, kPrime };

inline std::string to_string(SplitKind k) {
  switch (k) {
    case SplitKind::kParallel: return kParName;
    case SplitKind::kClique: return kCliqueName;
    case SplitKind::kSequential: return kSeqName;
    case SplitKind::kPrime: return "prime";
  }
  return "?";
}

struct ModuleSplit {
  SplitKind kind;
  std::vector<VertexSet> blocks;
};

/// Raised when a prime quotient matches no op of the signature. Carries the
/// quotient (on [n]) so the caller can extend the signature.
class NotInSignature : public Error {
 public:
  NotInSignature(const std::string& msg, LabeledGraph quotient)
      : Error(ErrorCode::kNotInSignature, msg), quotient_(std::move(quotient)) {}
  const LabeledGraph& quotient() const { return quotient_; }

 private:
  LabeledGraph quotient_;
};

namespace detail {

using Positions = std::vector<int>;

// Connected components of s under a symmetric relation on positions.
inline std::vector<Positions> components(const Positions& s, const std::function<bool(int, int)>& linked) {
  std::vector<int> comp(s.size(), -1);
  std::vector<Positions> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (comp[i] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<std::size_t> stack{i};
    comp[i] = c;
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      out[c].push_back(s[a]);
      for (std::size_t b = 0; b < s.size(); ++b)
        if (comp[b] < 0 && linked(s[a], s[b])) {
          comp[b] = c;
          stack.push_back(b);
        }
    }
    std::sort(out[c].begin(), out[c].end());
  }
  return out;
}

// Smallest module of g[s] containing a and b.
inline std::vector<char> module_closure(const LabeledGraph& g, const Positions& s, int a, int b) {
  std::vector<char> in(g.size(), 0);
  in[a] = in[b] = 1;
  Positions members{a, b};
  bool grown = true;
  while (grown && members.size() < s.size()) {
    grown = false;
    for (int z : s) {
      if (in[z]) continue;
      const bool to = g.adjacent_at(z, a), from = g.adjacent_at(a, z);
      for (int x : members)
        if (g.adjacent_at(z, x) != to || g.adjacent_at(x, z) != from) {
          in[z] = 1;
          members.push_back(z);
          grown = true;
          break;
        }
    }
  }
  return in;
}

// Case analysis on g[s], |s| >= 2. Blocks are position lists.
inline std::pair<SplitKind, std::vector<Positions>> split(const LabeledGraph& g, const Positions& s) {
  auto parts = components(s, [&](int u, int v) { return g.adjacent_at(u, v) || g.adjacent_at(v, u); });
  if (parts.size() > 1) return {SplitKind::kParallel, parts};
  parts = components(s, [&](int u, int v) { return !(g.adjacent_at(u, v) && g.adjacent_at(v, u)); });
  if (parts.size() > 1) return {SplitKind::kClique, parts};

  // u -> v unless v strictly precedes u; the SCCs are the factors of a chain.
  const std::size_t k = s.size();
  auto precedes = [&](int u, int v) { return g.adjacent_at(u, v) && !g.adjacent_at(v, u); };
  std::vector<std::vector<char>> reach(k, std::vector<char>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::size_t> stack{i};
    reach[i][i] = 1;
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < k; ++b)
        if (!reach[i][b] && !precedes(s[b], s[a])) {
          reach[i][b] = 1;
          stack.push_back(b);
        }
    }
  }
  parts = components(s, [&](int u, int v) {
    std::size_t i = std::find(s.begin(), s.end(), u) - s.begin();
    std::size_t j = std::find(s.begin(), s.end(), v) - s.begin();
    return reach[i][j] && reach[j][i];
  });
  if (parts.size() > 1) {
    std::sort(parts.begin(), parts.end(), [&](const Positions& x, const Positions& y) { return precedes(x[0], y[0]); });
    return {SplitKind::kSequential, parts};
  }

  // Prime quotient: the block of v is v plus every w whose module closure
  // with v stays proper.
  std::vector<int> owner(g.size(), -1);
  std::vector<Positions> blocks;
  for (int v : s) {
    if (owner[v] >= 0) continue;
    const int id = static_cast<int>(blocks.size());
    blocks.push_back({v});
    owner[v] = id;
    for (int w : s) {
      if (owner[w] >= 0) continue;
      auto in = module_closure(g, s, v, w);
      bool proper = false;
      for (int z : s) proper = proper || !in[z];
      if (proper) {
        owner[w] = id;
        blocks[id].push_back(w);
      }
    }
    std::sort(blocks[id].begin(), blocks[id].end());
  }
  return {SplitKind::kPrime, blocks};
}

inline VertexSet ids_of(const LabeledGraph& g, const Positions& p) {
  VertexSet out;
  out.reserve(p.size());
  for (int i : p) out.push_back(g.vertex_at(i));
  return out;
}

inline Positions all_positions(const LabeledGraph& g) {
  Positions s(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<int>(i);
  return s;
}

}  // namespace detail

/// Partition of V(g) into maximal prime modules, with the case tag. Blocks
/// come in chain order for seq and by smallest vertex otherwise.
inline ModuleSplit maximal_prime_modules(const LabeledGraph& g) {
  if (g.size() < 2) throw Error(ErrorCode::kTooSmall, "maximal_prime_modules needs at least 2 vertices");
  auto [kind, parts] = detail::split(g, detail::all_positions(g));
  ModuleSplit out{kind, {}};
  for (const auto& p : parts) out.blocks.push_back(detail::ids_of(g, p));
  return out;
}

/// Quotient of g by a partition into modules; block i becomes vertex i+1.
inline LabeledGraph quotient_graph(const LabeledGraph& g, const std::vector<VertexSet>& blocks) {
  std::size_t total = 0;
  std::vector<char> seen(g.size(), 0);
  for (const auto& b : blocks) {
    if (b.empty()) throw Error(ErrorCode::kInvalidArgument, "partition has an empty block");
    for (int p : positions_of(g, b)) {
      if (seen[p]) throw Error(ErrorCode::kInvalidArgument, "blocks overlap");
      seen[p] = 1;
    }
    total += b.size();
    if (!is_module(g, b)) throw Error(ErrorCode::kNotAModule, "block " + to_string(b) + " is not a module");
  }
  if (total != g.size()) throw Error(ErrorCode::kInvalidArgument, "blocks do not cover the vertex set");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = 0; j < blocks.size(); ++j)
      if (i != j && g.has_edge(blocks[i][0], blocks[j][0]))
        edges.emplace_back(static_cast<int>(i) + 1, static_cast<int>(j) + 1);
  return unlabeled_graph(static_cast<int>(blocks.size()), edges);
}

enum class NodeKind { kLeaf, kParallel, kSequential, kClique, kPrime };

struct MDecNode {
  NodeKind kind = NodeKind::kLeaf;
  std::string label;  // letter for leaves, op name otherwise
  VertexSet module;
  std::vector<int> children;
  int parent = -1;
};

/// mdec(G): nodes are the prime modules plus V. Children of a seq node are
/// in chain order; those of a prime node follow one admissible enumeration.
struct MDecTree {
  std::vector<MDecNode> nodes;
  int root = -1;

  const MDecNode& at(int i) const { return nodes[static_cast<std::size_t>(i)]; }
  const MDecNode& root_node() const { return at(root); }
  std::size_t size() const { return nodes.size(); }

  int leaf_of(Vertex v) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].kind == NodeKind::kLeaf && nodes[i].module[0] == v) return static_cast<int>(i);
    throw Error(ErrorCode::kVertexNotInGraph, "vertex " + std::to_string(v));
  }

  std::optional<int> find_module(const VertexSet& m) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].module == m) return static_cast<int>(i);
    return std::nullopt;
  }
};

/// mdec'(G): every seq node has exactly two children and the first one is
/// not a seq node.
struct MDecPrimeTree : MDecTree {
  bool is_first_child(int parent, int child) const {
    const MDecNode& p = at(parent);
    return p.kind == NodeKind::kSequential && !p.children.empty() && p.children[0] == child;
  }
};

inline NodeKind node_kind(OpKind k) {
  switch (k) {
    case OpKind::kParallel: return NodeKind::kParallel;
    case OpKind::kSequential: return NodeKind::kSequential;
    case OpKind::kClique: return NodeKind::kClique;
    case OpKind::kPrime: return NodeKind::kPrime;
  }
  return NodeKind::kPrime;
}

namespace detail {

using OpResolver = std::function<const SignatureOp&(SplitKind, const LabeledGraph& quotient)>;

inline MDecTree build_tree(const LabeledGraph& g, const OpResolver& resolve, SearchLimits limits) {
  MDecTree t;
  if (g.empty()) throw Error(ErrorCode::kEmptySet, "cannot decompose the empty graph");
  std::function<int(const Positions&, int)> build = [&](const Positions& s, int parent) -> int {
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    t.nodes[id].module = ids_of(g, s);
    t.nodes[id].parent = parent;
    if (s.size() == 1) {
      t.nodes[id].kind = NodeKind::kLeaf;
      t.nodes[id].label = g.label_at(s[0]);
      return id;
    }
    auto [kind, parts] = split(g, s);
    std::vector<VertexSet> blocks;
    for (const auto& p : parts) blocks.push_back(ids_of(g, p));
    const LabeledGraph q = quotient_graph(induced_subgraph(g, t.nodes[id].module), blocks);
    const SignatureOp& op = resolve(kind, q);
    if (kind == SplitKind::kPrime) {
      auto sigma = find_isomorphism(q, op.graph(), false, limits);
      if (!sigma) throw Error(ErrorCode::kNotInSignature, "resolved op does not match the quotient");
      std::vector<Positions> ordered(parts.size());
      for (std::size_t k = 0; k < parts.size(); ++k) ordered[sigma->at(static_cast<int>(k))] = parts[k];
      parts = std::move(ordered);
    }
    t.nodes[id].kind = node_kind(op.kind());
    t.nodes[id].label = op.name();
    for (const auto& p : parts) {
      int c = build(p, id);
      t.nodes[id].children.push_back(c);
    }
    return id;
  };
  t.root = build(all_positions(g), -1);
  return t;
}

inline OpKind op_kind(SplitKind k) {
  switch (k) {
    case SplitKind::kParallel: return OpKind::kParallel;
    case SplitKind::kClique: return OpKind::kClique;
    case SplitKind::kSequential: return OpKind::kSequential;
    case SplitKind::kPrime: return OpKind::kPrime;
  }
  return OpKind::kPrime;
}

}  // namespace detail

/// mdec(g) over a fixed signature. A quotient that no op of sig accounts for
/// raises NotInSignature; this also covers a missing builtin.
inline MDecTree decompose(const LabeledGraph& g, const Signature& sig) {
  return detail::build_tree(
      g,
      [&](SplitKind kind, const LabeledGraph& q) -> const SignatureOp& {
        const SignatureOp* op = kind == SplitKind::kPrime ? sig.match_prime(q) : sig.find_kind(detail::op_kind(kind));
        if (!op)
          throw NotInSignature("no operation of '" + sig.name() + "' matches a " + to_string(kind) + " quotient on " +
                                   std::to_string(q.size()) + " vertices",
                               q);
        return *op;
      },
      sig.limits());
}

/// mdec(g) in open mode: unmatched prime quotients become new ops "Q<k>" and
/// missing builtins are added to sig.
inline MDecTree decompose_open(const LabeledGraph& g, Signature& sig) {
  return detail::build_tree(
      g,
      [&](SplitKind kind, const LabeledGraph& q) -> const SignatureOp& {
        if (kind == SplitKind::kPrime) {
          if (const SignatureOp* op = sig.match_prime(q)) return *op;
          int k = static_cast<int>(sig.prime_ops().size()) + 1;
          while (sig.find("Q" + std::to_string(k)) || sig.alphabet().contains("Q" + std::to_string(k))) ++k;
          sig.add(SignatureOp::trusted_prime("Q" + std::to_string(k), q));
          return sig.ops().back();
        }
        OpKind ok = detail::op_kind(kind);
        if (!sig.has(ok)) {
          sig.add(ok == OpKind::kParallel   ? SignatureOp::parallel()
                  : ok == OpKind::kClique ? SignatureOp::clique()
                                          : SignatureOp::sequential());
        }
        return *sig.find_kind(ok);
      },
      sig.limits());
}

namespace detail {

inline MDecPrimeTree binarize_impl(const MDecTree& t, bool flip_combs) {
  MDecPrimeTree out;
  std::function<int(int, int)> copy = [&](int src, int parent) -> int {
    const MDecNode& n = t.at(src);
    const int id = static_cast<int>(out.nodes.size());
    out.nodes.push_back(MDecNode{n.kind, n.label, n.module, {}, parent});
    if (n.kind == NodeKind::kSequential && n.children.size() > 2) {
      // u(v1, u2), u_i(v_i, u_{i+1}), u_{n-1}(v_{n-1}, v_n)
      int cur = id;
      for (std::size_t i = 0; i + 2 < n.children.size(); ++i) {
        int first = copy(n.children[i], cur);
        VertexSet rest;
        for (std::size_t h = i + 1; h < n.children.size(); ++h) rest = set_union(rest, t.at(n.children[h]).module);
        const int u = static_cast<int>(out.nodes.size());
        out.nodes.push_back(MDecNode{NodeKind::kSequential, n.label, rest, {}, cur});
        out.nodes[cur].children = {first, u};
        cur = u;
      }
      int a = copy(n.children[n.children.size() - 2], cur);
      int b = copy(n.children.back(), cur);
      out.nodes[cur].children = {a, b};
    } else {
      std::vector<int> kids;
      for (int c : n.children) kids.push_back(copy(c, id));
      out.nodes[id].children = std::move(kids);
    }
    return id;
  };
  out.root = copy(t.root, -1);
  if (flip_combs)
    for (auto& n : out.nodes)
      if (n.kind == NodeKind::kSequential) std::reverse(n.children.begin(), n.children.end());
  return out;
}

}  // namespace detail

/// mdec'(G) from mdec(G): seq nodes with n >= 3 children become right combs.
inline MDecPrimeTree binarize(const MDecTree& t) { return detail::binarize_impl(t, false); }

/// Rebuilds the graph bottom-up; vertex ids are taken from the leaves.
inline LabeledGraph reconstruct(const MDecTree& t, const Signature& sig) {
  std::function<LabeledGraph(int)> build = [&](int i) -> LabeledGraph {
    const MDecNode& n = t.at(i);
    if (n.kind == NodeKind::kLeaf)
      return LabeledGraph(sig.alphabet(), {{n.module[0], n.label}}, {});
    std::vector<LabeledGraph> parts;
    for (int c : n.children) parts.push_back(build(c));
    const SignatureOp& op = sig.at(n.label);
    return compose(op, parts, IdPolicy::kPreserve);
  };
  return build(t.root);
}

/// Prime modules found by the tree: every node module except V itself.
inline std::vector<VertexSet> prime_module_family(const MDecTree& t) {
  std::vector<VertexSet> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (static_cast<int>(i) != t.root) out.push_back(t.nodes[i].module);
  std::sort(out.begin(), out.end());
  return out;
}

/// All-subset enumeration: modules X != V that overlap no module.
inline std::vector<VertexSet> brute_force_prime_modules(const LabeledGraph& g) {
  const int n = static_cast<int>(g.size());
  if (n > 16) throw Error(ErrorCode::kSizeLimitExceeded, "brute-force module enumeration is limited to 16 vertices");
  const std::uint32_t full = n == 0 ? 0u : (1u << n) - 1;
  std::vector<std::uint32_t> modules;
  for (std::uint32_t m = 1; m <= full && m != 0; ++m) {
    VertexSet x;
    for (int i = 0; i < n; ++i)
      if (m >> i & 1u) x.push_back(g.vertex_at(i));
    if (is_module(g, x)) modules.push_back(m);
  }
  std::vector<VertexSet> out;
  for (std::uint32_t x : modules) {
    if (x == full) continue;
    bool overlaps = false;
    for (std::uint32_t y : modules) {
      if ((x & y) && (x & ~y) && (y & ~x)) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) continue;
    VertexSet s;
    for (int i = 0; i < n; ++i)
      if (x >> i & 1u) s.push_back(g.vertex_at(i));
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string node_label(const MDecNode& n) { return n.label; }

/// One node per line: indent, label, module, and "(first)" on the first
/// child of a seq node in a binarized tree.
inline std::string format_tree(const MDecTree& t, bool mark_first = false) {
  std::ostringstream out;
  std::function<void(int, int)> walk = [&](int i, int depth) {
    const MDecNode& n = t.at(i);
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << n.label << ' ' << to_string(n.module);
    if (mark_first && n.parent >= 0 && t.at(n.parent).kind == NodeKind::kSequential && t.at(n.parent).children[0] == i)
      out << " (first)";
    out << '\n';
    for (int c : n.children) walk(c, depth + 1);
  };
  walk(t.root, 0);
  return out.str();
}

inline std::string format_tree(const MDecPrimeTree& t) { return format_tree(static_cast<const MDecTree&>(t), true); }

/// The tree as a term; seq combs flatten back into one variadic node.
inline Term to_term(const MDecTree& t) {
  std::function<Term(int)> walk = [&](int i) -> Term {
    const MDecNode& n = t.at(i);
    if (n.kind == NodeKind::kLeaf) return Term::leaf(n.label);
    std::vector<Term> kids;
    for (int c : n.children) kids.push_back(walk(c));
    return Term::node(n.label, std::move(kids));
  };
  return walk(t.root);
}

/// Random admissible re-ordering: commutative children are shuffled and the
/// children of a prime node are permuted by a random automorphism.
template <typename Tree>
Tree perturb_tree(Tree t, const Signature& sig, Rng& rng) {
  std::map<std::string, AutomorphismGroup> groups;
  for (auto& n : t.nodes) {
    if (n.kind == NodeKind::kParallel || n.kind == NodeKind::kClique) {
      rng.shuffle(n.children);
    } else if (n.kind == NodeKind::kPrime) {
      auto it = groups.find(n.label);
      if (it == groups.end())
        it = groups.emplace(n.label, automorphism_group(sig.at(n.label).graph(), false, sig.limits())).first;
      const Permutation& sigma = it->second.elements[rng.index(it->second.elements.size())];
      std::vector<int> kids(n.children.size());
      for (std::size_t i = 0; i < kids.size(); ++i) kids[i] = n.children[static_cast<std::size_t>(sigma.at(static_cast<int>(i)))];
      n.children = std::move(kids);
    }
  }
  return t;
}

}  // namespace modgraph
