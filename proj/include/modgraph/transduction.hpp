#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modgraph/cms.hpp"
#include "modgraph/mdec.hpp"
#include "modgraph/predicates.hpp"
#include "modgraph/random.hpp"
#include "modgraph/structures.hpp"

namespace modgraph {

enum class NodeClass { kN0 = 0, kN1 = 1, kN2 = 2, kN3 = 3 };

struct NodeClassification {
  std::vector<NodeClass> classes;  // indexed by tree node
  bool dual = false;               // clique plays the part of par

  NodeClass of(int node) const { return classes[static_cast<std::size_t>(node)]; }
  std::size_t count(NodeClass c) const { return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), c)); }
};

inline std::string to_string(NodeClass c) { return "N" + std::to_string(static_cast<int>(c)); }

inline NodeClassification classify_nodes(const MDecPrimeTree& t, const Signature& sig) {
  require_weakly_rigid(sig);
  NodeClassification out;
  out.dual = sig.has(OpKind::kClique);
  const NodeKind comm = out.dual ? NodeKind::kClique : NodeKind::kParallel;
  for (const auto& n : t.nodes) {
    if (n.kind == NodeKind::kLeaf) {
      out.classes.push_back(NodeClass::kN0);
    } else if (n.kind == comm) {
      bool leaves = true;
      for (int c : n.children) leaves = leaves && t.at(c).kind == NodeKind::kLeaf;
      out.classes.push_back(leaves ? NodeClass::kN1 : NodeClass::kN2);
    } else if (n.kind == NodeKind::kSequential || n.kind == NodeKind::kPrime) {
      out.classes.push_back(NodeClass::kN3);
    } else {
      throw Error(ErrorCode::kNotInSignature, "tree has a " + n.label + " node but the signature uses the other commutative operation");
    }
  }
  return out;
}

/// nu, mu_i and kappa_i of a tree. Leaves are identified by their vertex.
struct EncodingTables {
  std::vector<VertexSet> nu;
  std::array<std::vector<std::optional<VertexSet>>, 4> mu;
  std::array<std::map<Vertex, int>, 4> kappa;
  std::map<Vertex, std::vector<int>> rho;        // leaf first, root last
  std::vector<std::vector<int>> dist_children;   // empty outside N3

  std::optional<int> kappa_of(int i, Vertex leaf) const {
    auto it = kappa[static_cast<std::size_t>(i)].find(leaf);
    if (it == kappa[static_cast<std::size_t>(i)].end()) return std::nullopt;
    return it->second;
  }
};

/// Distinguished children: the first child of a seq node, the children at
/// dist(H) of an H node.
inline std::vector<int> distinguished_children(const MDecPrimeTree& t, int node, const Signature& sig) {
  const MDecNode& n = t.at(node);
  if (n.kind == NodeKind::kSequential) return {n.children.front()};
  if (n.kind != NodeKind::kPrime) return {};
  std::vector<int> out;
  for (Vertex i : select_distinguished(sig.at(n.label), sig.limits())) out.push_back(n.children[static_cast<std::size_t>(i - 1)]);
  return out;
}

inline EncodingTables compute_encoding(const MDecPrimeTree& t, const NodeClassification& cls, const Signature& sig) {
  EncodingTables enc;
  const std::size_t size = t.size();
  enc.nu.resize(size);
  for (auto& m : enc.mu) m.assign(size, std::nullopt);
  enc.dist_children.resize(size);
  std::function<void(int)> visit = [&](int x) {
    const MDecNode& n = t.at(x);
    for (int c : n.children) visit(c);
    const auto i = static_cast<std::size_t>(x);
    switch (cls.of(x)) {
      case NodeClass::kN0:
        enc.nu[i] = n.module;
        enc.mu[0][i] = n.module;
        break;
      case NodeClass::kN1: {
        VertexSet kids;
        for (int c : n.children) kids = set_union(kids, t.at(c).module);
        enc.nu[i] = kids;
        enc.mu[1][i] = kids;
        break;
      }
      case NodeClass::kN2: {
        VertexSet nu, mu;
        for (int c : n.children) {
          nu = set_union(nu, enc.nu[static_cast<std::size_t>(c)]);
          if (t.at(c).kind != NodeKind::kLeaf) {
            const auto& m3 = enc.mu[3][static_cast<std::size_t>(c)];
            if (!m3) throw Error(ErrorCode::kInvalidArgument, "non-leaf child of a commutative node is not in N3");
            mu = set_union(mu, *m3);
          }
        }
        enc.nu[i] = nu;
        enc.mu[2][i] = mu;
        break;
      }
      case NodeClass::kN3: {
        enc.dist_children[i] = distinguished_children(t, x, sig);
        VertexSet nu, mu;
        for (int c : n.children) {
          const bool d = std::find(enc.dist_children[i].begin(), enc.dist_children[i].end(), c) != enc.dist_children[i].end();
          (d ? mu : nu) = set_union(d ? mu : nu, enc.nu[static_cast<std::size_t>(c)]);
        }
        enc.nu[i] = nu;
        enc.mu[3][i] = mu;
        break;
      }
    }
  };
  visit(t.root);
  for (int k = 0; k < 4; ++k)
    for (std::size_t x = 0; x < size; ++x) {
      if (!enc.mu[k][x]) continue;
      for (Vertex leaf : *enc.mu[k][x])
        if (!enc.kappa[k].emplace(leaf, static_cast<int>(x)).second)
          throw Error(ErrorCode::kInvalidArgument, "mu_" + std::to_string(k) + " sets overlap at leaf " + std::to_string(leaf));
    }
  for (std::size_t x = 0; x < size; ++x) {
    if (t.nodes[x].kind != NodeKind::kLeaf) continue;
    std::vector<int> path;
    for (int y = static_cast<int>(x); y >= 0; y = t.at(y).parent) path.push_back(y);
    enc.rho.emplace(t.nodes[x].module[0], std::move(path));
  }
  return enc;
}

/// kappa_i read off the root paths, following the path description rather
/// than the fibers of mu_i.
inline std::array<std::map<Vertex, int>, 4> kappa_from_paths(const MDecPrimeTree& t, const NodeClassification& cls,
                                                             const EncodingTables& enc) {
  std::array<std::map<Vertex, int>, 4> out;
  for (const auto& [leaf, path] : enc.rho) {
    out[0][leaf] = path[0];
    if (path.size() > 1 && cls.of(path[1]) == NodeClass::kN1) out[1][leaf] = path[1];
    for (std::size_t k = 1; k < path.size(); ++k) {
      const int y = path[k];
      if (cls.of(y) != NodeClass::kN3) continue;
      const auto& d = enc.dist_children[static_cast<std::size_t>(y)];
      if (std::find(d.begin(), d.end(), path[k - 1]) == d.end()) continue;
      out[3][leaf] = y;
      const int p = t.at(y).parent;
      if (p >= 0 && cls.of(p) == NodeClass::kN2) out[2][leaf] = p;
      break;
    }
  }
  return out;
}

/// Invariants of the encoding: non-empty nu and mu, mu_i defined exactly on
/// N_i, kappa_i the fiber inverse of mu_i and equal to its path description,
/// and mu_2 the union of mu_3 over the N3 children. Returns the violations.
inline std::vector<std::string> check_encoding(const MDecPrimeTree& t, const NodeClassification& cls, const EncodingTables& enc) {
  std::vector<std::string> bad;
  const std::string names[4] = {"mu0", "mu1", "mu2", "mu3"};
  for (std::size_t x = 0; x < t.size(); ++x) {
    const std::string at = " at node " + to_string(t.nodes[x].module);
    if (enc.nu[x].empty()) bad.push_back("nu empty" + at);
    for (int k = 0; k < 4; ++k) {
      const bool defined = enc.mu[k][x].has_value();
      if (defined != (static_cast<int>(cls.classes[x]) == k)) bad.push_back(names[k] + " defined outside its class" + at);
      if (defined && enc.mu[k][x]->empty()) bad.push_back(names[k] + " empty" + at);
      if (defined)
        for (Vertex leaf : *enc.mu[k][x]) {
          auto img = enc.kappa_of(k, leaf);
          if (!img || *img != static_cast<int>(x)) bad.push_back("kappa" + std::to_string(k) + " misses leaf " + std::to_string(leaf) + at);
        }
    }
    if (cls.classes[x] == NodeClass::kN2) {
      VertexSet u;
      for (int c : t.nodes[x].children)
        if (cls.of(c) == NodeClass::kN3) u = set_union(u, *enc.mu[3][static_cast<std::size_t>(c)]);
      if (u != *enc.mu[2][x]) bad.push_back("mu2 is not the union of mu3 over N3 children" + at);
    }
  }
  const auto paths = kappa_from_paths(t, cls, enc);
  for (int k = 0; k < 4; ++k)
    if (paths[k] != enc.kappa[k]) bad.push_back("kappa" + std::to_string(k) + " differs from its path description");
  return bad;
}

struct KappaLemmaReport {
  std::size_t checked = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// Compares kappa_1..3 from the encoding with the module description: least
/// disconnected strong module for kappa_1, the connected-node condition for
/// kappa_3, and its disconnected parent for kappa_2 (co-notions in dual mode).
inline KappaLemmaReport check_kappa_lemma(const LabeledGraph& g, const MDecPrimeTree& t, const EncodingTables& enc,
                                          const Signature& sig) {
  KappaLemmaReport rep;
  SetPredicateEvaluator ev(g, sig);
  std::vector<SetPredicateEvaluator::Mask> candidates = ev.node_family();
  for (auto m : ev.strong_modules()) candidates.push_back(m);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (Vertex v : g.vertices()) {
    const int pos = g.position(v);
    for (int k = 1; k <= 3; ++k) {
      std::vector<SetPredicateEvaluator::Mask> hits;
      for (auto m : candidates) {
        const bool h = k == 1 ? ev.kappa1(m, pos) : k == 2 ? ev.kappa2(m, pos) : ev.kappa3(m, pos);
        if (h) hits.push_back(m);
      }
      auto img = enc.kappa_of(k, v);
      std::optional<SetPredicateEvaluator::Mask> want;
      if (img) want = ev.mask(t.at(*img).module);
      ++rep.checked;
      const std::string what = "kappa" + std::to_string(k) + "(" + std::to_string(v) + ")";
      if (hits.size() > 1) {
        rep.mismatches.push_back(what + ": module description is not functional");
      } else if (hits.empty() != !want.has_value() || (want && hits.front() != *want)) {
        rep.mismatches.push_back(what + ": tree gives " + (want ? to_string(ev.set_of(*want)) : "undefined") + ", modules give " +
                                 (hits.empty() ? "undefined" : to_string(ev.set_of(hits.front()))));
      }
    }
  }
  return rep;
}

struct ReprElement {
  Vertex leaf = 0;
  int tag = 0;
  int node = -1;     // kappa_tag(leaf) as a tree node, when known
  VertexSet image;   // the same node as a vertex set
};

/// repr_0(T) or, once restricted to representatives, repr(T). Elements are
/// ordered by tag, then leaf.
struct ReprStructure {
  Structure structure;
  std::vector<ReprElement> elements;
  std::array<VertexSet, 4> representatives;
  bool restricted = false;

  bool equivalent(int a, int b) const {
    const auto& x = elements[static_cast<std::size_t>(a)];
    const auto& y = elements[static_cast<std::size_t>(b)];
    return x.tag == y.tag && x.image == y.image;
  }
};

namespace detail {

inline std::string element_name(Vertex leaf, int tag) { return "(" + std::to_string(leaf) + "," + std::to_string(tag) + ")"; }

// Lifts the tree relations through kappa onto the given elements.
inline ReprStructure lift_tree(const MDecPrimeTree& t, const Signature& sig, bool dual, std::vector<ReprElement> elems) {
  ReprStructure r;
  std::vector<std::string> names;
  for (const auto& e : elems) names.push_back(element_name(e.leaf, e.tag));
  r.structure = Structure(tree_relational_signature(sig), names);
  std::map<int, std::vector<int>> by_node;
  for (std::size_t i = 0; i < elems.size(); ++i) by_node[elems[i].node].push_back(static_cast<int>(i));
  const Structure tree = tree_structure(t, sig);
  const std::string comm = label_predicate(dual ? kCliqueName : kParName);
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const ReprElement& e = elems[i];
    const MDecNode& n = t.at(e.node);
    const int me = static_cast<int>(i);
    if (e.tag == 0) r.structure.add(label_predicate(n.label), {me});
    if (e.tag == 1 || e.tag == 2) r.structure.add(comm, {me});
    if (e.tag == 3) r.structure.add(label_predicate(n.kind == NodeKind::kSequential ? kSeqName : n.label), {me});
  }
  for (const auto& [pred, arity] : tree.signature().predicates()) {
    if (pred.rfind("label_", 0) == 0) continue;
    for (const auto& tuple : tree.tuples(pred)) {
      std::vector<int> lifted(tuple.size());
      std::function<void(std::size_t)> spread = [&](std::size_t k) {
        if (k == tuple.size()) {
          r.structure.add(pred, lifted);
          return;
        }
        auto it = by_node.find(tuple[k]);
        if (it == by_node.end()) return;
        for (int e : it->second) {
          lifted[k] = e;
          spread(k + 1);
        }
      };
      spread(0);
    }
  }
  r.elements = std::move(elems);
  return r;
}

}  // namespace detail

inline ReprStructure build_repr0(const MDecPrimeTree& t, const EncodingTables& enc, const Signature& sig) {
  std::vector<ReprElement> elems;
  for (int k = 0; k < 4; ++k)
    for (const auto& [leaf, node] : enc.kappa[static_cast<std::size_t>(k)]) elems.push_back({leaf, k, node, t.at(node).module});
  return detail::lift_tree(t, sig, sig.has(OpKind::kClique), std::move(elems));
}

/// Picks one leaf out of a kappa fiber.
using RepresentativeRule = std::function<Vertex(int tag, const VertexSet& fiber)>;

inline RepresentativeRule smallest_leaf_rule() {
  return [](int, const VertexSet& f) { return f.front(); };
}
inline RepresentativeRule largest_leaf_rule() {
  return [](int, const VertexSet& f) { return f.back(); };
}
/// The rng must outlive the rule.
inline RepresentativeRule random_leaf_rule(Rng& rng) {
  return [&rng](int, const VertexSet& f) { return f[rng.index(f.size())]; };
}

/// X_0..X_3: one leaf per kappa_i fiber.
inline std::array<VertexSet, 4> choose_representatives(const EncodingTables& enc, const RepresentativeRule& rule) {
  std::array<VertexSet, 4> reps;
  for (int k = 0; k < 4; ++k) {
    std::map<int, VertexSet> fibers;
    for (const auto& [leaf, node] : enc.kappa[static_cast<std::size_t>(k)]) fibers[node].push_back(leaf);
    for (const auto& [node, fiber] : fibers) {
      const Vertex pick = rule(k, fiber);
      if (!std::binary_search(fiber.begin(), fiber.end(), pick))
        throw Error(ErrorCode::kInvalidArgument, "representative rule picked a leaf outside the fiber");
      reps[static_cast<std::size_t>(k)].push_back(pick);
    }
    reps[static_cast<std::size_t>(k)] = make_vertex_set(reps[static_cast<std::size_t>(k)]);
  }
  return reps;
}

inline ReprStructure build_repr(const MDecPrimeTree& t, const EncodingTables& enc, const Signature& sig,
                                const std::array<VertexSet, 4>& reps) {
  std::vector<ReprElement> elems;
  for (int k = 0; k < 4; ++k)
    for (Vertex leaf : reps[static_cast<std::size_t>(k)]) {
      auto node = enc.kappa_of(k, leaf);
      if (!node)
        throw Error(ErrorCode::kInvalidArgument, "kappa" + std::to_string(k) + " is undefined on representative " + std::to_string(leaf));
      elems.push_back({leaf, k, *node, t.at(*node).module});
    }
  ReprStructure r = detail::lift_tree(t, sig, sig.has(OpKind::kClique), std::move(elems));
  r.representatives = reps;
  r.restricted = true;
  return r;
}

inline ReprStructure build_repr(const MDecPrimeTree& t, const EncodingTables& enc, const Signature& sig,
                                const RepresentativeRule& rule = smallest_leaf_rule()) {
  return build_repr(t, enc, sig, choose_representatives(enc, rule));
}

struct IsoVerdict {
  bool ok = false;
  std::string reason;
};

/// Checks that element -> node is a bijection onto the nodes of t carrying
/// every relation of r exactly onto the matching relation of mdec'(t).
inline IsoVerdict verify_isomorphism(const ReprStructure& r, const MDecPrimeTree& t, const Signature& sig) {
  const Structure tree = tree_structure(t, sig);
  if (r.elements.size() != t.size())
    return {false, std::to_string(r.elements.size()) + " elements for " + std::to_string(t.size()) + " tree nodes"};
  std::vector<int> map(r.elements.size());
  std::vector<char> hit(t.size(), 0);
  for (std::size_t i = 0; i < r.elements.size(); ++i) {
    const int node = r.elements[i].node;
    if (node < 0 || static_cast<std::size_t>(node) >= t.size())
      return {false, "element " + r.structure.element_name(static_cast<int>(i)) + " has no tree node"};
    if (hit[static_cast<std::size_t>(node)]++)
      return {false, "two elements map to node " + to_string(t.at(node).module)};
    map[i] = node;
  }
  const auto& preds = tree.signature().predicates();
  if (preds != r.structure.signature().predicates()) return {false, "relational signatures differ"};
  for (const auto& [pred, arity] : preds) {
    std::set<std::vector<int>> image;
    for (auto tuple : r.structure.tuples(pred)) {
      for (auto& e : tuple) e = map[static_cast<std::size_t>(e)];
      image.insert(tuple);
    }
    if (image != tree.tuples(pred)) {
      for (const auto& tu : tree.tuples(pred))
        if (!image.count(tu)) return {false, pred + " tuple missing at node " + to_string(t.at(tu[0]).module)};
      for (const auto& tu : image)
        if (!tree.tuples(pred).count(tu)) return {false, "extra " + pred + " tuple at node " + to_string(t.at(tu[0]).module)};
    }
  }
  return {true, ""};
}

/// Fills in the tree nodes of elements whose images are known.
inline void attach_nodes(ReprStructure& r, const MDecPrimeTree& t) {
  for (auto& e : r.elements) {
    auto node = t.find_module(e.image);
    e.node = node ? *node : -1;
  }
}

/// The definition scheme for G -> mdec'(G): four set parameters X0..X3,
/// copies 0..3, domain formulas psi_i and relation formulas theta.
class TransductionSchema {
 public:
  static constexpr int k = 3;
  static constexpr int n = 4;

  explicit TransductionSchema(const Signature& sig)
      : sig_(sig), lib_(ms_predicate_library(sig)), tree_sig_(tree_relational_signature(sig)) {
    Scope params;
    for (int i = 0; i < 4; ++i) params.push_back({"X" + std::to_string(i), Sort::kSet});
    std::string phi = "(and";
    for (int i = 0; i < 4; ++i) {
      const std::string X = "X" + std::to_string(i), kap = "kappa" + std::to_string(i);
      phi += "\n (forall x (implies (in x " + X + ") (existsset Y (" + kap + " Y x))))";
      phi += "\n (forall x y (implies (and (in x " + X + ") (in y " + X + ") (not (= x y))) (not (existsset Y (and (" + kap +
             " Y x) (" + kap + " Y y))))))";
      phi += "\n (forall x (implies (existsset Y (" + kap + " Y x)) (exists y (and (in y " + X + ") (existsset Y (and (" + kap +
             " Y x) (" + kap + " Y y)))))))";
    }
    phi_ = parse_formula(phi + ")", lib_.graph_signature, &lib_.defs, params);
    Scope with_x = params;
    with_x.push_back({"x", Sort::kElement});
    for (int i = 0; i < 4; ++i)
      psi_[static_cast<std::size_t>(i)] = parse_formula("(in x X" + std::to_string(i) + ")", lib_.graph_signature, &lib_.defs, with_x);
  }

  const Signature& signature() const { return sig_; }
  const PredicateLibrary& library() const { return lib_; }
  const RelationalSignature& tree_signature() const { return tree_sig_; }
  /// Free set variables X0..X3.
  const FormulaPtr& phi() const { return phi_; }
  /// Free variables X0..X3 and x.
  const FormulaPtr& psi(int i) const { return psi_[static_cast<std::size_t>(i)]; }

  /// Formula for q((x1,i1),..,(xr,ir)) with free element variables x1..xr.
  FormulaPtr theta(const std::string& q, const std::vector<int>& tags) const {
    auto key = std::make_pair(q, tags);
    auto it = theta_cache_.find(key);
    if (it != theta_cache_.end()) return it->second;
    auto arity = tree_sig_.arity(q);
    if (!arity) throw Error(ErrorCode::kUnknownPredicate, "mdec' trees have no predicate '" + q + "'");
    if (static_cast<std::size_t>(*arity) != tags.size()) throw Error(ErrorCode::kArityMismatch, "one tag per argument of '" + q + "'");
    for (int t : tags)
      if (t < 0 || t > 3) throw Error(ErrorCode::kInvalidArgument, "tags range over 0..3");
    Scope free;
    for (std::size_t i = 1; i <= tags.size(); ++i) free.push_back({"x" + std::to_string(i), Sort::kElement});
    const FormulaPtr f = parse_formula(theta_text(q, tags), lib_.graph_signature, &lib_.defs, free);
    theta_cache_.emplace(key, f);
    return f;
  }

 private:
  std::string theta_text(const std::string& q, const std::vector<int>& tags) const {
    const bool dual = lib_.dual;
    const std::string comm = label_predicate(dual ? kCliqueName : kParName);
    const int t0 = tags[0];
    if (q.rfind("label_", 0) == 0) {
      const std::string what = q.substr(6);
      if (sig_.alphabet().contains(what)) return t0 == 0 ? "(" + q + " x1)" : "false";
      if (q == comm) return t0 == 1 || t0 == 2 ? "true" : "false";
      if (t0 != 3 || !lib_.defs.find(q)) return "false";
      return "(existsset Y1 (and (kappa3 Y1 x1) (" + q + " Y1)))";
    }
    if (!lib_.defs.find(q)) return "false";
    std::string open, close, args;
    for (std::size_t i = 1; i <= tags.size(); ++i) {
      const std::string Y = "Y" + std::to_string(i);
      open += "(existsset " + Y + " (and (kappa" + std::to_string(tags[i - 1]) + " " + Y + " x" + std::to_string(i) + ") ";
      close += "))";
      args += " " + Y;
    }
    return open + "(" + q + args + ")" + close;
  }

  Signature sig_;
  PredicateLibrary lib_;
  RelationalSignature tree_sig_;
  FormulaPtr phi_;
  std::array<FormulaPtr, 4> psi_;
  mutable std::map<std::pair<std::string, std::vector<int>>, FormulaPtr> theta_cache_;
};

inline TransductionSchema transduction_schema(const Signature& sig) { return TransductionSchema(sig); }

struct ApplyOptions {
  std::uint64_t budget = kDefaultWorkBudget;
  /// Up to this many vertices, unary and binary relations are also decided
  /// by model checking the theta formulas themselves.
  std::size_t direct_theta_vertices = 4;
};

/// Runs the schema on g with parameters reps, using only model checking on
/// graph_structure(g). Element images are the kappa_tag values as vertex
/// sets; tree nodes are left unset (see attach_nodes).
inline ReprStructure apply_schema(const LabeledGraph& g, const TransductionSchema& schema, const std::array<VertexSet, 4>& reps,
                                  const ApplyOptions& opt = {}) {
  const Structure s = graph_structure(g);
  ModelChecker mc(s, opt.budget);
  const std::size_t nv = g.size();
  if (nv > kMaxSetDomain) throw Error(ErrorCode::kSizeLimitExceeded, "schema evaluation needs at most 64 vertices");
  const std::uint64_t all = nv == 64 ? ~0ull : (1ull << nv) - 1;
  auto mask = [&](const VertexSet& x) {
    std::uint64_t m = 0;
    for (int p : positions_of(g, x)) m |= 1ull << p;
    return m;
  };
  std::vector<std::uint64_t> params;
  for (const auto& r : reps) params.push_back(mask(r));
  std::vector<Param> xs;
  for (int i = 0; i < 4; ++i) xs.push_back({"X" + std::to_string(i), Sort::kSet});
  if (!mc.eval(mc.prepare(schema.phi(), xs), params))
    throw Error(ErrorCode::kInvalidArgument, "parameters X0..X3 do not satisfy the correctness formula");

  auto with_x = xs;
  with_x.push_back({"x", Sort::kElement});
  std::vector<ReprElement> elems;
  std::vector<std::uint64_t> images;
  for (int i = 0; i < 4; ++i) {
    auto psi = mc.prepare(schema.psi(i), with_x);
    auto kap = mc.prepare(schema.library().at("kappa" + std::to_string(i))->body, schema.library().at("kappa" + std::to_string(i))->params);
    for (std::size_t p = 0; p < nv; ++p) {
      auto vals = params;
      vals.push_back(p);
      if (!mc.eval(psi, vals)) continue;
      std::vector<std::uint64_t> found;
      for (std::uint64_t y = 1; y <= all && y != 0; ++y)
        if (mc.eval(kap, {y, p})) found.push_back(y);
      if (found.size() != 1) throw Error(ErrorCode::kInvalidArgument, "kappa" + std::to_string(i) + " is not a function");
      VertexSet img;
      for (std::size_t b = 0; b < nv; ++b)
        if ((found[0] >> b) & 1u) img.push_back(g.vertex_at(static_cast<int>(b)));
      elems.push_back({g.vertex_at(static_cast<int>(p)), i, -1, img});
      images.push_back(found[0]);
    }
  }

  ReprStructure r;
  std::vector<std::string> names;
  for (const auto& e : elems) names.push_back(detail::element_name(e.leaf, e.tag));
  r.structure = Structure(schema.tree_signature(), names);
  const int m = static_cast<int>(elems.size());
  const bool direct = nv <= opt.direct_theta_vertices;

  auto theta_holds = [&](const std::string& q, const std::vector<int>& tuple) {
    std::vector<int> tags;
    std::vector<std::uint64_t> vals;
    std::vector<Param> ps;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      tags.push_back(elems[static_cast<std::size_t>(tuple[i])].tag);
      vals.push_back(static_cast<std::uint64_t>(g.position(elems[static_cast<std::size_t>(tuple[i])].leaf)));
      ps.push_back({"x" + std::to_string(i + 1), Sort::kElement});
    }
    return mc.eval(mc.prepare(schema.theta(q, tags), ps), vals);
  };
  std::map<std::string, ModelChecker::Query> lib_queries;
  auto lib_holds = [&](const std::string& q, const std::vector<std::uint64_t>& sets) {
    auto it = lib_queries.find(q);
    if (it == lib_queries.end()) {
      auto d = schema.library().at(q);
      it = lib_queries.emplace(q, mc.prepare(d->body, d->params)).first;
    }
    return mc.eval(it->second, sets);
  };
  // For the structured relations theta reduces to the library predicate on
  // the kappa images, since each kappa_i(Y, x) has exactly one solution Y.
  auto lifted = [&](const std::string& q, const std::vector<int>& tuple) {
    if (!schema.library().defs.find(q)) return false;
    std::vector<std::uint64_t> sets;
    for (int e : tuple) sets.push_back(images[static_cast<std::size_t>(e)]);
    return lib_holds(q, sets);
  };
  auto decide = [&](const std::string& q, const std::vector<int>& tuple, bool fast) {
    if (direct) {
      const bool slow = theta_holds(q, tuple);
      if (slow != fast) throw Error(ErrorCode::kInvalidArgument, "theta formula for " + q + " disagrees with its reduction");
    }
    if (fast) r.structure.add(q, tuple);
  };

  for (const auto& [q, arity] : schema.tree_signature().predicates()) {
    if (arity == 1) {
      for (int e = 0; e < m; ++e) {
        bool fast;
        if (q.rfind("label_", 0) == 0 && !schema.library().defs.find(q)) {
          fast = theta_holds(q, {e});  // tag-only cases are constant formulas
        } else if (schema.signature().alphabet().contains(q.substr(6))) {
          fast = elems[static_cast<std::size_t>(e)].tag == 0 && lifted(q, {e});
        } else if (q == label_predicate(schema.library().dual ? kCliqueName : kParName)) {
          fast = elems[static_cast<std::size_t>(e)].tag == 1 || elems[static_cast<std::size_t>(e)].tag == 2;
        } else {
          fast = elems[static_cast<std::size_t>(e)].tag == 3 && lifted(q, {e});
        }
        decide(q, {e}, fast);
      }
    } else if (arity == 2) {
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) decide(q, {a, b}, lifted(q, {a, b}));
    } else {
      // children_H: the parent must carry label H, the rest are its children
      const std::string op = q.substr(std::string("children_").size());
      std::vector<int> tuple(static_cast<std::size_t>(arity));
      for (int p = 0; p < m; ++p) {
        if (!lifted(label_predicate(op), {p})) continue;
        std::vector<int> kids;
        for (int c = 0; c < m; ++c)
          if (lifted("child", {p, c})) kids.push_back(c);
        tuple[0] = p;
        std::function<void(std::size_t)> fill = [&](std::size_t i) {
          if (i == tuple.size()) {
            if (lifted(q, tuple)) r.structure.add(q, tuple);
            return;
          }
          for (int c : kids) {
            tuple[i] = c;
            fill(i + 1);
          }
        };
        fill(1);
      }
    }
  }
  r.elements = std::move(elems);
  r.representatives = reps;
  r.restricted = true;
  return r;
}

}  // namespace modgraph
