#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "modgraph/cms.hpp"
#include "modgraph/mdec.hpp"
#include "modgraph/signature.hpp"
#include "modgraph/structures.hpp"

namespace modgraph {

/// Set predicates on graphs, given as CMS definitions over edge/label_<a>.
/// Names are those of the definitions; set parameters are upper case.
struct PredicateLibrary {
  RelationalSignature graph_signature;
  DefinitionTable defs;
  std::string source;
  bool dual = false;  // the commutative op is clique rather than par

  const std::vector<std::string>& names() const { return defs.names(); }
  DefinitionPtr at(const std::string& name) const { return defs.at(name); }
};

inline void require_weakly_rigid(const Signature& sig) {
  RigidityReport r = validate_weakly_rigid_signature(sig);
  if (!r.accepted())
    throw Error(ErrorCode::kNotWeaklyRigid,
                "signature '" + sig.name() + "' is not weakly rigid: " + r.violations.front().op + ": " + r.violations.front().reason);
}

namespace detail {

inline std::string join_words(const std::vector<std::string>& w) {
  std::string s;
  for (const auto& x : w) s += (s.empty() ? "" : " ") + x;
  return s;
}

inline std::string set_names(const std::string& stem, int n, int from = 1) {
  std::vector<std::string> w;
  for (int i = from; i <= n; ++i) w.push_back(stem + std::to_string(i));
  return join_words(w);
}

// (forall v (implies (in v Y) (and (in v X) (not (in v E1)) ...)))
inline std::string inside_minus(const std::string& y, const std::string& x, const std::vector<std::string>& minus) {
  std::string cond = "(in v " + x + ")";
  if (!minus.empty()) {
    cond = "(and " + cond;
    for (const auto& m : minus) cond += " (not (in v " + m + "))";
    cond += ")";
  }
  return "(forall v (implies (in v " + y + ") " + cond + "))";
}

// (forall v (implies (and (in v X) (not (in v E1)) ...) (in v Y)))
inline std::string covers_minus(const std::string& y, const std::string& x, const std::vector<std::string>& minus) {
  std::string cond = "(in v " + x + ")";
  if (!minus.empty()) {
    cond = "(and " + cond;
    for (const auto& m : minus) cond += " (not (in v " + m + "))";
    cond += ")";
  }
  return "(forall v (implies " + cond + " (in v " + y + ")))";
}

// Enumerates X1..Xn for children_H of X. Each Xi is confined to what the
// earlier ones leave over and must be strong before the next is chosen.
inline std::string children_search(const SignatureOp& op, const std::string& final_condition) {
  const int n = op.arity();
  std::vector<std::string> taken;
  std::string open, close;
  for (int i = 1; i <= n; ++i) {
    const std::string xi = "X" + std::to_string(i);
    open += "(existsset " + xi + " (and " + inside_minus(xi, "X", taken);
    if (i < n) {
      open += " (strong " + xi + ") ";
    } else {
      open += " " + covers_minus(xi, "X", taken) + " ";
    }
    close += "))";
    taken.push_back(xi);
  }
  return open + final_condition + close;
}

inline std::string edge_pattern(const SignatureOp& op) {
  std::string s;
  const int n = op.arity();
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const std::string xi = "X" + std::to_string(i), xj = "X" + std::to_string(j);
      const std::string e = op.graph().has_edge(i, j) ? "(edge u w)" : "(not (edge u w))";
      s += " (forall u w (implies (and (in u " + xi + ") (in w " + xj + ")) " + e + "))";
    }
  return s;
}

inline std::string library_source(const Signature& sig) {
  const bool dual = sig.has(OpKind::kClique);
  const bool seq = sig.has(OpKind::kSequential);
  const bool comm = dual || sig.has(OpKind::kParallel);
  const std::string disc = dual ? "codisconnected" : "disconnected";
  const std::string conn = dual ? "coconnected" : "connected";
  const std::string flat = dual ? "complete" : "discrete";
  const std::string comm_label = label_predicate(dual ? kCliqueName : kParName);
  auto primes = sig.prime_ops();
  int max_arity = 2;
  for (const SignatureOp* op : primes) max_arity = std::max(max_arity, op->arity());

  std::string s;
  auto def = [&](const std::string& head, const std::string& body) { s += "(define (" + head + ")\n  " + body + ")\n"; };

  def("singleton X x", "(and (in x X) (forall y (implies (in y X) (= y x))))");
  def("subset X Y", "(forall v (implies (in v X) (in v Y)))");
  def("disjoint X Y", "(forall v (not (and (in v X) (in v Y))))");
  def("nonempty X", "(exists v (in v X))");
  def("nontrivial X", "(exists u v (and (in u X) (in v X) (not (= u v))))");
  for (const auto& a : sig.alphabet().symbols())
    def(label_predicate(a) + " X", "(exists x (and (singleton X x) (" + label_predicate(a) + " x)))");

  def("partition_2 X X1 X2",
      "(and (nonempty X1) (nonempty X2) (disjoint X1 X2) (subset X1 X) (subset X2 X) "
      "(forall v (implies (in v X) (or (in v X1) (in v X2)))))");
  for (int k = 3; k <= max_arity; ++k) {
    def("partition_" + std::to_string(k) + " X " + set_names("X", k),
        "(existsset Y (and " + inside_minus("Y", "X", {"X1"}) + " " + covers_minus("Y", "X", {"X1"}) +
            " (partition_2 X X1 Y) (partition_" + std::to_string(k - 1) + " Y " + set_names("X", k, 2) + ")))");
  }

  def("module X",
      "(forall y (implies (not (in y X)) (and "
      "(implies (exists x (and (in x X) (edge x y))) (forall x (implies (in x X) (edge x y)))) "
      "(implies (exists x (and (in x X) (edge y x))) (forall x (implies (in x X) (edge y x)))))))");
  def("strong X",
      "(and (nonempty X) (module X) (forallset Y (implies (module Y) (or (subset Y X) (subset X Y) (disjoint X Y)))))");
  def("pmodule X", "(and (strong X) (exists v (not (in v X))))");
  def("discrete X", "(forall u w (implies (and (in u X) (in w X)) (not (edge u w))))");
  def("complete X", "(forall u w (implies (and (in u X) (in w X) (not (= u w))) (edge u w)))");

  auto split = [&](const std::string& cross) {
    return "(existsset Y (and " + inside_minus("Y", "X", {}) + " (existsset Z (and " + inside_minus("Z", "X", {"Y"}) +
           " " + covers_minus("Z", "X", {"Y"}) + " (partition_2 X Y Z) (forall y z (implies (and (in y Y) (in z Z)) " +
           cross + "))))))";
  };
  def("disconnected X", split("(and (not (edge y z)) (not (edge z y)))"));
  def("connected X", "(not (disconnected X))");
  def("codisconnected X", split("(and (edge y z) (edge z y))"));
  def("coconnected X", "(not (codisconnected X))");
  if (comm) def(comm_label + " X", "(and (strong X) (" + disc + " X))");

  def("suffix X Z",
      "(existsset Y (and " + inside_minus("Y", "X", {"Z"}) + " " + covers_minus("Y", "X", {"Z"}) +
          " (partition_2 X Y Z) (forall y z (implies (and (in y Y) (in z Z)) (and (edge y z) (not (edge z y)))))))");
  def("sequential X", "(existsset Z (and " + inside_minus("Z", "X", {}) + " (suffix X Z)))");
  def("initial X Y",
      "(and (subset Y X) (existsset Z (and " + inside_minus("Z", "X", {"Y"}) + " " + covers_minus("Z", "X", {"Y"}) +
          " (suffix X Z))) (not (sequential Y)))");
  const std::string seq_label = label_predicate(kSeqName);
  if (seq)
    def(seq_label + " X",
        "(and (sequential X) (or (strong X) (existsset P (and " + covers_minus("P", "X", {}) +
            " (strong P) (sequential P) (suffix P X)))))");

  for (const SignatureOp* op : primes) {
    const std::string n = std::to_string(op->arity());
    std::string strongs;
    for (int i = 1; i <= op->arity(); ++i) strongs += " (strong X" + std::to_string(i) + ")";
    def(children_predicate(op->name()) + " X " + set_names("X", op->arity()),
        "(and (partition_" + n + " X " + set_names("X", op->arity()) + ")" + edge_pattern(*op) + " (strong X)" + strongs + ")");
    def(label_predicate(op->name()) + " X",
        children_search(*op, "(" + children_predicate(op->name()) + " X " + set_names("X", op->arity()) + ")"));
  }

  std::string node = "(or (exists x (singleton X x))";
  if (seq) node += " (" + seq_label + " X)";
  if (comm) node += " (" + comm_label + " X)";
  for (const SignatureOp* op : primes) node += " (" + label_predicate(op->name()) + " X)";
  def("node X", node + ")");
  def("child* X Y", "(and (subset Y X) (not (= X Y)) (node X) (node Y))");
  def("child X Y",
      "(and (child* X Y) (not (existsset Z (and " + inside_minus("Z", "X", {}) + " " + covers_minus("Z", "Y", {}) +
          " (not (= Z X)) (not (= Z Y)) (node Z)))))");
  if (seq) def("first-child X Y", "(and (" + seq_label + " X) (child X Y) (initial X Y))");

  std::string dist = "(or";
  if (seq) dist += " (and (" + seq_label + " X) (initial X Y))";
  for (const SignatureOp* op : primes) {
    std::string pick = "(or";
    for (Vertex i : select_distinguished(*op, sig.limits())) pick += " (= Y X" + std::to_string(i) + ")";
    pick += ")";
    def(dist_child_predicate(op->name()) + " X Y",
        "(and (child X Y) (" + label_predicate(op->name()) + " X) " +
            children_search(*op, "(and (" + children_predicate(op->name()) + " X " + set_names("X", op->arity()) + ") " +
                                     pick + ")") +
            ")");
    dist += " (" + dist_child_predicate(op->name()) + " X Y)";
  }
  def("dist-child X Y", "(and (child X Y) " + dist + "))");

  def("kappa0 X x", "(singleton X x)");
  def("kappa1 X x", "(and (in x X) (strong X) (" + disc + " X) (" + flat + " X) (forallset Y (implies (and (in x Y) (strong Y) (" +
                        disc + " Y)) (subset X Y))))");
  def("kappa3 X x",
      "(and (in x X) (nontrivial X) (node X) (" + conn + " X) (existsset Y (and " + inside_minus("Y", "X", {}) +
          " (in x Y) (dist-child X Y))) (forallset Q (implies (and " + inside_minus("Q", "X", {}) +
          " (not (= Q X)) (in x Q) (nontrivial Q) (node Q) (" + conn + " Q)) (existsset Y (and " + inside_minus("Y", "Q", {}) +
          " (in x Y) (child Q Y) (not (dist-child Q Y)))))))");
  def("kappa2 X x", "(and (strong X) (" + disc + " X) (existsset P (and " + inside_minus("P", "X", {}) +
                        " (kappa3 P x) (child X P))))");
  return s;
}

}  // namespace detail

/// The set predicates used to define mdec'(G) inside G, for a weakly rigid
/// signature.
inline PredicateLibrary ms_predicate_library(const Signature& sig) {
  require_weakly_rigid(sig);
  PredicateLibrary lib;
  lib.graph_signature = graph_relational_signature(sig.alphabet());
  lib.dual = sig.has(OpKind::kClique);
  lib.source = detail::library_source(sig);
  parse_definitions(lib.source, lib.graph_signature, lib.defs);
  return lib;
}

/// Decision procedures for the library predicates on one graph, working on
/// vertex positions and bit masks of positions.
class SetPredicateEvaluator {
 public:
  using Mask = std::uint64_t;

  SetPredicateEvaluator(const LabeledGraph& g, const Signature& sig) : g_(g), sig_(sig) {
    require_weakly_rigid(sig);
    n_ = static_cast<int>(g.size());
    if (n_ == 0) throw Error(ErrorCode::kEmptySet, "graph has no vertices");
    if (n_ > 64) throw Error(ErrorCode::kSizeLimitExceeded, "set predicates need at most 64 vertices");
    full_ = n_ == 64 ? ~Mask{0} : ((Mask{1} << n_) - 1);
    dual_ = sig.has(OpKind::kClique);
    out_.assign(n_, 0);
    in_.assign(n_, 0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (g.adjacent_at(i, j)) {
          out_[i] |= Mask{1} << j;
          in_[j] |= Mask{1} << i;
        }
    Signature open = sig;
    tree_ = binarize(decompose_open(g, open));
    for (const auto& nd : tree_.nodes) {
      Mask m = mask(nd.module);
      tree_mask_.push_back(m);
      // binarization adds seq nodes that are suffixes, not strong modules
      const bool comb_part = nd.kind == NodeKind::kSequential && nd.parent >= 0 &&
                             tree_.at(nd.parent).kind == NodeKind::kSequential;
      if (!comb_part) strong_.push_back(m);
    }
    std::sort(strong_.begin(), strong_.end());
    for (const SignatureOp* op : sig.prime_ops()) dist_[op->name()] = select_distinguished(*op, sig.limits());
    for (std::size_t i = 0; i < tree_.size(); ++i)
      if (node(tree_mask_[i])) family_.push_back(tree_mask_[i]);
    std::sort(family_.begin(), family_.end());
    family_.erase(std::unique(family_.begin(), family_.end()), family_.end());
    install();
  }

  const LabeledGraph& graph() const { return g_; }
  const MDecPrimeTree& tree() const { return tree_; }
  /// Masks of the sets X with node(X), from the decomposition tree.
  const std::vector<Mask>& node_family() const { return family_; }
  const std::vector<Mask>& strong_modules() const { return strong_; }

  Mask mask(const VertexSet& s) const {
    Mask m = 0;
    for (Vertex v : s) {
      int p = g_.position(v);
      if (p < 0) throw Error(ErrorCode::kVertexNotInGraph, "vertex " + std::to_string(v) + " is not in the graph");
      m |= Mask{1} << p;
    }
    return m;
  }

  VertexSet set_of(Mask m) const {
    VertexSet s;
    for (int i = 0; i < n_; ++i)
      if ((m >> i) & 1u) s.push_back(g_.vertex_at(i));
    return s;
  }

  bool has(const std::string& name) const { return table_.count(name) > 0; }
  const std::vector<Sort>& sorts(const std::string& name) const { return entry(name).sorts; }

  /// Element arguments are positions, set arguments are masks.
  bool eval(const std::string& name, const std::vector<Mask>& args) const {
    const Entry& e = entry(name);
    if (args.size() != e.sorts.size())
      throw Error(ErrorCode::kArityMismatch, "'" + name + "' takes " + std::to_string(e.sorts.size()) + " arguments");
    for (std::size_t i = 0; i < args.size(); ++i) {
      const bool bad = e.sorts[i] == Sort::kElement ? args[i] >= static_cast<Mask>(n_) : (args[i] & ~full_) != 0;
      if (bad) throw Error(ErrorCode::kInvalidArgument, "argument " + std::to_string(i + 1) + " of '" + name + "' is outside the graph");
    }
    return e.fn(args.data());
  }

  // Individual predicates, public for direct use.
  bool module(Mask x) const {
    for (int v = 0; v < n_; ++v) {
      if ((x >> v) & 1u) continue;
      const Mask o = out_[v] & x, i = in_[v] & x;
      if ((o != 0 && o != x) || (i != 0 && i != x)) return false;
    }
    return true;
  }
  bool strong(Mask x) const { return std::binary_search(strong_.begin(), strong_.end(), x); }
  bool disconnected(Mask x) const { return std::popcount(x) >= 2 && !reach_all(x, false); }
  bool codisconnected(Mask x) const { return std::popcount(x) >= 2 && !reach_all(x, true); }
  bool discrete(Mask x) const {
    for (int u = 0; u < n_; ++u)
      if (((x >> u) & 1u) && (out_[u] & x)) return false;
    return true;
  }
  bool complete(Mask x) const {
    for (int u = 0; u < n_; ++u)
      if (((x >> u) & 1u) && (out_[u] & x) != (x & ~(Mask{1} << u))) return false;
    return true;
  }
  bool suffix(Mask x, Mask z) const {
    const Mask y = x & ~z;
    if (z == 0 || y == 0 || (z & ~x) != 0) return false;
    for (int u = 0; u < n_; ++u)
      if (((y >> u) & 1u) && ((out_[u] & z) != z || (in_[u] & z) != 0)) return false;
    return true;
  }
  // X has a non-trivial suffix iff the least suffix closed set generated by
  // some element is proper.
  bool sequential(Mask x) const {
    if (std::popcount(x) < 2) return false;
    for (int z = 0; z < n_; ++z) {
      if (!((x >> z) & 1u)) continue;
      Mask closed = Mask{1} << z, frontier = closed;
      while (frontier) {
        const int c = std::countr_zero(frontier);
        frontier &= frontier - 1;
        // w must join c unless w strictly precedes c
        const Mask before = in_[c] & ~out_[c];
        const Mask need = x & ~before & ~closed & ~(Mask{1} << c);
        closed |= need;
        frontier |= need;
      }
      if (closed != x) return true;
    }
    return false;
  }
  bool initial(Mask x, Mask y) const { return (y & ~x) == 0 && suffix(x, x & ~y) && !sequential(y); }
  bool label_seq(Mask x) const {
    if (!sequential(x)) return false;
    if (strong(x)) return true;
    for (Mask p : strong_)
      if ((x & ~p) == 0 && sequential(p) && suffix(p, x)) return true;
    return false;
  }
  bool label_comm(Mask x) const { return strong(x) && (dual_ ? codisconnected(x) : disconnected(x)); }
  bool label_op(const std::string& op, Mask x) const { return prime_node(op, x) >= 0; }
  bool node(Mask x) const {
    if (std::popcount(x) == 1) return true;
    if (sig_.has(OpKind::kSequential) && label_seq(x)) return true;
    if ((sig_.has(OpKind::kParallel) || dual_) && label_comm(x)) return true;
    for (const SignatureOp* op : sig_.prime_ops())
      if (label_op(op->name(), x)) return true;
    return false;
  }
  bool child_star(Mask x, Mask y) const { return (y & ~x) == 0 && x != y && node(x) && node(y); }
  bool child(Mask x, Mask y) const {
    if (!child_star(x, y)) return false;
    for (Mask z : family_)
      if (z != x && z != y && (z & ~x) == 0 && (y & ~z) == 0) return false;
    return true;
  }
  bool children_op(const std::string& op_name, Mask x, const Mask* parts) const {
    const int id = prime_node(op_name, x);
    if (id < 0) return false;
    const MDecNode& nd = tree_.at(id);
    const int n = static_cast<int>(nd.children.size());
    std::vector<int> images;
    for (int i = 0; i < n; ++i) {
      int hit = -1;
      for (int k = 0; k < n; ++k)
        if (tree_mask_[nd.children[k]] == parts[i]) hit = k + 1;
      if (hit < 0 || std::find(images.begin(), images.end(), hit) != images.end()) return false;
      images.push_back(hit);
    }
    const SignatureOp& op = sig_.at(op_name);
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        if (i != j && op.graph().has_edge(i, j) != op.graph().has_edge(images[i - 1], images[j - 1])) return false;
    return true;
  }
  bool dist_child_op(const std::string& op_name, Mask x, Mask y) const {
    if (!child(x, y)) return false;
    const int id = prime_node(op_name, x);
    if (id < 0) return false;
    const MDecNode& nd = tree_.at(id);
    for (Vertex i : dist_.at(op_name))
      if (tree_mask_[nd.children[i - 1]] == y) return true;
    return false;
  }
  bool dist_child(Mask x, Mask y) const {
    if (!child(x, y)) return false;
    if (sig_.has(OpKind::kSequential) && label_seq(x) && initial(x, y)) return true;
    for (const SignatureOp* op : sig_.prime_ops())
      if (dist_child_op(op->name(), x, y)) return true;
    return false;
  }
  bool connected_node(Mask x) const { return dual_ ? !codisconnected(x) : !disconnected(x); }
  bool splits(Mask x) const { return dual_ ? codisconnected(x) : disconnected(x); }

  bool kappa1(Mask x, int v) const {
    const Mask bit = Mask{1} << v;
    if (!(x & bit) || !strong(x) || !splits(x) || !(dual_ ? complete(x) : discrete(x))) return false;
    for (Mask y : strong_)
      if ((y & bit) && splits(y) && (x & ~y) != 0) return false;
    return true;
  }
  bool kappa3(Mask x, int v) const {
    const Mask bit = Mask{1} << v;
    if (!(x & bit) || std::popcount(x) < 2 || !node(x) || !connected_node(x)) return false;
    auto child_with = [&](Mask p) {
      for (Mask y : family_)
        if ((y & bit) && child(p, y)) return y;
      return Mask{0};
    };
    const Mask d = child_with(x);
    if (d == 0 || !dist_child(x, d)) return false;
    for (Mask q : family_) {
      if (q == x || (q & ~x) != 0 || !(q & bit) || std::popcount(q) < 2 || !connected_node(q)) continue;
      const Mask y = child_with(q);
      if (y == 0 || dist_child(q, y)) return false;
    }
    return true;
  }
  bool kappa2(Mask x, int v) const {
    if (!strong(x) || !splits(x)) return false;
    for (Mask p : family_)
      if ((p & ~x) == 0 && child(x, p) && kappa3(p, v)) return true;
    return false;
  }

 private:
  struct Entry {
    std::vector<Sort> sorts;
    std::function<bool(const Mask*)> fn;
  };

  const Entry& entry(const std::string& name) const {
    auto it = table_.find(name);
    if (it == table_.end()) throw Error(ErrorCode::kUnknownPredicate, "no set predicate named '" + name + "'");
    return it->second;
  }

  // Weak (or, for co = true, complement) connectivity of the induced subgraph.
  bool reach_all(Mask x, bool co) const {
    if (x == 0) return true;
    Mask seen = x & (~x + 1), frontier = seen;
    while (frontier) {
      const int c = std::countr_zero(frontier);
      frontier &= frontier - 1;
      Mask nb = co ? (x & ~(out_[c] & in_[c]) & ~(Mask{1} << c)) : ((out_[c] | in_[c]) & x);
      nb &= ~seen;
      seen |= nb;
      frontier |= nb;
    }
    return seen == x;
  }

  int prime_node(const std::string& op, Mask x) const {
    for (std::size_t i = 0; i < tree_.size(); ++i)
      if (tree_mask_[i] == x && tree_.nodes[i].kind == NodeKind::kPrime && tree_.nodes[i].label == op) return static_cast<int>(i);
    return -1;
  }

  void install() {
    const Sort S = Sort::kSet, E = Sort::kElement;
    auto add = [&](const std::string& name, std::vector<Sort> sorts, std::function<bool(const Mask*)> fn) {
      table_[name] = Entry{std::move(sorts), std::move(fn)};
    };
    const bool seq = sig_.has(OpKind::kSequential);
    const bool comm = dual_ || sig_.has(OpKind::kParallel);
    add("singleton", {S, E}, [](const Mask* a) { return a[0] == (Mask{1} << a[1]); });
    add("subset", {S, S}, [](const Mask* a) { return (a[0] & ~a[1]) == 0; });
    add("disjoint", {S, S}, [](const Mask* a) { return (a[0] & a[1]) == 0; });
    add("nonempty", {S}, [](const Mask* a) { return a[0] != 0; });
    add("nontrivial", {S}, [](const Mask* a) { return std::popcount(a[0]) >= 2; });
    for (const auto& sym : sig_.alphabet().symbols()) {
      add(label_predicate(sym), {S}, [this, sym](const Mask* a) {
        return std::popcount(a[0]) == 1 && g_.label_at(std::countr_zero(a[0])) == sym;
      });
    }
    int max_arity = 2;
    for (const SignatureOp* op : sig_.prime_ops()) max_arity = std::max(max_arity, op->arity());
    for (int k = 2; k <= max_arity; ++k) {
      add("partition_" + std::to_string(k), std::vector<Sort>(k + 1, S), [k](const Mask* a) {
        Mask seen = 0;
        for (int i = 1; i <= k; ++i) {
          if (a[i] == 0 || (a[i] & seen)) return false;
          seen |= a[i];
        }
        return seen == a[0];
      });
    }
    add("module", {S}, [this](const Mask* a) { return module(a[0]); });
    add("strong", {S}, [this](const Mask* a) { return strong(a[0]); });
    add("pmodule", {S}, [this](const Mask* a) { return strong(a[0]) && a[0] != full_; });
    add("discrete", {S}, [this](const Mask* a) { return discrete(a[0]); });
    add("complete", {S}, [this](const Mask* a) { return complete(a[0]); });
    add("disconnected", {S}, [this](const Mask* a) { return disconnected(a[0]); });
    add("connected", {S}, [this](const Mask* a) { return !disconnected(a[0]); });
    add("codisconnected", {S}, [this](const Mask* a) { return codisconnected(a[0]); });
    add("coconnected", {S}, [this](const Mask* a) { return !codisconnected(a[0]); });
    if (comm) add(label_predicate(dual_ ? kCliqueName : kParName), {S}, [this](const Mask* a) { return label_comm(a[0]); });
    add("suffix", {S, S}, [this](const Mask* a) { return suffix(a[0], a[1]); });
    add("sequential", {S}, [this](const Mask* a) { return sequential(a[0]); });
    add("initial", {S, S}, [this](const Mask* a) { return initial(a[0], a[1]); });
    if (seq) add(label_predicate(kSeqName), {S}, [this](const Mask* a) { return label_seq(a[0]); });
    for (const SignatureOp* op : sig_.prime_ops()) {
      const std::string name = op->name();
      add(children_predicate(name), std::vector<Sort>(op->arity() + 1, S),
          [this, name](const Mask* a) { return children_op(name, a[0], a + 1); });
      add(label_predicate(name), {S}, [this, name](const Mask* a) { return label_op(name, a[0]); });
    }
    add("node", {S}, [this](const Mask* a) { return node(a[0]); });
    add("child*", {S, S}, [this](const Mask* a) { return child_star(a[0], a[1]); });
    add("child", {S, S}, [this](const Mask* a) { return child(a[0], a[1]); });
    if (seq)
      add("first-child", {S, S}, [this](const Mask* a) { return label_seq(a[0]) && child(a[0], a[1]) && initial(a[0], a[1]); });
    for (const SignatureOp* op : sig_.prime_ops()) {
      const std::string name = op->name();
      add(dist_child_predicate(name), {S, S}, [this, name](const Mask* a) { return dist_child_op(name, a[0], a[1]); });
    }
    add("dist-child", {S, S}, [this](const Mask* a) { return dist_child(a[0], a[1]); });
    add("kappa0", {S, E}, [](const Mask* a) { return a[0] == (Mask{1} << a[1]); });
    add("kappa1", {S, E}, [this](const Mask* a) { return kappa1(a[0], static_cast<int>(a[1])); });
    add("kappa2", {S, E}, [this](const Mask* a) { return kappa2(a[0], static_cast<int>(a[1])); });
    add("kappa3", {S, E}, [this](const Mask* a) { return kappa3(a[0], static_cast<int>(a[1])); });
  }

  const LabeledGraph& g_;
  Signature sig_;
  int n_ = 0;
  Mask full_ = 0;
  bool dual_ = false;
  std::vector<Mask> out_, in_;
  MDecPrimeTree tree_;
  std::vector<Mask> tree_mask_;
  std::vector<Mask> strong_;
  std::vector<Mask> family_;
  std::map<std::string, VertexSet> dist_;
  std::map<std::string, Entry> table_;
};

using PredicateArg = std::variant<Vertex, VertexSet>;

/// Algorithmic evaluation of one library predicate; vertices and vertex sets
/// are given by id.
inline bool eval_set_predicate(const std::string& name, const LabeledGraph& g, const Signature& sig,
                               const std::vector<PredicateArg>& args) {
  SetPredicateEvaluator ev(g, sig);
  if (!ev.has(name)) throw Error(ErrorCode::kUnknownPredicate, "no set predicate named '" + name + "'");
  const auto& sorts = ev.sorts(name);
  if (sorts.size() != args.size())
    throw Error(ErrorCode::kArityMismatch, "'" + name + "' takes " + std::to_string(sorts.size()) + " arguments");
  std::vector<SetPredicateEvaluator::Mask> raw;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (sorts[i] == Sort::kSet) {
      if (!std::holds_alternative<VertexSet>(args[i]))
        throw Error(ErrorCode::kSortMismatch, "argument " + std::to_string(i + 1) + " of '" + name + "' must be a vertex set");
      raw.push_back(ev.mask(std::get<VertexSet>(args[i])));
    } else {
      if (!std::holds_alternative<Vertex>(args[i]))
        throw Error(ErrorCode::kSortMismatch, "argument " + std::to_string(i + 1) + " of '" + name + "' must be a vertex");
      const int p = g.position(std::get<Vertex>(args[i]));
      if (p < 0) throw Error(ErrorCode::kVertexNotInGraph, "vertex " + std::to_string(std::get<Vertex>(args[i])));
      raw.push_back(static_cast<SetPredicateEvaluator::Mask>(p));
    }
  }
  return ev.eval(name, raw);
}

}  // namespace modgraph
