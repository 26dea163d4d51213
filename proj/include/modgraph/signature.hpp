#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modgraph/graph.hpp"
#include "modgraph/isomorphism.hpp"

namespace modgraph {

enum class OpKind { kParallel, kSequential, kClique, kPrime };

inline const std::string kParName = "par";
inline const std::string kSeqName = "seq";
inline const std::string kCliqueName = "clique";

inline bool is_builtin_name(const std::string& name) {
  return name == kParName || name == kSeqName || name == kCliqueName;
}

/// Brute force over every proper subset of size >= 2. Bounded by the search limit.
inline bool is_prime(const LabeledGraph& h, SearchLimits limits = {}) {
  const int n = static_cast<int>(h.size());
  if (n < 2) throw Error(ErrorCode::kTooSmall, "is_prime needs at least 2 vertices");
  detail::check_bound(h, limits);
  const std::uint32_t full = (1u << n) - 1;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    if (std::popcount(mask) < 2) continue;
    VertexSet x;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) x.push_back(h.vertex_at(i));
    if (is_module(h, x)) return false;
  }
  return true;
}

/// One operation of a finite subsignature: a builtin binary (variadic in
/// terms) operation or the composition defined by a concrete prime graph on [n].
class SignatureOp {
 public:
  static SignatureOp parallel() { return SignatureOp(kParName, OpKind::kParallel, {}); }
  static SignatureOp sequential() { return SignatureOp(kSeqName, OpKind::kSequential, {}); }
  static SignatureOp clique() { return SignatureOp(kCliqueName, OpKind::kClique, {}); }

  /// Validates that h lives on [n], n >= 3, and is prime.
  static SignatureOp prime(std::string name, LabeledGraph h, SearchLimits limits = {}) {
    if (is_builtin_name(name)) throw Error(ErrorCode::kInvalidSignature, "prime op may not use the builtin name '" + name + "'");
    const int n = static_cast<int>(h.size());
    if (n < 3) throw Error(ErrorCode::kInvalidSignature, "prime op '" + name + "' needs at least 3 vertices");
    for (int i = 0; i < n; ++i)
      if (h.vertex_at(i) != i + 1) throw Error(ErrorCode::kInvalidSignature, "prime op '" + name + "' must have vertex set [n]");
    if (!is_prime(h, limits)) throw Error(ErrorCode::kInvalidSignature, "graph of op '" + name + "' is not prime");
    return SignatureOp(std::move(name), OpKind::kPrime, strip_labels(h));
  }

  /// Prime op without the primality check; used for raw quotients that are
  /// already known to be prime.
  static SignatureOp trusted_prime(std::string name, LabeledGraph h) {
    return SignatureOp(std::move(name), OpKind::kPrime, strip_labels(h));
  }

  const std::string& name() const { return name_; }
  OpKind kind() const { return kind_; }
  bool is_builtin() const { return kind_ != OpKind::kPrime; }
  bool is_associative() const { return is_builtin(); }
  bool is_commutative() const { return kind_ == OpKind::kParallel || kind_ == OpKind::kClique; }

  /// Arity of a prime op; 2 for the builtins (which terms use variadically).
  int arity() const { return kind_ == OpKind::kPrime ? static_cast<int>(graph_.size()) : 2; }

  /// The defining graph on [arity]. Builtins report H_par, H_seq, H_clique.
  const LabeledGraph& graph() const { return graph_; }

  bool operator==(const SignatureOp& o) const { return name_ == o.name_ && kind_ == o.kind_ && graph_ == o.graph_; }

 private:
  SignatureOp(std::string name, OpKind kind, LabeledGraph g) : name_(std::move(name)), kind_(kind), graph_(std::move(g)) {
    if (kind_ == OpKind::kParallel) graph_ = unlabeled_graph(2, {});
    if (kind_ == OpKind::kSequential) graph_ = unlabeled_graph(2, {{1, 2}});
    if (kind_ == OpKind::kClique) graph_ = unlabeled_graph(2, {{1, 2}, {2, 1}});
  }

  std::string name_;
  OpKind kind_;
  LabeledGraph graph_;
};

/// Alphabet plus a finite list of operations with distinct names and at most
/// one prime representative per isomorphism class.
class Signature {
 public:
  Signature() = default;

  Signature(std::string name, Alphabet alphabet, std::vector<SignatureOp> ops, SearchLimits limits = {})
      : name_(std::move(name)), alphabet_(std::move(alphabet)), limits_(limits) {
    for (auto& op : ops) add(std::move(op));
  }

  const std::string& name() const { return name_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<SignatureOp>& ops() const { return ops_; }
  const SearchLimits& limits() const { return limits_; }

  const SignatureOp* find(const std::string& name) const {
    for (const auto& op : ops_)
      if (op.name() == name) return &op;
    return nullptr;
  }

  const SignatureOp& at(const std::string& name) const {
    const SignatureOp* op = find(name);
    if (!op) throw Error(ErrorCode::kUnknownOp, "operation '" + name + "' is not in signature '" + name_ + "'");
    return *op;
  }

  const SignatureOp* find_kind(OpKind kind) const {
    for (const auto& op : ops_)
      if (op.kind() == kind) return &op;
    return nullptr;
  }

  bool has(OpKind kind) const { return find_kind(kind) != nullptr; }

  std::vector<const SignatureOp*> prime_ops() const {
    std::vector<const SignatureOp*> out;
    for (const auto& op : ops_)
      if (op.kind() == OpKind::kPrime) out.push_back(&op);
    return out;
  }

  /// Appends an op, enforcing distinct names and one prime op per class.
  void add(SignatureOp op) {
    if (find(op.name())) throw Error(ErrorCode::kInvalidSignature, "duplicate operation '" + op.name() + "'");
    if (alphabet_.contains(op.name()))
      throw Error(ErrorCode::kInvalidSignature, "operation '" + op.name() + "' clashes with an alphabet symbol");
    if (op.is_builtin() && has(op.kind()))
      throw Error(ErrorCode::kInvalidSignature, "builtin operation listed twice");
    if (op.kind() == OpKind::kPrime) {
      if (const SignatureOp* twin = match_prime(op.graph()))
        throw Error(ErrorCode::kInvalidSignature,
                    "prime ops '" + twin->name() + "' and '" + op.name() + "' are isomorphic");
    }
    ops_.push_back(std::move(op));
  }

  /// Prime op whose graph is isomorphic to q, if any.
  const SignatureOp* match_prime(const LabeledGraph& q) const {
    for (const auto& op : ops_) {
      if (op.kind() != OpKind::kPrime || op.graph().size() != q.size()) continue;
      if (find_isomorphism(strip_labels(q), op.graph(), false, limits_)) return &op;
    }
    return nullptr;
  }

 private:
  std::string name_;
  Alphabet alphabet_;
  std::vector<SignatureOp> ops_;
  SearchLimits limits_;
};

enum class IdPolicy {
  kShift,     // operand i is renumbered onto the next |V_i| consecutive ids
  kPreserve,  // ids kept; operands must already be disjoint
};

/// H<G_1..G_n>: disjoint union plus V_i x V_j for every edge (i,j) of H.
/// Builtins accept any number >= 2 of operands (chain / antichain / clique).
inline LabeledGraph compose(const SignatureOp& op, const std::vector<LabeledGraph>& operands,
                            IdPolicy policy = IdPolicy::kShift) {
  const std::size_t k = operands.size();
  if (op.kind() == OpKind::kPrime ? k != static_cast<std::size_t>(op.arity()) : k < 2)
    throw Error(ErrorCode::kArityMismatch, "operation '" + op.name() + "' got " + std::to_string(k) + " operands");
  std::map<Vertex, std::string> labeling;
  std::set<Edge> edges;
  std::vector<std::vector<Vertex>> blocks(k);
  Vertex next = 1;
  for (std::size_t i = 0; i < k; ++i) {
    const LabeledGraph& g = operands[i];
    std::map<Vertex, Vertex> rename;
    for (Vertex v : g.vertices()) {
      Vertex nv = policy == IdPolicy::kShift ? next++ : v;
      rename.emplace(v, nv);
      if (!labeling.emplace(nv, g.label(v)).second)
        throw Error(ErrorCode::kOverlappingOperands, "operands share vertex " + std::to_string(nv));
      blocks[i].push_back(nv);
    }
    for (const auto& [u, v] : g.edges()) edges.emplace(rename.at(u), rename.at(v));
  }
  auto connect = [&](std::size_t i, std::size_t j) {
    for (Vertex u : blocks[i])
      for (Vertex v : blocks[j]) edges.emplace(u, v);
  };
  switch (op.kind()) {
    case OpKind::kParallel:
      break;
    case OpKind::kSequential:
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) connect(i, j);
      break;
    case OpKind::kClique:
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          if (i != j) connect(i, j);
      break;
    case OpKind::kPrime:
      for (const auto& [a, b] : op.graph().edges()) connect(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
      break;
  }
  return LabeledGraph(operands.front().alphabet(), labeling, edges);
}

/// H<G_1..G_n> for an arbitrary concrete graph H on [n], prime or not.
inline LabeledGraph substitute(const LabeledGraph& h, const std::vector<LabeledGraph>& operands,
                               IdPolicy policy = IdPolicy::kShift) {
  if (operands.size() != h.size())
    throw Error(ErrorCode::kArityMismatch, "substitution into a " + std::to_string(h.size()) + "-vertex graph got " +
                                               std::to_string(operands.size()) + " operands");
  return compose(SignatureOp::trusted_prime("H", h), operands, policy);
}

/// • is always weakly rigid; a prime op is iff Aut(H) is not transitive.
inline bool is_weakly_rigid_op(const SignatureOp& op, SearchLimits limits = {}) {
  switch (op.kind()) {
    case OpKind::kSequential: return true;
    case OpKind::kPrime: return !is_vertex_transitive(op.graph(), limits);
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "weak rigidity of '" + op.name() + "' is decided at signature level");
  }
}

struct RigidityViolation {
  std::string op;
  std::string reason;
  std::optional<VertexSet> orbit;  // witness for transitivity failures
};

struct RigidityReport {
  std::vector<RigidityViolation> violations;
  bool accepted() const { return violations.empty(); }
};

inline RigidityReport validate_weakly_rigid_signature(const Signature& sig) {
  RigidityReport report;
  if (sig.has(OpKind::kParallel) && sig.has(OpKind::kClique))
    report.violations.push_back({kParName + "," + kCliqueName, "signature contains both commutative operations", std::nullopt});
  for (const auto& op : sig.ops()) {
    if (op.kind() != OpKind::kPrime) continue;
    AutomorphismGroup aut = automorphism_group(op.graph(), false, sig.limits());
    if (aut.orbits.size() == 1)
      report.violations.push_back({op.name(), "automorphism group acts transitively", aut.orbits.front()});
  }
  return report;
}

/// Aut(H)-orbit of the smallest vertex; {1} for •.
inline VertexSet select_distinguished(const SignatureOp& op, SearchLimits limits = {}) {
  switch (op.kind()) {
    case OpKind::kSequential: return {1};
    case OpKind::kPrime: {
      AutomorphismGroup aut = automorphism_group(op.graph(), false, limits);
      if (aut.orbits.size() <= 1)
        throw Error(ErrorCode::kNotWeaklyRigid, "operation '" + op.name() + "' has a transitive automorphism group");
      return aut.orbit_of(1);
    }
    default:
      throw Error(ErrorCode::kNotWeaklyRigid, "operation '" + op.name() + "' has no distinguished vertices");
  }
}

/// One argument permutation per non-identity automorphism sigma:
/// H<G_1..G_n> = H<G_sigma(1)..G_sigma(n)>.
inline std::vector<Permutation> cp_equations(const SignatureOp& op, SearchLimits limits = {}) {
  std::vector<Permutation> out;
  if (op.kind() != OpKind::kPrime) return out;
  for (const auto& p : automorphism_group(op.graph(), false, limits).elements)
    if (!p.is_identity()) out.push_back(p);
  return out;
}

}  // namespace modgraph
