#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "modgraph/sexpr.hpp"
#include "modgraph/signature.hpp"

namespace modgraph {

/// Leaf (a letter) or an operation applied to an ordered list of children.
/// Associative operations are kept flattened: a seq node never has a seq child.
struct Term {
  std::string head;
  std::vector<Term> children;

  bool is_leaf() const { return children.empty(); }

  static Term leaf(std::string symbol) { return Term{std::move(symbol), {}}; }

  /// Builds an op node, splicing in children that carry the same builtin head.
  static Term node(std::string op, std::vector<Term> kids) {
    Term t{std::move(op), {}};
    const bool assoc = is_builtin_name(t.head);
    for (auto& k : kids) {
      if (assoc && !k.is_leaf() && k.head == t.head) {
        for (auto& g : k.children) t.children.push_back(std::move(g));
      } else {
        t.children.push_back(std::move(k));
      }
    }
    return t;
  }

  std::size_t leaf_count() const {
    if (is_leaf()) return 1;
    std::size_t n = 0;
    for (const auto& c : children) n += c.leaf_count();
    return n;
  }

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& c : children) d = std::max(d, c.depth());
    return is_leaf() ? 0 : d + 1;
  }

  friend bool operator==(const Term&, const Term&) = default;
};

inline std::string to_string(const Term& t, const Signature* sig = nullptr) {
  if (t.is_leaf()) return t.head;
  std::string out = "(";
  const SignatureOp* op = sig ? sig->find(t.head) : nullptr;
  if ((op && !op->is_builtin()) || (!op && !is_builtin_name(t.head))) out += "prime ";
  out += t.head;
  for (const auto& c : t.children) out += " " + to_string(c, sig);
  return out + ")";
}

/// Checks symbols, op names, arities and the flattened normal form.
inline void validate_term(const Signature& sig, const Term& t) {
  if (t.is_leaf()) {
    if (!sig.alphabet().contains(t.head))
      throw Error(ErrorCode::kUnknownSymbol, "symbol '" + t.head + "' is not in the alphabet");
    return;
  }
  const SignatureOp& op = sig.at(t.head);
  const std::size_t k = t.children.size();
  if (op.is_builtin() ? k < 2 : k != static_cast<std::size_t>(op.arity()))
    throw Error(ErrorCode::kArityMismatch,
                "operation '" + op.name() + "' applied to " + std::to_string(k) + " arguments");
  for (const auto& c : t.children) {
    if (op.is_builtin() && !c.is_leaf() && c.head == t.head)
      throw Error(ErrorCode::kInvalidArgument, "term is not flattened at '" + t.head + "'");
    validate_term(sig, c);
  }
}

namespace detail {

inline Term term_from_sexpr(const SExpr& e, const Signature& sig) {
  if (e.is_atom()) {
    if (!sig.alphabet().contains(e.atom))
      throw Error(ErrorCode::kUnknownSymbol, e.pos.to_string() + ": symbol '" + e.atom + "' is not in the alphabet");
    return Term::leaf(e.atom);
  }
  if (e.items.empty() || !e.items[0].is_atom())
    throw Error(ErrorCode::kSyntaxError, e.pos.to_string() + ": expected an operation name");
  std::size_t first = 1;
  std::string name = e.items[0].atom;
  if (name == "prime") {
    if (e.items.size() < 2 || !e.items[1].is_atom())
      throw Error(ErrorCode::kSyntaxError, e.pos.to_string() + ": expected (prime <name> ...)");
    name = e.items[1].atom;
    first = 2;
  }
  const SignatureOp* op = sig.find(name);
  if (!op) throw Error(ErrorCode::kUnknownOp, e.pos.to_string() + ": operation '" + name + "' is not in the signature");
  std::vector<Term> kids;
  for (std::size_t i = first; i < e.items.size(); ++i) kids.push_back(term_from_sexpr(e.items[i], sig));
  const std::size_t k = kids.size();
  if (op->is_builtin() ? k < 2 : k != static_cast<std::size_t>(op->arity()))
    throw Error(ErrorCode::kArityMismatch, e.pos.to_string() + ": operation '" + name + "' applied to " +
                                               std::to_string(k) + " arguments");
  return Term::node(name, std::move(kids));
}

// Assigns leaf ids in left-to-right order and records the id range of every
// subterm, then adds V_i x V_j for each op edge.
inline std::pair<Vertex, Vertex> eval_into(const Signature& sig, const Term& t, Vertex& next,
                                           std::map<Vertex, std::string>& labeling, std::set<Edge>& edges) {
  if (t.is_leaf()) {
    labeling.emplace(next, t.head);
    const Vertex v = next++;
    return {v, v};
  }
  const SignatureOp& op = sig.at(t.head);
  std::vector<std::pair<Vertex, Vertex>> ranges;
  for (const auto& c : t.children) ranges.push_back(eval_into(sig, c, next, labeling, edges));
  auto connect = [&](std::size_t i, std::size_t j) {
    for (Vertex u = ranges[i].first; u <= ranges[i].second; ++u)
      for (Vertex v = ranges[j].first; v <= ranges[j].second; ++v) edges.emplace(u, v);
  };
  const std::size_t k = ranges.size();
  switch (op.kind()) {
    case OpKind::kParallel: break;
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
  return {ranges.front().first, ranges.back().second};
}

}  // namespace detail

inline Term parse_term(const std::string& text, const Signature& sig) {
  return detail::term_from_sexpr(parse_sexpr(text), sig);
}

/// Evaluates t with vertices 1..k numbered by leaf position, which is what
/// nested compose() with IdPolicy::kShift produces.
inline LabeledGraph eval_term(const Signature& sig, const Term& t) {
  validate_term(sig, t);
  std::map<Vertex, std::string> labeling;
  std::set<Edge> edges;
  Vertex next = 1;
  detail::eval_into(sig, t, next, labeling, edges);
  return LabeledGraph(sig.alphabet(), labeling, edges);
}

}  // namespace modgraph
