#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "modgraph/mdec.hpp"
#include "modgraph/random.hpp"
#include "modgraph/signature.hpp"
#include "modgraph/term.hpp"
#include "modgraph/text_format.hpp"

namespace modgraph {

inline constexpr std::size_t kLargeTableWarning = 1'000'000;

/// Finite algebra over a signature plus an accepting subset. Elements are
/// indices into the carrier; every table is total.
class FiniteAlgebra {
 public:
  FiniteAlgebra() = default;

  FiniteAlgebra(std::string name, std::string signature_name, std::vector<std::string> carrier)
      : name_(std::move(name)), signature_name_(std::move(signature_name)), carrier_(std::move(carrier)) {
    if (carrier_.empty()) throw Error(ErrorCode::kInvalidAlgebra, "carrier must be non-empty");
    for (std::size_t i = 0; i < carrier_.size(); ++i)
      if (!index_.emplace(carrier_[i], static_cast<int>(i)).second)
        throw Error(ErrorCode::kInvalidAlgebra, "duplicate carrier element '" + carrier_[i] + "'");
  }

  const std::string& name() const { return name_; }
  const std::string& signature_name() const { return signature_name_; }
  const std::vector<std::string>& carrier() const { return carrier_; }
  int carrier_size() const { return static_cast<int>(carrier_.size()); }

  int element(const std::string& q) const {
    auto it = index_.find(q);
    if (it == index_.end()) throw Error(ErrorCode::kInvalidAlgebra, "'" + q + "' is not a carrier element");
    return it->second;
  }

  void set_letter(const std::string& symbol, int q) { letters_[symbol] = q; }

  int letter(const std::string& symbol) const {
    auto it = letters_.find(symbol);
    if (it == letters_.end()) throw Error(ErrorCode::kInvalidAlgebra, "no image for letter '" + symbol + "'");
    return it->second;
  }

  const std::map<std::string, int>& letters() const { return letters_; }

  /// Allocates an arity-ary table with every entry unset (-1).
  void declare_op(const std::string& op, int arity) {
    std::size_t size = 1;
    for (int i = 0; i < arity; ++i) size *= carrier_.size();
    tables_[op] = Table{arity, std::vector<int>(size, -1)};
  }

  bool has_op(const std::string& op) const { return tables_.count(op) > 0; }
  int arity(const std::string& op) const { return table(op).arity; }

  void set(const std::string& op, const std::vector<int>& args, int result) { mut_table(op).cells[offset(op, args)] = result; }

  int apply(const std::string& op, const std::vector<int>& args) const {
    int r = table(op).cells[offset(op, args)];
    if (r < 0) throw Error(ErrorCode::kInvalidAlgebra, "table of '" + op + "' is not total");
    return r;
  }

  int apply(const std::string& op, int a, int b) const { return apply(op, std::vector<int>{a, b}); }

  std::size_t table_size(const std::string& op) const { return table(op).cells.size(); }

  /// Missing entries as "op(q..)" strings; empty when every table is total.
  std::vector<std::string> unset_entries() const {
    std::vector<std::string> out;
    for (const auto& [op, t] : tables_)
      for (std::size_t i = 0; i < t.cells.size(); ++i)
        if (t.cells[i] < 0) out.push_back(op + format_args(decode(t.arity, i)));
    return out;
  }

  std::vector<int> decode(int arity, std::size_t cell) const {
    std::vector<int> args(static_cast<std::size_t>(arity));
    for (int k = arity - 1; k >= 0; --k) {
      args[static_cast<std::size_t>(k)] = static_cast<int>(cell % carrier_.size());
      cell /= carrier_.size();
    }
    return args;
  }

  std::string format_args(const std::vector<int>& args) const {
    std::string s = "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + carrier_[static_cast<std::size_t>(args[i])];
    return s + ")";
  }

  std::set<int>& accepting() { return accepting_; }
  const std::set<int>& accepting() const { return accepting_; }

 private:
  struct Table {
    int arity = 0;
    std::vector<int> cells;  // row-major over argument tuples
  };

  const Table& table(const std::string& op) const {
    auto it = tables_.find(op);
    if (it == tables_.end()) throw Error(ErrorCode::kInvalidAlgebra, "algebra has no table for '" + op + "'");
    return it->second;
  }

  Table& mut_table(const std::string& op) { return const_cast<Table&>(table(op)); }

  std::size_t offset(const std::string& op, const std::vector<int>& args) const {
    const Table& t = table(op);
    if (static_cast<int>(args.size()) != t.arity)
      throw Error(ErrorCode::kArityMismatch, "'" + op + "' takes " + std::to_string(t.arity) + " arguments");
    std::size_t cell = 0;
    for (int a : args) {
      if (a < 0 || a >= carrier_size()) throw Error(ErrorCode::kInvalidAlgebra, "argument outside the carrier");
      cell = cell * carrier_.size() + static_cast<std::size_t>(a);
    }
    return cell;
  }

  std::string name_;
  std::string signature_name_;
  std::vector<std::string> carrier_;
  std::map<std::string, int> index_;
  std::map<std::string, int> letters_;
  std::map<std::string, Table> tables_;
  std::set<int> accepting_;
};

struct ParsedAlgebra {
  FiniteAlgebra algebra;
  std::vector<std::string> warnings;
};

/// Text format:
///   algebra <name> over <sig> / carrier q.. / letter <a> -> <q> /
///   op <name> : <q>.. -> <q> / accept <q>..
inline ParsedAlgebra parse_algebra(const std::string& text, const Signature& sig) {
  ParsedAlgebra out;
  bool have_carrier = false;
  std::string name, over;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto w = detail::split_words(detail::strip_comment(raw));
    if (w.empty()) continue;
    const std::string& kw = w[0];
    try {
      if (kw == "algebra") {
        if (w.size() != 4 || w[2] != "over") detail::parse_fail(line, "usage: algebra <name> over <signature>");
        name = w[1];
        over = w[3];
        if (!sig.name().empty() && over != sig.name())
          out.warnings.push_back("algebra is declared over '" + over + "' but used with '" + sig.name() + "'");
      } else if (kw == "carrier") {
        if (have_carrier) detail::parse_fail(line, "carrier given twice");
        out.algebra = FiniteAlgebra(name, over, std::vector<std::string>(w.begin() + 1, w.end()));
        have_carrier = true;
        for (const auto& op : sig.ops()) {
          out.algebra.declare_op(op.name(), op.arity());
          if (out.algebra.table_size(op.name()) > kLargeTableWarning)
            out.warnings.push_back("table of '" + op.name() + "' has " + std::to_string(out.algebra.table_size(op.name())) + " entries");
        }
      } else if (!have_carrier) {
        detail::parse_fail(line, "'" + kw + "' before carrier");
      } else if (kw == "letter") {
        if (w.size() != 4 || w[2] != "->") detail::parse_fail(line, "usage: letter <symbol> -> <element>");
        if (!sig.alphabet().contains(w[1])) detail::parse_fail(line, "unknown letter '" + w[1] + "'");
        out.algebra.set_letter(w[1], out.algebra.element(w[3]));
      } else if (kw == "op") {
        if (w.size() < 4 || w[2] != ":") detail::parse_fail(line, "usage: op <name> : <q>.. -> <q>");
        const SignatureOp* op = sig.find(w[1]);
        if (!op) detail::parse_fail(line, "operation '" + w[1] + "' is not in the signature");
        const std::size_t n = static_cast<std::size_t>(op->arity());
        if (w.size() != n + 5 || w[n + 3] != "->")
          detail::parse_fail(line, "'" + w[1] + "' needs " + std::to_string(n) + " arguments and one result");
        std::vector<int> args;
        for (std::size_t k = 0; k < n; ++k) args.push_back(out.algebra.element(w[3 + k]));
        out.algebra.set(w[1], args, out.algebra.element(w[n + 4]));
      } else if (kw == "accept") {
        for (std::size_t k = 1; k < w.size(); ++k) out.algebra.accepting().insert(out.algebra.element(w[k]));
      } else {
        detail::parse_fail(line, "unknown directive '" + kw + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParseError) throw;
      detail::parse_fail(line, e.what());
    }
  }
  if (!have_carrier) detail::parse_fail(line, "missing carrier");
  for (const auto& a : sig.alphabet().symbols())
    if (!out.algebra.letters().count(a)) throw Error(ErrorCode::kInvalidAlgebra, "no image for letter '" + a + "'");
  auto missing = out.algebra.unset_entries();
  if (!missing.empty())
    throw Error(ErrorCode::kInvalidAlgebra, std::to_string(missing.size()) + " table entries missing, first " + missing[0]);
  return out;
}

inline std::string format_algebra(const FiniteAlgebra& alg, const Signature& sig) {
  std::ostringstream out;
  out << "algebra " << alg.name() << " over " << sig.name() << "\ncarrier";
  for (const auto& q : alg.carrier()) out << ' ' << q;
  out << '\n';
  for (const auto& [a, q] : alg.letters()) out << "letter " << a << " -> " << alg.carrier()[static_cast<std::size_t>(q)] << '\n';
  for (const auto& op : sig.ops()) {
    for (std::size_t cell = 0; cell < alg.table_size(op.name()); ++cell) {
      auto args = alg.decode(op.arity(), cell);
      out << "op " << op.name() << " :";
      for (int a : args) out << ' ' << alg.carrier()[static_cast<std::size_t>(a)];
      out << " -> " << alg.carrier()[static_cast<std::size_t>(alg.apply(op.name(), args))] << '\n';
    }
  }
  out << "accept";
  for (int q : alg.accepting()) out << ' ' << alg.carrier()[static_cast<std::size_t>(q)];
  out << '\n';
  return out.str();
}

struct LawViolation {
  std::string law;  // "associativity", "commutativity" or "cp"
  std::string op;
  std::vector<int> tuple;
  std::string detail;
};

struct AlgebraReport {
  std::vector<LawViolation> violations;
  bool valid() const { return violations.empty(); }
};

/// Checks associativity of the builtin tables, commutativity of par and
/// clique, and table(q) = table(q o sigma) for every automorphism sigma of
/// every prime op.
inline AlgebraReport validate_algebra(const FiniteAlgebra& alg, const Signature& sig) {
  AlgebraReport report;
  const int m = alg.carrier_size();
  auto name = [&](int q) { return alg.carrier()[static_cast<std::size_t>(q)]; };
  for (const auto& op : sig.ops()) {
    const std::string& f = op.name();
    if (op.is_builtin()) {
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          if (op.is_commutative() && a < b && alg.apply(f, a, b) != alg.apply(f, b, a))
            report.violations.push_back({"commutativity", f, {a, b},
                                         f + "(" + name(a) + "," + name(b) + ") = " + name(alg.apply(f, a, b)) + " but " + f + "(" +
                                             name(b) + "," + name(a) + ") = " + name(alg.apply(f, b, a))});
          for (int c = 0; c < m; ++c) {
            int left = alg.apply(f, alg.apply(f, a, b), c);
            int right = alg.apply(f, a, alg.apply(f, b, c));
            if (left != right)
              report.violations.push_back({"associativity", f, {a, b, c},
                                           "at " + alg.format_args({a, b, c}) + ": " + name(left) + " vs " + name(right)});
          }
        }
      continue;
    }
    auto sigmas = cp_equations(op, sig.limits());
    if (sigmas.empty()) continue;
    for (std::size_t cell = 0; cell < alg.table_size(f); ++cell) {
      auto args = alg.decode(op.arity(), cell);
      for (const auto& s : sigmas) {
        std::vector<int> permuted(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) permuted[i] = args[static_cast<std::size_t>(s.at(static_cast<int>(i)))];
        if (permuted < args) continue;  // each unordered pair once
        int x = alg.apply(f, args), y = alg.apply(f, permuted);
        if (x != y)
          report.violations.push_back({"cp", f, args,
                                       f + alg.format_args(args) + " = " + name(x) + " but " + f + alg.format_args(permuted) + " = " +
                                           name(y) + " under " + s.to_string()});
      }
    }
  }
  return report;
}

/// Membership tester for the language recognized by (alg, accepting).
class Recognizer {
 public:
  Recognizer(const Signature& sig, FiniteAlgebra alg, bool allow_unvalidated = false)
      : sig_(sig), alg_(std::move(alg)) {
    report_ = validate_algebra(alg_, sig_);
    if (!report_.valid() && !allow_unvalidated)
      throw Error(ErrorCode::kUnvalidatedAlgebra, "algebra '" + alg_.name() + "' violates " +
                                                      std::to_string(report_.violations.size()) + " law instance(s), first: " +
                                                      report_.violations.front().detail);
  }

  const FiniteAlgebra& algebra() const { return alg_; }
  const AlgebraReport& report() const { return report_; }

  int evaluate(const LabeledGraph& g) const { return evaluate_tree(decompose(g, sig_)); }

  bool member(const LabeledGraph& g) const { return alg_.accepting().count(evaluate(g)) > 0; }

  /// Left fold over variadic nodes; with rng, each variadic node is folded
  /// along a random binary bracketing instead.
  int evaluate_tree(const MDecTree& t, Rng* rng = nullptr) const {
    std::function<int(int)> eval = [&](int i) -> int {
      const MDecNode& n = t.at(i);
      if (n.kind == NodeKind::kLeaf) return alg_.letter(n.label);
      std::vector<int> vals;
      for (int c : n.children) vals.push_back(eval(c));
      if (n.kind == NodeKind::kPrime) return alg_.apply(n.label, vals);
      return fold(n.label, vals, rng);
    };
    return eval(t.root);
  }

  /// Direct fold over a term, without building the graph.
  int evaluate_term(const Term& t) const {
    if (t.is_leaf()) return alg_.letter(t.head);
    std::vector<int> vals;
    for (const auto& c : t.children) vals.push_back(evaluate_term(c));
    if (!sig_.at(t.head).is_builtin()) return alg_.apply(t.head, vals);
    return fold(t.head, vals, nullptr);
  }

 private:
  int fold(const std::string& op, std::vector<int> vals, Rng* rng) const {
    if (!rng) {
      int acc = vals[0];
      for (std::size_t i = 1; i < vals.size(); ++i) acc = alg_.apply(op, acc, vals[i]);
      return acc;
    }
    while (vals.size() > 1) {
      std::size_t k = rng->index(vals.size() - 1);
      vals[k] = alg_.apply(op, vals[k], vals[k + 1]);
      vals.erase(vals.begin() + static_cast<std::ptrdiff_t>(k) + 1);
    }
    return vals[0];
  }

  Signature sig_;
  FiniteAlgebra alg_;
  AlgebraReport report_;
};

}  // namespace modgraph
