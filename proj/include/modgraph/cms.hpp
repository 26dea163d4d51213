#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "modgraph/error.hpp"
#include "modgraph/sexpr.hpp"

namespace modgraph {

inline constexpr std::uint64_t kDefaultWorkBudget = 100'000'000;
inline constexpr std::size_t kMaxSetDomain = 64;

/// Finite list of predicate names with arities.
class RelationalSignature {
 public:
  RelationalSignature() = default;
  RelationalSignature(std::initializer_list<std::pair<std::string, int>> preds) {
    for (const auto& [n, a] : preds) add(n, a);
  }

  void add(const std::string& name, int arity) {
    if (arity < 1) throw Error(ErrorCode::kInvalidArgument, "predicate '" + name + "' needs arity >= 1");
    if (index_.count(name)) throw Error(ErrorCode::kInvalidArgument, "duplicate predicate '" + name + "'");
    index_.emplace(name, static_cast<int>(preds_.size()));
    preds_.emplace_back(name, arity);
  }

  const std::vector<std::pair<std::string, int>>& predicates() const { return preds_; }
  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }
  std::optional<int> arity(const std::string& name) const {
    int i = index_of(name);
    if (i < 0) return std::nullopt;
    return preds_[static_cast<std::size_t>(i)].second;
  }

 private:
  std::vector<std::pair<std::string, int>> preds_;
  std::map<std::string, int> index_;
};

/// Domain {0..n-1} with display names and one relation per predicate.
class Structure {
 public:
  Structure() = default;
  Structure(RelationalSignature sig, std::vector<std::string> element_names)
      : sig_(std::move(sig)), names_(std::move(element_names)), rels_(sig_.predicates().size()) {
    for (std::size_t p = 0; p < rels_.size(); ++p) {
      rels_[p].arity = sig_.predicates()[p].second;
      std::size_t cells = 1;
      bool dense = true;
      for (int k = 0; k < rels_[p].arity; ++k) {
        cells *= std::max<std::size_t>(names_.size(), 1);
        if (cells > (1u << 22)) dense = false;
      }
      if (dense) rels_[p].bits.assign(cells, 0);
    }
  }

  const RelationalSignature& signature() const { return sig_; }
  std::size_t size() const { return names_.size(); }
  const std::string& element_name(int i) const { return names_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& element_names() const { return names_; }

  void add(const std::string& pred, const std::vector<int>& tuple) {
    int p = sig_.index_of(pred);
    if (p < 0) throw Error(ErrorCode::kUnknownPredicate, "predicate '" + pred + "'");
    Relation& r = rels_[static_cast<std::size_t>(p)];
    if (static_cast<int>(tuple.size()) != r.arity)
      throw Error(ErrorCode::kArityMismatch, "predicate '" + pred + "' has arity " + std::to_string(r.arity));
    for (int x : tuple)
      if (x < 0 || static_cast<std::size_t>(x) >= names_.size())
        throw Error(ErrorCode::kInvalidArgument, "tuple element outside the domain");
    r.tuples.insert(tuple);
    if (!r.bits.empty()) r.bits[cell(tuple.data(), r.arity)] = 1;
  }

  void remove(const std::string& pred, const std::vector<int>& tuple) {
    int p = sig_.index_of(pred);
    if (p < 0) throw Error(ErrorCode::kUnknownPredicate, "predicate '" + pred + "'");
    Relation& r = rels_[static_cast<std::size_t>(p)];
    r.tuples.erase(tuple);
    if (!r.bits.empty() && static_cast<int>(tuple.size()) == r.arity) r.bits[cell(tuple.data(), r.arity)] = 0;
  }

  bool holds(int pred, const int* args) const {
    const Relation& r = rels_[static_cast<std::size_t>(pred)];
    if (!r.bits.empty()) return r.bits[cell(args, r.arity)] != 0;
    return r.tuples.count(std::vector<int>(args, args + r.arity)) > 0;
  }

  bool holds(const std::string& pred, const std::vector<int>& args) const {
    int p = sig_.index_of(pred);
    if (p < 0) throw Error(ErrorCode::kUnknownPredicate, "predicate '" + pred + "'");
    return rels_[static_cast<std::size_t>(p)].tuples.count(args) > 0;
  }

  const std::set<std::vector<int>>& tuples(const std::string& pred) const {
    int p = sig_.index_of(pred);
    if (p < 0) throw Error(ErrorCode::kUnknownPredicate, "predicate '" + pred + "'");
    return rels_[static_cast<std::size_t>(p)].tuples;
  }

 private:
  struct Relation {
    int arity = 0;
    std::set<std::vector<int>> tuples;
    std::vector<char> bits;
  };

  std::size_t cell(const int* args, int arity) const {
    std::size_t c = 0;
    for (int k = 0; k < arity; ++k) c = c * names_.size() + static_cast<std::size_t>(args[k]);
    return c;
  }

  RelationalSignature sig_;
  std::vector<std::string> names_;
  std::vector<Relation> rels_;
};

enum class Sort { kElement, kSet };

enum class FormulaKind {
  kTrue, kFalse, kAtom, kEq, kIn, kNot, kAnd, kOr, kImplies,
  kExists, kForall, kExistsSet, kForallSet, kExistsMod, kCall,
};

struct Definition;

/// CMS formula tree. Quantifiers bind one variable each.
struct Formula {
  FormulaKind kind = FormulaKind::kTrue;
  std::string name;               // predicate, definition or bound variable
  std::vector<std::string> args;  // variable arguments
  int modulus = 0;
  std::vector<std::shared_ptr<const Formula>> kids;
  std::shared_ptr<const Definition> def;
  SourcePos pos;
};

using FormulaPtr = std::shared_ptr<const Formula>;

struct Param {
  std::string name;
  Sort sort;
};

/// Named formula with parameters; calls to it may appear in other formulas.
struct Definition {
  std::string name;
  std::vector<Param> params;
  FormulaPtr body;
};

using DefinitionPtr = std::shared_ptr<const Definition>;

class DefinitionTable {
 public:
  void add(DefinitionPtr d) {
    if (!defs_.emplace(d->name, d).second) throw Error(ErrorCode::kInvalidArgument, "definition '" + d->name + "' given twice");
    order_.push_back(d->name);
  }
  DefinitionPtr find(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : it->second;
  }
  DefinitionPtr at(const std::string& name) const {
    auto d = find(name);
    if (!d) throw Error(ErrorCode::kUnknownPredicate, "no definition named '" + name + "'");
    return d;
  }
  const std::vector<std::string>& names() const { return order_; }

 private:
  std::map<std::string, DefinitionPtr> defs_;
  std::vector<std::string> order_;
};

using Scope = std::vector<Param>;

namespace detail {

inline bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"true", "false", "not", "and", "or", "implies", "=", "in", "exists",
                                           "forall", "existsset", "forallset", "existsmod", "define"};
  return kw.count(s) > 0;
}

class FormulaParser {
 public:
  FormulaParser(const RelationalSignature& sig, const DefinitionTable* defs) : sig_(sig), defs_(defs) {}

  FormulaPtr parse(const SExpr& e, Scope scope) {
    scope_ = std::move(scope);
    return walk(e);
  }

 private:
  [[noreturn]] void fail(ErrorCode code, const SExpr& e, const std::string& msg) const {
    throw Error(code, e.pos.to_string() + ": " + msg);
  }

  std::optional<Sort> lookup(const std::string& v) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == v) return it->sort;
    return std::nullopt;
  }

  std::string variable(const SExpr& e, std::optional<Sort> want) const {
    if (!e.is_atom()) fail(ErrorCode::kSyntaxError, e, "expected a variable");
    auto s = lookup(e.atom);
    if (!s) fail(ErrorCode::kUnboundVariable, e, "variable '" + e.atom + "' is not bound");
    if (want && *s != *want)
      fail(ErrorCode::kSortMismatch, e, "variable '" + e.atom + "' is a " + (*s == Sort::kSet ? "set" : "element") + " variable");
    return e.atom;
  }

  std::shared_ptr<Formula> make(FormulaKind k, const SExpr& e) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->pos = e.pos;
    return f;
  }

  FormulaPtr walk(const SExpr& e) {
    if (e.is_atom()) {
      if (e.atom == "true") return make(FormulaKind::kTrue, e);
      if (e.atom == "false") return make(FormulaKind::kFalse, e);
      fail(ErrorCode::kSyntaxError, e, "unexpected atom '" + e.atom + "'");
    }
    if (e.items.empty() || !e.items[0].is_atom()) fail(ErrorCode::kSyntaxError, e, "expected an operator");
    const std::string& head = e.items[0].atom;
    const std::size_t n = e.items.size();
    if (head == "true" || head == "false") fail(ErrorCode::kSyntaxError, e, "'" + head + "' takes no arguments");
    if (head == "not") {
      if (n != 2) fail(ErrorCode::kSyntaxError, e, "'not' takes one formula");
      auto f = make(FormulaKind::kNot, e);
      f->kids.push_back(walk(e.items[1]));
      return f;
    }
    if (head == "and" || head == "or") {
      auto f = make(head == "and" ? FormulaKind::kAnd : FormulaKind::kOr, e);
      for (std::size_t i = 1; i < n; ++i) f->kids.push_back(walk(e.items[i]));
      return f;
    }
    if (head == "implies") {
      if (n != 3) fail(ErrorCode::kSyntaxError, e, "'implies' takes two formulas");
      auto f = make(FormulaKind::kImplies, e);
      f->kids.push_back(walk(e.items[1]));
      f->kids.push_back(walk(e.items[2]));
      return f;
    }
    if (head == "=") {
      if (n != 3) fail(ErrorCode::kSyntaxError, e, "'=' takes two variables");
      auto f = make(FormulaKind::kEq, e);
      f->args.push_back(variable(e.items[1], std::nullopt));
      f->args.push_back(variable(e.items[2], lookup(f->args[0])));
      return f;
    }
    if (head == "in") {
      if (n != 3) fail(ErrorCode::kSyntaxError, e, "'in' takes an element and a set variable");
      auto f = make(FormulaKind::kIn, e);
      f->args.push_back(variable(e.items[1], Sort::kElement));
      f->args.push_back(variable(e.items[2], Sort::kSet));
      return f;
    }
    if (head == "exists" || head == "forall" || head == "existsset" || head == "forallset") {
      if (n < 3) fail(ErrorCode::kSyntaxError, e, "'" + head + "' needs variables and a body");
      const bool set = head.size() > 6 && head.substr(head.size() - 3) == "set";
      const bool ex = head.rfind("exists", 0) == 0;
      FormulaKind kind = ex ? (set ? FormulaKind::kExistsSet : FormulaKind::kExists)
                            : (set ? FormulaKind::kForallSet : FormulaKind::kForall);
      std::vector<std::string> vars;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!e.items[i].is_atom() || is_keyword(e.items[i].atom)) fail(ErrorCode::kSyntaxError, e.items[i], "expected a variable name");
        vars.push_back(e.items[i].atom);
        scope_.push_back({e.items[i].atom, set ? Sort::kSet : Sort::kElement});
      }
      FormulaPtr body = walk(e.items[n - 1]);
      scope_.resize(scope_.size() - vars.size());
      for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        auto f = make(kind, e);
        f->name = *it;
        f->kids.push_back(body);
        body = f;
      }
      return body;
    }
    if (head == "existsmod") {
      if (n != 4) fail(ErrorCode::kSyntaxError, e, "expected (existsmod <q> <var> <formula>)");
      auto f = make(FormulaKind::kExistsMod, e);
      if (!e.items[1].is_atom()) fail(ErrorCode::kSyntaxError, e.items[1], "expected a modulus");
      try {
        std::size_t used = 0;
        f->modulus = std::stoi(e.items[1].atom, &used);
        if (used != e.items[1].atom.size()) throw std::invalid_argument("");
      } catch (const std::logic_error&) {
        fail(ErrorCode::kSyntaxError, e.items[1], "expected a modulus, got '" + e.items[1].atom + "'");
      }
      if (f->modulus < 2) fail(ErrorCode::kSyntaxError, e.items[1], "modulus must be at least 2");
      if (!e.items[2].is_atom() || is_keyword(e.items[2].atom)) fail(ErrorCode::kSyntaxError, e.items[2], "expected a variable name");
      f->name = e.items[2].atom;
      scope_.push_back({f->name, Sort::kElement});
      f->kids.push_back(walk(e.items[3]));
      scope_.pop_back();
      return f;
    }
    return application(e, head);
  }

  FormulaPtr application(const SExpr& e, const std::string& head) {
    std::vector<std::string> args;
    std::vector<Sort> sorts;
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      args.push_back(variable(e.items[i], std::nullopt));
      sorts.push_back(*lookup(args.back()));
    }
    auto rel = sig_.arity(head);
    DefinitionPtr def = defs_ ? defs_->find(head) : nullptr;
    if (!rel && !def) fail(ErrorCode::kUnknownPredicate, e.items[0], "unknown predicate '" + head + "'");
    auto rel_ok = [&] {
      if (!rel || static_cast<std::size_t>(*rel) != args.size()) return false;
      for (Sort s : sorts)
        if (s != Sort::kElement) return false;
      return true;
    };
    auto def_ok = [&] {
      if (!def || def->params.size() != args.size()) return false;
      for (std::size_t i = 0; i < args.size(); ++i)
        if (def->params[i].sort != sorts[i]) return false;
      return true;
    };
    if (rel_ok()) {
      auto f = make(FormulaKind::kAtom, e);
      f->name = head;
      f->args = std::move(args);
      return f;
    }
    if (def_ok()) {
      auto f = make(FormulaKind::kCall, e);
      f->name = head;
      f->args = std::move(args);
      f->def = def;
      return f;
    }
    const std::size_t want = rel ? static_cast<std::size_t>(*rel) : def->params.size();
    if (want != args.size() && (!def || def->params.size() != args.size()))
      fail(ErrorCode::kArityMismatch, e, "'" + head + "' takes " + std::to_string(want) + " arguments, got " + std::to_string(args.size()));
    fail(ErrorCode::kSortMismatch, e, "argument sorts do not fit '" + head + "'");
  }

  const RelationalSignature& sig_;
  const DefinitionTable* defs_;
  Scope scope_;
};

inline Sort sort_of_name(const std::string& v) {
  return !v.empty() && v[0] >= 'A' && v[0] <= 'Z' ? Sort::kSet : Sort::kElement;
}

}  // namespace detail

/// Parses one formula. Free variables must be declared in scope; calls may
/// refer to defs.
inline FormulaPtr parse_formula(const std::string& text, const RelationalSignature& sig,
                                const DefinitionTable* defs = nullptr, const Scope& free = {}) {
  return detail::FormulaParser(sig, defs).parse(parse_sexpr(text), free);
}

/// Parses a sequence of (define (name P..) body) forms into defs. Parameters
/// starting with an upper-case letter are set variables.
inline void parse_definitions(const std::string& text, const RelationalSignature& sig, DefinitionTable& defs) {
  for (const SExpr& e : parse_sexpr_all(text)) {
    if (!e.is_list || e.items.size() != 3 || !e.items[0].is_atom() || e.items[0].atom != "define" || !e.items[1].is_list ||
        e.items[1].items.empty())
      throw Error(ErrorCode::kSyntaxError, e.pos.to_string() + ": expected (define (<name> <params>..) <formula>)");
    auto d = std::make_shared<Definition>();
    for (const SExpr& p : e.items[1].items)
      if (!p.is_atom()) throw Error(ErrorCode::kSyntaxError, p.pos.to_string() + ": expected a name");
    d->name = e.items[1].items[0].atom;
    for (std::size_t i = 1; i < e.items[1].items.size(); ++i) {
      const std::string& v = e.items[1].items[i].atom;
      d->params.push_back({v, detail::sort_of_name(v)});
    }
    d->body = detail::FormulaParser(sig, &defs).parse(e.items[2], d->params);
    defs.add(d);
  }
}

inline std::string to_string(const Formula& f) {
  auto join = [&](const char* head) {
    std::string s = std::string("(") + head;
    for (const auto& k : f.kids) s += " " + to_string(*k);
    return s + ")";
  };
  switch (f.kind) {
    case FormulaKind::kTrue: return "true";
    case FormulaKind::kFalse: return "false";
    case FormulaKind::kNot: return join("not");
    case FormulaKind::kAnd: return join("and");
    case FormulaKind::kOr: return join("or");
    case FormulaKind::kImplies: return join("implies");
    case FormulaKind::kEq: return "(= " + f.args[0] + " " + f.args[1] + ")";
    case FormulaKind::kIn: return "(in " + f.args[0] + " " + f.args[1] + ")";
    case FormulaKind::kExists: return "(exists " + f.name + " " + to_string(*f.kids[0]) + ")";
    case FormulaKind::kForall: return "(forall " + f.name + " " + to_string(*f.kids[0]) + ")";
    case FormulaKind::kExistsSet: return "(existsset " + f.name + " " + to_string(*f.kids[0]) + ")";
    case FormulaKind::kForallSet: return "(forallset " + f.name + " " + to_string(*f.kids[0]) + ")";
    case FormulaKind::kExistsMod:
      return "(existsmod " + std::to_string(f.modulus) + " " + f.name + " " + to_string(*f.kids[0]) + ")";
    case FormulaKind::kAtom:
    case FormulaKind::kCall: {
      std::string s = "(" + f.name;
      for (const auto& a : f.args) s += " " + a;
      return s + ")";
    }
  }
  return "?";
}

/// Inlines every call, renaming bound variables of the inlined bodies apart.
inline FormulaPtr expand(const FormulaPtr& f) {
  int fresh = 0;
  std::function<FormulaPtr(const FormulaPtr&, const std::map<std::string, std::string>&)> go =
      [&](const FormulaPtr& g, const std::map<std::string, std::string>& ren) -> FormulaPtr {
    auto r = std::make_shared<Formula>(*g);
    auto rename = [&](const std::string& v) {
      auto it = ren.find(v);
      return it == ren.end() ? v : it->second;
    };
    for (auto& a : r->args) a = rename(a);
    switch (g->kind) {
      case FormulaKind::kExists:
      case FormulaKind::kForall:
      case FormulaKind::kExistsSet:
      case FormulaKind::kForallSet:
      case FormulaKind::kExistsMod: {
        auto inner = ren;
        std::string v = g->name + "_" + std::to_string(++fresh);
        inner[g->name] = v;
        r->name = v;
        r->kids = {go(g->kids[0], inner)};
        return r;
      }
      case FormulaKind::kCall: {
        std::map<std::string, std::string> inner;
        for (std::size_t i = 0; i < g->def->params.size(); ++i) inner[g->def->params[i].name] = r->args[i];
        return go(g->def->body, inner);
      }
      default:
        for (auto& k : r->kids) k = go(k, ren);
        return r;
    }
  };
  return go(f, {});
}

using Assignment = std::map<std::string, std::uint64_t>;

/// Brute-force CMS evaluation over one structure. Set values are bit masks,
/// so set quantification needs a domain of at most 64 elements. Results of
/// definition calls are memoized per argument tuple for the lifetime of the
/// checker.
class ModelChecker {
 public:
  explicit ModelChecker(const Structure& s, std::uint64_t budget = kDefaultWorkBudget) : s_(s), budget_(budget) {
    const std::size_t n = s_.size();
    full_ = n >= 64 ? ~0ull : ((1ull << n) - 1);
    elem_bits_ = 1;
    while ((1ull << elem_bits_) < std::max<std::size_t>(n, 2)) ++elem_bits_;
  }

  struct Query {
    int root = -1;
    int frame = 0;
    std::vector<int> param_slots;
    std::vector<Sort> param_sorts;
  };

  /// Compiles f with the given free variables, in that order.
  Query prepare(const FormulaPtr& f, const std::vector<Param>& params) {
    Query q;
    Ctx ctx;
    for (const auto& p : params) {
      q.param_slots.push_back(ctx.bind(p.name, p.sort));
      q.param_sorts.push_back(p.sort);
    }
    q.root = compile(*f, ctx);
    q.frame = ctx.max_slots;
    return q;
  }

  bool eval(const Query& q, const std::vector<std::uint64_t>& values) {
    if (values.size() != q.param_slots.size()) throw Error(ErrorCode::kArityMismatch, "wrong number of bindings");
    work_ = 0;
    const std::size_t base = push_frame(q.frame);
    for (std::size_t i = 0; i < values.size(); ++i) {
      check_value(q.param_sorts[i], values[i]);
      arena_[base + static_cast<std::size_t>(q.param_slots[i])] = values[i];
    }
    bool r = run(q.root, base);
    top_ = base;
    return r;
  }

  /// One-shot check; env must cover the free variables of f.
  bool check(const FormulaPtr& f, const std::map<std::string, std::pair<Sort, std::uint64_t>>& env = {}) {
    std::vector<Param> params;
    std::vector<std::uint64_t> values;
    for (const auto& [name, sv] : env) {
      params.push_back({name, sv.first});
      values.push_back(sv.second);
    }
    return eval(prepare(f, params), values);
  }

  std::uint64_t work() const { return work_; }
  const Structure& structure() const { return s_; }

 private:
  struct Guard {
    int var_slot = -1;
    int cond = -1;
    bool upper = true;  // Y within {v : cond} when true, Y contains it otherwise
  };

  struct Node {
    FormulaKind kind = FormulaKind::kTrue;
    int a = -1, b = -1;  // slots, predicate index, or bound slot
    int modulus = 0;
    std::vector<int> kids;
    std::vector<int> slots;
    int def = -1;
    std::vector<Guard> guards;
  };

  struct CompiledDef {
    DefinitionPtr def;
    int root = -1;
    int frame = 0;
    std::vector<Sort> sorts;
    int key_bits = 0;
    std::vector<signed char> dense;
    std::unordered_map<std::string, bool> sparse;
  };

  struct Ctx {
    std::vector<std::pair<std::string, int>> names;
    std::vector<Sort> sorts;
    int used = 0;
    int max_slots = 0;
    int bind(const std::string& n, Sort s) {
      names.emplace_back(n, used);
      sorts.push_back(s);
      max_slots = std::max(max_slots, ++used);
      return used - 1;
    }
    void unbind() {
      names.pop_back();
      sorts.pop_back();
      --used;
    }
    int slot(const std::string& n) const {
      for (auto it = names.rbegin(); it != names.rend(); ++it)
        if (it->first == n) return it->second;
      throw Error(ErrorCode::kUnboundVariable, "variable '" + n + "' is not bound");
    }
  };

  void check_value(Sort s, std::uint64_t v) const {
    if (s == Sort::kElement ? v >= s_.size() : (v & ~full_) != 0)
      throw Error(ErrorCode::kInvalidArgument, "binding outside the domain");
  }

  std::size_t push_frame(int size) {
    const std::size_t base = top_;
    top_ += static_cast<std::size_t>(size);
    if (arena_.size() < top_) arena_.resize(std::max(top_, arena_.size() * 2 + 64));
    return base;
  }

  static bool mentions(const Formula& f, const std::string& v) {
    for (const auto& a : f.args)
      if (a == v) return true;
    const bool binder = f.kind == FormulaKind::kExists || f.kind == FormulaKind::kForall || f.kind == FormulaKind::kExistsSet ||
                        f.kind == FormulaKind::kForallSet || f.kind == FormulaKind::kExistsMod;
    if (binder && f.name == v) return false;
    for (const auto& k : f.kids)
      if (mentions(*k, v)) return true;
    return false;
  }

  // Conjuncts (forall v (implies (in v Y) C)) and (forall v (implies C (in v Y)))
  // bound the values of Y worth enumerating.
  void collect_guards(const Formula& conj, const std::string& y, Ctx& ctx, std::vector<Guard>& out) {
    std::vector<const Formula*> parts;
    if (conj.kind == FormulaKind::kAnd) {
      for (const auto& k : conj.kids) parts.push_back(k.get());
    } else {
      parts.push_back(&conj);
    }
    for (const Formula* p : parts) {
      if (p->kind != FormulaKind::kForall || p->kids[0]->kind != FormulaKind::kImplies) continue;
      const Formula& imp = *p->kids[0];
      const std::string& v = p->name;
      auto is_member = [&](const Formula& m) {
        return m.kind == FormulaKind::kIn && m.args[0] == v && m.args[1] == y;
      };
      const Formula* cond = nullptr;
      bool upper = true;
      if (is_member(*imp.kids[0]) && !mentions(*imp.kids[1], y)) {
        cond = imp.kids[1].get();
      } else if (is_member(*imp.kids[1]) && !mentions(*imp.kids[0], y)) {
        cond = imp.kids[0].get();
        upper = false;
      }
      if (!cond || v == y) continue;
      Guard g;
      g.var_slot = ctx.bind(v, Sort::kElement);
      g.cond = compile(*cond, ctx);
      g.upper = upper;
      ctx.unbind();
      out.push_back(g);
    }
  }

  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int compile(const Formula& f, Ctx& ctx) {
    Node n;
    n.kind = f.kind;
    switch (f.kind) {
      case FormulaKind::kTrue:
      case FormulaKind::kFalse:
        break;
      case FormulaKind::kAtom: {
        n.a = s_.signature().index_of(f.name);
        if (n.a < 0) throw Error(ErrorCode::kUnknownPredicate, "structure has no predicate '" + f.name + "'");
        if (static_cast<std::size_t>(*s_.signature().arity(f.name)) != f.args.size())
          throw Error(ErrorCode::kArityMismatch, "predicate '" + f.name + "'");
        for (const auto& v : f.args) n.slots.push_back(ctx.slot(v));
        break;
      }
      case FormulaKind::kEq:
      case FormulaKind::kIn:
        n.a = ctx.slot(f.args[0]);
        n.b = ctx.slot(f.args[1]);
        break;
      case FormulaKind::kNot:
      case FormulaKind::kAnd:
      case FormulaKind::kOr:
      case FormulaKind::kImplies:
        for (const auto& k : f.kids) n.kids.push_back(compile(*k, ctx));
        break;
      case FormulaKind::kExists:
      case FormulaKind::kForall:
      case FormulaKind::kExistsMod:
        n.modulus = f.modulus;
        n.a = ctx.bind(f.name, Sort::kElement);
        n.kids.push_back(compile(*f.kids[0], ctx));
        ctx.unbind();
        break;
      case FormulaKind::kExistsSet:
      case FormulaKind::kForallSet: {
        n.a = ctx.bind(f.name, Sort::kSet);
        const Formula& body = *f.kids[0];
        if (f.kind == FormulaKind::kExistsSet) {
          collect_guards(body, f.name, ctx, n.guards);
        } else if (body.kind == FormulaKind::kImplies) {
          collect_guards(*body.kids[0], f.name, ctx, n.guards);
        }
        n.kids.push_back(compile(body, ctx));
        ctx.unbind();
        break;
      }
      case FormulaKind::kCall: {
        n.def = compiled_def(f.def);
        for (const auto& v : f.args) n.slots.push_back(ctx.slot(v));
        break;
      }
    }
    return add(std::move(n));
  }

  int compiled_def(const DefinitionPtr& d) {
    auto it = def_index_.find(d.get());
    if (it != def_index_.end()) return it->second;
    Ctx ctx;
    CompiledDef cd;
    cd.def = d;
    std::vector<int> slots;
    for (const auto& p : d->params) {
      ctx.bind(p.name, p.sort);
      cd.sorts.push_back(p.sort);
      cd.key_bits += p.sort == Sort::kSet ? static_cast<int>(s_.size()) : elem_bits_;
    }
    cd.root = compile(*d->body, ctx);
    cd.frame = ctx.max_slots;
    if (cd.key_bits <= 22) cd.dense.assign(std::size_t{1} << cd.key_bits, -1);
    const int id = static_cast<int>(defs_.size());
    defs_.push_back(std::move(cd));
    def_index_.emplace(d.get(), id);
    return id;
  }

  void tick() {
    if (++work_ > budget_) throw Error(ErrorCode::kBudgetExceeded, "work budget of " + std::to_string(budget_) + " evaluations exhausted");
  }

  void need_sets() const {
    if (s_.size() > kMaxSetDomain) throw Error(ErrorCode::kInvalidArgument, "set quantification needs a domain of at most 64 elements");
  }

  bool run(int id, std::size_t base) {
    tick();
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    auto at = [&](int slot) -> std::uint64_t& { return arena_[base + static_cast<std::size_t>(slot)]; };
    const std::size_t dom = s_.size();
    switch (n.kind) {
      case FormulaKind::kTrue: return true;
      case FormulaKind::kFalse: return false;
      case FormulaKind::kAtom: {
        int args[16];
        std::vector<int> big;
        int* p = args;
        if (n.slots.size() > 16) {
          big.resize(n.slots.size());
          p = big.data();
        }
        for (std::size_t i = 0; i < n.slots.size(); ++i) p[i] = static_cast<int>(at(n.slots[i]));
        return s_.holds(n.a, p);
      }
      case FormulaKind::kEq: return at(n.a) == at(n.b);
      case FormulaKind::kIn: return (at(n.b) >> at(n.a)) & 1u;
      case FormulaKind::kNot: return !run(n.kids[0], base);
      case FormulaKind::kAnd:
        for (int k : n.kids)
          if (!run(k, base)) return false;
        return true;
      case FormulaKind::kOr:
        for (int k : n.kids)
          if (run(k, base)) return true;
        return false;
      case FormulaKind::kImplies: return !run(n.kids[0], base) || run(n.kids[1], base);
      case FormulaKind::kExists:
        for (std::size_t d = 0; d < dom; ++d) {
          at(n.a) = d;
          if (run(n.kids[0], base)) return true;
        }
        return false;
      case FormulaKind::kForall:
        for (std::size_t d = 0; d < dom; ++d) {
          at(n.a) = d;
          if (!run(n.kids[0], base)) return false;
        }
        return true;
      case FormulaKind::kExistsMod: {
        std::size_t count = 0;
        for (std::size_t d = 0; d < dom; ++d) {
          at(n.a) = d;
          if (run(n.kids[0], base)) ++count;
        }
        return count % static_cast<std::size_t>(n.modulus) == 0;
      }
      case FormulaKind::kExistsSet:
      case FormulaKind::kForallSet: {
        need_sets();
        std::uint64_t upper = full_, lower = 0;
        for (const Guard& g : n.guards) {
          std::uint64_t m = 0;
          for (std::size_t d = 0; d < dom; ++d) {
            at(g.var_slot) = d;
            if (run(g.cond, base)) m |= 1ull << d;
          }
          if (g.upper) upper &= m; else lower |= m;
        }
        const bool exists = n.kind == FormulaKind::kExistsSet;
        if ((lower & ~upper) != 0) return !exists;
        const std::uint64_t free = upper & ~lower;
        std::uint64_t sub = 0;
        do {
          at(n.a) = lower | sub;
          if (run(n.kids[0], base) == exists) return exists;
          sub = (sub - free) & free;
        } while (sub != 0);
        return !exists;
      }
      case FormulaKind::kCall: return call(n, base);
    }
    return false;
  }

  bool call(const Node& n, std::size_t base) {
    CompiledDef& cd = defs_[static_cast<std::size_t>(n.def)];
    std::uint64_t key = 0;
    std::string skey;
    const bool dense = !cd.dense.empty();
    for (std::size_t i = 0; i < n.slots.size(); ++i) {
      std::uint64_t v = arena_[base + static_cast<std::size_t>(n.slots[i])];
      if (dense) {
        key = (key << (cd.sorts[i] == Sort::kSet ? s_.size() : static_cast<std::size_t>(elem_bits_))) | v;
      } else {
        skey.append(reinterpret_cast<const char*>(&v), sizeof v);
      }
    }
    if (dense) {
      signed char c = cd.dense[key];
      if (c >= 0) return c != 0;
    } else {
      auto it = cd.sparse.find(skey);
      if (it != cd.sparse.end()) return it->second;
    }
    const std::size_t callee = push_frame(cd.frame);
    for (std::size_t i = 0; i < n.slots.size(); ++i) arena_[callee + i] = arena_[base + static_cast<std::size_t>(n.slots[i])];
    const int root = cd.root;
    bool r = run(root, callee);
    top_ = callee;
    // run() may have grown defs_, so look the entry up again
    CompiledDef& again = defs_[static_cast<std::size_t>(n.def)];
    if (dense) again.dense[key] = r ? 1 : 0;
    else again.sparse.emplace(std::move(skey), r);
    return r;
  }

  const Structure& s_;
  std::uint64_t budget_;
  std::uint64_t work_ = 0;
  std::uint64_t full_ = 0;
  int elem_bits_ = 1;
  std::vector<Node> nodes_;
  std::vector<CompiledDef> defs_;
  std::map<const Definition*, int> def_index_;
  std::vector<std::uint64_t> arena_;
  std::size_t top_ = 0;
};

/// Convenience wrapper: a fresh checker per call, so no memo is shared.
inline bool model_check(const Structure& s, const FormulaPtr& f,
                        const std::map<std::string, std::pair<Sort, std::uint64_t>>& env = {},
                        std::uint64_t budget = kDefaultWorkBudget) {
  ModelChecker mc(s, budget);
  return mc.check(f, env);
}

}  // namespace modgraph
