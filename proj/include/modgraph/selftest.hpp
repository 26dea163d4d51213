#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "modgraph/algebra.hpp"
#include "modgraph/cms.hpp"
#include "modgraph/generators.hpp"
#include "modgraph/mdec.hpp"
#include "modgraph/predicates.hpp"
#include "modgraph/structures.hpp"
#include "modgraph/text_format.hpp"
#include "modgraph/transduction.hpp"

namespace modgraph {

struct SelfTestConfig {
  std::uint64_t seed = 1;
  int count = 100;         // instances per property
  int max_vertices = 8;
  int max_depth = 6;
  bool raw = false;        // oracle-only properties draw arbitrary digraphs
  bool flip_binarize = false;  // fault injection: reversed seq combs
};

struct PropertyResult {
  std::string name;  // "<module>/<property>"
  int passed = 0;
  int failed = 0;
  std::string first_failure;
  bool ok() const { return failed == 0; }
};

struct SelfTestReport {
  SelfTestConfig config;
  std::vector<std::string> warnings;
  std::vector<PropertyResult> properties;  // sorted by name

  bool passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.ok(); });
  }

  const PropertyResult* find(const std::string& name) const {
    for (const auto& p : properties)
      if (p.name == name) return &p;
    return nullptr;
  }

  /// Deterministic text: no timings, sorted properties.
  std::string format() const {
    std::ostringstream out;
    out << "selftest seed=" << config.seed << " count=" << config.count << " max-vertices=" << config.max_vertices
        << " max-depth=" << config.max_depth << " mode=" << (config.raw ? "raw" : "fgraph")
        << (config.flip_binarize ? " fault=flip-binarize" : "") << '\n';
    for (const auto& w : warnings) out << "warning: " << w << '\n';
    int bad = 0;
    for (const auto& p : properties) {
      out << (p.ok() ? "PASS " : "FAIL ") << p.name << ' ' << p.passed << '/' << (p.passed + p.failed) << '\n';
      if (!p.ok()) {
        ++bad;
        out << "  first failure: " << p.first_failure << '\n';
      }
    }
    out << "summary: " << properties.size() << " properties, " << (properties.size() - static_cast<std::size_t>(bad))
        << " passed, " << bad << " failed\n";
    return out.str();
  }
};

/// Compares every library formula, evaluated by the model checker on
/// graph_structure(g), with the direct algorithm. Exhaustive over all
/// bindings, or `samples` random bindings per predicate. Returns mismatches.
inline std::vector<std::string> predicate_agreement(const LabeledGraph& g, const Signature& sig, const PredicateLibrary& lib,
                                                    bool exhaustive, Rng& rng, int samples, std::size_t* checked = nullptr) {
  using Mask = std::uint64_t;
  std::vector<std::string> bad;
  const Structure s = graph_structure(g);
  ModelChecker mc(s);
  SetPredicateEvaluator ev(g, sig);
  const int n = static_cast<int>(g.size());
  for (const auto& name : lib.names()) {
    auto d = lib.at(name);
    auto q = mc.prepare(d->body, d->params);
    std::vector<Mask> args(d->params.size());
    auto run = [&]() {
      if (checked) ++*checked;
      const bool a = mc.eval(q, args), b = ev.eval(name, args);
      if (a != b && bad.size() < 20) {
        std::string msg = name + "(";
        for (std::size_t i = 0; i < args.size(); ++i)
          msg += (i ? ", " : "") + (d->params[i].sort == Sort::kSet ? to_string(ev.set_of(args[i])) : std::to_string(g.vertex_at(static_cast<int>(args[i]))));
        bad.push_back(msg + "): formula " + (a ? "true" : "false") + ", algorithm " + (b ? "true" : "false"));
      }
    };
    if (exhaustive) {
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == args.size()) return run();
        const Mask lim = d->params[i].sort == Sort::kSet ? (Mask{1} << n) : static_cast<Mask>(n);
        for (Mask v = 0; v < lim; ++v) {
          args[i] = v;
          rec(i + 1);
        }
      };
      rec(0);
      continue;
    }
    for (int k = 0; k < samples; ++k) {
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (d->params[i].sort == Sort::kElement)
          args[i] = rng.index(static_cast<std::size_t>(n));
        else if (rng.coin())  // bias towards tree nodes, where most predicates are non-trivial
          args[i] = ev.node_family()[rng.index(ev.node_family().size())];
        else
          args[i] = rng.next() & ((n == 64 ? ~Mask{0} : (Mask{1} << n) - 1));
      }
      run();
    }
  }
  return bad;
}

namespace detail {

using Check = std::function<std::string(Rng&, int)>;

// The module definition itself, evaluated over all pairs without shortcuts.
inline bool module_by_definition(const LabeledGraph& g, const VertexSet& x) {
  for (Vertex z : g.vertices()) {
    if (std::binary_search(x.begin(), x.end(), z)) continue;
    for (Vertex a : x)
      for (Vertex b : x)
        if (g.has_edge(z, a) != g.has_edge(z, b) || g.has_edge(a, z) != g.has_edge(b, z)) return false;
  }
  return true;
}

inline VertexSet random_subset(const LabeledGraph& g, Rng& rng, bool nonempty = true) {
  VertexSet x;
  for (Vertex v : g.vertices())
    if (rng.coin()) x.push_back(v);
  if (x.empty() && nonempty) x.push_back(g.vertex_at(static_cast<int>(rng.index(g.size()))));
  return x;
}

inline std::string graph_text(const LabeledGraph& g) {
  std::string s = format_graph(g, "g");
  std::replace(s.begin(), s.end(), '\n', ';');
  return s;
}

// Closed formulas over edge/label_a/label_b with at most two set quantifiers.
inline std::string random_formula(Rng& rng, int depth, std::vector<std::string>& elems, std::vector<std::string>& sets,
                                  int& fresh, int& set_budget) {
  if (depth == 0 || rng.coin(0.2)) {
    if (elems.empty()) return rng.coin() ? "true" : "false";
    auto pick = [&] { return elems[rng.index(elems.size())]; };
    switch (rng.uniform(0, sets.empty() ? 2 : 3)) {
      case 0: return "(edge " + pick() + " " + pick() + ")";
      case 1: return "(= " + pick() + " " + pick() + ")";
      case 2: return std::string(rng.coin() ? "(label_a " : "(label_b ") + pick() + ")";
      default: return "(in " + pick() + " " + sets[rng.index(sets.size())] + ")";
    }
  }
  auto sub = [&] { return random_formula(rng, depth - 1, elems, sets, fresh, set_budget); };
  const int choice = rng.uniform(0, 8);
  if (choice == 0) return "(not " + sub() + ")";
  if (choice == 1) return "(and " + sub() + " " + sub() + ")";
  if (choice == 2) return "(or " + sub() + " " + sub() + ")";
  if (choice == 3) return "(implies " + sub() + " " + sub() + ")";
  if (choice >= 7 && set_budget > 0) {
    --set_budget;
    const std::string v = "S" + std::to_string(fresh++);
    sets.push_back(v);
    std::string body = sub();
    sets.pop_back();
    return std::string(choice == 7 ? "(existsset " : "(forallset ") + v + " " + body + ")";
  }
  const std::string v = "x" + std::to_string(fresh++);
  elems.push_back(v);
  std::string body = sub();
  elems.pop_back();
  if (choice == 4) return "(exists " + v + " " + body + ")";
  if (choice == 5) return "(forall " + v + " " + body + ")";
  return "(existsmod " + std::to_string(rng.uniform(2, 3)) + " " + v + " " + body + ")";
}

inline std::string closed_formula(Rng& rng, int depth) {
  std::vector<std::string> e, s;
  int fresh = 0, sets = 2;
  return random_formula(rng, depth, e, s, fresh, sets);
}

class Harness {
 public:
  explicit Harness(const SelfTestConfig& cfg) : cfg_(cfg) {}

  void property(const std::string& name, const Check& body, int count = -1) {
    PropertyResult r;
    r.name = name;
    Rng rng = Rng::derive(cfg_.seed, name);
    const int n = count < 0 ? cfg_.count : count;
    for (int i = 0; i < n; ++i) {
      std::string err;
      try {
        err = body(rng, i);
      } catch (const std::exception& e) {
        err = std::string("exception: ") + e.what();
      }
      if (err.empty()) {
        ++r.passed;
      } else {
        if (r.failed == 0) r.first_failure = "instance " + std::to_string(i) + ": " + err;
        ++r.failed;
      }
    }
    results_.push_back(std::move(r));
  }

  std::vector<PropertyResult> take() {
    std::sort(results_.begin(), results_.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return std::move(results_);
  }

 private:
  const SelfTestConfig& cfg_;
  std::vector<PropertyResult> results_;
};

}  // namespace detail

/// Runs the property suites of every module. Each property draws from its
/// own stream derived from (seed, property name), so the report does not
/// depend on the order in which properties run.
inline SelfTestReport run_selftest(const SelfTestConfig& cfg) {
  if (cfg.count < 0) throw Error(ErrorCode::kInvalidArgument, "count must be non-negative");
  if (cfg.max_vertices < 1) throw Error(ErrorCode::kInvalidArgument, "max-vertices must be positive");
  if (cfg.max_depth < 1) throw Error(ErrorCode::kInvalidArgument, "max-depth must be positive");
  if (cfg.max_vertices > 64) throw Error(ErrorCode::kInvalidArgument, "max-vertices is limited to 64");

  SelfTestReport report;
  report.config = cfg;
  if (cfg.count == 0) report.warnings.push_back("count is 0, every property passes vacuously");

  const Alphabet ab({"a", "b"});
  const Signature sigs[2] = {w5_signature(false, ab), w5_signature(true, ab)};
  const Signature words("words", ab, {SignatureOp::sequential()});
  const PredicateLibrary libs[2] = {ms_predicate_library(sigs[0]), ms_predicate_library(sigs[1])};
  const TransductionSchema schemas[2] = {TransductionSchema(sigs[0]), TransductionSchema(sigs[1])};
  const int nv = cfg.max_vertices;
  const int search_cap = std::min(nv, kDefaultSearchBound);
  const int brute_cap = std::min(nv, 10);

  auto fgraph = [&](Rng& rng, const Signature& sig, int cap) {
    return eval_term(sig, random_term(sig, rng, cfg.max_depth, cap));
  };
  // Input for oracle-only properties: F-graphs, or arbitrary digraphs in raw mode.
  auto oracle_graph = [&](Rng& rng, int cap, int i) {
    if (cfg.raw) return random_digraph(ab, rng, rng.uniform(1, cap), 0.15 + 0.7 * static_cast<double>(rng.uniform(0, 10)) / 10.0);
    return fgraph(rng, sigs[i % 2], cap);
  };
  auto tree_of = [&](const LabeledGraph& g, const Signature& sig) { return detail::binarize_impl(decompose(g, sig), cfg.flip_binarize); };

  detail::Harness h(cfg);
  using detail::graph_text;

  // graph-core

  h.property("graph-core/is-module-oracle", [&](Rng& rng, int i) -> std::string {
    LabeledGraph g = oracle_graph(rng, nv, i);
    for (int k = 0; k < 8; ++k) {
      VertexSet x = detail::random_subset(g, rng);
      if (is_module(g, x) != detail::module_by_definition(g, x)) return "X=" + to_string(x) + " in " + graph_text(g);
    }
    return "";
  });

  h.property("graph-core/isomorphism-apply", [&](Rng& rng, int i) -> std::string {
    LabeledGraph g = oracle_graph(rng, search_cap, i);
    // arbitrary increasing target ids and a random bijection onto them
    std::vector<Vertex> ids;
    for (std::size_t k = 0; k < g.size(); ++k) ids.push_back(static_cast<Vertex>(3 * k + 1) + rng.uniform(0, 2));
    std::vector<int> images(g.size());
    std::iota(images.begin(), images.end(), 1);
    rng.shuffle(images);
    LabeledGraph other = apply_vertex_map(g, Permutation(images), ids);
    auto sigma = find_isomorphism(g, other, true);
    if (!sigma) return "no isomorphism onto a relabelled copy of " + graph_text(g);
    if (!(apply_vertex_map(g, *sigma, other.vertices()) == other)) return "returned map does not carry g onto h";
    if (!find_isomorphism(other, g, true)) return "isomorphism found one way only";
    LabeledGraph unrelated = random_digraph(ab, rng, static_cast<int>(g.size()));
    if (auto tau = find_isomorphism(g, unrelated, true)) {
      if (!(apply_vertex_map(g, *tau, unrelated.vertices()) == unrelated)) return "returned map does not carry g onto h";
      if (!find_isomorphism(unrelated, g, true)) return "isomorphism found one way only";
    } else if (find_isomorphism(unrelated, g, true)) {
      return "isomorphism found one way only";
    }
    return "";
  });

  h.property("graph-core/automorphism-closure", [&](Rng& rng, int i) -> std::string {
    LabeledGraph g = oracle_graph(rng, search_cap, i);
    const bool labels = rng.coin();
    AutomorphismGroup aut = automorphism_group(g, labels);
    if (aut.elements.empty() || !aut.elements.front().is_identity()) return "identity missing";
    for (const auto& p : aut.elements)
      if (!aut.contains(p.inverse())) return "not closed under inverse";
    // all products for small groups, sampled ones for e.g. Aut of an empty graph
    const std::size_t m = aut.order();
    const bool all_pairs = m <= 64;
    for (std::size_t k = 0; k < (all_pairs ? m * m : 4096); ++k) {
      const Permutation& p = aut.elements[all_pairs ? k / m : rng.index(m)];
      const Permutation& q = aut.elements[all_pairs ? k % m : rng.index(m)];
      if (!aut.contains(p.after(q))) return "not closed under composition";
    }
    const int n = static_cast<int>(g.size());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        bool linked = false;
        for (const auto& p : aut.elements) linked = linked || p.at(a) == b;
        const VertexSet& orbit = aut.orbit_of(g.vertex_at(a));
        if (linked != std::binary_search(orbit.begin(), orbit.end(), g.vertex_at(b))) return "orbits are not the Aut classes";
      }
    if (!labels && (aut.orbits.size() == 1) != is_vertex_transitive(g)) return "transitivity disagrees with the orbit count";
    return "";
  });

  h.property("graph-core/self-isomorphisms-in-aut", [&](Rng& rng, int i) -> std::string {
    LabeledGraph g = strip_labels(oracle_graph(rng, search_cap, i));
    AutomorphismGroup aut = automorphism_group(g);
    for (const auto& p : all_isomorphisms(g, g, false))
      if (!aut.contains(p)) return p.to_string() + " is an isomorphism h->h outside Aut(h)";
    auto one = find_isomorphism(g, g, false);
    if (!one || !aut.contains(*one)) return "find_isomorphism(h,h) outside Aut(h)";
    return "";
  });

  // signature

  h.property("signature/size-law", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    const SignatureOp& op = sig.ops()[rng.index(sig.ops().size())];
    const int k = op.is_builtin() ? rng.uniform(2, 4) : op.arity();
    std::vector<LabeledGraph> parts;
    for (int j = 0; j < k; ++j) parts.push_back(fgraph(rng, sig, 3));
    LabeledGraph c = compose(op, parts);
    std::size_t nv_sum = 0, ne = 0;
    for (const auto& p : parts) {
      nv_sum += p.size();
      ne += p.edges().size();
    }
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        if (a == b) continue;
        const bool edge = op.kind() == OpKind::kClique || (op.kind() == OpKind::kSequential && a < b) ||
                          (op.kind() == OpKind::kPrime && op.graph().has_edge(a + 1, b + 1));
        if (edge) ne += parts[static_cast<std::size_t>(a)].size() * parts[static_cast<std::size_t>(b)].size();
      }
    if (c.size() != nv_sum || c.edges().size() != ne)
      return op.name() + ": got |V|=" + std::to_string(c.size()) + " |E|=" + std::to_string(c.edges().size()) + ", expected " +
             std::to_string(nv_sum) + " and " + std::to_string(ne);
    return "";
  });

  h.property("signature/commutation", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    for (const SignatureOp* op : sig.prime_ops()) {
      std::vector<LabeledGraph> parts;
      Vertex offset = 0;
      for (int j = 0; j < op->arity(); ++j) {
        LabeledGraph p = fgraph(rng, sig, 3);
        parts.push_back(shift_ids(p, offset));
        offset += static_cast<Vertex>(p.size());
      }
      AutomorphismGroup aut = automorphism_group(op->graph());
      const Permutation& s = aut.elements[rng.index(aut.elements.size())];
      std::vector<LabeledGraph> permuted;
      for (int j = 0; j < op->arity(); ++j) permuted.push_back(parts[static_cast<std::size_t>(s.at(j))]);
      if (!(compose(*op, parts, IdPolicy::kPreserve) == compose(*op, permuted, IdPolicy::kPreserve)))
        return op->name() + " under " + s.to_string();
    }
    return "";
  });

  h.property("signature/compositionality", [&](Rng& rng, int) -> std::string {
    // H = K<L_1..L_r> with K prime and the L_j arbitrary small unlabelled graphs
    const LabeledGraph k = rng.coin() ? w5_graph() : p3_graph();
    std::vector<LabeledGraph> ls;
    std::size_t total = 0;
    for (std::size_t j = 0; j < k.size(); ++j) {
      ls.push_back(strip_labels(random_digraph(Alphabet({kNoLabel}), rng, rng.uniform(1, 2))));
      total += ls.back().size();
    }
    const LabeledGraph hh = substitute(k, ls);
    std::vector<LabeledGraph> gs;
    for (std::size_t j = 0; j < total; ++j) gs.push_back(strip_labels(random_digraph(Alphabet({kNoLabel}), rng, rng.uniform(1, 3))));
    std::vector<LabeledGraph> inner;
    std::size_t at = 0;
    for (const auto& l : ls) {
      std::vector<LabeledGraph> chunk(gs.begin() + static_cast<std::ptrdiff_t>(at), gs.begin() + static_cast<std::ptrdiff_t>(at + l.size()));
      at += l.size();
      inner.push_back(chunk.size() == 1 ? chunk[0] : substitute(l, chunk));
    }
    if (!(substitute(hh, gs) == substitute(k, inner))) return "H<G..> differs from K<L_j<G..>..>";
    return "";
  });

  h.property("signature/dag-closure", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    bool dags = true, transitive = true;
    for (const auto& op : sig.ops()) {
      if (op.kind() == OpKind::kClique) dags = transitive = false;
      if (op.kind() == OpKind::kPrime) {
        dags = dags && is_dag(op.graph());
        transitive = transitive && is_transitive(op.graph());
      }
    }
    LabeledGraph g = fgraph(rng, sig, nv);
    if (dags && !is_dag(g)) return "output of a dag signature has a cycle";
    if (dags && transitive && !is_transitive(g)) return "output of a transitive dag signature is not transitive";
    return "";
  });

  h.property("signature/distinguished-invariant", [&](Rng& rng, int) -> std::string {
    // the signature's own op plus a random weakly rigid prime graph
    std::vector<SignatureOp> ops{sigs[0].at("W5")};
    for (int tries = 0; tries < 50; ++tries) {
      LabeledGraph r = strip_labels(random_digraph(Alphabet({kNoLabel}), rng, rng.uniform(3, 6)));
      if (is_prime(r) && !is_vertex_transitive(r)) {
        ops.push_back(SignatureOp::trusted_prime("R", r));
        break;
      }
    }
    for (const auto& op : ops) {
      VertexSet d = select_distinguished(op);
      if (d.empty() || d.size() == static_cast<std::size_t>(op.arity())) return op.name() + ": not a proper non-empty set";
      for (const auto& s : automorphism_group(op.graph()).elements) {
        VertexSet img;
        for (Vertex v : d) img.push_back(s(v));
        std::sort(img.begin(), img.end());
        if (img != d) return op.name() + ": " + s.to_string() + " moves " + to_string(d);
      }
    }
    return "";
  });

  // mdec

  h.property("mdec/oracle-equivalence", [&](Rng& rng, int i) -> std::string {
    LabeledGraph g = oracle_graph(rng, brute_cap, i);
    Signature open = sigs[i % 2];
    auto got = prime_module_family(decompose_open(g, open));
    auto want = brute_force_prime_modules(g);
    if (got != want) return "tree and brute force disagree on " + graph_text(g);
    return "";
  });

  h.property("mdec/round-trip", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    Term t = random_term(sig, rng, cfg.max_depth, nv);
    LabeledGraph g = eval_term(sig, t);
    MDecTree m = decompose(g, sig);
    if (!(reconstruct(m, sig) == g)) return "mdec does not rebuild " + to_string(t, &sig);
    if (!(reconstruct(detail::binarize_impl(m, cfg.flip_binarize), sig) == g)) return "mdec' does not rebuild " + to_string(t, &sig);
    return "";
  });

  h.property("mdec/tree-structure", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    LabeledGraph g = fgraph(rng, sig, nv);
    MDecTree m = decompose(g, sig);
    MDecPrimeTree b = tree_of(g, sig);
    for (const MDecTree* t : std::vector<const MDecTree*>{&m, &b}) {
      std::size_t leaves = 0;
      for (const auto& n : t->nodes) {
        if (n.kind == NodeKind::kLeaf) {
          ++leaves;
          if (n.module.size() != 1) return "leaf with module " + to_string(n.module);
          continue;
        }
        VertexSet u;
        for (int c : n.children) {
          if (intersects(u, t->at(c).module)) return "children overlap at " + to_string(n.module);
          u = set_union(u, t->at(c).module);
        }
        if (u != n.module) return "children do not cover " + to_string(n.module);
        if (n.kind == NodeKind::kPrime && n.children.size() != static_cast<std::size_t>(sig.at(n.label).arity()))
          return "prime node with wrong child count";
      }
      if (leaves != g.size()) return "leaf count differs from |V|";
    }
    for (const auto& n : m.nodes) {
      if (n.kind == NodeKind::kLeaf || n.kind == NodeKind::kPrime) continue;
      if (n.children.size() < 2) return "builtin node with fewer than two children";
      for (int c : n.children)
        if (m.at(c).kind == n.kind) return n.label + " node with a " + n.label + " child in mdec";
    }
    for (const auto& n : b.nodes)
      if (n.kind == NodeKind::kSequential && (n.children.size() != 2 || b.at(n.children[0]).kind == NodeKind::kSequential))
        return "seq node of mdec' is not binary with a non-seq first child";
    return "";
  });

  h.property("mdec/case-exclusivity", [&](Rng& rng, int i) -> std::string {
    LabeledGraph g = oracle_graph(rng, brute_cap, i);
    if (g.size() < 2) return "";
    ModuleSplit split = maximal_prime_modules(g);
    VertexSet all;
    for (const auto& bl : split.blocks) {
      if (!is_module(g, bl)) return "block " + to_string(bl) + " is not a module";
      all = set_union(all, bl);
    }
    if (all != g.vertices() || split.blocks.size() < 2) return "blocks do not partition V";
    LabeledGraph q = strip_labels(quotient_graph(g, split.blocks));
    const int k = static_cast<int>(q.size());
    for (int a = 1; a <= k; ++a)
      for (int b = 1; b <= k; ++b) {
        if (a == b) continue;
        const bool e = q.has_edge(a, b);
        if (split.kind == SplitKind::kParallel && e) return "parallel quotient has an edge";
        if (split.kind == SplitKind::kClique && !e) return "clique quotient misses an edge";
        if (split.kind == SplitKind::kSequential && e != (a < b)) return "sequential quotient is not a chain";
      }
    if (split.kind == SplitKind::kPrime && (k < 3 || !is_prime(q))) return "prime quotient is not prime";
    return "";
  });

  h.property("mdec/aut-stability", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    LabeledGraph g = fgraph(rng, sig, nv);
    MDecTree m = decompose(g, sig);
    for (const auto& n : m.nodes) {
      if (n.kind != NodeKind::kPrime) continue;
      const SignatureOp& op = sig.at(n.label);
      for (const auto& s : automorphism_group(op.graph()).elements)
        for (int a = 1; a <= op.arity(); ++a)
          for (int b = 1; b <= op.arity(); ++b) {
            if (a == b) continue;
            const Vertex u = m.at(n.children[static_cast<std::size_t>(s(a) - 1)]).module[0];
            const Vertex v = m.at(n.children[static_cast<std::size_t>(s(b) - 1)]).module[0];
            if (op.graph().has_edge(a, b) != g.has_edge(u, v))
              return "enumeration permuted by " + s.to_string() + " no longer matches " + op.name();
          }
    }
    return "";
  });

  // recognizer

  h.property("recognizer/term-coherence", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    Term t = random_term(sig, rng, cfg.max_depth, nv);
    LabeledGraph g = eval_term(sig, t);
    for (const auto& alg : {counting_algebra(sig, {"a"}, 2), counting_algebra(sig, {"a", "b"}, 3), head_algebra(sig)}) {
      Recognizer r(sig, alg);
      if (r.evaluate(g) != r.evaluate_term(t)) return alg.name() + " on " + to_string(t, &sig);
    }
    return "";
  });

  h.property("recognizer/well-definedness", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    LabeledGraph g = fgraph(rng, sig, nv);
    MDecTree m = decompose(g, sig);
    for (const auto& alg : {counting_algebra(sig, {"a"}, 2), head_algebra(sig)}) {
      Recognizer r(sig, alg);
      const int base = r.evaluate_tree(m);
      MDecTree p = perturb_tree(m, sig, rng);
      if (r.evaluate_tree(p, &rng) != base) return alg.name() + " changes under a re-ordering of " + graph_text(g);
    }
    return "";
  });

  h.property("recognizer/word-automaton", [&](Rng& rng, int) -> std::string {
    // parity of a, and "first letter is a", against a direct scan of the word
    const int len = rng.uniform(1, 6);
    std::vector<Term> letters;
    std::string word;
    for (int k = 0; k < len; ++k) {
      word += rng.coin() ? "a" : "b";
      letters.push_back(Term::leaf(word.substr(word.size() - 1)));
    }
    Term t = len == 1 ? letters[0] : Term::node(kSeqName, letters);
    LabeledGraph g = eval_term(words, t);
    int state = 0;
    for (char c : word) state ^= c == 'a';
    if (Recognizer(words, counting_algebra(words, {"a"}, 2)).member(g) != (state == 0)) return "parity wrong on " + word;
    if (Recognizer(words, head_algebra(words)).member(g) != (word[0] == 'a')) return "head wrong on " + word;
    return "";
  });

  // cms-logic

  h.property("cms-logic/negation", [&](Rng& rng, int i) -> std::string {
    LabeledGraph g = oracle_graph(rng, std::min(nv, 5), i);
    Structure s = graph_structure(g);
    ModelChecker mc(s);
    const std::string f = detail::closed_formula(rng, 4);
    const auto& rs = s.signature();
    if (mc.check(parse_formula("(not " + f + ")", rs)) == mc.check(parse_formula(f, rs))) return "f and (not f) agree: " + f;
    return "";
  });

  h.property("cms-logic/de-morgan", [&](Rng& rng, int i) -> std::string {
    LabeledGraph g = oracle_graph(rng, std::min(nv, 5), i);
    Structure s = graph_structure(g);
    ModelChecker mc(s);
    const auto& rs = s.signature();
    const std::string f = detail::closed_formula(rng, 3), k = detail::closed_formula(rng, 3);
    auto val = [&](const std::string& text) { return mc.check(parse_formula(text, rs)); };
    if (val("(not (and " + f + " " + k + "))") != val("(or (not " + f + ") (not " + k + "))")) return "and/or duality: " + f + " / " + k;
    if (val("(not (or " + f + " " + k + "))") != val("(and (not " + f + ") (not " + k + "))")) return "or/and duality: " + f + " / " + k;
    std::vector<std::string> e{"x"}, st;
    int fresh = 0, sets = 1;
    const std::string body = detail::random_formula(rng, 3, e, st, fresh, sets);
    if (val("(forall x " + body + ")") != val("(not (exists x (not " + body + ")))")) return "quantifier duality: " + body;
    return "";
  });

  h.property("cms-logic/counting", [&](Rng& rng, int) -> std::string {
    const int n = rng.uniform(1, 8);
    std::vector<std::string> names;
    for (int k = 0; k < n; ++k) names.push_back("e" + std::to_string(k));
    Structure s(RelationalSignature{{"P", 1}}, names);
    int count = 0;
    for (int k = 0; k < n; ++k)
      if (rng.coin()) {
        s.add("P", {k});
        ++count;
      }
    for (int q : {2, 3}) {
      const auto& rs = s.signature();
      if (model_check(s, parse_formula("(existsmod " + std::to_string(q) + " x (P x))", rs)) != (count % q == 0))
        return "mod " + std::to_string(q) + " with " + std::to_string(count) + " of " + std::to_string(n);
      if (model_check(s, parse_formula("(existsmod " + std::to_string(q) + " x (not (P x)))", rs)) != ((n - count) % q == 0))
        return "mod " + std::to_string(q) + " of the complement";
    }
    return "";
  });

  h.property("cms-logic/module-formula", [&](Rng& rng, int i) -> std::string {
    LabeledGraph g = oracle_graph(rng, std::min(nv, 7), i);
    Structure s = graph_structure(g);
    ModelChecker mc(s);
    auto d = libs[0].at("module");
    auto q = mc.prepare(d->body, d->params);
    for (int k = 0; k < 8; ++k) {
      VertexSet x = detail::random_subset(g, rng);
      std::uint64_t m = 0;
      for (int p : positions_of(g, x)) m |= std::uint64_t{1} << p;
      if (mc.eval(q, {m}) != is_module(g, x)) return "module(" + to_string(x) + ") on " + graph_text(g);
    }
    return "";
  });

  h.property("cms-logic/children-aut-closed", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    LabeledGraph g = fgraph(rng, sig, nv);
    Structure s = tree_structure(binarize(decompose(g, sig)), sig);
    for (const SignatureOp* op : sig.prime_ops()) {
      AutomorphismGroup aut = automorphism_group(op->graph());
      for (const auto& tuple : s.tuples(children_predicate(op->name())))
        for (const auto& p : aut.elements) {
          std::vector<int> img{tuple[0]};
          for (int j = 1; j <= op->arity(); ++j) img.push_back(tuple[static_cast<std::size_t>(p(j))]);
          if (!s.tuples(children_predicate(op->name())).count(img)) return "children_" + op->name() + " not closed under " + p.to_string();
        }
    }
    return "";
  });

  // transduction

  struct Pipeline {
    LabeledGraph g;
    MDecPrimeTree tree;
    NodeClassification cls;
    EncodingTables enc;
  };
  auto pipeline = [&](Rng& rng, const Signature& sig, int cap) {
    Pipeline p;
    p.g = fgraph(rng, sig, cap);
    p.tree = tree_of(p.g, sig);
    p.cls = classify_nodes(p.tree, sig);
    p.enc = compute_encoding(p.tree, p.cls, sig);
    return p;
  };

  h.property("transduction/isomorphism", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    Pipeline p = pipeline(rng, sig, nv);
    IsoVerdict v = verify_isomorphism(build_repr(p.tree, p.enc, sig), p.tree, sig);
    return v.ok ? "" : sig.name() + ": " + v.reason + " on " + graph_text(p.g);
  });

  h.property("transduction/kappa-lemma", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    Pipeline p = pipeline(rng, sig, nv);
    KappaLemmaReport r = check_kappa_lemma(p.g, p.tree, p.enc, sig);
    return r.ok() ? "" : sig.name() + ": " + r.mismatches.front();
  });

  h.property("transduction/encoding", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    Pipeline p = pipeline(rng, sig, nv);
    auto bad = check_encoding(p.tree, p.cls, p.enc);
    return bad.empty() ? "" : sig.name() + ": " + bad.front();
  });

  h.property("transduction/mu2-decomposition", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    Pipeline p = pipeline(rng, sig, nv);
    for (std::size_t y = 0; y < p.tree.size(); ++y) {
      if (p.cls.of(static_cast<int>(y)) != NodeClass::kN2) continue;
      VertexSet u;
      for (int z : p.tree.nodes[y].children)
        if (p.cls.of(z) == NodeClass::kN3) {
          const auto& mu3 = p.enc.mu[3][static_cast<std::size_t>(z)];
          if (!mu3) return "mu3 undefined on an N3 node";
          u = set_union(u, *mu3);
        }
      if (!p.enc.mu[2][y] || *p.enc.mu[2][y] != u) return "mu2 at " + to_string(p.tree.nodes[y].module);
    }
    return "";
  });

  h.property("transduction/representative-rule", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    Pipeline p = pipeline(rng, sig, nv);
    std::size_t reps = 0;
    for (const auto& x : choose_representatives(p.enc, smallest_leaf_rule())) reps += x.size();
    if (reps != p.tree.size()) return std::to_string(reps) + " representatives for " + std::to_string(p.tree.size()) + " nodes";
    for (const auto& rule : {largest_leaf_rule(), random_leaf_rule(rng)}) {
      IsoVerdict v = verify_isomorphism(build_repr(p.tree, p.enc, sig, rule), p.tree, sig);
      if (!v.ok) return v.reason;
    }
    return "";
  });

  h.property("transduction/formula-agreement", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    LabeledGraph g = oracle_graph(rng, std::min(nv, 5), i);
    auto bad = predicate_agreement(g, sig, libs[i % 2], false, rng, 4);
    return bad.empty() ? "" : bad.front() + " on " + graph_text(g);
  });

  h.property("transduction/schema", [&](Rng& rng, int i) -> std::string {
    const Signature& sig = sigs[i % 2];
    Pipeline p = pipeline(rng, sig, std::min(nv, 6));
    auto reps = choose_representatives(p.enc, smallest_leaf_rule());
    ReprStructure r = apply_schema(p.g, schemas[i % 2], reps);
    attach_nodes(r, p.tree);
    IsoVerdict v = verify_isomorphism(r, p.tree, sig);
    return v.ok ? "" : v.reason + " on " + graph_text(p.g);
  }, std::min(cfg.count, 20));

  report.properties = h.take();
  return report;
}

}  // namespace modgraph
