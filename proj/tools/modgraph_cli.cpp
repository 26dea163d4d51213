// modgraph: command-line front end.
//
// Exit codes: 0 success / true / member / ISO, 1 false / reject /
// non-member / FAIL, 2 usage, parse or semantic error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "modgraph/algebra.hpp"
#include "modgraph/cms.hpp"
#include "modgraph/mdec.hpp"
#include "modgraph/predicates.hpp"
#include "modgraph/selftest.hpp"
#include "modgraph/structures.hpp"
#include "modgraph/term.hpp"
#include "modgraph/text_format.hpp"
#include "modgraph/transduction.hpp"

using namespace modgraph;

namespace {

constexpr int kOk = 0;
constexpr int kNo = 1;
constexpr int kErr = 2;

LabeledGraph load_graph(const std::string& path) { return parse_graph(read_file(path)).graph; }
Signature load_signature(const std::string& path) { return parse_signature(read_file(path)); }

// The term may be given inline or as a file.
std::string term_text(const std::string& arg) {
  std::error_code ec;
  if (!arg.empty() && arg.front() != '(' && std::filesystem::is_regular_file(arg, ec)) return read_file(arg);
  return arg;
}

void require_same_alphabet(const LabeledGraph& g, const Signature& sig) {
  if (!(g.alphabet() == sig.alphabet()))
    throw Error(ErrorCode::kInvalidArgument, "graph alphabet differs from the alphabet of signature '" + sig.name() + "'");
}

int cmd_decompose(const std::string& graph, bool bin, const std::string& sig_path, const std::string& emit) {
  LabeledGraph g = load_graph(graph);
  Signature sig;
  MDecTree t;
  if (sig_path.empty()) {
    sig = Signature("open", g.alphabet(), {});
    t = decompose_open(g, sig);
    for (const SignatureOp* op : sig.prime_ops()) {
      std::cout << "# prime " << op->name() << ' ' << op->arity() << " :";
      for (const auto& [a, b] : op->graph().edges()) std::cout << ' ' << a << "->" << b;
      std::cout << '\n';
    }
  } else {
    sig = load_signature(sig_path);
    require_same_alphabet(g, sig);
    t = decompose(g, sig);
  }
  if (emit == "term") {
    std::cout << to_string(to_term(t), &sig) << '\n';
  } else if (bin) {
    std::cout << format_tree(binarize(t));
  } else {
    std::cout << format_tree(t);
  }
  return kOk;
}

int cmd_eval_term(const std::string& sig_path, const std::string& term) {
  Signature sig = load_signature(sig_path);
  std::cout << format_graph(eval_term(sig, parse_term(term_text(term), sig)), "term");
  return kOk;
}

int cmd_check_signature(const std::string& sig_path) {
  Signature sig = load_signature(sig_path);
  RigidityReport r = validate_weakly_rigid_signature(sig);
  if (!r.accepted()) {
    std::cout << "REJECT " << sig.name() << '\n';
    for (const auto& v : r.violations) {
      std::cout << "  " << v.op << ": " << v.reason;
      if (v.orbit) std::cout << ", orbit " << to_string(*v.orbit);
      std::cout << '\n';
    }
    return kNo;
  }
  std::cout << "ACCEPT " << sig.name() << '\n';
  for (const auto& op : sig.ops()) {
    if (op.kind() == OpKind::kPrime) {
      std::cout << "  " << op.name() << ": Aut =";
      for (const auto& p : automorphism_group(op.graph(), false, sig.limits()).elements) std::cout << ' ' << p.to_string();
      std::cout << ", dist = " << to_string(select_distinguished(op, sig.limits())) << '\n';
    } else if (op.kind() == OpKind::kSequential) {
      std::cout << "  " << op.name() << ": dist = {1}\n";
    }
  }
  return kOk;
}

int cmd_validate_algebra(const std::string& sig_path, const std::string& alg_path) {
  Signature sig = load_signature(sig_path);
  ParsedAlgebra pa = parse_algebra(read_file(alg_path), sig);
  for (const auto& w : pa.warnings) std::cerr << "warning: " << w << '\n';
  AlgebraReport r = validate_algebra(pa.algebra, sig);
  if (r.valid()) {
    std::cout << "VALID " << pa.algebra.name() << '\n';
    return kOk;
  }
  std::cout << "INVALID " << pa.algebra.name() << '\n';
  for (const auto& v : r.violations) std::cout << "  " << v.law << ' ' << v.op << ' ' << pa.algebra.format_args(v.tuple) << ": " << v.detail << '\n';
  return kNo;
}

int cmd_recognize(const std::string& sig_path, const std::string& alg_path, const std::string& graph, bool allow) {
  Signature sig = load_signature(sig_path);
  ParsedAlgebra pa = parse_algebra(read_file(alg_path), sig);
  for (const auto& w : pa.warnings) std::cerr << "warning: " << w << '\n';
  LabeledGraph g = load_graph(graph);
  require_same_alphabet(g, sig);
  Recognizer rec(sig, pa.algebra, allow);
  const int q = rec.evaluate(g);
  const bool member = pa.algebra.accepting().count(q) > 0;
  std::cout << (member ? "MEMBER" : "NON-MEMBER") << " value=" << pa.algebra.carrier()[static_cast<std::size_t>(q)] << '\n';
  return member ? kOk : kNo;
}

int cmd_modelcheck(const std::string& formula_path, const std::string& graph, const std::string& as, const std::string& sig_path) {
  LabeledGraph g = load_graph(graph);
  const std::string text = read_file(formula_path);
  bool result = false;
  if (as == "graph") {
    Structure s = graph_structure(g);
    if (sig_path.empty()) {
      result = model_check(s, parse_formula(text, s.signature()));
    } else {
      // library predicates (module, node, kappa1, ...) become callable
      Signature sig = load_signature(sig_path);
      require_same_alphabet(g, sig);
      PredicateLibrary lib = ms_predicate_library(sig);
      result = model_check(s, parse_formula(text, lib.graph_signature, &lib.defs));
    }
  } else {
    if (sig_path.empty()) throw Error(ErrorCode::kInvalidArgument, "--as mdectree needs --signature");
    Signature sig = load_signature(sig_path);
    require_same_alphabet(g, sig);
    Structure s = tree_structure(binarize(decompose(g, sig)), sig);
    result = model_check(s, parse_formula(text, s.signature()));
  }
  std::cout << (result ? "TRUE" : "FALSE") << '\n';
  return result ? kOk : kNo;
}

int cmd_verify_transduction(const std::string& sig_path, const std::string& graph) {
  Signature sig = load_signature(sig_path);
  LabeledGraph g = load_graph(graph);
  require_same_alphabet(g, sig);
  MDecPrimeTree t = binarize(decompose(g, sig));
  NodeClassification cls = classify_nodes(t, sig);
  EncodingTables enc = compute_encoding(t, cls, sig);
  std::cout << "mode " << (cls.dual ? "clique" : "par") << '\n';
  std::cout << "classification\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    std::cout << "  " << to_string(cls.of(static_cast<int>(i))) << ' ' << t.nodes[i].label << ' ' << to_string(t.nodes[i].module) << '\n';
  for (int k = 0; k < 4; ++k) {
    std::cout << "kappa" << k << '\n';
    for (const auto& [leaf, node] : enc.kappa[static_cast<std::size_t>(k)])
      std::cout << "  " << leaf << " -> " << to_string(t.at(node).module) << '\n';
  }
  auto reps = choose_representatives(enc, smallest_leaf_rule());
  for (int k = 0; k < 4; ++k) std::cout << "X" << k << " = " << to_string(reps[static_cast<std::size_t>(k)]) << '\n';
  KappaLemmaReport lemma = check_kappa_lemma(g, t, enc, sig);
  std::cout << "kappa lemma: " << lemma.checked << " checked, " << lemma.mismatches.size() << " mismatches\n";
  for (const auto& m : lemma.mismatches) std::cout << "  " << m << '\n';
  IsoVerdict v = verify_isomorphism(build_repr(t, enc, sig, reps), t, sig);
  if (v.ok && lemma.ok()) {
    std::cout << "ISO\n";
    return kOk;
  }
  std::cout << "FAIL" << (v.ok ? "" : ": " + v.reason) << '\n';
  return kNo;
}

int cmd_oracle_modules(const std::string& graph) {
  LabeledGraph g = load_graph(graph);
  for (const auto& m : brute_force_prime_modules(g)) std::cout << to_string(m) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modular decomposition, recognizability and MS transductions of directed graphs"};
  app.require_subcommand(1);

  std::string graph, sig_path, alg_path, formula, term, emit = "tree", as = "graph";
  bool bin = false, allow = false;

  auto* dec = app.add_subcommand("decompose", "Print mdec (or mdec') of a graph");
  dec->add_option("graph", graph, "graph file")->required();
  dec->add_flag("--binarize", bin, "print the binarized tree");
  dec->add_option("--signature", sig_path, "decompose over this signature; without it unmatched quotients become new ops");
  dec->add_option("--emit", emit, "tree or term")->check(CLI::IsMember({"tree", "term"}));

  auto* ev = app.add_subcommand("eval-term", "Evaluate a term to its graph");
  ev->add_option("signature", sig_path)->required();
  ev->add_option("term", term, "term text or file")->required();

  auto* cs = app.add_subcommand("check-signature", "Check weak rigidity");
  cs->add_option("signature", sig_path)->required();

  auto* va = app.add_subcommand("validate-algebra", "Check associativity, commutativity and CP laws");
  va->add_option("signature", sig_path)->required();
  va->add_option("algebra", alg_path)->required();

  auto* rc = app.add_subcommand("recognize", "Membership of a graph in the language of an algebra");
  rc->add_option("signature", sig_path)->required();
  rc->add_option("algebra", alg_path)->required();
  rc->add_option("graph", graph)->required();
  rc->add_flag("--allow-unvalidated", allow, "evaluate even if the algebra breaks a law");

  auto* mc = app.add_subcommand("modelcheck", "Evaluate a closed CMS formula");
  mc->add_option("formula", formula, "formula file")->required();
  mc->add_option("graph", graph)->required();
  mc->add_option("--as", as, "graph or mdectree")->check(CLI::IsMember({"graph", "mdectree"}));
  mc->add_option("--signature", sig_path, "signature (needed for mdectree; enables library predicates on graphs)");

  auto* vt = app.add_subcommand("verify-transduction", "Build repr(mdec'(G)) and check it against mdec'(G)");
  vt->add_option("signature", sig_path)->required();
  vt->add_option("graph", graph)->required();

  auto* om = app.add_subcommand("oracle-modules", "Prime modules by brute force");
  om->add_option("graph", graph)->required();

  SelfTestConfig cfg;
  cfg.count = 200;
  std::string fault;
  auto* st = app.add_subcommand("selftest", "Randomized property suites of every module");
  st->add_option("--seed", cfg.seed);
  st->add_option("--count", cfg.count, "instances per property")->check(CLI::NonNegativeNumber);
  st->add_option("--max-vertices", cfg.max_vertices)->check(CLI::Range(1, 64));
  st->add_option("--max-depth", cfg.max_depth)->check(CLI::PositiveNumber);
  st->add_flag("--raw", cfg.raw, "arbitrary digraphs for the oracle-only properties");
  st->add_option("--inject-fault", fault, "flip-binarize: reverse seq combs (the round trip must fail)")
      ->check(CLI::IsMember({"flip-binarize"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kErr;
  }

  try {
    if (*dec) return cmd_decompose(graph, bin, sig_path, emit);
    if (*ev) return cmd_eval_term(sig_path, term);
    if (*cs) return cmd_check_signature(sig_path);
    if (*va) return cmd_validate_algebra(sig_path, alg_path);
    if (*rc) return cmd_recognize(sig_path, alg_path, graph, allow);
    if (*mc) return cmd_modelcheck(formula, graph, as, sig_path);
    if (*vt) return cmd_verify_transduction(sig_path, graph);
    if (*om) return cmd_oracle_modules(graph);
    if (*st) {
      cfg.flip_binarize = fault == "flip-binarize";
      SelfTestReport r = run_selftest(cfg);
      std::cout << r.format();
      return r.passed() ? kOk : kNo;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kErr;
  }
  return kErr;
}
