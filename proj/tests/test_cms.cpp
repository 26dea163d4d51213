#include <gtest/gtest.h>

#include "modgraph/cms.hpp"
#include "modgraph/generators.hpp"
#include "modgraph/predicates.hpp"
#include "modgraph/structures.hpp"
#include "oracles.hpp"

using namespace modgraph;

namespace {

const Alphabet kAb({"a", "b"});

ErrorCode parse_code(const std::string& text, const RelationalSignature& rs, const DefinitionTable* defs = nullptr) {
  try {
    parse_formula(text, rs, defs);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

Structure unary(int n, std::uint32_t marked) {
  std::vector<std::string> names;
  for (int k = 0; k < n; ++k) names.push_back("e" + std::to_string(k));
  Structure s(RelationalSignature{{"P", 1}}, names);
  for (int k = 0; k < n; ++k)
    if (marked >> k & 1) s.add("P", {k});
  return s;
}

std::uint64_t mask_of(const LabeledGraph& g, const VertexSet& x) {
  std::uint64_t m = 0;
  for (int p : positions_of(g, x)) m |= std::uint64_t{1} << p;
  return m;
}

}  // namespace

TEST(FormulaParser, ErrorKinds) {
  const RelationalSignature rs = graph_relational_signature(kAb);
  EXPECT_EQ(parse_code("(edge x y)", rs), ErrorCode::kUnboundVariable);
  EXPECT_EQ(parse_code("(exists x (frob x))", rs), ErrorCode::kUnknownPredicate);
  EXPECT_EQ(parse_code("(exists x (edge x))", rs), ErrorCode::kArityMismatch);
  EXPECT_EQ(parse_code("(exists x (existsset X (in X x)))", rs), ErrorCode::kSortMismatch);
  EXPECT_EQ(parse_code("(existsset X (label_a X))", rs), ErrorCode::kSortMismatch);
  EXPECT_EQ(parse_code("(and (exists x (= x x))", rs), ErrorCode::kSyntaxError);
  EXPECT_EQ(parse_code("(existsmod 1 x (= x x))", rs), ErrorCode::kSyntaxError);
  EXPECT_EQ(parse_code("(existsmod q x (= x x))", rs), ErrorCode::kSyntaxError);
  EXPECT_EQ(parse_code("(not)", rs), ErrorCode::kSyntaxError);
  EXPECT_EQ(parse_code("x", rs), ErrorCode::kSyntaxError);
}

TEST(FormulaParser, PrintsBack) {
  const RelationalSignature rs = graph_relational_signature(kAb);
  const std::string text = "(forall x (implies (label_a x) (existsmod 3 y (edge x y))))";
  EXPECT_EQ(to_string(*parse_formula(text, rs)), text);
}

TEST(ModelChecker, ExistsModOnEquality) {
  const RelationalSignature rs{{"P", 1}};
  FormulaPtr f = parse_formula("(existsmod 2 x (= x x))", rs);
  EXPECT_TRUE(model_check(unary(4, 0), f));
  EXPECT_FALSE(model_check(unary(3, 0), f));
  EXPECT_TRUE(model_check(unary(0, 0), f));
}

TEST(ModelChecker, CountingMatchesPopcountOnEveryUnaryStructure) {
  const RelationalSignature rs{{"P", 1}};
  std::vector<FormulaPtr> pos, neg;
  for (int q : {2, 3}) {
    pos.push_back(parse_formula("(existsmod " + std::to_string(q) + " x (P x))", rs));
    neg.push_back(parse_formula("(existsmod " + std::to_string(q) + " x (not (P x)))", rs));
  }
  for (int n = 0; n <= 8; ++n)
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      Structure s = unary(n, m);
      const int c = std::popcount(m);
      for (std::size_t i = 0; i < 2; ++i) {
        const int q = static_cast<int>(i) + 2;
        ASSERT_EQ(model_check(s, pos[i]), c % q == 0);
        ASSERT_EQ(model_check(s, neg[i]), (n - c) % q == 0);
      }
    }
}

TEST(ModelChecker, FirstOrderQueriesAgainstDirectComputation) {
  const RelationalSignature rs = graph_relational_signature(kAb);
  FormulaPtr source = parse_formula("(exists x (forall y (not (edge y x))))", rs);
  FormulaPtr a_to_b = parse_formula("(exists x y (and (label_a x) (label_b y) (edge x y)))", rs);
  FormulaPtr symmetric = parse_formula("(forall x y (implies (edge x y) (edge y x)))", rs);
  Rng rng(51);
  for (int r = 0; r < 200; ++r) {
    LabeledGraph g = random_digraph(kAb, rng, rng.uniform(1, 7), 0.3);
    Structure s = graph_structure(g);
    bool has_source = false, ab = false, sym = true;
    for (Vertex v : g.vertices()) {
      bool in = false;
      for (Vertex u : g.vertices()) in |= g.has_edge(u, v);
      has_source |= !in;
    }
    for (const auto& [u, v] : g.edges()) {
      ab |= g.label(u) == "a" && g.label(v) == "b";
      sym &= g.has_edge(v, u);
    }
    EXPECT_EQ(model_check(s, source), has_source);
    EXPECT_EQ(model_check(s, a_to_b), ab);
    EXPECT_EQ(model_check(s, symmetric), sym);
  }
}

TEST(ModelChecker, FreeVariablesAndSetQuantifiers) {
  LabeledGraph g = eval_term(sp_signature(), parse_term("(par (seq a b) a)", sp_signature()));
  Structure s = graph_structure(g);
  const RelationalSignature& rs = s.signature();
  FormulaPtr out = parse_formula("(exists y (edge x y))", rs, nullptr, {{"x", Sort::kElement}});
  ModelChecker mc(s);
  EXPECT_TRUE(mc.check(out, {{"x", {Sort::kElement, 0}}}));
  EXPECT_FALSE(mc.check(out, {{"x", {Sort::kElement, 1}}}));
  // the a-vertices form a set of even size
  FormulaPtr even_a = parse_formula(
      "(existsset X (and (forall x (and (implies (label_a x) (in x X)) (implies (in x X) (label_a x)))) (existsmod 2 x (in x X))))",
      rs);
  EXPECT_TRUE(mc.check(even_a));
  FormulaPtr even_b = parse_formula(
      "(existsset X (and (forall x (and (implies (label_b x) (in x X)) (implies (in x X) (label_b x)))) (existsmod 2 x (in x X))))",
      rs);
  EXPECT_FALSE(mc.check(even_b));
  FormulaPtr in_x = parse_formula("(in x X)", rs, nullptr, {{"x", Sort::kElement}, {"X", Sort::kSet}});
  EXPECT_TRUE(mc.check(in_x, {{"x", {Sort::kElement, 2}}, {"X", {Sort::kSet, 0b100}}}));
  EXPECT_FALSE(mc.check(in_x, {{"x", {Sort::kElement, 1}}, {"X", {Sort::kSet, 0b100}}}));
}

TEST(ModelChecker, BudgetIsEnforced) {
  Rng rng(3);
  LabeledGraph g = random_digraph(kAb, rng, 10);
  Structure s = graph_structure(g);
  FormulaPtr f = parse_formula("(forallset X (forallset Y (exists x (or (in x X) (not (in x Y))))))", s.signature());
  ModelChecker tight(s, 1000);
  try {
    tight.check(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}

TEST(Structures, GraphStructureOfW5) {
  Structure s = graph_structure(w5_graph());
  EXPECT_EQ(s.size(), 5u);
  EXPECT_EQ(s.tuples("edge").size(), 4u);
  EXPECT_EQ(s.tuples("label__").size(), 5u);
}

TEST(Structures, TreeOfBinarizedSeqChain) {
  const Signature sig = sp_signature();
  LabeledGraph g = eval_term(sig, parse_term("(seq a b a)", sig));
  Structure s = tree_structure(binarize(decompose(g, sig)), sig);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_EQ(s.tuples("child").size(), 4u);
  EXPECT_EQ(s.tuples("first-child").size(), 2u);
  EXPECT_EQ(s.tuples("label_seq").size(), 2u);
  EXPECT_EQ(s.tuples("label_a").size(), 2u);
}

TEST(Structures, W5NodeListsBothChildTuples) {
  const Signature sig = w5_signature();
  LabeledGraph g = eval_term(sig, parse_term("(prime W5 a b a b b)", sig));
  MDecPrimeTree t = binarize(decompose(g, sig));
  Structure s = tree_structure(t, sig);
  const auto& kids = t.root_node().children;
  std::vector<int> stored{t.root}, image{t.root};
  for (int c : kids) stored.push_back(c);
  for (int k : {4, 3, 2, 1, 0}) image.push_back(kids[static_cast<std::size_t>(k)]);
  EXPECT_EQ(s.tuples("children_W5").size(), 2u);
  EXPECT_TRUE(s.tuples("children_W5").count(stored));
  EXPECT_TRUE(s.tuples("children_W5").count(image));
  EXPECT_EQ(s.tuples("dist-child_W5"), (std::set<std::vector<int>>{{t.root, kids[0]}, {t.root, kids[4]}}));
}

TEST(Library, ModuleFormulaMatchesDefinition) {
  const PredicateLibrary lib = ms_predicate_library(sp_signature());
  auto d = lib.at("module");
  for (std::uint64_t code = 0; code < 64; ++code) {
    LabeledGraph g = digraph_from_code(kAb, 3, code);
    Structure s = graph_structure(g);
    ModelChecker mc(s);
    auto q = mc.prepare(d->body, d->params);
    const auto a = oracle::adjacency(g);
    for (std::uint32_t x = 1; x < 8; ++x) EXPECT_EQ(mc.eval(q, {x}), oracle::module_mask(a, x));
  }
  Rng rng(52);
  for (int r = 0; r < 40; ++r) {
    LabeledGraph g = random_digraph(kAb, rng, rng.uniform(4, 6));
    Structure s = graph_structure(g);
    ModelChecker mc(s);
    auto q = mc.prepare(d->body, d->params);
    const auto a = oracle::adjacency(g);
    for (std::uint32_t x = 1; x < (1u << g.size()); ++x) ASSERT_EQ(mc.eval(q, {x}), oracle::module_mask(a, x));
  }
}

TEST(Library, PathAndWholeSetExamples) {
  const Signature sig = sp_signature();
  const PredicateLibrary lib = ms_predicate_library(sig);
  LabeledGraph path(kAb, {{1, "a"}, {2, "a"}, {3, "a"}}, {{1, 2}, {2, 3}});
  Structure s = graph_structure(path);
  ModelChecker mc(s);
  auto module = mc.prepare(lib.at("module")->body, lib.at("module")->params);
  EXPECT_FALSE(mc.eval(module, {mask_of(path, {1, 3})}));
  EXPECT_TRUE(mc.eval(module, {mask_of(path, {1, 2, 3})}));

  LabeledGraph g = eval_term(sig, parse_term("(par (seq a b) b)", sig));
  Structure sg = graph_structure(g);
  ModelChecker mg(sg);
  auto pmodule = mg.prepare(lib.at("pmodule")->body, lib.at("pmodule")->params);
  EXPECT_FALSE(mg.eval(pmodule, {mask_of(g, g.vertices())}));
  EXPECT_TRUE(mg.eval(pmodule, {mask_of(g, {1, 2})}));
  EXPECT_FALSE(eval_set_predicate("pmodule", g, sig, {g.vertices()}));
}
