#include <gtest/gtest.h>

#include "modgraph/generators.hpp"
#include "modgraph/selftest.hpp"
#include "modgraph/transduction.hpp"

using namespace modgraph;

namespace {

struct Pipeline {
  LabeledGraph g;
  MDecPrimeTree tree;
  NodeClassification cls;
  EncodingTables enc;
};

Pipeline run(const Signature& sig, const std::string& term) {
  Pipeline p;
  p.g = eval_term(sig, parse_term(term, sig));
  p.tree = binarize(decompose(p.g, sig));
  p.cls = classify_nodes(p.tree, sig);
  p.enc = compute_encoding(p.tree, p.cls, sig);
  return p;
}

Pipeline run(const Signature& sig, const LabeledGraph& g) {
  Pipeline p;
  p.g = g;
  p.tree = binarize(decompose(g, sig));
  p.cls = classify_nodes(p.tree, sig);
  p.enc = compute_encoding(p.tree, p.cls, sig);
  return p;
}

std::vector<std::string> names(const ReprStructure& r) { return r.structure.element_names(); }

std::uint64_t mask_of(const LabeledGraph& g, const VertexSet& x) {
  std::uint64_t m = 0;
  for (int p : positions_of(g, x)) m |= std::uint64_t{1} << p;
  return m;
}

std::map<std::string, std::pair<Sort, std::uint64_t>> env_of(const LabeledGraph& g, const std::array<VertexSet, 4>& reps) {
  std::map<std::string, std::pair<Sort, std::uint64_t>> env;
  for (int i = 0; i < 4; ++i) env["X" + std::to_string(i)] = {Sort::kSet, mask_of(g, reps[static_cast<std::size_t>(i)])};
  return env;
}

}  // namespace

TEST(Encoding, ParallelPair) {
  const Signature sig = sp_signature();
  Pipeline p = run(sig, "(par a b)");
  EXPECT_EQ(p.cls.of(p.tree.root), NodeClass::kN1);
  EXPECT_EQ(p.enc.kappa_of(1, 1), p.tree.root);
  EXPECT_EQ(p.enc.kappa_of(1, 2), p.tree.root);
  for (Vertex v : {1, 2}) {
    EXPECT_FALSE(p.enc.kappa_of(2, v));
    EXPECT_FALSE(p.enc.kappa_of(3, v));
  }
  ReprStructure r0 = build_repr0(p.tree, p.enc, sig);
  EXPECT_EQ(names(r0), (std::vector<std::string>{"(1,0)", "(2,0)", "(1,1)", "(2,1)"}));
  EXPECT_TRUE(r0.equivalent(2, 3));
  EXPECT_FALSE(r0.equivalent(0, 1));
  auto reps = choose_representatives(p.enc, smallest_leaf_rule());
  EXPECT_EQ(reps[1], (VertexSet{1}));
  EXPECT_EQ(reps[0], (VertexSet{1, 2}));
  EXPECT_TRUE(reps[2].empty() && reps[3].empty());
}

TEST(Encoding, SequentialPair) {
  const Signature sig = sp_signature();
  Pipeline p = run(sig, "(seq a b)");
  EXPECT_EQ(p.cls.of(p.tree.root), NodeClass::kN3);
  EXPECT_EQ(p.enc.kappa_of(3, 1), p.tree.root);
  EXPECT_FALSE(p.enc.kappa_of(3, 2));
  EXPECT_EQ(names(build_repr0(p.tree, p.enc, sig)), (std::vector<std::string>{"(1,0)", "(2,0)", "(1,3)"}));
}

TEST(Encoding, ParallelOfSequentialPairs) {
  const Signature sig = sp_signature();
  Pipeline p = run(sig, "(par (seq a b) (seq a b))");
  EXPECT_EQ(p.cls.of(p.tree.root), NodeClass::kN2);
  EXPECT_EQ(p.cls.count(NodeClass::kN3), 2u);
  EXPECT_EQ(p.enc.mu[2][static_cast<std::size_t>(p.tree.root)], (VertexSet{1, 3}));
  EXPECT_EQ(p.enc.kappa_of(2, 3), p.tree.root);
  EXPECT_FALSE(p.enc.kappa_of(2, 2));
  EXPECT_TRUE(check_encoding(p.tree, p.cls, p.enc).empty());
}

TEST(Encoding, W5UsesBothDistinguishedChildren) {
  const Signature sig = w5_signature();
  Pipeline p = run(sig, "(prime W5 a b a b a)");
  EXPECT_EQ(p.enc.mu[3][static_cast<std::size_t>(p.tree.root)], (VertexSet{1, 5}));
  EXPECT_EQ(p.enc.nu[static_cast<std::size_t>(p.tree.root)], (VertexSet{2, 3, 4}));
}

TEST(Encoding, WrongCommutativeOperationIsRejected) {
  const Signature sp = sp_signature();
  Pipeline p = run(sp, "(par a b)");
  EXPECT_THROW(classify_nodes(p.tree, w5_signature(true)), Error);
}

TEST(Encoding, InvariantsOnRandomGraphs) {
  Rng rng(61);
  for (bool dual : {false, true}) {
    const Signature sig = w5_signature(dual);
    for (int r = 0; r < 150; ++r) {
      Pipeline p = run(sig, eval_term(sig, random_term(sig, rng, 6, 20)));
      ASSERT_TRUE(check_encoding(p.tree, p.cls, p.enc).empty());
      KappaLemmaReport k = check_kappa_lemma(p.g, p.tree, p.enc, sig);
      EXPECT_EQ(k.checked, 3 * p.g.size());
      ASSERT_TRUE(k.ok()) << k.mismatches.front();
      std::size_t total = 0;
      for (const auto& x : choose_representatives(p.enc, smallest_leaf_rule())) total += x.size();
      EXPECT_EQ(total, p.tree.size());
    }
  }
}

TEST(Repr, IsomorphicToTreeForEveryRule) {
  Rng rng(62);
  for (bool dual : {false, true}) {
    const Signature sig = w5_signature(dual);
    for (int r = 0; r < 100; ++r) {
      Pipeline p = run(sig, eval_term(sig, random_term(sig, rng, 6, 20)));
      for (const auto& rule : {smallest_leaf_rule(), largest_leaf_rule(), random_leaf_rule(rng)}) {
        IsoVerdict v = verify_isomorphism(build_repr(p.tree, p.enc, sig, rule), p.tree, sig);
        ASSERT_TRUE(v.ok) << v.reason;
      }
    }
  }
}

TEST(Repr, CorruptionIsDetected) {
  const Signature sig = w5_signature();
  Pipeline p = run(sig, "(seq (prime W5 a b a (par a b) b) a)");
  ReprStructure r = build_repr(p.tree, p.enc, sig);
  ASSERT_TRUE(verify_isomorphism(r, p.tree, sig).ok);

  ReprStructure dropped = r;
  dropped.structure.remove("child", *r.structure.tuples("child").begin());
  EXPECT_FALSE(verify_isomorphism(dropped, p.tree, sig).ok);

  ReprStructure moved = r;
  std::swap(moved.elements[0].node, moved.elements[1].node);
  EXPECT_FALSE(verify_isomorphism(moved, p.tree, sig).ok);

  ReprStructure shrunk = r;
  shrunk.elements.pop_back();
  EXPECT_FALSE(verify_isomorphism(shrunk, p.tree, sig).ok);
}

TEST(Repr, RepresentativeOutsideFiberIsRejected) {
  const Signature sig = sp_signature();
  Pipeline p = run(sig, "(par a b)");
  EXPECT_THROW(choose_representatives(p.enc, [](int, const VertexSet&) { return Vertex{99}; }), Error);
  std::array<VertexSet, 4> reps{VertexSet{1, 2}, VertexSet{1}, VertexSet{}, VertexSet{2}};
  EXPECT_THROW(build_repr(p.tree, p.enc, sig, reps), Error);
}

TEST(Schema, DomainFormulas) {
  const Signature sig = sp_signature();
  TransductionSchema schema(sig);
  Pipeline p = run(sig, "(par a b)");
  Structure s = graph_structure(p.g);
  ModelChecker mc(s);
  auto reps = choose_representatives(p.enc, smallest_leaf_rule());
  EXPECT_TRUE(mc.check(schema.phi(), env_of(p.g, reps)));
  auto doubled = reps;
  doubled[1] = {1, 2};
  EXPECT_FALSE(mc.check(schema.phi(), env_of(p.g, doubled)));
  auto missing = reps;
  missing[1] = {};
  EXPECT_FALSE(mc.check(schema.phi(), env_of(p.g, missing)));
}

TEST(Schema, Psi2HoldsExactlyOnX2) {
  const Signature sig = sp_signature();
  TransductionSchema schema(sig);
  Pipeline p = run(sig, "(par (seq a b) (seq b a))");
  auto reps = choose_representatives(p.enc, smallest_leaf_rule());
  ASSERT_EQ(reps[2].size(), 1u);
  Structure s = graph_structure(p.g);
  ModelChecker mc(s);
  auto env = env_of(p.g, reps);
  for (int pos = 0; pos < static_cast<int>(p.g.size()); ++pos) {
    env["x"] = {Sort::kElement, static_cast<std::uint64_t>(pos)};
    const bool in = std::binary_search(reps[2].begin(), reps[2].end(), p.g.vertex_at(pos));
    EXPECT_EQ(mc.check(schema.psi(2), env), in);
  }
}

TEST(Schema, ThetaArgumentChecks) {
  TransductionSchema schema(w5_signature());
  EXPECT_THROW(schema.theta("nope", {0}), Error);
  EXPECT_THROW(schema.theta("child", {0}), Error);
  EXPECT_THROW(schema.theta("child", {0, 4}), Error);
  EXPECT_NO_THROW(schema.theta("children_W5", {3, 0, 0, 0, 0, 0}));
}

TEST(Schema, ApplicationReproducesTheTree) {
  Rng rng(63);
  for (bool dual : {false, true}) {
    const Signature sig = w5_signature(dual);
    TransductionSchema schema(sig);
    for (int r = 0; r < 12; ++r) {
      LabeledGraph g = eval_term(sig, random_term(sig, rng, 4, 6));
      Pipeline p = run(sig, g);
      ReprStructure out = apply_schema(g, schema, choose_representatives(p.enc, smallest_leaf_rule()));
      attach_nodes(out, p.tree);
      IsoVerdict v = verify_isomorphism(out, p.tree, sig);
      ASSERT_TRUE(v.ok) << v.reason << " on " << format_graph(g);
    }
  }
}

TEST(Predicates, ArgumentErrors) {
  const Signature sig = sp_signature();
  LabeledGraph g = eval_term(sig, parse_term("(seq a b)", sig));
  auto code = [&](const std::string& name, const std::vector<PredicateArg>& args) {
    try {
      eval_set_predicate(name, g, sig, args);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code("frob", {VertexSet{1}}), ErrorCode::kUnknownPredicate);
  EXPECT_EQ(code("module", {}), ErrorCode::kArityMismatch);
  EXPECT_EQ(code("module", {Vertex{1}}), ErrorCode::kSortMismatch);
  EXPECT_EQ(code("kappa0", {VertexSet{1}, Vertex{7}}), ErrorCode::kVertexNotInGraph);
  EXPECT_EQ(code("kappa0", {VertexSet{1}, VertexSet{1}}), ErrorCode::kSortMismatch);
  EXPECT_TRUE(eval_set_predicate("kappa0", g, sig, {VertexSet{1}, Vertex{1}}));
  EXPECT_TRUE(eval_set_predicate("kappa3", g, sig, {VertexSet{1, 2}, Vertex{1}}));
  EXPECT_FALSE(eval_set_predicate("kappa3", g, sig, {VertexSet{1, 2}, Vertex{2}}));
}

TEST(Predicates, NotWeaklyRigidSignatureIsRefused) {
  const Alphabet ab({"a", "b"});
  Signature cyc("c", ab, {SignatureOp::sequential(), SignatureOp::prime("C4", directed_cycle(4))});
  try {
    ms_predicate_library(cyc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotWeaklyRigid);
  }
  EXPECT_THROW(TransductionSchema{cyc}, Error);
}

TEST(Predicates, FormulasAgreeWithAlgorithmsOnAllSmallGraphs) {
  const Signature sig = sp_signature();
  const PredicateLibrary lib = ms_predicate_library(sig);
  const Alphabet ab({"a", "b"});
  Rng rng(64);
  std::size_t checked = 0;
  for (int n = 1; n <= 3; ++n)
    for (std::uint64_t code = 0; code < (1ull << (n * (n - 1))); ++code) {
      LabeledGraph g = digraph_from_code(ab, n, code);
      auto bad = predicate_agreement(g, sig, lib, true, rng, 0, &checked);
      ASSERT_TRUE(bad.empty()) << bad.front() << " on " << format_graph(g);
    }
  EXPECT_GT(checked, 0u);
}

TEST(Predicates, FormulasAgreeOnSampledBindings) {
  Rng rng(65);
  const Alphabet ab({"a", "b"});
  for (bool dual : {false, true}) {
    const Signature sig = w5_signature(dual);
    const PredicateLibrary lib = ms_predicate_library(sig);
    for (int r = 0; r < 6; ++r) {
      LabeledGraph g = r % 2 ? eval_term(sig, random_term(sig, rng, 3, 6)) : random_digraph(ab, rng, rng.uniform(2, 5));
      if (g.size() > 6) continue;
      auto bad = predicate_agreement(g, sig, lib, false, rng, 3);
      ASSERT_TRUE(bad.empty()) << bad.front() << " on " << format_graph(g);
    }
  }
}
