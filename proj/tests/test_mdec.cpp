#include <gtest/gtest.h>

#include "modgraph/generators.hpp"
#include "modgraph/mdec.hpp"
#include "oracles.hpp"

using namespace modgraph;

namespace {

const Alphabet kAb({"a", "b"});

Signature open_signature() { return Signature("open", kAb, {}); }

// Children partition the parent's module and each child module is what the
// quotient op says it is.
void expect_well_formed(const MDecTree& t, const LabeledGraph& g) {
  ASSERT_EQ(t.root_node().module, g.vertices());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const MDecNode& n = t.nodes[i];
    if (n.kind == NodeKind::kLeaf) {
      ASSERT_EQ(n.module.size(), 1u);
      EXPECT_EQ(n.label, g.label(n.module[0]));
      continue;
    }
    ASSERT_GE(n.children.size(), 2u);
    VertexSet cover;
    for (int c : n.children) {
      EXPECT_EQ(t.at(c).parent, static_cast<int>(i));
      EXPECT_FALSE(intersects(cover, t.at(c).module));
      cover = set_union(cover, t.at(c).module);
    }
    EXPECT_EQ(cover, n.module);
  }
}

}  // namespace

TEST(MaximalPrimeModules, SeqOfThreeLetters) {
  const Signature sig = sp_signature();
  LabeledGraph g = eval_term(sig, parse_term("(seq a b a)", sig));
  ModuleSplit s = maximal_prime_modules(g);
  EXPECT_EQ(s.kind, SplitKind::kSequential);
  EXPECT_EQ(s.blocks, (std::vector<VertexSet>{{1}, {2}, {3}}));
  MDecTree t = decompose(g, sig);
  EXPECT_EQ(t.root_node().label, "seq");
  ASSERT_EQ(t.root_node().children.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(t.at(t.root_node().children[static_cast<std::size_t>(i)]).module, (VertexSet{i + 1}));
}

TEST(MaximalPrimeModules, QuotientOfW5Substitution) {
  const Signature sig = w5_signature();
  LabeledGraph g = eval_term(sig, parse_term("(prime W5 a (seq a b) b (par a b) a)", sig));
  ModuleSplit s = maximal_prime_modules(g);
  EXPECT_EQ(s.kind, SplitKind::kPrime);
  EXPECT_EQ(s.blocks.size(), 5u);
  EXPECT_TRUE(find_isomorphism(quotient_graph(g, s.blocks), w5_graph(), false));
}

TEST(Binarize, RightComb) {
  const Signature sig = sp_signature();
  MDecTree t = decompose(eval_term(sig, parse_term("(seq a b a)", sig)), sig);
  MDecPrimeTree b = binarize(t);
  EXPECT_EQ(b.size(), 5u);
  const MDecNode& u = b.root_node();
  ASSERT_EQ(u.children.size(), 2u);
  EXPECT_EQ(b.at(u.children[0]).module, (VertexSet{1}));
  const MDecNode& u2 = b.at(u.children[1]);
  EXPECT_EQ(u2.label, "seq");
  EXPECT_EQ(u2.module, (VertexSet{2, 3}));
  ASSERT_EQ(u2.children.size(), 2u);
  EXPECT_EQ(b.at(u2.children[0]).module, (VertexSet{2}));
  EXPECT_EQ(b.at(u2.children[1]).module, (VertexSet{3}));
  EXPECT_TRUE(b.is_first_child(b.root, u.children[0]));
  EXPECT_FALSE(b.is_first_child(b.root, u.children[1]));
  EXPECT_EQ(format_tree(b), "seq {1 2 3}\n  a {1} (first)\n  seq {2 3}\n    b {2} (first)\n    a {3}\n");
}

TEST(Binarize, SeqNodesAreBinaryWithNonSeqFirstChild) {
  Rng rng(31);
  const Signature sig = w5_signature();
  for (int r = 0; r < 200; ++r) {
    MDecPrimeTree b = binarize(decompose(eval_term(sig, random_term(sig, rng, 6, 20)), sig));
    for (const auto& n : b.nodes) {
      if (n.kind != NodeKind::kSequential) continue;
      ASSERT_EQ(n.children.size(), 2u);
      EXPECT_NE(b.at(n.children[0]).kind, NodeKind::kSequential);
    }
  }
}

TEST(Decompose, MatchesBruteForceOnAllSmallDigraphs) {
  for (int n = 1; n <= 3; ++n) {
    const int pairs = n * (n - 1);
    for (std::uint64_t code = 0; code < (1ull << pairs); ++code) {
      LabeledGraph g = digraph_from_code(kAb, n, code);
      Signature sig = open_signature();
      MDecTree t = decompose_open(g, sig);
      EXPECT_EQ(prime_module_family(t), oracle::strong_modules_except_root(g)) << n << ' ' << code;
      expect_well_formed(t, g);
    }
  }
}

TEST(Decompose, MatchesBruteForceOnRandomDigraphs) {
  Rng rng(32);
  for (int r = 0; r < 300; ++r) {
    LabeledGraph g = random_digraph(kAb, rng, rng.uniform(1, 8), rng.coin() ? 0.2 : 0.5);
    Signature sig = open_signature();
    MDecTree t = decompose_open(g, sig);
    ASSERT_EQ(prime_module_family(t), oracle::strong_modules_except_root(g)) << format_graph(g);
    EXPECT_EQ(brute_force_prime_modules(g), oracle::strong_modules_except_root(g));
    expect_well_formed(t, g);
    EXPECT_EQ(reconstruct(t, sig), g);
  }
}

TEST(Decompose, RoundTripOverSignatures) {
  Rng rng(33);
  for (bool dual : {false, true}) {
    const Signature sig = w5_signature(dual);
    for (int r = 0; r < 300; ++r) {
      LabeledGraph g = eval_term(sig, random_term(sig, rng, 6, 24));
      MDecTree t = decompose(g, sig);
      ASSERT_EQ(reconstruct(t, sig), g);
      ASSERT_EQ(reconstruct(binarize(t), sig), g);
      EXPECT_EQ(eval_term(sig, to_term(t)).size(), g.size());
    }
  }
}

TEST(Decompose, PerturbationKeepsReconstruction) {
  Rng rng(34);
  const Signature sig = w5_signature();
  for (int r = 0; r < 100; ++r) {
    LabeledGraph g = eval_term(sig, random_term(sig, rng, 5, 16));
    MDecTree t = decompose(g, sig);
    for (int k = 0; k < 5; ++k) EXPECT_EQ(reconstruct(perturb_tree(t, sig, rng), sig), g);
  }
}

TEST(Decompose, FlippedCombsBreakReconstruction) {
  const Signature sig = sp_signature();
  LabeledGraph g = eval_term(sig, parse_term("(seq a b a)", sig));
  MDecPrimeTree bad = detail::binarize_impl(decompose(g, sig), true);
  EXPECT_NE(reconstruct(bad, sig), g);
}

TEST(Decompose, SingleVertexIsALeaf) {
  LabeledGraph g(kAb, {{4, "b"}}, {});
  MDecTree t = decompose(g, sp_signature());
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.root_node().kind, NodeKind::kLeaf);
  EXPECT_EQ(t.root_node().label, "b");
  EXPECT_TRUE(prime_module_family(t).empty());
}

TEST(Decompose, ForeignPrimeQuotientCarriesTheQuotient) {
  // P4 = 1->2->3->4 is prime and not W5
  LabeledGraph g(kAb, {{1, "a"}, {2, "a"}, {3, "b"}, {4, "b"}}, {{1, 2}, {2, 3}, {3, 4}});
  try {
    decompose(g, w5_signature());
    FAIL();
  } catch (const NotInSignature& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotInSignature);
    EXPECT_EQ(e.quotient().size(), 4u);
    EXPECT_TRUE(is_prime(e.quotient()));
  }
}

TEST(Decompose, MissingBuiltinIsReported) {
  const Signature sig("seqonly", kAb, {SignatureOp::sequential()});
  LabeledGraph g(kAb, {{1, "a"}, {2, "b"}}, {});
  EXPECT_THROW(decompose(g, sig), NotInSignature);
}

TEST(Decompose, OpenModeNamesNewQuotients) {
  LabeledGraph g(kAb, {{1, "a"}, {2, "a"}, {3, "b"}, {4, "b"}, {5, "a"}}, {{1, 2}, {2, 3}, {3, 4}});
  Signature sig = open_signature();
  MDecTree t = decompose_open(g, sig);
  EXPECT_EQ(t.root_node().label, "par");
  ASSERT_TRUE(sig.find("Q1"));
  EXPECT_EQ(sig.find("Q1")->arity(), 4);
  EXPECT_EQ(reconstruct(t, sig), g);
}

TEST(Decompose, AutomorphismsMapTreeModulesToTreeModules) {
  Rng rng(35);
  for (int r = 0; r < 100; ++r) {
    LabeledGraph g = strip_labels(random_digraph(kAb, rng, rng.uniform(2, 6), 0.3));
    Signature sig("open", g.alphabet(), {});
    auto family = prime_module_family(decompose_open(g, sig));
    for (const auto& p : automorphism_group(g).elements) {
      for (const auto& m : family) {
        VertexSet img;
        for (Vertex v : m) img.push_back(g.vertex_at(p.at(g.position(v))));
        std::sort(img.begin(), img.end());
        EXPECT_TRUE(std::binary_search(family.begin(), family.end(), img));
      }
    }
  }
}
