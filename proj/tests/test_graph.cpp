#include <gtest/gtest.h>

#include "modgraph/generators.hpp"
#include "modgraph/graph.hpp"
#include "modgraph/isomorphism.hpp"
#include "oracles.hpp"

using namespace modgraph;

namespace {

const Alphabet kAb({"a", "b"});

LabeledGraph h_prime() {
  // W5 drawn with the outer vertices renamed: 5->2 3->2 3->4 1->4
  return unlabeled_graph(5, {{5, 2}, {3, 2}, {3, 4}, {1, 4}});
}

}  // namespace

TEST(LabeledGraph, RejectsMalformedInput) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code([] { LabeledGraph(kAb, {{1, "a"}}, {{1, 1}}); }), ErrorCode::kInvalidGraph);
  EXPECT_EQ(code([] { LabeledGraph(kAb, {{1, "a"}}, {{1, 2}}); }), ErrorCode::kVertexNotInGraph);
  EXPECT_EQ(code([] { LabeledGraph(kAb, {{1, "c"}}, {}); }), ErrorCode::kUnknownSymbol);
  EXPECT_EQ(code([] { LabeledGraph(kAb, {{0, "a"}}, {}); }), ErrorCode::kInvalidGraph);
  EXPECT_THROW(Alphabet({"a", "a"}), Error);
  EXPECT_THROW(Alphabet(std::vector<std::string>{}), Error);
}

TEST(LabeledGraph, Accessors) {
  LabeledGraph g(kAb, {{2, "a"}, {7, "b"}, {9, "a"}}, {{2, 7}, {9, 2}});
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.vertices(), (VertexSet{2, 7, 9}));
  EXPECT_TRUE(g.has_edge(2, 7));
  EXPECT_FALSE(g.has_edge(7, 2));
  EXPECT_EQ(g.label(7), "b");
  EXPECT_EQ(g.position(9), 2);
  EXPECT_EQ(g.position(5), -1);
  EXPECT_EQ(induced_subgraph(g, {2, 9}).edges().size(), 1u);
}

TEST(IsModule, AgreesWithDefinitionOnAllThreeVertexGraphs) {
  for (std::uint64_t code = 0; code < 64; ++code) {
    LabeledGraph g = digraph_from_code(kAb, 3, code);
    const auto a = oracle::adjacency(g);
    for (std::uint32_t x = 1; x < 8; ++x) EXPECT_EQ(is_module(g, oracle::to_set(g, x)), oracle::module_mask(a, x)) << code << ' ' << x;
  }
}

TEST(IsModule, AgreesWithDefinitionOnRandomGraphs) {
  Rng rng(11);
  for (int r = 0; r < 60; ++r) {
    LabeledGraph g = random_digraph(kAb, rng, rng.uniform(1, 8));
    const auto a = oracle::adjacency(g);
    const std::uint32_t full = (1u << g.size()) - 1;
    for (std::uint32_t x = 1; x <= full; ++x) ASSERT_EQ(is_module(g, oracle::to_set(g, x)), oracle::module_mask(a, x));
  }
}

TEST(IsModule, TrivialModules) {
  LabeledGraph p3 = p3_graph();
  EXPECT_TRUE(is_module(p3, {1}));
  EXPECT_TRUE(is_module(p3, {1, 2, 3}));
  EXPECT_FALSE(is_module(p3, {1, 3}));
}

TEST(InternallyDisconnected, Basics) {
  LabeledGraph g(kAb, {{1, "a"}, {2, "a"}, {3, "b"}}, {{1, 2}});
  EXPECT_TRUE(is_internally_disconnected(g, {1, 2, 3}));
  EXPECT_FALSE(is_internally_disconnected(g, {1, 2}));
  try {
    is_internally_disconnected(g, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySet);
  }
}

TEST(Isomorphism, TranspositionCarriesHPrimeOntoH) {
  auto all = all_isomorphisms(h_prime(), w5_graph(), false);
  const Permutation t15 = Permutation::from_cycles(5, {{1, 5}});
  EXPECT_NE(std::find(all.begin(), all.end(), t15), all.end());
  auto one = find_isomorphism(h_prime(), w5_graph(), false);
  ASSERT_TRUE(one);
  EXPECT_EQ(apply_vertex_map(h_prime(), *one, w5_graph().vertices()), w5_graph());
}

TEST(Isomorphism, DifferentEdgeCountsGiveNone) {
  EXPECT_FALSE(find_isomorphism(p3_graph(), directed_cycle(3), false));
}

TEST(Isomorphism, MatchesBruteForceAndIsSymmetric) {
  Rng rng(5);
  for (int r = 0; r < 150; ++r) {
    const int n = rng.uniform(1, 6);
    LabeledGraph g = random_digraph(kAb, rng, n, 0.5);
    LabeledGraph h = random_digraph(kAb, rng, n, 0.5);
    const bool labels = rng.coin();
    const bool expect = !oracle::isomorphisms(g, h, labels).empty();
    auto gh = find_isomorphism(g, h, labels);
    auto hg = find_isomorphism(h, g, labels);
    ASSERT_EQ(gh.has_value(), expect);
    ASSERT_EQ(hg.has_value(), expect);
    if (gh && !labels) {
      EXPECT_EQ(apply_vertex_map(strip_labels(g), *gh, h.vertices()), strip_labels(h));
    }
    EXPECT_EQ(all_isomorphisms(g, h, labels).size(), oracle::isomorphisms(g, h, labels).size());
  }
}

TEST(Isomorphism, SearchBoundFailsLoudly) {
  LabeledGraph big = strip_labels(directed_cycle(9));
  try {
    find_isomorphism(big, big, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSizeLimitExceeded);
  }
  EXPECT_TRUE(find_isomorphism(big, big, false, SearchLimits{9}));
}

TEST(Automorphisms, W5GroupAndOrbits) {
  AutomorphismGroup aut = automorphism_group(w5_graph());
  ASSERT_EQ(aut.order(), 2u);
  EXPECT_TRUE(aut.elements[0].is_identity());
  EXPECT_EQ(aut.elements[1], Permutation::from_cycles(5, {{1, 5}, {2, 4}}));
  EXPECT_EQ(aut.elements[1].to_string(), "(1 5)(2 4)");
  EXPECT_EQ(aut.orbits, (std::vector<VertexSet>{{1, 5}, {2, 4}, {3}}));
  EXPECT_FALSE(is_vertex_transitive(w5_graph()));
}

TEST(Automorphisms, CyclesAreTransitive) {
  for (int n = 2; n <= 6; ++n) {
    EXPECT_TRUE(is_vertex_transitive(directed_cycle(n))) << n;
    EXPECT_EQ(automorphism_group(directed_cycle(n)).order(), static_cast<std::size_t>(n));
  }
}

TEST(Automorphisms, GroupLawsAndBruteForceAgreement) {
  Rng rng(9);
  for (int r = 0; r < 80; ++r) {
    LabeledGraph g = strip_labels(random_digraph(kAb, rng, rng.uniform(1, 6), 0.3));
    AutomorphismGroup aut = automorphism_group(g);
    ASSERT_EQ(aut.order(), oracle::isomorphisms(g, g, false).size());
    for (const auto& p : aut.elements) {
      EXPECT_TRUE(aut.contains(p.inverse()));
      for (const auto& q : aut.elements) EXPECT_TRUE(aut.contains(p.after(q)));
    }
    for (const auto& p : all_isomorphisms(g, g, false)) EXPECT_TRUE(aut.contains(p));
    EXPECT_EQ(aut.orbits.size() == 1, is_vertex_transitive(g));
  }
}

TEST(Permutation, Basics) {
  Permutation p = Permutation::from_cycles(4, {{1, 3, 2}});
  EXPECT_EQ(p(1), 3);
  EXPECT_EQ(p(3), 2);
  EXPECT_EQ(p.at(0), 2);
  EXPECT_TRUE(p.after(p.inverse()).is_identity());
  EXPECT_EQ(Permutation::identity(3).to_string(), "id");
  EXPECT_THROW(Permutation(std::vector<int>{1, 1}), Error);
}

TEST(DagHelpers, Basics) {
  EXPECT_TRUE(is_dag(w5_graph()));
  EXPECT_TRUE(is_transitive(w5_graph()));
  EXPECT_TRUE(is_dag(p3_graph()));
  EXPECT_FALSE(is_transitive(p3_graph()));
  EXPECT_FALSE(is_dag(directed_cycle(3)));
}
