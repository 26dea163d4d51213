#include <gtest/gtest.h>

#include "modgraph/generators.hpp"
#include "modgraph/signature.hpp"
#include "modgraph/term.hpp"
#include "modgraph/text_format.hpp"
#include "oracles.hpp"

using namespace modgraph;

namespace {

const Alphabet kAb({"a", "b"});

LabeledGraph letter(Vertex v, const std::string& s) { return LabeledGraph(kAb, {{v, s}}, {}); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(Compose, BuiltinsOnTwoLetters) {
  std::vector<LabeledGraph> ab{letter(1, "a"), letter(1, "b")};
  LabeledGraph par = compose(SignatureOp::parallel(), ab);
  LabeledGraph seq = compose(SignatureOp::sequential(), ab);
  LabeledGraph clq = compose(SignatureOp::clique(), ab);
  EXPECT_EQ(par.size(), 2u);
  EXPECT_TRUE(par.edges().empty());
  EXPECT_EQ(seq.edges(), (std::set<Edge>{{1, 2}}));
  EXPECT_EQ(clq.edges(), (std::set<Edge>{{1, 2}, {2, 1}}));
  EXPECT_EQ(seq.label(1), "a");
}

TEST(Compose, PreservePolicyNeedsDisjointOperands) {
  EXPECT_EQ(code_of([] { compose(SignatureOp::parallel(), {letter(1, "a"), letter(1, "b")}, IdPolicy::kPreserve); }),
            ErrorCode::kOverlappingOperands);
  EXPECT_EQ(code_of([] { compose(SignatureOp::prime("W5", w5_graph()), {letter(1, "a")}); }), ErrorCode::kArityMismatch);
}

TEST(Compose, SizeLawOnRandomOperands) {
  Rng rng(3);
  const Signature sig = w5_signature();
  for (int r = 0; r < 100; ++r) {
    const SignatureOp& op = sig.ops()[rng.index(sig.ops().size())];
    const int k = op.is_builtin() ? rng.uniform(2, 4) : op.arity();
    std::vector<LabeledGraph> parts;
    std::size_t v = 0, e = 0;
    for (int i = 0; i < k; ++i) {
      parts.push_back(random_digraph(kAb, rng, rng.uniform(1, 3)));
      v += parts.back().size();
      e += parts.back().edges().size();
    }
    LabeledGraph c = compose(op, parts);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const bool joined = op.kind() == OpKind::kSequential ? i < j : op.kind() == OpKind::kPrime && op.graph().has_edge(i + 1, j + 1);
        if (joined) e += parts[static_cast<std::size_t>(i)].size() * parts[static_cast<std::size_t>(j)].size();
      }
    EXPECT_EQ(c.size(), v);
    EXPECT_EQ(c.edges().size(), e);
  }
}

TEST(Compose, CommutationUnderW5Automorphism) {
  Rng rng(4);
  const SignatureOp w5 = SignatureOp::prime("W5", w5_graph());
  for (int r = 0; r < 30; ++r) {
    std::vector<LabeledGraph> parts;
    Vertex offset = 0;
    for (int i = 0; i < 5; ++i) {
      LabeledGraph p = random_digraph(kAb, rng, rng.uniform(1, 3));
      parts.push_back(shift_ids(p, offset));
      offset += static_cast<Vertex>(p.size());
    }
    std::vector<LabeledGraph> reversed(parts.rbegin(), parts.rend());
    EXPECT_EQ(compose(w5, parts, IdPolicy::kPreserve), compose(w5, reversed, IdPolicy::kPreserve));
    // (1 5) alone is not an automorphism
    std::vector<LabeledGraph> swapped = parts;
    std::swap(swapped[0], swapped[4]);
    EXPECT_NE(compose(w5, parts, IdPolicy::kPreserve), compose(w5, swapped, IdPolicy::kPreserve));
  }
}

TEST(Compose, HPrimeProductEqualsHProductWithSwappedArguments) {
  Rng rng(8);
  const LabeledGraph hp = unlabeled_graph(5, {{5, 2}, {3, 2}, {3, 4}, {1, 4}});
  std::vector<LabeledGraph> parts;
  Vertex offset = 0;
  for (int i = 0; i < 5; ++i) {
    LabeledGraph p = random_digraph(kAb, rng, 2);
    parts.push_back(shift_ids(p, offset));
    offset += 2;
  }
  std::vector<LabeledGraph> swapped{parts[4], parts[1], parts[2], parts[3], parts[0]};
  EXPECT_EQ(substitute(w5_graph(), parts, IdPolicy::kPreserve), substitute(hp, swapped, IdPolicy::kPreserve));
}

TEST(Primality, Examples) {
  const LabeledGraph d3 = unlabeled_graph(3, {{1, 2}, {2, 1}, {2, 3}, {3, 2}, {1, 3}, {3, 1}});
  EXPECT_FALSE(is_prime(d3));
  EXPECT_TRUE(is_prime(w5_graph()));
  EXPECT_TRUE(is_prime(p3_graph()));
  EXPECT_TRUE(is_prime(directed_cycle(3)));
  EXPECT_EQ(code_of([] { SignatureOp::prime("D", unlabeled_graph(3, {{1, 2}})); }), ErrorCode::kInvalidSignature);
}

TEST(WeakRigidity, Operations) {
  EXPECT_TRUE(is_weakly_rigid_op(SignatureOp::sequential()));
  EXPECT_TRUE(is_weakly_rigid_op(SignatureOp::prime("W5", w5_graph())));
  EXPECT_FALSE(is_weakly_rigid_op(SignatureOp::prime("C5", directed_cycle(5))));
  EXPECT_THROW(is_weakly_rigid_op(SignatureOp::parallel()), Error);
}

TEST(WeakRigidity, Signatures) {
  EXPECT_TRUE(validate_weakly_rigid_signature(sp_signature()).accepted());
  EXPECT_TRUE(validate_weakly_rigid_signature(w5_signature()).accepted());
  EXPECT_TRUE(validate_weakly_rigid_signature(w5_signature(true)).accepted());
  Signature pc("pc", kAb, {SignatureOp::parallel(), SignatureOp::clique()});
  RigidityReport r = validate_weakly_rigid_signature(pc);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_FALSE(r.violations[0].orbit);
}

TEST(WeakRigidity, CyclesRejectedWithFullOrbit) {
  for (int n = 3; n <= 6; ++n) {
    Signature s("c", kAb, {SignatureOp::sequential(), SignatureOp::prime("C", directed_cycle(n))});
    RigidityReport r = validate_weakly_rigid_signature(s);
    ASSERT_EQ(r.violations.size(), 1u);
    ASSERT_TRUE(r.violations[0].orbit);
    VertexSet all;
    for (Vertex v = 1; v <= n; ++v) all.push_back(v);
    EXPECT_EQ(*r.violations[0].orbit, all);
  }
}

TEST(Distinguished, Rule) {
  EXPECT_EQ(select_distinguished(SignatureOp::sequential()), (VertexSet{1}));
  EXPECT_EQ(select_distinguished(SignatureOp::prime("W5", w5_graph())), (VertexSet{1, 5}));
  EXPECT_EQ(select_distinguished(SignatureOp::prime("P3", p3_graph())), (VertexSet{1}));
  EXPECT_EQ(code_of([] { select_distinguished(SignatureOp::prime("C4", directed_cycle(4))); }), ErrorCode::kNotWeaklyRigid);
}

TEST(CpEquations, W5) {
  auto eq = cp_equations(SignatureOp::prime("W5", w5_graph()));
  ASSERT_EQ(eq.size(), 1u);
  EXPECT_EQ(eq[0], Permutation::from_cycles(5, {{1, 5}, {2, 4}}));
  EXPECT_TRUE(cp_equations(SignatureOp::prime("P3", p3_graph())).empty());
}

TEST(SignatureText, RoundTripAndErrors) {
  Signature s = parse_signature(format_signature(w5_signature()));
  EXPECT_EQ(s.name(), "w5");
  EXPECT_EQ(s.ops().size(), 3u);
  EXPECT_EQ(s.at("W5").graph(), w5_graph());
  EXPECT_EQ(code_of([] { parse_signature("alphabet a\nop nope\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_signature("op seq\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_signature("alphabet a\nprime Q 3 : 1->2\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_signature("alphabet a\nop seq\nop seq\n"); }), ErrorCode::kParseError);
}

TEST(Signature, RejectsIsomorphicPrimeOps) {
  Signature s = w5_signature();
  EXPECT_THROW(s.add(SignatureOp::prime("W5b", unlabeled_graph(5, {{5, 2}, {3, 2}, {3, 4}, {1, 4}}))), Error);
}

TEST(Terms, ParseEvalAndErrors) {
  const Signature sig = w5_signature();
  LabeledGraph g = eval_term(sig, parse_term("(seq a b)", sig));
  EXPECT_EQ(g.edges(), (std::set<Edge>{{1, 2}}));
  Term t = parse_term("(seq a (seq b a))", sig);
  EXPECT_EQ(t.children.size(), 3u);  // flattened
  EXPECT_EQ(to_string(parse_term("(prime W5 a b a b a)", sig), &sig), "(prime W5 a b a b a)");
  EXPECT_EQ(code_of([&] { parse_term("(seq a c)", sig); }), ErrorCode::kUnknownSymbol);
  EXPECT_EQ(code_of([&] { parse_term("(W5 a b)", sig); }), ErrorCode::kArityMismatch);
  EXPECT_EQ(code_of([&] { parse_term("(clique a b)", sig); }), ErrorCode::kUnknownOp);
  EXPECT_EQ(code_of([&] { parse_term("(seq a", sig); }), ErrorCode::kSyntaxError);
  Term bad{"seq", {Term::leaf("a"), Term{"seq", {Term::leaf("a"), Term::leaf("b")}}}};
  EXPECT_EQ(code_of([&] { validate_term(sig, bad); }), ErrorCode::kInvalidArgument);
}

TEST(Terms, EvalMatchesDirectConstruction) {
  Rng rng(21);
  for (bool dual : {false, true}) {
    const Signature sig = w5_signature(dual);
    for (int r = 0; r < 100; ++r) {
      Term t = random_term(sig, rng, 5, 12);
      auto [lab, edges] = oracle::term_graph(sig, t);
      EXPECT_EQ(eval_term(sig, t), LabeledGraph(kAb, lab, edges)) << to_string(t, &sig);
    }
  }
}

TEST(Terms, DagSignaturesGiveTransitiveDags) {
  Rng rng(22);
  const Signature sig = w5_signature();
  for (int r = 0; r < 100; ++r) {
    LabeledGraph g = eval_term(sig, random_term(sig, rng, 6, 16));
    EXPECT_TRUE(is_dag(g));
    EXPECT_TRUE(is_transitive(g));
  }
}
