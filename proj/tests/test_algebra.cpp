#include <gtest/gtest.h>

#include <set>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace hyperq;

namespace {

std::set<Table> tables_of(const CloneSlice& s) {
  std::set<Table> out;
  for (const auto& op : s.ops) out.insert(op.table);
  return out;
}

}  // namespace

TEST(FiniteAlgebra, ValidatesTables) {
  EXPECT_THROW(fx::magma("bad", 2, {0, 1, 2, 0}), std::invalid_argument);
  EXPECT_THROW(fx::magma("bad", 2, {0, 1, 1}), std::invalid_argument);
  EXPECT_THROW(fx::magma("bad", 0, {}), std::invalid_argument);
  EXPECT_THROW(FiniteAlgebra("bad", fx::binary(), 2, {}), std::invalid_argument);
}

TEST(FiniteAlgebra, WithSignatureReordersTables) {
  Signature fg = parse_signature("sig f/2 g/1");
  Signature gf = parse_signature("sig g/1 f/2");
  FiniteAlgebra a("a", fg, 2, {{0, 0, 0, 1}, {1, 0}});
  FiniteAlgebra b = a.with_signature(gf);
  EXPECT_EQ(b.table("g"), (Table{1, 0}));
  EXPECT_EQ(b.table(1), (Table{0, 0, 0, 1}));
  EXPECT_THROW(a.with_signature(fx::binary()), std::invalid_argument);
}

TEST(EvalTerm, Examples) {
  EXPECT_EQ(eval_term(fx::cyclic(3), fx::term("x"), {{"x", 2}}), 2u);
  EXPECT_EQ(eval_term(fx::left_zero(), fx::term("f(x,f(y,x))"), {{"x", 1}, {"y", 0}}), 1u);
  EXPECT_EQ(eval_term(fx::cyclic(2), fx::term("f(x,f(x,y))"), {{"x", 1}, {"y", 1}}), 1u);
}

TEST(EvalTerm, Errors) {
  EXPECT_THROW(eval_term(fx::cyclic(2), fx::term("f(x,y)"), {{"x", 1}}), EvalError);
  EXPECT_THROW(eval_term(fx::cyclic(2), fx::term("x"), {{"x", 5}}), EvalError);
}

TEST(TermOperation, Examples) {
  EXPECT_EQ(term_operation(fx::cyclic(3), fx::term("x1"), 2).table, (Table{0, 0, 0, 1, 1, 1, 2, 2, 2}));
  EXPECT_EQ(term_operation(fx::cyclic(2), fx::term("f(x1,x2)"), 2).table, (Table{0, 1, 1, 0}));
  EXPECT_EQ(term_operation(fx::cyclic(2), fx::term("f(x1,f(x1,x2))"), 2).table, (Table{0, 1, 0, 1}));
  EXPECT_THROW(term_operation(fx::cyclic(2), fx::term("f(x1,x3)"), 2), EvalError);
  EXPECT_THROW(term_operation(fx::cyclic(2), fx::term("f(x,y)"), 2), EvalError);
}

TEST(CloneSlice, Examples) {
  CloneSlice meet = enumerate_term_operations(fx::semilattice(), 2);
  EXPECT_TRUE(meet.complete);
  ASSERT_EQ(meet.size(), 3u);
  EXPECT_EQ(meet.ops[0].witness, fx::term("x1"));
  EXPECT_EQ(meet.ops[1].witness, fx::term("x2"));
  EXPECT_EQ(meet.ops[2].witness, fx::term("f(x1,x2)"));

  CloneSlice z2 = enumerate_term_operations(fx::cyclic(2), 2);
  EXPECT_EQ(z2.size(), 4u);
  ASSERT_TRUE(z2.find(Table{0, 0, 0, 0}));
  EXPECT_EQ(z2.ops[*z2.find(Table{0, 0, 0, 0})].witness, fx::term("f(x1,x1)"));

  EXPECT_EQ(enumerate_term_operations(fx::left_zero(), 2).size(), 2u);
  CloneSlice unary = enumerate_term_operations(fx::left_zero(), 1);
  ASSERT_EQ(unary.size(), 1u);
  EXPECT_EQ(unary.ops[0].witness, fx::term("x1"));
}

TEST(CloneSlice, CapTruncates) {
  CloneSlice s = enumerate_term_operations(fx::cyclic(3), 2, 5);
  EXPECT_FALSE(s.complete);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_THROW(enumerate_term_operations(fx::cyclic(3), 0), std::invalid_argument);
}

TEST(CloneSlice, PrimalThreeElementAlgebra) {
  // A Sheffer-like operation: every binary operation on 3 elements is a term operation.
  FiniteAlgebra a = fx::magma("primal", 3, {2, 2, 1, 0, 2, 0, 1, 1, 0});
  CloneSlice s = enumerate_term_operations(a, 2);
  EXPECT_TRUE(s.complete);
  EXPECT_EQ(s.size(), 19683u);
}

TEST(CloneSlice, MatchesBruteForceOracle) {
  gen::Rng rng(41);
  for (int i = 0; i < 16; ++i) {
    FiniteAlgebra a = fx::magma("m", 2, {Element(i >> 3 & 1), Element(i >> 2 & 1), Element(i >> 1 & 1), Element(i & 1)});
    for (std::size_t k : {1u, 2u, 3u}) EXPECT_EQ(tables_of(enumerate_term_operations(a, k)), oracle::clone(a, k));
  }
  Signature sig = parse_signature("sig f/2 g/1");
  for (int i = 0; i < 20; ++i) {
    FiniteAlgebra a = gen::algebra(rng, sig, 2);
    EXPECT_EQ(tables_of(enumerate_term_operations(a, 2)), oracle::clone(a, 2));
  }
  for (int i = 0; i < 5; ++i) {
    FiniteAlgebra a = gen::algebra(rng, parse_signature("sig g/1 h/1"), 3);
    EXPECT_EQ(tables_of(enumerate_term_operations(a, 2)), oracle::clone(a, 2));
  }
}

TEST(CloneSlice, WitnessesAreMinimalAndConsistent) {
  gen::Rng rng(42);
  for (int i = 0; i < 30; ++i) {
    FiniteAlgebra a = gen::algebra(rng, fx::binary(), 2 + gen::below(rng, 2));
    CloneSlice s = enumerate_term_operations(a, 2);
    ASSERT_TRUE(s.complete);
    std::set<Table> seen;
    for (std::size_t j = 0; j < s.size(); ++j) {
      EXPECT_EQ(oracle::tabulate(a, s.ops[j].witness, 2), s.ops[j].table);
      EXPECT_TRUE(seen.insert(s.ops[j].table).second);
      if (j > 0) {
        EXPECT_LE(s.ops[j - 1].witness.size(), s.ops[j].witness.size());
      }
    }
    // Closed: f applied to any two members stays inside.
    for (std::size_t p = 0; p < std::min<std::size_t>(s.size(), 40); ++p)
      for (std::size_t q = 0; q < std::min<std::size_t>(s.size(), 40); ++q) {
        Term t = Term::app("f", {s.ops[p].witness, s.ops[q].witness});
        EXPECT_TRUE(s.find(oracle::tabulate(a, t, 2)));
      }
    // No term with fewer nodes than a witness induces the same table.
    for (const auto& t : terms_up_to(fx::binary(), canonical_vars(2), 5)) {
      auto j = s.find(oracle::tabulate(a, t, 2));
      ASSERT_TRUE(j);
      EXPECT_LE(s.ops[*j].witness.size(), t.size());
    }
  }
}

TEST(DerivedAlgebra, Examples) {
  EXPECT_EQ(derived_algebra(fx::left_zero(), identity_hsub(fx::binary())), fx::left_zero());
  EXPECT_EQ(derived_algebra(fx::left_zero(), fx::hsub("f(x2,x1)")), fx::right_zero());
  EXPECT_EQ(derived_algebra(fx::cyclic(2), fx::hsub("f(x1,x1)")).table(0), (Table{0, 0, 0, 0}));
}

TEST(SemanticHsubs, Counts) {
  EXPECT_EQ(semantic_hsubs(fx::left_zero(), clone_slices(fx::left_zero())).items.size(), 2u);
  EXPECT_EQ(semantic_hsubs(fx::cyclic(2), clone_slices(fx::cyclic(2))).items.size(), 4u);
  Signature sig = parse_signature("sig f/2 g/2");
  FiniteAlgebra a("a", sig, 2, {{0, 1, 1, 0}, {0, 1, 1, 0}});
  SemanticHsubs s = semantic_hsubs(a, clone_slices(a));
  EXPECT_EQ(s.items.size(), 16u);
  EXPECT_FALSE(s.lower_bound);
  SemanticHsubs capped = semantic_hsubs(fx::cyclic(3), clone_slices(fx::cyclic(3), 4));
  EXPECT_TRUE(capped.lower_bound);
}

TEST(AlgebraFile, RoundTrip) {
  gen::Rng rng(43);
  for (int i = 0; i < 50; ++i) {
    Signature sig = gen::signature(rng);
    FiniteAlgebra a = gen::algebra(rng, sig, 1 + gen::below(rng, 3), "a" + std::to_string(i));
    FiniteAlgebra b = parse_algebra(format_algebra(a));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.name(), b.name());
  }
}

TEST(AlgebraFile, ToleratesSpacingAndSeveralBlocks) {
  auto all = parse_algebras("# two\nalgebra a\ncarrier 2\nop  f / 2 = [ 0, 0,1 ,1 ]\nend\n\nalgebra b\ncarrier 1\nop f/2 = [0]\nend\n");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0], fx::left_zero());
  EXPECT_EQ(all[1].carrier_size(), 1u);
}

TEST(AlgebraFile, Errors) {
  auto kind = [](const std::string& text) {
    try {
      parse_algebra(text);
    } catch (const ParseError& e) {
      return e.kind();
    }
    return ParseErrorKind::missing_equals;
  };
  EXPECT_EQ(kind("algebra a\ncarrier 2\nop f/2 = [0,0,1]\nend\n"), ParseErrorKind::arity_mismatch);
  EXPECT_EQ(kind("algebra a\ncarrier 2\nop f/2 = [0,0,1,2]\nend\n"), ParseErrorKind::malformed_token);
  EXPECT_EQ(kind("algebra a\ncarrier 2\nop f/2 = [0,0,1,1]\n"), ParseErrorKind::malformed_token);
  EXPECT_EQ(kind("algebra a\ncarrier 2\nop f/0 = [0]\nend\n"), ParseErrorKind::zero_arity);
  EXPECT_EQ(kind("algebra a\ncarrier 2\nop f/2 = [0,0,1,1]\nop f/2 = [0,0,1,1]\nend\n"), ParseErrorKind::duplicate_symbol);
  EXPECT_EQ(kind(""), ParseErrorKind::empty_input);
  EXPECT_EQ(kind("carrier 2\n"), ParseErrorKind::malformed_token);
}

// eval in A^sigma of t equals eval in A of sigma(t).
TEST(Properties, RealizationLemma) {
  gen::Rng rng(44);
  for (int i = 0; i < 300; ++i) {
    Signature sig = gen::signature(rng);
    FiniteAlgebra a = gen::algebra(rng, sig, 1 + gen::below(rng, 3));
    Hypersubstitution h = gen::hsub(rng, sig, 7);
    Term t = gen::term(rng, sig, {"x", "y", "z"}, 7);
    FiniteAlgebra d = derived_algebra(a, h);
    EXPECT_EQ(d, oracle::derived(a, h));
    Term image = apply_hsub(h, t);
    oracle::all_envs(a.carrier_size(), {"x", "y", "z"}, [&](const auto& env) {
      EXPECT_EQ(oracle::eval(d, t, env), oracle::eval(a, image, env));
      return true;
    });
  }
}

// (A^s2)^s1 = A^(s1 after s2)
TEST(Properties, IteratedDerivation) {
  gen::Rng rng(45);
  for (int i = 0; i < 200; ++i) {
    Signature sig = gen::signature(rng);
    FiniteAlgebra a = gen::algebra(rng, sig, 2 + gen::below(rng, 2));
    Hypersubstitution s1 = gen::hsub(rng, sig, 5), s2 = gen::hsub(rng, sig, 5);
    EXPECT_EQ(derived_algebra(derived_algebra(a, s2), s1), derived_algebra(a, compose(s2, s1)));
  }
}

// Hypersubstitutions inducing the same term operations give the same derived algebra.
TEST(Properties, DerivedDependsOnlyOnTermOperations) {
  gen::Rng rng(46);
  for (int i = 0; i < 50; ++i) {
    FiniteAlgebra a = gen::algebra(rng, fx::binary(), 2);
    CloneSlice s = enumerate_term_operations(a, 2);
    for (const auto& t : terms_up_to(fx::binary(), canonical_vars(2), 5)) {
      Hypersubstitution h(fx::binary(), {t});
      auto j = s.find(term_operation(a, t, 2).table);
      ASSERT_TRUE(j);
      EXPECT_EQ(derived_algebra(a, h), derived_algebra(a, Hypersubstitution(fx::binary(), {s.ops[*j].witness})));
    }
  }
}
