#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace hyperq;

TEST(ApplyHsub, IdentityFixesTerms) {
  gen::Rng rng(5);
  Hypersubstitution id = identity_hsub(fx::binary());
  EXPECT_EQ(to_string(id.image("f")), "f(x1,x2)");
  for (int i = 0; i < 100; ++i) {
    Term t = gen::term(rng, fx::binary(), {"x", "y", "z"}, 11);
    EXPECT_EQ(apply_hsub(id, t), t);
  }
}

TEST(ApplyHsub, SwapReversesEveryNode) {
  EXPECT_EQ(apply_hsub(fx::hsub("f(x2,x1)"), fx::term("f(x,f(y,z))")), fx::term("f(f(z,y),x)"));
}

TEST(ApplyHsub, ProjectionImage) {
  EXPECT_EQ(apply_hsub(fx::hsub("x1"), fx::term("f(x,y)")), fx::term("x"));
  EXPECT_EQ(apply_hsub(fx::hsub("x2"), fx::term("f(f(x,y),f(z,u))")), fx::term("u"));
}

TEST(ApplyHsub, QuasiIdentityUniformly) {
  QuasiIdentity q = apply_hsub(fx::hsub("f(x2,x1)"), fx::qi("f(x,y) = y -> f(x,f(y,x)) = x"));
  EXPECT_EQ(q, fx::qi("f(y,x) = y -> f(f(x,y),x) = x"));
}

TEST(ApplyHsub, MixedArities) {
  Signature sig = parse_signature("sig f/2 g/1");
  Hypersubstitution h(sig, {parse_term("g(f(x2,x1))", sig), parse_term("f(x1,x1)", sig)});
  EXPECT_EQ(apply_hsub(h, parse_term("g(f(x,y))", sig)), parse_term("f(g(f(y,x)),g(f(y,x)))", sig));
}

TEST(Hypersubstitution, RejectsBadImages) {
  EXPECT_THROW(fx::hsub("f(x1,x3)"), std::invalid_argument);
  EXPECT_THROW(fx::hsub("f(x1,y)"), std::invalid_argument);
  EXPECT_THROW(Hypersubstitution(fx::binary(), {}), std::invalid_argument);
}

TEST(Compose, IdentityIsUnit) {
  Hypersubstitution id = identity_hsub(fx::binary());
  Hypersubstitution s = fx::hsub("f(f(x2,x1),x1)");
  EXPECT_EQ(compose(id, s), s);
  EXPECT_EQ(compose(s, id), s);
}

TEST(Compose, Examples) {
  Hypersubstitution swap = fx::hsub("f(x2,x1)");
  EXPECT_EQ(compose(swap, swap), identity_hsub(fx::binary()));
  EXPECT_EQ(compose(fx::hsub("x1"), swap).image("f"), fx::term("x2"));
}

TEST(Compose, RejectsDifferentSignatures) {
  Signature other = parse_signature("sig g/2");
  EXPECT_THROW(compose(identity_hsub(fx::binary()), identity_hsub(other)), std::invalid_argument);
}

TEST(Monoid, Examples) {
  HsubMonoid none = generate_monoid(fx::binary(), {});
  EXPECT_EQ(none.size(), 1u);
  EXPECT_TRUE(none.saturated);
  EXPECT_EQ(none.elements[0], identity_hsub(fx::binary()));

  HsubMonoid swap = generate_monoid(fx::binary(), {fx::hsub("f(x2,x1)")});
  EXPECT_EQ(swap.size(), 2u);
  EXPECT_TRUE(swap.contains(fx::hsub("f(x2,x1)")));

  HsubMonoid proj = generate_monoid(fx::binary(), {fx::hsub("x1")});
  EXPECT_EQ(proj.size(), 2u);
  EXPECT_TRUE(proj.saturated);
  EXPECT_EQ(trivial_monoid(fx::binary()).size(), 1u);
}

TEST(Monoid, BudgetMarksTruncation) {
  // f -> f(x1,f(x1,x2)) grows without bound.
  HsubMonoid m = generate_monoid(fx::binary(), {fx::hsub("f(x1,f(x1,x2))")}, {100, 9});
  EXPECT_FALSE(m.saturated);
  for (const auto& h : m.elements) EXPECT_LE(h.max_image_size(), 9u);
  HsubMonoid few = generate_monoid(fx::binary(), {fx::hsub("f(x1,f(x1,x2))")}, {3, 100});
  EXPECT_EQ(few.size(), 3u);
  EXPECT_FALSE(few.saturated);
}

TEST(Monoid, ClosedUnderCompositionWhenSaturated) {
  HsubMonoid m = generate_monoid(fx::binary(), {fx::hsub("f(x2,x1)"), fx::hsub("x1"), fx::hsub("f(x1,x1)")});
  ASSERT_TRUE(m.saturated);
  for (const auto& a : m.elements)
    for (const auto& b : m.elements) EXPECT_TRUE(m.contains(compose(a, b)));
}

TEST(Enumeration, TermsUpTo) {
  auto ts = terms_up_to(fx::binary(), {"x", "y"}, 3);
  ASSERT_EQ(ts.size(), 6u);
  EXPECT_EQ(ts[0], fx::term("x"));
  EXPECT_EQ(ts[5], fx::term("f(y,y)"));
  EXPECT_EQ(terms_up_to(fx::binary(), {"x", "y"}, 5).size(), oracle::small_terms(fx::binary(), {"x", "y"}, 5).size());
}

TEST(Enumeration, HsubsUpTo) {
  EXPECT_EQ(hsubs_up_to(fx::binary(), 1).size(), 2u);
  EXPECT_EQ(hsubs_up_to(fx::binary(), 3).size(), 6u);
  // f: x1 x2 g(x1) g(x2) f(xi,xj) g(g(xi)) -> 10; g: x1 g(x1) g(g(x1)) f(x1,x1) -> 4
  Signature sig = parse_signature("sig f/2 g/1");
  EXPECT_EQ(hsubs_up_to(sig, 3).size(), 40u);
}

TEST(HsubFile, ParsesGroupsAndDefaults) {
  Signature sig = parse_signature("sig f/2 g/1");
  auto hs = parse_hsubs("# two\nhsub f -> f(x2,x1)\n\nhsub g -> g(g(x1))\nhsub f -> x1\n", sig);
  ASSERT_EQ(hs.size(), 2u);
  EXPECT_EQ(hs[0].image("f"), parse_term("f(x2,x1)", sig));
  EXPECT_EQ(hs[0].image("g"), parse_term("g(x1)", sig));
  EXPECT_EQ(hs[1].image("f"), parse_term("x1", sig));
  EXPECT_EQ(parse_hsubs(format_hsub(hs[1]), sig), std::vector<Hypersubstitution>{hs[1]});
}

TEST(HsubFile, Errors) {
  auto kind = [](const std::string& text) {
    try {
      parse_hsubs(text, fx::binary());
    } catch (const ParseError& e) {
      return e.kind();
    }
    return ParseErrorKind::empty_input;
  };
  EXPECT_EQ(kind("hsub f -> f(x1,x3)\n"), ParseErrorKind::malformed_token);
  EXPECT_EQ(kind("hsub g -> x1\n"), ParseErrorKind::malformed_token);
  EXPECT_EQ(kind("hsub f -> x1\nhsub f -> x2\n"), ParseErrorKind::duplicate_symbol);
  EXPECT_EQ(kind("hsub f x1\n"), ParseErrorKind::malformed_token);
  EXPECT_EQ(kind("hsub f -> f(x1)\n"), ParseErrorKind::arity_mismatch);
}

TEST(Properties, Functoriality) {
  gen::Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    Signature sig = gen::signature(rng);
    Hypersubstitution s1 = gen::hsub(rng, sig, 5);
    Hypersubstitution s2 = gen::hsub(rng, sig, 5);
    Term t = gen::term(rng, sig, {"x", "y", "z"}, 7);
    EXPECT_EQ(apply_hsub(compose(s1, s2), t), apply_hsub(s1, apply_hsub(s2, t)));
    EXPECT_EQ(apply_hsub(s1, t), oracle::apply(s1, t));
  }
}

TEST(Properties, CompositionIsAssociative) {
  gen::Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    Signature sig = gen::signature(rng);
    auto a = gen::hsub(rng, sig, 4), b = gen::hsub(rng, sig, 4), c = gen::hsub(rng, sig, 4);
    EXPECT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
    EXPECT_EQ(compose(identity_hsub(sig), a), a);
    EXPECT_EQ(compose(a, identity_hsub(sig)), a);
  }
}

TEST(Properties, VariablesFixedAndNotIntroduced) {
  gen::Rng rng(23);
  for (int i = 0; i < 300; ++i) {
    Signature sig = gen::signature(rng);
    Hypersubstitution h = gen::hsub(rng, sig, 6);
    EXPECT_EQ(apply_hsub(h, Term::var("v")), Term::var("v"));
    Term t = gen::term(rng, sig, {"x", "y", "z"}, 9);
    auto before = variables_of(t);
    for (const auto& v : variables_of(apply_hsub(h, t)))
      EXPECT_NE(std::find(before.begin(), before.end(), v), before.end()) << v;
  }
}
