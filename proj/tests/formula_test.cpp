#include <gtest/gtest.h>

#include "sai/encoding.hpp"
#include "sai/formula.hpp"
#include "support/gen.hpp"

namespace {

using namespace sai;
using saitest::field;
using saitest::poly;

class FormulaTest : public ::testing::Test {
 protected:
  ContextPtr xy = make_context({"x", "y"});
  Formula atom(const char* p, Relation r) { return Formula::atom(poly(xy, p), r); }
};

TEST_F(FormulaTest, SimplifyIsConservative) {
  EXPECT_TRUE(simplify(atom("1", Relation::Gt)).is_true());
  EXPECT_TRUE(simplify(atom("0", Relation::Gt)).is_false());
  EXPECT_TRUE(simplify(atom("0", Relation::Eq)).is_true());
  auto a = atom("x + y", Relation::Ge);
  EXPECT_EQ(simplify(Formula::conj({a, Formula::truth(), a})), a);
  EXPECT_TRUE(simplify(Formula::disj({a, Formula::truth()})).is_true());
  EXPECT_TRUE(simplify(Formula::conj({a, Formula::falsity()})).is_false());
  EXPECT_TRUE(simplify(Formula::implies(Formula::falsity(), a)).is_true());
  // no semantic rewriting: x >= 0 & x > 0 stays as written
  auto b = atom("x", Relation::Gt);
  EXPECT_EQ(simplify(Formula::conj({atom("x", Relation::Ge), b})).children().size(), 2u);
}

TEST_F(FormulaTest, DnfExamples) {
  auto d = normalize_dnf(atom("x + y", Relation::Ge));
  ASSERT_EQ(d.disjuncts.size(), 1u);
  ASSERT_EQ(d.disjuncts[0].size(), 1u);
  EXPECT_EQ(d.disjuncts[0][0], (NormAtom{poly(xy, "x + y"), false}));

  auto n = normalize_dnf(Formula::negate(atom("x*y - 1", Relation::Ge)));
  ASSERT_EQ(n.disjuncts.size(), 1u);
  EXPECT_EQ(n.disjuncts[0], (Conjunction{{poly(xy, "1 - x*y"), true}}));

  auto e = normalize_dnf(atom("x - y", Relation::Eq));
  ASSERT_EQ(e.disjuncts.size(), 1u);
  EXPECT_EQ(e.disjuncts[0], (Conjunction{{poly(xy, "x - y"), false}, {poly(xy, "y - x"), false}}));

  auto ne = normalize_dnf(atom("x", Relation::Ne));
  EXPECT_EQ(ne.disjuncts.size(), 2u);
  EXPECT_TRUE(normalize_dnf(Formula::truth()).is_true());
  EXPECT_TRUE(normalize_dnf(Formula::falsity()).is_false());
}

TEST_F(FormulaTest, PrinterRoundTrip) {
  auto f = Formula::implies(Formula::conj({atom("x", Relation::Ge), Formula::negate(atom("y - 1/2", Relation::Ne))}),
                            Formula::disj({atom("x*y", Relation::Lt), atom("y^2", Relation::Le)}));
  auto text = to_string(f);
  EXPECT_EQ(sai::parse_formula(text, xy), f) << text;
  EXPECT_NE(to_string(f, Syntax::Math).find("→"), std::string::npos);
}

TEST_F(FormulaTest, PinnedPoints) {
  auto init = sai::parse_formula("(x = -1 & y = 0.5) | (x = -0.5 & y = -0.6)", xy);
  auto pts = pinned_points(init, {"x", "y"});
  ASSERT_TRUE(pts.has_value());
  ASSERT_EQ(pts->size(), 2u);
  EXPECT_EQ((*pts)[0].at("y"), Rational(1, 2));
  EXPECT_EQ((*pts)[1].at("y"), Rational(-3, 5));
  EXPECT_FALSE(pinned_points(sai::parse_formula("x = 1", xy), {"x", "y"}).has_value());
  EXPECT_FALSE(pinned_points(sai::parse_formula("x >= 1 & y = 0", xy), {"x", "y"}).has_value());
  auto conflict = pinned_points(sai::parse_formula("(x = 1 & x = 2 & y = 0) | (2*x = 1 & y = 0)", xy), {"x", "y"});
  ASSERT_TRUE(conflict.has_value());
  ASSERT_EQ(conflict->size(), 1u);
  EXPECT_EQ(conflict->front().at("x"), Rational(1, 2));
}

TEST_F(FormulaTest, DnfPreservesTruth) {
  saitest::Gen gen(4242);
  for (int i = 0; i < 200; ++i) {
    auto f = gen.formula(xy, 4);
    auto d = normalize_dnf(f);
    auto back = to_formula(d);
    for (int j = 0; j < 20; ++j) {
      auto x = gen.point(2);
      bool expected = evaluate(f, x);
      ASSERT_EQ(evaluate(back, x), expected) << to_string(f);
      std::vector<double> xd{x[0].get_d(), x[1].get_d()};
      EXPECT_EQ(evaluate_numeric(d, xd), expected) << to_string(f);
    }
  }
}

// Formula families over the running examples.

class FamilyTest : public FormulaTest {
 protected:
  VectorField f2 = field(xy, {"-2*y", "x^2"});
  ContextPtr xya = make_context({"x", "y"}, {"a", "b"});
  VectorField f2p = field(xya, {"-2*y", "x^2"});
};

TEST_F(FamilyTest, TransFormulaShapes) {
  RankOracle oracle(f2);
  auto pi = trans_formula(*oracle.bound(poly(xy, "x + y^2")));
  ASSERT_EQ(pi.kind(), Formula::Kind::Or);
  ASSERT_EQ(pi.children().size(), 3u);
  EXPECT_EQ(pi.children()[0], atom("x + y^2", Relation::Lt));
  EXPECT_EQ(pi.children()[1], Formula::conj({atom("x + y^2", Relation::Eq), atom("-2*y + 2*x^2*y", Relation::Lt)}));

  // h = -x - y^2: second disjunct is -x - y^2 = 0 & 2y - 2x^2 y < 0
  auto pih = trans_formula(*oracle.bound(poly(xy, "-x - y^2")));
  EXPECT_EQ(pih.children()[1], Formula::conj({atom("-x - y^2", Relation::Eq), atom("2*y - 2*x^2*y", Relation::Lt)}));

  RankBound zero{0, {poly(xy, "x*y"), poly(xy, "0")}};
  EXPECT_EQ(trans_formula(zero), atom("x*y", Relation::Lt));
}

TEST_F(FamilyTest, TemplateChainMatchesWorkedExample) {
  auto ta = make_context({"x", "y"}, {"a"});
  auto t = poly(ta, "a*y*(x - y)");
  auto fa = field(ta, {"-2*y", "x^2"});
  RankOracle oracle(fa);
  auto bound = oracle.bound(t);
  ASSERT_EQ(bound->value, 2u);
  auto pi = trans_formula(*bound);
  ASSERT_EQ(pi.children().size(), 3u);
  EXPECT_EQ(pi.children()[0], Formula::atom(t, Relation::Lt));
  // the worked example prints L^3 in the last disjunct; the chain has it one step later
  auto chain = lie_chain(t, fa, 3);
  EXPECT_EQ(chain[3], poly(ta, "40*a*x*y^2 - 16*a*y^3 + 32*a*x^3*y - 10*a*x^4"));
  EXPECT_EQ(pi.children()[2].children().back(), Formula::atom(chain[2], Relation::Lt));
}

TEST_F(FamilyTest, PsiPlusAndPhiPlus) {
  RankOracle oracle(f2p);
  auto b = oracle.bound(poly(xya, "x - a"));
  auto psi = psi_plus(*b);
  ASSERT_EQ(psi.children().size(), 3u);
  EXPECT_EQ(psi.children()[0], Formula::atom(poly(xya, "x - a"), Relation::Gt));
  EXPECT_EQ(psi.children()[1], Formula::conj({Formula::atom(poly(xya, "x - a"), Relation::Eq),
                                              Formula::atom(poly(xya, "-2*y"), Relation::Gt)}));
  EXPECT_EQ(psi.children()[2].children().back(), Formula::atom(poly(xya, "-2*x^2"), Relation::Gt));
  auto phi = phi_plus(*b);
  EXPECT_EQ(phi.children()[0], Formula::atom(poly(xya, "x - a"), Relation::Gt));
  EXPECT_EQ(phi.children()[1], Formula::conj({Formula::atom(poly(xya, "x - a"), Relation::Eq),
                                              Formula::atom(poly(xya, "2*y"), Relation::Gt)}));

  RankOracle c(f2);
  EXPECT_TRUE(simplify(psi_plus(*c.bound(poly(xy, "1")))).is_true());
  EXPECT_TRUE(simplify(psi_plus(*c.bound(poly(xy, "-1")))).is_false());
  EXPECT_TRUE(simplify(phi_plus(*c.bound(poly(xy, "-1")))).is_false());
  EXPECT_TRUE(simplify(phi_zero(*c.bound(poly(xy, "1")))).is_false());
  EXPECT_TRUE(simplify(phi_zero(*c.bound(Polynomial(xy)))).is_true());
}

TEST_F(FamilyTest, PhiZeroAtOrigin) {
  RankOracle oracle(f2);
  auto phi0 = phi_zero(*oracle.bound(poly(xy, "x + y^2")));
  EXPECT_EQ(phi0.children().size(), 3u);
  EXPECT_TRUE(evaluate(phi0, Point{{"x", 0}, {"y", 0}}));
  EXPECT_FALSE(evaluate(phi0, Point{{"x", -4}, {"y", 2}}));
}

TEST_F(FamilyTest, InAndIvIn) {
  RankOracle oracle(f2p);
  EXPECT_TRUE(in_formula(normalize_dnf(Formula::truth()), oracle).is_true());
  EXPECT_TRUE(ivin_formula(normalize_dnf(Formula::truth()), oracle).is_true());
  auto ge = Formula::atom(poly(xya, "x - a"), Relation::Ge);
  auto b = oracle.bound(poly(xya, "x - a"));
  EXPECT_EQ(in_formula(normalize_dnf(ge), oracle), psi_zero_plus(*b));
  EXPECT_EQ(ivin_formula(normalize_dnf(ge), oracle), phi_zero_plus(*b));

  // x - a >= 0 | y - b > 0 becomes zeta: psi0+(x - a) | psi+(y - b)
  auto tau = Formula::disj({ge, Formula::atom(poly(xya, "y - b"), Relation::Gt)});
  auto zeta = in_formula(normalize_dnf(tau), oracle);
  ASSERT_EQ(zeta.kind(), Formula::Kind::Or);
  EXPECT_EQ(zeta.children()[0], psi_zero_plus(*b));
  EXPECT_EQ(zeta.children()[1], psi_plus(*oracle.bound(poly(xya, "y - b"))));
}

TEST_F(FamilyTest, ThetaSimple) {
  RankOracle oracle(f2);
  auto h = poly(xy, "-x - y^2");
  auto p = poly(xy, "-x*y + y^2");
  auto theta = theta_simple(h, p, oracle);
  ASSERT_EQ(theta.kind(), Formula::Kind::Implies);
  EXPECT_EQ(theta.children()[1], trans_formula(*oracle.bound(h)));
  EXPECT_TRUE(simplify(theta_simple(h, poly(xy, "1"), oracle)).is_true());
}

TEST_F(FamilyTest, MainConditionShape) {
  Problem prob{xya, f2p, Formula::truth(), Formula::atom(poly(xya, "x + y"), Relation::Ge),
               Formula::disj({Formula::atom(poly(xya, "x - a"), Relation::Ge),
                              Formula::atom(poly(xya, "y - b"), Relation::Gt)})};
  RankOracle oracle(f2p);
  auto mc = main_condition(prob, oracle);
  EXPECT_EQ(mc.init, Formula::implies(prob.init, prob.candidate));
  // the domain is everything, so its In/IvIn parts fold away
  EXPECT_EQ(simplify(mc.forward), simplify(Formula::implies(prob.candidate, in_formula(normalize_dnf(prob.candidate), oracle))));

  // at (a, b) = (1, 1) the origin is in Init but not in P
  auto inst = prob.instantiate(Point{{"a", 1}, {"b", 1}});
  RankOracle oi(inst.field);
  EXPECT_FALSE(evaluate(main_condition(inst, oi).init, Point{{"x", 0}, {"y", 0}, {"a", 1}, {"b", 1}}));
}

TEST_F(FamilyTest, EquationalCondition) {
  auto ac = make_context({"x1", "x2", "d1", "d2"});
  RankOracle oracle(field(ac, {"d1", "d2", "-d2", "d1"}));
  auto init = sai::parse_formula("x1 = 1 & x2 = 2 & d1 = 3/5 & d2 = 4/5", ac);
  auto eq = equational_condition(poly(ac, "d1^2 + d2^2 - 1"), init, oracle);
  EXPECT_EQ(eq.order, 0u);
  EXPECT_TRUE(simplify(eq.closure).is_true());
  auto z = equational_condition(Polynomial(ac), init, oracle);
  EXPECT_TRUE(simplify(z.combined()).is_true());
}

// Partition law and pointwise semantics on random pairs.
TEST(FamilyProperties, PartitionAndPointwiseSemantics) {
  saitest::Gen gen(99);
  auto ctx = make_context({"x", "y"});
  int pairs = 0;
  while (pairs < 20) {
    auto f = gen.field(ctx, 2, 2);
    auto p = gen.state_poly(ctx, 2, 3);
    RankBound b;
    try {
      b = rank_bound(p, f, 8);
    } catch (const FixedPointNotReached&) {
      continue;
    }
    ++pairs;
    auto pi = trans_formula(b), in = psi_zero_plus(b), psi = psi_plus(b), phi0 = phi_zero(b);
    for (int i = 0; i < 100; ++i) {
      auto x = gen.point(2);
      auto r = pointwise_rank(b.chain, x, b.value);
      ASSERT_NE(evaluate(pi, x), evaluate(in, x));
      EXPECT_EQ(evaluate(pi, x), r.rank.is_finite() && r.value < 0);
      EXPECT_EQ(evaluate(psi, x), r.rank.is_finite() && r.value > 0);
      EXPECT_EQ(evaluate(phi0, x), !r.rank.is_finite());
    }
  }
}

}  // namespace
