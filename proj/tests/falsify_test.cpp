#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sai/falsify.hpp"
#include "support/gen.hpp"

namespace {

using namespace sai;
using saitest::field;
using saitest::load_problem;
using saitest::poly;

TEST(IntegrateTest, ConstantVelocityIsExact) {
  auto c = make_context({"s", "v"});
  auto f = field(c, {"v", "0"});
  SampleBudget b;
  b.horizon = 2;
  b.step = 0.25;
  std::vector<double> x0{0, 1};
  auto t = integrate(f, x0, b);
  ASSERT_EQ(t.times.size(), 9u);
  EXPECT_DOUBLE_EQ(t.times.back(), 2.0);
  EXPECT_DOUBLE_EQ(t.states.back()[0], 2.0);
  EXPECT_DOUBLE_EQ(t.states.back()[1], 1.0);
  EXPECT_FALSE(t.diverged);
  for (std::size_t i = 1; i < t.times.size(); ++i) EXPECT_GT(t.times[i], t.times[i - 1]);
}

TEST(IntegrateTest, AircraftNormIsConserved) {
  auto c = make_context({"d1", "d2"});
  auto f = field(c, {"-d2", "d1"});
  SampleBudget b;  // T = 10, h = 1e-3
  std::vector<double> x0{0.6, 0.8};
  auto t = integrate(f, x0, b);
  for (const auto& s : t.states) ASSERT_NEAR(s[0] * s[0] + s[1] * s[1], 1.0, 1e-6);
}

TEST(IntegrateTest, BackwardThenForwardReturns) {
  auto c = make_context({"x", "y"});
  auto f = field(c, {"-2*y", "x^2"});
  std::vector<double> x0{-1, 0.5};
  auto back = rk4_step(f, x0, -1e-3);
  auto there = rk4_step(f, back, 1e-3);
  EXPECT_NEAR(there[0], x0[0], 1e-9);
  EXPECT_NEAR(there[1], x0[1], 1e-9);

  SampleBudget b;
  b.horizon = 1e-3;
  auto bt = integrate(f, x0, b, Direction::Backward);
  EXPECT_EQ(bt.direction, Direction::Backward);
  EXPECT_NEAR(bt.states.back()[0], back[0], 1e-15);
}

TEST(IntegrateTest, DivergenceIsFlagged) {
  auto c = make_context({"x"});
  SampleBudget b;
  b.horizon = 5;
  b.step = 1e-2;
  std::vector<double> x0{2};
  auto t = integrate(field(c, {"x^3"}), x0, b);
  EXPECT_TRUE(t.diverged);
  EXPECT_LT(t.times.back(), 5.0);
}

TEST(IntegrateTest, Rk4Order) {
  auto c = make_context({"d1", "d2"});
  auto f = field(c, {"-d2", "d1"});
  std::vector<double> x0{0.6, 0.8};
  auto err = [&](double h) {
    auto y = rk4_step(f, x0, h);
    double e1 = y[0] - (0.6 * std::cos(h) - 0.8 * std::sin(h));
    double e2 = y[1] - (0.6 * std::sin(h) + 0.8 * std::cos(h));
    return std::hypot(e1, e2);
  };
  for (double h : {0.2, 0.1, 0.05}) EXPECT_GE(err(h) / err(h / 2), 8.0) << h;
}

TEST(IntegrateTest, CsvDump) {
  auto c = make_context({"x"});
  SampleBudget b;
  b.horizon = 0.5;
  b.step = 0.25;
  std::vector<double> x0{1};
  std::ostringstream out;
  write_csv(integrate(field(c, {"0"}), x0, b), {"x"}, out);
  std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, 4), "t,x\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

// Finite differences along a trajectory agree with the first Lie derivative.
TEST(IntegrateTest, LieDerivativeMatchesFiniteDifference) {
  saitest::Gen gen(5);
  auto c = make_context({"x", "y", "z"});
  for (int i = 0; i < 50; ++i) {
    auto f = gen.field(c, 2, 3);
    auto p = gen.state_poly(c, 3, 4);
    auto l1 = lie_derivative(p, f);
    auto l2 = lie_derivative(l1, f);
    std::vector<double> x{gen.rational(1, 4).get_d(), gen.rational(1, 4).get_d(), gen.rational(1, 4).get_d()};
    for (int step = 0; step < 5; ++step) {
      const double d = 1e-4;
      auto next = rk4_step(f, x, d);
      double fd = (p.evaluate(std::span<const double>(next)) - p.evaluate(std::span<const double>(x))) / d;
      double exact = l1.evaluate(std::span<const double>(x));
      double scale = 1 + std::abs(l2.evaluate(std::span<const double>(x)));
      EXPECT_NEAR(fd, exact, d * scale + 1e-7) << p.to_string();
      x = rk4_step(f, x, 1e-2);
    }
  }
}

TEST(NumericCheckTest, CubicTemplate) {
  auto prob = load_problem("cubic_template.sai");
  SampleBudget b;
  auto good = prob.instantiate(Point{{"a", -1}});
  auto r = numeric_ci_check(good, good.candidate, b);
  EXPECT_EQ(r.kind, NumericCheckResult::Kind::NoViolationFound) << r.message;
  EXPECT_EQ(r.samples, 2u);

  auto bad = prob.instantiate(Point{{"a", 1}});
  auto v = numeric_ci_check(bad, bad.candidate, b);
  ASSERT_EQ(v.kind, NumericCheckResult::Kind::Violation);
  EXPECT_EQ(v.time, 0.0);
  ASSERT_TRUE(v.exact_x0.has_value());
  EXPECT_EQ(*v.exact_x0, (Point{{"x", -1}, {"y", Rational(1, 2)}}));
}

TEST(NumericCheckTest, WholeSpaceIsVacuous) {
  auto c = make_context({"x", "y"});
  Problem prob{c, field(c, {"-2*y", "x^2"})};
  SampleBudget b;
  b.n_init_points = 10;
  b.horizon = 1;
  EXPECT_EQ(numeric_ci_check(prob, Formula::truth(), b).kind, NumericCheckResult::Kind::NoViolationFound);
}

TEST(NumericCheckTest, EmptyInitCannotBeSampled) {
  auto c = make_context({"x"});
  Problem prob{c, field(c, {"1"}), Formula::truth(), sai::parse_formula("x^2 + 1 <= 0", c)};
  SampleBudget b;
  b.max_attempts = 1000;
  EXPECT_EQ(numeric_ci_check(prob, Formula::truth(), b).kind, NumericCheckResult::Kind::SamplingFailed);
}

TEST(NumericCheckTest, EscapeIsFound) {
  // x' = 1 leaves x <= 1 from x = 0 at t = 1
  auto c = make_context({"x"});
  Problem prob{c, field(c, {"1"}), Formula::truth(), sai::parse_formula("x = 0", c)};
  SampleBudget b;
  b.horizon = 2;
  auto r = numeric_ci_check(prob, sai::parse_formula("x <= 1", c), b);
  ASSERT_EQ(r.kind, NumericCheckResult::Kind::Violation);
  EXPECT_NEAR(r.time, 1.0, 2e-3);
}

TEST(SignProbeTest, WorkedExample) {
  auto c = make_context({"x", "y"});
  auto h = poly(c, "x + y^2");
  auto f = field(c, {"-2*y", "x^2"});
  auto a = sign_probe(h, f, Point{{"x", -1}, {"y", 1}}, 2);
  EXPECT_EQ(a.outcome, SignProbe::Outcome::Agree) << a.details;
  EXPECT_EQ(a.predicted.rank, RankValue::finite(2));
  EXPECT_EQ(a.predicted.value, 8);
  for (double v : a.observed) EXPECT_GT(v, 0);

  auto b = sign_probe(h, f, Point{{"x", -4}, {"y", 2}}, 2);
  EXPECT_EQ(b.outcome, SignProbe::Outcome::Agree) << b.details;
  EXPECT_EQ(b.predicted.value, 60);

  auto o = sign_probe(h, f, Point{{"x", 0}, {"y", 0}}, 2);
  EXPECT_EQ(o.outcome, SignProbe::Outcome::Agree) << o.details;
  EXPECT_FALSE(o.predicted.rank.is_finite());
  for (double v : o.observed) EXPECT_EQ(v, 0);
}

// Points in phi+ lie in p > 0 a short time in the past.
TEST(SignProbeTest, PhiPlusLooksBackward) {
  saitest::Gen gen(8);
  auto c = make_context({"x", "y"});
  int checked = 0, agree = 0;
  for (int i = 0; i < 40; ++i) {
    auto f = gen.field(c, 2, 2);
    auto p = gen.state_poly(c, 2, 3);
    RankBound b;
    try {
      b = rank_bound(p, f, 8);
    } catch (const FixedPointNotReached&) {
      continue;
    }
    auto phi = phi_plus(b);
    for (int j = 0; j < 25; ++j) {
      auto x = gen.point(2);
      if (!evaluate(phi, x)) continue;
      std::vector<double> xd{x[0].get_d(), x[1].get_d()};
      SampleBudget sb;
      sb.horizon = 1e-2;
      auto t = integrate(f, xd, sb, Direction::Backward);
      double val = p.evaluate(std::span<const double>(t.states[1]));
      if (std::abs(val) < 1e-9) continue;
      ++checked;
      agree += val > 0;
    }
  }
  ASSERT_GT(checked, 50);
  EXPECT_GE(agree, checked * 99 / 100);
}

}  // namespace
