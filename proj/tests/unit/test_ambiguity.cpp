#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sublin/ambiguity.hpp"
#include "sublin/axioms.hpp"
#include "sublin/errors.hpp"

using namespace sublin;

namespace {

TestFunction square() { return TestFunction::scalar([](double x) { return x * x; }, GrowthTag::quadratic()); }
TestFunction identity() { return TestFunction::scalar([](double x) { return x; }); }

AmbiguitySet two_member(double origin) {
  LatticeSpec l{1, 0.5, {origin}};
  return AmbiguitySet(l, {DiscreteDistribution({{-1.0}, {0.5}, {2.0}}, {0.25, 0.5, 0.25}),
                          DiscreteDistribution({{-0.5}, {1.0}}, {0.6, 0.4})});
}

}  // namespace

TEST(Ambiguity, ThreePointMoments) {
  const auto b = symmetric_three_point({0.5, 1.0});
  EXPECT_EQ(b.member_count(), 2u);
  EXPECT_DOUBLE_EQ(expect_upper(b, square()), 1.0);
  EXPECT_DOUBLE_EQ(expect_lower(b, square()), 0.5);
  EXPECT_DOUBLE_EQ(expect_upper(b, identity()), 0.0);
  EXPECT_DOUBLE_EQ(expect_lower(b, identity()), 0.0);
  EXPECT_DOUBLE_EQ(b.support_radius(), 1.0);
}

TEST(Ambiguity, UpperExtremumReportsLowestAttainingMember) {
  const auto b = symmetric_three_point({1.0, 1.0, 0.5});
  const auto e = upper_extremum(b, square());
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  EXPECT_EQ(e.member, 0u);
  EXPECT_EQ(upper_extremum(b, -square()).member, 2u);
}

TEST(Ambiguity, Capacities) {
  const auto b = symmetric_three_point({0.5, 1.0});
  const Event big = [](std::span<const double> x) { return std::abs(x[0]) >= 1.0; };
  EXPECT_DOUBLE_EQ(capacity_upper(b, big), 1.0);
  EXPECT_DOUBLE_EQ(capacity_lower(b, big), 0.5);
  const Event none = [](std::span<const double>) { return false; };
  EXPECT_DOUBLE_EQ(capacity_upper(b, none), 0.0);
  EXPECT_DOUBLE_EQ(capacity_lower(b, none), 0.0);
}

TEST(Ambiguity, ValidationErrors) {
  EXPECT_THROW(DiscreteDistribution({{0.0}, {1.0}}, {-0.1, 1.1}), InvalidArgument);
  EXPECT_THROW(DiscreteDistribution({{0.0}, {1.0}}, {0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(DiscreteDistribution({{0.0}, {0.0}}, {0.5, 0.5}), InvalidArgument);
  EXPECT_THROW(DiscreteDistribution({{0.0}, {1.0, 2.0}}, {0.5, 0.5}), InvalidArgument);
  EXPECT_THROW(AmbiguitySet(LatticeSpec::integer(), {DiscreteDistribution({{0.5}}, {1.0})}),
               InvalidArgument);
  EXPECT_THROW(AmbiguitySet(LatticeSpec::integer(), {}), InvalidArgument);
  EXPECT_THROW((LatticeSpec{1, 0.0, {0.0}}.validate()), InvalidArgument);
}

TEST(Ambiguity, NormalizationToleranceIsTight) {
  EXPECT_NO_THROW(DiscreteDistribution({{0.0}, {1.0}}, {0.5, 0.5 + 5e-13}));
  EXPECT_THROW(DiscreteDistribution({{0.0}, {1.0}}, {0.5, 0.5 + 1e-10}), InvalidArgument);
}

TEST(Ambiguity, OriginShiftByWholeStepsIsBitIdentical) {
  const auto a = two_member(0.0);
  const auto b = two_member(3.5);
  const auto c = two_member(-12.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_test_function(rng, 1);
    EXPECT_EQ(expect_upper(a, f), expect_upper(b, f));
    EXPECT_EQ(expect_upper(a, f), expect_upper(c, f));
  }
}

TEST(Ambiguity, TruncateMergesMass) {
  const auto x = two_member(0.0);
  const auto t = truncate(x, 1.0);
  EXPECT_DOUBLE_EQ(t.support_radius(), 1.0);
  EXPECT_EQ(t.member(0).size(), 3u);
  const auto& m = t.member(0);
  double top = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.support()[i][0] == 1.0) top = m.probs()[i];
  EXPECT_DOUBLE_EQ(top, 0.25);
  const auto clamp2 = truncate(x, 0.5);
  EXPECT_EQ(clamp2.member(1).size(), 2u);
  EXPECT_DOUBLE_EQ(expect_upper(clamp2, identity()), 0.5 * 0.25 + 0.5 * 0.5 - 0.5 * 0.25);
}

TEST(Ambiguity, TruncateOffLatticeThrows) {
  const auto b = symmetric_three_point({0.5, 1.0});
  EXPECT_THROW(truncate(b, 0.5), InvalidArgument);
  EXPECT_NO_THROW(truncate(b, 2.0));
}

TEST(Ambiguity, SecondMoments) {
  const auto b = symmetric_three_point({0.5, 1.0});
  const auto m = member_second_moments(b);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m[0][0], 0.5);
  EXPECT_DOUBLE_EQ(m[1][0], 1.0);
  const auto p = point_mass(2);
  EXPECT_EQ(member_second_moments(p)[0], std::vector<double>(4, 0.0));
}

TEST(Ambiguity, NonFiniteTestValueThrows) {
  const auto b = symmetric_three_point({1.0});
  const TestFunction bad = TestFunction::scalar([](double x) { return 1.0 / (x * 0.0); });
  EXPECT_THROW(expect_upper(b, bad), NumericError);
}

TEST(AxiomSuite, OneDimensional) {
  const auto report = run_axiom_suite(99, 200, 5);
  for (const auto& c : report.checks()) EXPECT_TRUE(c.pass) << c.name << " " << c.worst_violation;
  EXPECT_EQ(report.checks().size(), 7u);
}

TEST(AxiomSuite, TwoDimensional) {
  RandomSetOptions o;
  o.dim = 2;
  o.max_support = 4;
  const auto report = run_axiom_suite(7, 100, 5, o);
  EXPECT_TRUE(report.all_pass()) << report.worst();
}

TEST(AxiomSuite, DetectsABrokenFunctional) {
  // A "max plus a positive constant" functional breaks constant preservation;
  // the law checker must notice.
  LawReport r(1e-10);
  r.record("constant-preserving", 0.25);
  EXPECT_FALSE(r.all_pass());
  r.record("nan", std::nan(""));
  EXPECT_FALSE(r.find("nan")->pass);
}
