#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sublin/axioms.hpp"
#include "sublin/errors.hpp"
#include "sublin/lattice_dp.hpp"

using namespace sublin;

namespace {

TestFunction scalar(std::function<double(double)> f) { return TestFunction::scalar(std::move(f)); }

}  // namespace

TEST(LatticeDp, IidSquareIsExact) {
  const auto b = symmetric_three_point({0.5, 1.0});
  for (std::size_t n : {1u, 4u, 16u, 64u}) {
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    EXPECT_NEAR(iid_sum_expect(b, n, scalar([](double x) { return x * x; }), s), 1.0, 1e-12);
    EXPECT_NEAR(iid_sum_expect(b, n, scalar([](double x) { return -x * x; }), s), -0.5, 1e-12);
    EXPECT_NEAR(iid_sum_expect(b, n, scalar([](double x) { return x; }), s), 0.0, 1e-14);
  }
}

TEST(LatticeDp, MatchesPathEnumeration) {
  std::mt19937_64 rng(41);
  RandomSetOptions o;
  o.max_support = 3;
  for (int trial = 0; trial < 40; ++trial) {
    // Independent laws on lattices with the same step but different offsets.
    const std::size_t n = 1 + trial % 5;
    std::vector<AmbiguitySet> steps;
    for (std::size_t k = 0; k < n; ++k) steps.push_back(random_ambiguity_set(rng, o));
    const auto f = random_test_function(rng, 1);
    const double scale = 0.7;
    const auto fn = [&](double x) { return f(x); };
    const double expected = oracle::path_sum_expect(steps, fn, scale);
    const double got = sum_expect(steps, f, scale);
    EXPECT_NEAR(got, expected, 1e-10 * std::max(1.0, std::abs(expected))) << "trial " << trial;
  }
}

TEST(LatticeDp, EmptyStepListIsTerminalValue) {
  const std::vector<AmbiguitySet> none;
  EXPECT_DOUBLE_EQ(sum_expect(none, scalar([](double x) { return x + 3.0; }), 1.0), 3.0);
}

TEST(LatticeDp, NestedMatchesBruteForceInBothOrders) {
  LatticeSpec l{1, 1.0, {0.0}};
  const AmbiguitySet x(l, {DiscreteDistribution({{-1.0}, {1.0}}, {0.5, 0.5}),
                           DiscreteDistribution({{0.0}, {1.0}}, {0.5, 0.5})});
  const auto y = symmetric_three_point({0.5, 1.0});
  const auto f = [](double a, double b) { return a * b * b - 0.3 * a * a * b + std::sin(a - b); };
  const TestFunction tf(2, 1, [&](std::span<const double> v) { return f(v[0], v[1]); });
  const std::vector<AmbiguitySet> xy{x, y};
  const std::vector<AmbiguitySet> yx{y, x};
  EXPECT_NEAR(nested_expect(xy, tf), oracle::peng_two(x, y, f), 1e-14);
  EXPECT_NEAR(nested_expect(yx, tf), oracle::peng_two(y, x, f), 1e-14);
  // Peng independence is not symmetric in general.
  const auto g = [](double a, double b) { return a * b * b; };
  const TestFunction tg(2, 1, [&](std::span<const double> v) { return g(v[0], v[1]); });
  EXPECT_GT(std::abs(nested_expect(xy, tg) - nested_expect(yx, tg)), 1e-3);
}

TEST(LatticeDp, PengPairAgreesWithNesting) {
  const auto x = symmetric_three_point({0.5, 1.0});
  const auto y = symmetric_three_point({0.25, 1.0});
  const auto joint = peng_pair(x, y);
  EXPECT_EQ(joint.dim(), 2u);
  const auto f = [](double a, double b) { return std::max(a + 2.0 * b, 0.0) - a * a * b * b; };
  const TestFunction tf = TestFunction::of_point(2, [&](std::span<const double> v) { return f(v[0], v[1]); });
  EXPECT_NEAR(expect_upper(joint, tf), oracle::peng_two(x, y, f), 1e-14);
}

TEST(LatticeDp, RunningMaxMatchesPathEnumeration) {
  const auto b = symmetric_three_point({0.5, 1.0});
  for (std::size_t n = 1; n <= 6; ++n) {
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    EXPECT_NEAR(running_max_expect(b, n, s), oracle::path_running_max(b, n, s), 1e-13) << n;
  }
  LatticeSpec l{1, 0.5, {0.0}};
  const AmbiguitySet skew(l, {DiscreteDistribution({{-1.0}, {0.5}}, {1.0 / 3.0, 2.0 / 3.0}),
                              DiscreteDistribution({{-0.5}, {1.5}}, {0.75, 0.25})});
  for (std::size_t n = 1; n <= 6; ++n)
    EXPECT_NEAR(running_max_expect(skew, n, 1.0), oracle::path_running_max(skew, n, 1.0), 1e-12) << n;
}

TEST(LatticeDp, Caps) {
  const auto b = symmetric_three_point({0.5, 1.0});
  DpLimits tight;
  tight.max_states = 50;
  EXPECT_THROW(iid_sum_expect(b, 100, scalar([](double x) { return x; }), 0.1, tight), CapacityExceeded);
  std::vector<AmbiguitySet> many(13, b);
  const TestFunction f(13, 1, [](std::span<const double>) { return 0.0; });
  EXPECT_THROW(nested_expect(many, f), CapacityExceeded);
  const TestFunction f2(3, 1, [](std::span<const double>) { return 0.0; });
  const std::vector<AmbiguitySet> two{b, b};
  EXPECT_THROW(nested_expect(two, f2), InvalidArgument);
  EXPECT_THROW(iid_sum_expect(b, 0, scalar([](double x) { return x; }), 1.0), InvalidArgument);
}

TEST(LatticeDp, StepMismatchRejected) {
  const auto b = symmetric_three_point({1.0});
  const AmbiguitySet h(LatticeSpec{1, 0.5, {0.0}}, {DiscreteDistribution({{-0.5}, {0.5}}, {0.5, 0.5})});
  const std::vector<AmbiguitySet> mixed{b, h};
  EXPECT_THROW(sum_expect(mixed, scalar([](double x) { return x; }), 1.0), InvalidArgument);
}

TEST(LatticeDp, TwoDimensionalSum) {
  const auto x = symmetric_three_point({0.5, 1.0});
  const auto joint = peng_pair(x, x);
  // E[|S_n|^2] / n in 2-d with coordinatewise-independent steps is the sum of
  // the coordinate maxima.
  const TestFunction sq = TestFunction::of_point(
      2, [](std::span<const double> v) { return v[0] * v[0] + v[1] * v[1]; }, GrowthTag::quadratic());
  EXPECT_NEAR(iid_sum_expect(joint, 8, sq, 1.0 / std::sqrt(8.0)), 2.0, 1e-12);
}
