#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sublin/errors.hpp"
#include "sublin/lattice_dp.hpp"
#include "sublin/scenario_tree.hpp"
#include "sublin/tree_io.hpp"
#include "sublin/tree_stats.hpp"

using namespace sublin;
using namespace sublin::tree;

namespace {

// Root with two children, each with two leaves.
ScenarioTree small_tree() {
  std::vector<NodeSpec> nodes = {
      {-1, {}, {{0.5, 0.5}, {0.9, 0.1}}},
      {0, {1.0}, {{0.5, 0.5}}},
      {0, {-1.0}, {{0.2, 0.8}, {0.7, 0.3}}},
      {1, {2.0}, {}},
      {1, {0.0}, {}},
      {2, {1.0}, {}},
      {2, {-3.0}, {}},
  };
  return ScenarioTree(1, nodes);
}

}  // namespace

TEST(ScenarioTree, Structure) {
  const auto t = small_tree();
  EXPECT_EQ(t.depth(), 2u);
  EXPECT_EQ(t.level_size(1), 2u);
  EXPECT_EQ(t.level_size(2), 4u);
  EXPECT_EQ(t.ancestor(6, 1), 2u);
  EXPECT_EQ(t.path(5), (std::vector<std::size_t>{2, 5}));
  EXPECT_EQ(t.position(4), 1u);
}

TEST(ScenarioTree, HandComputedConditionalExpectation) {
  const auto t = small_tree();
  const auto s2 = partial_sum(t, MartingaleArray::from_tree(t), 2);
  EXPECT_EQ(s2.values, (std::vector<double>{3.0, 1.0, 0.0, -4.0}));
  const auto c1 = cond_expect(t, s2, 1);
  EXPECT_DOUBLE_EQ(c1.values[0], 2.0);
  EXPECT_DOUBLE_EQ(c1.values[1], std::max(0.2 * 0.0 + 0.8 * -4.0, 0.7 * 0.0 + 0.3 * -4.0));
  EXPECT_DOUBLE_EQ(expect(t, s2), std::max(0.5 * 2.0 + 0.5 * -1.2, 0.9 * 2.0 + 0.1 * -1.2));
  const auto low = cond_expect_lower(t, s2, 1);
  EXPECT_DOUBLE_EQ(low.values[1], -3.2);
}

TEST(ScenarioTree, ValidationErrors) {
  // Leaves at different depths.
  EXPECT_THROW(ScenarioTree(1, {{-1, {}, {{0.5, 0.5}}}, {0, {1.0}, {{1.0}}}, {0, {0.0}, {}}, {1, {1.0}, {}}}),
               InvalidArgument);
  // Probabilities do not sum to one.
  EXPECT_THROW(ScenarioTree(1, {{-1, {}, {{0.5, 0.6}}}, {0, {1.0}, {}}, {0, {0.0}, {}}}), InvalidArgument);
  // Member of the wrong size.
  EXPECT_THROW(ScenarioTree(1, {{-1, {}, {{1.0}}}, {0, {1.0}, {}}, {0, {0.0}, {}}}), InvalidArgument);
  // A child no member reaches.
  EXPECT_THROW(ScenarioTree(1, {{-1, {}, {{1.0, 0.0}}}, {0, {1.0}, {}}, {0, {0.0}, {}}}), InvalidArgument);
  // Parent listed after child.
  EXPECT_THROW(ScenarioTree(1, {{-1, {}, {{1.0}}}, {2, {1.0}, {}}, {0, {0.0}, {{1.0}}}}), InvalidArgument);
  // A lone root has depth 0.
  EXPECT_THROW(ScenarioTree(1, {{-1, {}, {}}}), InvalidArgument);
}

TEST(ScenarioTree, LevelMismatch) {
  const auto t = small_tree();
  const auto s1 = partial_sum(t, MartingaleArray::from_tree(t), 1);
  EXPECT_THROW(cond_expect(t, s1, 2), InvalidArgument);
  TreeVariable bad{2, {1.0, 2.0}};
  EXPECT_THROW(cond_expect(t, bad, 1), InvalidArgument);
  EXPECT_THROW(s1 + partial_sum(t, MartingaleArray::from_tree(t), 2), InvalidArgument);
}

TEST(ScenarioTree, BackwardInductionMatchesStrategyEnumeration) {
  std::mt19937_64 rng(2024);
  TreeGenOptions o;
  o.max_levels = 3;
  o.max_children = 3;
  o.max_members = 2;
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto t = random_tree(rng, o);
    TreeVariable x{t.depth(), std::vector<double>(t.level_size(t.depth()))};
    for (auto& v : x.values) v = u(rng);
    for (std::size_t k = 0; k <= t.depth(); ++k) {
      const auto c = cond_expect(t, x, k);
      const auto nodes = t.level_nodes(k);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        EXPECT_NEAR(c.values[i], oracle::tree_strategy_expect(t, x.values, nodes[i]), 1e-12);
    }
  }
}

TEST(ScenarioTree, OperatorLawsOnRandomTrees) {
  std::mt19937_64 rng(77);
  LawReport all(1e-10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = random_tree(rng);
    const auto vars = random_variables(t, 4, rng);
    all.merge(verify_operator_laws(t, vars));
  }
  EXPECT_EQ(all.checks().size(), 9u);  // (a) and (c) are recorded in two parts
  for (const auto& c : all.checks()) EXPECT_TRUE(c.pass) << c.name << " " << c.worst_violation;
}

TEST(ScenarioTree, IndependentTreeMatchesLatticeDp) {
  const auto b = symmetric_three_point({0.5, 1.0});
  const AmbiguitySet skew(LatticeSpec::integer(), {DiscreteDistribution({{-1.0}, {2.0}}, {2.0 / 3.0, 1.0 / 3.0}),
                                                   DiscreteDistribution({{-2.0}, {1.0}}, {1.0 / 3.0, 2.0 / 3.0})});
  const std::vector<AmbiguitySet> laws{b, skew, b, skew, b};
  const auto t = independent_tree(laws);
  const auto s = partial_sum(t, MartingaleArray::from_tree(t), t.depth());
  for (auto f : {+[](double x) { return std::max(x, 0.0); }, +[](double x) { return std::sin(x); },
                 +[](double x) { return -x * x; }}) {
    TreeVariable fx = s;
    for (auto& v : fx.values) v = f(v);
    EXPECT_NEAR(expect(t, fx), sum_expect(laws, TestFunction::scalar(f), 1.0), 1e-12);
  }
}

TEST(ScenarioTree, JsonRoundTrip) {
  std::mt19937_64 rng(5);
  const auto t = random_tree(rng);
  std::stringstream ss;
  write_tree(ss, t);
  const auto back = read_tree(ss);
  ASSERT_EQ(back.node_count(), t.node_count());
  for (std::size_t i = 0; i < t.node_count(); ++i) {
    EXPECT_EQ(back.parent(i), t.parent(i));
    EXPECT_EQ(back.members(i), t.members(i));
    if (i) {
      EXPECT_EQ(back.increment(i), t.increment(i));
    }
  }
  std::stringstream bad("{\"format\": \"sublin-tree/1\", \"dim\": 1, \"nodes\": [{\"parent\": \"x\"}]}");
  EXPECT_THROW(read_tree(bad), InvalidArgument);
}
