#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sublin/ambiguity.hpp"

namespace sublin::tree {

/// One node as supplied to the ScenarioTree constructor.
///
/// `increment` labels the edge from the parent into this node (ignored for
/// the root). `members` lists, for a non-leaf node, the candidate transition
/// laws over its children in order of appearance.
struct NodeSpec {
  std::int64_t parent = -1;
  Point increment;
  std::vector<std::vector<double>> members;
};

/// A finite filtration: level k of the tree is the node algebra of the k-th
/// sigma-field. Every root-to-leaf path has the same length (the depth).
class ScenarioTree {
 public:
  /// Nodes must be listed parents-first; node 0 is the root.
  ScenarioTree(std::size_t dim, std::vector<NodeSpec> nodes);

  std::size_t dim() const { return dim_; }
  std::size_t depth() const { return levels_.size() - 1; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t level_size(std::size_t level) const { return levels_.at(level).size(); }
  std::span<const std::size_t> level_nodes(std::size_t level) const { return levels_.at(level); }

  std::size_t level_of(std::size_t node) const { return level_[node]; }
  /// Index of the node inside its level.
  std::size_t position(std::size_t node) const { return position_[node]; }
  std::int64_t parent(std::size_t node) const { return nodes_[node].parent; }
  std::span<const std::size_t> children(std::size_t node) const { return children_[node]; }
  const std::vector<std::vector<double>>& members(std::size_t node) const {
    return nodes_[node].members;
  }
  const Point& increment(std::size_t node) const { return nodes_[node].increment; }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }

  /// Ancestor of `node` at `level` (level <= level_of(node)).
  std::size_t ancestor(std::size_t node, std::size_t level) const;
  /// Node ids on the path from level 1 down to `node`.
  std::vector<std::size_t> path(std::size_t node) const;

 private:
  std::size_t dim_;
  std::vector<NodeSpec> nodes_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::vector<std::size_t>> levels_;
  std::vector<std::size_t> level_;
  std::vector<std::size_t> position_;
};

/// A real random variable measurable with respect to one level.
struct TreeVariable {
  std::size_t level = 0;
  std::vector<double> values;  // indexed by position within the level

  static TreeVariable constant(const ScenarioTree& tree, std::size_t level, double c);
};

/// Edge increments Z_{n,k}, one d-vector per node at levels 1..depth.
struct MartingaleArray {
  std::size_t dim = 1;
  std::vector<Point> increments;  // indexed by node id; the root entry is unused

  static MartingaleArray from_tree(const ScenarioTree& tree);
  void validate(const ScenarioTree& tree) const;
};

/// Variable at `level` built from a function of the path's node ids.
TreeVariable path_variable(const ScenarioTree& tree, std::size_t level,
                           const std::function<double(std::span<const std::size_t>)>& fn);
/// Partial sums S_level of the scalar array (component `axis`).
TreeVariable partial_sum(const ScenarioTree& tree, const MartingaleArray& z, std::size_t level,
                         std::size_t axis = 0);

/// Re-expresses X (measurable at its level) as a variable at a deeper level.
TreeVariable lift(const ScenarioTree& tree, const TreeVariable& x, std::size_t level);

/// Conditional upper expectation E[X | level k] by backward induction,
/// 0 <= k <= X.level. Ties pick the lowest member index.
TreeVariable cond_expect(const ScenarioTree& tree, const TreeVariable& x, std::size_t k);
/// -cond_expect(-X).
TreeVariable cond_expect_lower(const ScenarioTree& tree, const TreeVariable& x, std::size_t k);
/// Upper expectation E[X] (conditioning on the trivial root algebra).
double expect(const ScenarioTree& tree, const TreeVariable& x);

TreeVariable operator+(const TreeVariable& a, const TreeVariable& b);
TreeVariable operator-(const TreeVariable& a, const TreeVariable& b);
TreeVariable operator*(double lambda, const TreeVariable& a);
TreeVariable operator-(const TreeVariable& a);

struct TreeGenOptions {
  std::size_t max_levels = 6;
  std::size_t max_children = 4;
  std::size_t max_members = 3;
  std::size_t max_nodes = 2000;
  std::size_t dim = 1;
  double step = 0.5;
  std::int64_t coord_range = 4;
};

/// Seeded random tree; member 0 of every node gives all children positive
/// probability, so every node is reachable.
ScenarioTree random_tree(std::mt19937_64& rng, const TreeGenOptions& options = {});

/// Shifts the children of every node so that the conditional upper mean of
/// the first increment component is <= 0 everywhere (strictly negative by a
/// random amount on some nodes).
ScenarioTree make_mean_nonpositive(const ScenarioTree& tree, std::mt19937_64& rng);

/// Full product tree of independent one-step laws (level k branches over the
/// union support of laws[k-1]). Used to cross-check sequence statistics.
ScenarioTree independent_tree(std::span<const AmbiguitySet> laws, std::size_t max_nodes = 200000);

}  // namespace sublin::tree
