#include "sublin/scenario_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "sublin/errors.hpp"

namespace sublin::tree {

namespace {

constexpr double kProbTolerance = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("scenario tree: " + what);
}

}  // namespace

ScenarioTree::ScenarioTree(std::size_t dim, std::vector<NodeSpec> nodes)
    : dim_(dim), nodes_(std::move(nodes)) {
  require(dim_ > 0, "dimension must be positive");
  require(!nodes_.empty(), "no nodes");
  require(nodes_[0].parent == -1, "node 0 must be the root");
  const std::size_t count = nodes_.size();
  children_.assign(count, {});
  level_.assign(count, 0);
  position_.assign(count, 0);
  for (std::size_t i = 1; i < count; ++i) {
    const auto p = nodes_[i].parent;
    require(p >= 0 && static_cast<std::size_t>(p) < i,
            "node " + std::to_string(i) + " must list an earlier parent");
    require(nodes_[i].increment.size() == dim_,
            "node " + std::to_string(i) + " increment has wrong dimension");
    for (double v : nodes_[i].increment)
      require(std::isfinite(v), "node " + std::to_string(i) + " increment not finite");
    children_[static_cast<std::size_t>(p)].push_back(i);
    level_[i] = level_[static_cast<std::size_t>(p)] + 1;
  }
  std::size_t depth = 0;
  for (std::size_t i = 0; i < count; ++i)
    if (children_[i].empty()) depth = std::max(depth, level_[i]);
  require(depth >= 1, "depth must be at least 1");
  levels_.assign(depth + 1, {});
  for (std::size_t i = 0; i < count; ++i) {
    const auto& kids = children_[i];
    const auto& members = nodes_[i].members;
    if (kids.empty()) {
      require(level_[i] == depth, "leaf " + std::to_string(i) + " is not at the common depth");
      require(members.empty(), "leaf " + std::to_string(i) + " carries transition members");
    } else {
      require(!members.empty(), "node " + std::to_string(i) + " has no transition members");
      std::vector<bool> reachable(kids.size(), false);
      for (const auto& m : members) {
        require(m.size() == kids.size(),
                "node " + std::to_string(i) + " member size differs from child count");
        double total = 0.0;
        for (std::size_t j = 0; j < m.size(); ++j) {
          require(std::isfinite(m[j]) && m[j] >= 0.0,
                  "node " + std::to_string(i) + " has a negative probability");
          total += m[j];
          if (m[j] > 0.0) reachable[j] = true;
        }
        require(std::abs(total - 1.0) <= kProbTolerance,
                "node " + std::to_string(i) + " member probabilities do not sum to 1");
      }
      for (std::size_t j = 0; j < kids.size(); ++j)
        require(reachable[j], "node " + std::to_string(kids[j]) + " is unreachable");
    }
    position_[i] = levels_[level_[i]].size();
    levels_[level_[i]].push_back(i);
  }
}

std::size_t ScenarioTree::ancestor(std::size_t node, std::size_t level) const {
  if (level > level_[node]) throw InvalidArgument("ancestor level below the node");
  while (level_[node] > level) node = static_cast<std::size_t>(nodes_[node].parent);
  return node;
}

std::vector<std::size_t> ScenarioTree::path(std::size_t node) const {
  std::vector<std::size_t> out(level_[node]);
  for (std::size_t k = out.size(); k-- > 0;) {
    out[k] = node;
    node = static_cast<std::size_t>(nodes_[node].parent);
  }
  return out;
}

TreeVariable TreeVariable::constant(const ScenarioTree& tree, std::size_t level, double c) {
  return TreeVariable{level, std::vector<double>(tree.level_size(level), c)};
}

MartingaleArray MartingaleArray::from_tree(const ScenarioTree& tree) {
  MartingaleArray z{tree.dim(), {}};
  z.increments.reserve(tree.node_count());
  for (std::size_t i = 0; i < tree.node_count(); ++i)
    z.increments.push_back(i == 0 ? Point(tree.dim(), 0.0) : tree.increment(i));
  return z;
}

void MartingaleArray::validate(const ScenarioTree& tree) const {
  if (increments.size() != tree.node_count())
    throw InvalidArgument("martingale array does not match the tree");
  for (std::size_t i = 1; i < increments.size(); ++i) {
    if (increments[i].size() != dim) throw InvalidArgument("martingale increment has wrong dimension");
    for (double v : increments[i])
      if (!std::isfinite(v)) throw InvalidArgument("martingale increment not finite");
  }
}

TreeVariable path_variable(const ScenarioTree& tree, std::size_t level,
                           const std::function<double(std::span<const std::size_t>)>& fn) {
  TreeVariable x{level, {}};
  x.values.reserve(tree.level_size(level));
  for (std::size_t node : tree.level_nodes(level)) {
    const auto p = tree.path(node);
    x.values.push_back(fn(p));
  }
  return x;
}

TreeVariable partial_sum(const ScenarioTree& tree, const MartingaleArray& z, std::size_t level,
                         std::size_t axis) {
  return path_variable(tree, level, [&](std::span<const std::size_t> p) {
    double s = 0.0;
    for (std::size_t node : p) s += z.increments[node][axis];
    return s;
  });
}

TreeVariable lift(const ScenarioTree& tree, const TreeVariable& x, std::size_t level) {
  if (level < x.level) throw InvalidArgument("level mismatch: cannot lift to a shallower level");
  if (x.values.size() != tree.level_size(x.level)) throw InvalidArgument("level mismatch");
  TreeVariable out{level, {}};
  out.values.reserve(tree.level_size(level));
  for (std::size_t node : tree.level_nodes(level))
    out.values.push_back(x.values[tree.position(tree.ancestor(node, x.level))]);
  return out;
}

TreeVariable cond_expect(const ScenarioTree& tree, const TreeVariable& x, std::size_t k) {
  if (x.level > tree.depth() || x.values.size() != tree.level_size(x.level))
    throw InvalidArgument("level mismatch");
  if (k > x.level) throw InvalidArgument("level mismatch: conditioning level exceeds variable level");
  std::vector<double> cur = x.values;
  for (std::size_t level = x.level; level-- > k;) {
    std::vector<double> prev;
    prev.reserve(tree.level_size(level));
    for (std::size_t node : tree.level_nodes(level)) {
      const auto kids = tree.children(node);
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& m : tree.members(node)) {
        double mean = 0.0;
        for (std::size_t j = 0; j < kids.size(); ++j) mean += m[j] * cur[tree.position(kids[j])];
        if (mean > best) best = mean;
      }
      prev.push_back(best);
    }
    cur = std::move(prev);
  }
  return TreeVariable{k, std::move(cur)};
}

TreeVariable cond_expect_lower(const ScenarioTree& tree, const TreeVariable& x, std::size_t k) {
  return -cond_expect(tree, -x, k);
}

double expect(const ScenarioTree& tree, const TreeVariable& x) {
  return cond_expect(tree, x, 0).values.front();
}

namespace {

template <class Op>
TreeVariable combine(const TreeVariable& a, const TreeVariable& b, Op op) {
  if (a.level != b.level || a.values.size() != b.values.size())
    throw InvalidArgument("level mismatch");
  TreeVariable out{a.level, std::vector<double>(a.values.size())};
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = op(a.values[i], b.values[i]);
  return out;
}

}  // namespace

TreeVariable operator+(const TreeVariable& a, const TreeVariable& b) {
  return combine(a, b, std::plus<>{});
}

TreeVariable operator-(const TreeVariable& a, const TreeVariable& b) {
  return combine(a, b, std::minus<>{});
}

TreeVariable operator*(double lambda, const TreeVariable& a) {
  TreeVariable out = a;
  for (auto& v : out.values) v *= lambda;
  return out;
}

TreeVariable operator-(const TreeVariable& a) {
  TreeVariable out = a;
  for (auto& v : out.values) v = -v;
  return out;
}

ScenarioTree random_tree(std::mt19937_64& rng, const TreeGenOptions& options) {
  std::uniform_int_distribution<std::size_t> depth_dist(1, options.max_levels);
  std::uniform_int_distribution<std::size_t> kids_dist(1, options.max_children);
  std::uniform_int_distribution<std::size_t> member_dist(1, options.max_members);
  std::uniform_int_distribution<std::int64_t> coord(-options.coord_range, options.coord_range);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t depth = depth_dist(rng);
  std::vector<NodeSpec> nodes{NodeSpec{-1, {}, {}}};
  std::vector<std::size_t> frontier{0};
  for (std::size_t level = 1; level <= depth; ++level) {
    std::vector<std::size_t> next;
    for (std::size_t parent : frontier) {
      std::size_t kids = kids_dist(rng);
      // Keep the remaining levels within the node budget.
      if (nodes.size() + kids * (frontier.size() + 1) > options.max_nodes) kids = 1;
      for (std::size_t c = 0; c < kids; ++c) {
        Point inc(options.dim);
        for (auto& v : inc) v = options.step * static_cast<double>(coord(rng));
        next.push_back(nodes.size());
        nodes.push_back(NodeSpec{static_cast<std::int64_t>(parent), std::move(inc), {}});
      }
      const std::size_t members = member_dist(rng);
      for (std::size_t m = 0; m < members; ++m) {
        std::vector<double> w(kids);
        for (auto& v : w) {
          v = 0.05 + unit(rng);
          if (m > 0 && unit(rng) < 0.2) v = 0.0;
        }
        double total = std::accumulate(w.begin(), w.end(), 0.0);
        if (total == 0.0) {
          w[0] = 1.0;
          total = 1.0;
        }
        for (auto& v : w) v /= total;
        nodes[parent].members.push_back(std::move(w));
      }
    }
    frontier = std::move(next);
  }
  return ScenarioTree(options.dim, std::move(nodes));
}

ScenarioTree make_mean_nonpositive(const ScenarioTree& tree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto nodes = tree.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto kids = tree.children(i);
    if (kids.empty()) continue;
    double upper = -std::numeric_limits<double>::infinity();
    for (const auto& m : nodes[i].members) {
      double mean = 0.0;
      for (std::size_t j = 0; j < kids.size(); ++j) mean += m[j] * nodes[kids[j]].increment[0];
      upper = std::max(upper, mean);
    }
    const double shift = upper + (unit(rng) < 0.5 ? 0.0 : 0.5 * unit(rng));
    for (std::size_t kid : kids) nodes[kid].increment[0] -= shift;
  }
  return ScenarioTree(tree.dim(), std::move(nodes));
}

ScenarioTree independent_tree(std::span<const AmbiguitySet> laws, std::size_t max_nodes) {
  if (laws.empty()) throw InvalidArgument("independent_tree needs at least one law");
  const std::size_t dim = laws.front().dim();
  std::vector<NodeSpec> nodes{NodeSpec{-1, {}, {}}};
  std::vector<std::size_t> frontier{0};
  for (const auto& law : laws) {
    if (law.dim() != dim) throw InvalidArgument("laws differ in dimension");
    // Union support in first-appearance order, dropping points no member charges.
    std::vector<Point> points;
    std::map<Point, std::size_t> slot;
    for (const auto& m : law.members())
      for (std::size_t j = 0; j < m.size(); ++j)
        if (m.probs()[j] > 0.0 && slot.emplace(m.support()[j], points.size()).second)
          points.push_back(m.support()[j]);
    std::vector<std::vector<double>> members;
    for (const auto& m : law.members()) {
      std::vector<double> w(points.size(), 0.0);
      for (std::size_t j = 0; j < m.size(); ++j)
        if (m.probs()[j] > 0.0) w[slot.at(m.support()[j])] += m.probs()[j];
      members.push_back(std::move(w));
    }
    if (nodes.size() + frontier.size() * points.size() > max_nodes)
      throw CapacityExceeded("independent_tree exceeds " + std::to_string(max_nodes) + " nodes");
    std::vector<std::size_t> next;
    for (std::size_t parent : frontier) {
      nodes[parent].members = members;
      for (const auto& p : points) {
        next.push_back(nodes.size());
        nodes.push_back(NodeSpec{static_cast<std::int64_t>(parent), p, {}});
      }
    }
    frontier = std::move(next);
  }
  return ScenarioTree(dim, std::move(nodes));
}

}  // namespace sublin::tree
