#include "sublin/tree_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sublin/errors.hpp"

namespace sublin::tree {

namespace {

double max_abs_diff(const TreeVariable& a, const TreeVariable& b) {
  if (a.values.size() != b.values.size()) return std::numeric_limits<double>::infinity();
  double w = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    w = std::max(w, std::abs(a.values[i] - b.values[i]));
  return w;
}

// max over nodes of (a - b)^+
double max_excess(const TreeVariable& a, const TreeVariable& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) w = std::max(w, a.values[i] - b.values[i]);
  return w;
}

TreeVariable map_values(TreeVariable x, const std::function<double(double)>& f) {
  for (auto& v : x.values) v = f(v);
  return x;
}

TreeVariable product(const TreeVariable& a, const TreeVariable& b) {
  TreeVariable out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
  return out;
}

// Per-node conditional upper and lower means of one increment component.
struct NodeMeans {
  double upper;
  double lower;
};

NodeMeans node_means(const ScenarioTree& tree, const MartingaleArray& z, std::size_t node,
                     std::size_t axis) {
  const auto kids = tree.children(node);
  NodeMeans out{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& m : tree.members(node)) {
    double mean = 0.0;
    for (std::size_t j = 0; j < kids.size(); ++j) mean += m[j] * z.increments[kids[j]][axis];
    out.upper = std::max(out.upper, mean);
    out.lower = std::min(out.lower, mean);
  }
  return out;
}

// sum_{k<=last} term_k(node at level k-1), expressed at level max(last-1, 0).
TreeVariable sum_of_node_terms(const ScenarioTree& tree, std::size_t last,
                               const std::function<double(std::size_t)>& term) {
  const std::size_t target = last == 0 ? 0 : last - 1;
  TreeVariable total = TreeVariable::constant(tree, target, 0.0);
  for (std::size_t k = 1; k <= last; ++k) {
    TreeVariable t{k - 1, {}};
    for (std::size_t node : tree.level_nodes(k - 1)) t.values.push_back(term(node));
    total = total + lift(tree, t, target);
  }
  return total;
}

void require_scalar(const ScenarioTree& tree, const MartingaleArray& z) {
  z.validate(tree);
  if (z.dim != 1) throw InvalidArgument("Rosenthal check needs a one-dimensional array");
}

}  // namespace

std::vector<TreeVariable> random_variables(const ScenarioTree& tree, std::size_t count,
                                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-3.0, 3.0);
  std::vector<TreeVariable> out;
  const std::size_t depth = tree.depth();
  for (std::size_t i = 0; i < count; ++i) {
    TreeVariable x{depth, {}};
    for (std::size_t j = 0; j < tree.level_size(depth); ++j) x.values.push_back(unit(rng));
    if (i % 3 == 2) {
      // A path functional: squared terminal sum plus noise.
      const auto s = partial_sum(tree, MartingaleArray::from_tree(tree), depth);
      for (std::size_t j = 0; j < x.values.size(); ++j) x.values[j] += s.values[j] * s.values[j];
    }
    out.push_back(std::move(x));
  }
  return out;
}

LawReport verify_operator_laws(const ScenarioTree& tree, std::span<const TreeVariable> samples,
                               double tolerance) {
  LawReport report(tolerance);
  const std::size_t depth = tree.depth();
  std::vector<TreeVariable> leaves;
  for (const auto& s : samples) leaves.push_back(lift(tree, s, depth));
  const double c = 1.7;
  const double lambdas[] = {0.0, 0.5, 3.0};

  for (std::size_t k = 0; k <= depth; ++k) {
    // (c) constants
    const auto ec = cond_expect(tree, TreeVariable::constant(tree, depth, c), k);
    report.record("(c) constant", max_abs_diff(ec, TreeVariable::constant(tree, k, c)));

    for (const auto& x : leaves) {
      const auto ex = cond_expect(tree, x, k);
      const double ex_top = expect(tree, x);

      report.record("(b) expectation of conditional", std::abs(expect(tree, ex) - ex_top));
      for (double lambda : lambdas)
        report.record("(c) homogeneity",
                      max_abs_diff(cond_expect(tree, lambda * x, k), lambda * ex));

      double bound = 0.0;
      for (double v : x.values) bound = std::max(bound, std::abs(v));
      double worst = 0.0;
      for (double v : ex.values) worst = std::max(worst, std::abs(v) - bound);
      report.record("(g) boundedness", std::max(0.0, worst));

      for (std::size_t l = 0; l <= depth; ++l) {
        const auto inner = cond_expect(tree, x, l);
        if (k <= l) {
          report.record("(f) tower", max_abs_diff(cond_expect(tree, inner, k), ex));
        } else {
          report.record("(f) tower", max_abs_diff(cond_expect(tree, lift(tree, inner, depth), k),
                                                  lift(tree, inner, k)));
        }
      }

      for (const auto& y : leaves) {
        const auto ey = cond_expect(tree, y, k);
        const auto ey_neg = cond_expect(tree, -y, k);
        const auto xk = lift(tree, ex, depth);  // a level-k measurable variable

        report.record("(a) translation", max_abs_diff(cond_expect(tree, xk + y, k), ex + ey));
        TreeVariable rule{k, std::vector<double>(ex.values.size())};
        for (std::size_t i = 0; i < rule.values.size(); ++i) {
          const double v = ex.values[i];
          rule.values[i] = std::max(v, 0.0) * ey.values[i] + std::max(-v, 0.0) * ey_neg.values[i];
        }
        report.record("(a) product rule", max_abs_diff(cond_expect(tree, product(xk, y), k), rule));

        const auto dominating = x + map_values(y, [](double v) { return std::abs(v); });
        report.record("(d) monotonicity", max_excess(ex, cond_expect(tree, dominating, k)));

        report.record("(e) difference subadditivity",
                      max_excess(ex - ey, cond_expect(tree, x - y, k)));
      }
    }
  }
  return report;
}

ConditionalSum conditional_sum(const ScenarioTree& tree, const MartingaleArray& z,
                               std::size_t last, const std::function<double(const Point&)>& h) {
  z.validate(tree);
  if (last > tree.depth()) throw InvalidArgument("level mismatch: checkpoint beyond depth");
  auto pathwise = sum_of_node_terms(tree, last, [&](std::size_t node) {
    const auto kids = tree.children(node);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& m : tree.members(node)) {
      double mean = 0.0;
      for (std::size_t j = 0; j < kids.size(); ++j) mean += m[j] * h(z.increments[kids[j]]);
      best = std::max(best, mean);
    }
    return best;
  });
  const double upper = expect(tree, pathwise);
  return ConditionalSum{std::move(pathwise), upper};
}

ConditionalSum lindeberg_stat(const ScenarioTree& tree, const MartingaleArray& z, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("Lindeberg threshold must be positive");
  return conditional_sum(tree, z, tree.depth(), [eps](const Point& v) {
    double sq = 0.0;
    for (double c : v) sq += c * c;
    return std::max(sq - eps, 0.0);
  });
}

double drift_stat(const ScenarioTree& tree, const MartingaleArray& z) {
  z.validate(tree);
  const auto total = sum_of_node_terms(tree, tree.depth(), [&](std::size_t node) {
    double up = 0.0;
    double lo = 0.0;
    for (std::size_t a = 0; a < z.dim; ++a) {
      const auto m = node_means(tree, z, node, a);
      up += m.upper * m.upper;
      lo += m.lower * m.lower;
    }
    return std::sqrt(up) + std::sqrt(lo);
  });
  return expect(tree, total);
}

double quadratic_characteristic(const ScenarioTree& tree, const MartingaleArray& z,
                                std::span<const double> a, std::size_t checkpoint) {
  const std::size_t d = z.dim;
  if (a.size() != d * d) throw InvalidArgument("quadratic form has wrong size");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(a[i * d + j] - a[j * d + i]) >
          1e-12 * std::max({1.0, std::abs(a[i * d + j]), std::abs(a[j * d + i])}))
        throw InvalidArgument("non-symmetric quadratic form");
  return conditional_sum(tree, z, checkpoint, [&](const Point& v) {
           double q = 0.0;
           for (std::size_t i = 0; i < d; ++i)
             for (std::size_t j = 0; j < d; ++j) q += v[i] * a[i * d + j] * v[j];
           return q;
         })
      .upper;
}

RosenthalResult rosenthal_first(const ScenarioTree& tree, const MartingaleArray& z) {
  require_scalar(tree, z);
  const std::size_t depth = tree.depth();
  for (std::size_t node = 0; node < tree.node_count(); ++node) {
    if (tree.children(node).empty()) continue;
    if (node_means(tree, z, node, 0).upper > 1e-12)
      throw InvalidArgument("conditional mean sign violated at node " + std::to_string(node));
  }
  RosenthalResult r;
  const auto lhs_var = path_variable(tree, depth, [&](std::span<const std::size_t> p) {
    // max over k of (S_n - S_k), k = 0..n; the k = n term is 0.
    double best = 0.0;
    double tail = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) {
      tail += z.increments[p[i]][0];
      best = std::max(best, tail);
    }
    return best * best;
  });
  r.lhs = expect(tree, lhs_var);
  r.rhs = conditional_sum(tree, z, depth, [](const Point& v) { return v[0] * v[0]; }).upper;
  r.pass = r.lhs <= r.rhs + 1e-12 * std::max(1.0, std::abs(r.rhs));
  return r;
}

RosenthalResult rosenthal_second(const ScenarioTree& tree, const MartingaleArray& z, double p) {
  require_scalar(tree, z);
  if (!(p >= 2.0)) throw InvalidArgument("Rosenthal exponent must be >= 2");
  const std::size_t depth = tree.depth();
  RosenthalResult r;
  r.p = p;
  r.lhs_p = expect(tree, path_variable(tree, depth, [&](std::span<const std::size_t> path) {
    double s = 0.0;
    double best = 0.0;
    for (std::size_t node : path) {
      s += z.increments[node][0];
      best = std::max(best, std::abs(s));
    }
    return std::pow(best, p);
  }));
  r.term_moment =
      conditional_sum(tree, z, depth, [p](const Point& v) { return std::pow(std::abs(v[0]), p); })
          .upper;
  const auto variance = conditional_sum(tree, z, depth, [](const Point& v) { return v[0] * v[0]; });
  r.term_variance =
      expect(tree, map_values(variance.pathwise, [p](double v) { return std::pow(v, p / 2.0); }));
  const auto drift = sum_of_node_terms(tree, depth, [&](std::size_t node) {
    const auto m = node_means(tree, z, node, 0);
    return std::max(m.upper, 0.0) + std::max(-m.lower, 0.0);
  });
  r.term_drift = expect(tree, map_values(drift, [p](double v) { return std::pow(v, p); }));
  const double denom = r.term_moment + r.term_variance + r.term_drift;
  if (denom > 0.0)
    r.ratio = r.lhs_p / denom;
  else
    r.ratio = r.lhs_p > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

RosenthalResult rosenthal_check(const ScenarioTree& tree, const MartingaleArray& z, double p) {
  RosenthalResult r = rosenthal_first(tree, z);
  const RosenthalResult second = rosenthal_second(tree, z, p);
  r.p = second.p;
  r.lhs_p = second.lhs_p;
  r.term_moment = second.term_moment;
  r.term_variance = second.term_variance;
  r.term_drift = second.term_drift;
  r.ratio = second.ratio;
  return r;
}

}  // namespace sublin::tree
