#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

using sublin::AmbiguitySet;
using sublin::tree::ScenarioTree;

namespace {

double linear(const ScenarioTree& tree, const std::vector<double>& leaf_values, std::size_t node,
              const std::vector<std::size_t>& choice, const std::vector<std::ptrdiff_t>& slot) {
  const auto kids = tree.children(node);
  if (kids.empty()) return leaf_values.at(tree.position(node));
  const auto& probs = tree.members(node).at(choice[static_cast<std::size_t>(slot[node])]);
  double v = 0.0;
  for (std::size_t i = 0; i < kids.size(); ++i)
    if (probs[i] > 0.0) v += probs[i] * linear(tree, leaf_values, kids[i], choice, slot);
  return v;
}

}  // namespace

double tree_strategy_expect(const ScenarioTree& tree, const std::vector<double>& leaf_values,
                            std::size_t node) {
  std::vector<std::size_t> internal;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (tree.children(v).empty()) continue;
    internal.push_back(v);
    for (std::size_t c : tree.children(v)) stack.push_back(c);
  }
  std::vector<std::ptrdiff_t> slot(tree.node_count(), -1);
  for (std::size_t i = 0; i < internal.size(); ++i) slot[internal[i]] = static_cast<std::ptrdiff_t>(i);

  std::vector<std::size_t> choice(internal.size(), 0);
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    best = std::max(best, linear(tree, leaf_values, node, choice, slot));
    std::size_t i = 0;
    for (; i < internal.size(); ++i) {
      if (++choice[i] < tree.members(internal[i]).size()) break;
      choice[i] = 0;
    }
    if (i == internal.size()) break;
  }
  return best;
}

namespace {

double sum_rec(const std::vector<AmbiguitySet>& steps, std::size_t k, double s,
               const std::function<double(double)>& g, double scale) {
  if (k == steps.size()) return g(scale * s);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& m : steps[k].members()) {
    double v = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
      v += m.probs()[i] * sum_rec(steps, k + 1, s + m.support()[i][0], g, scale);
    best = std::max(best, v);
  }
  return best;
}

double max_rec(const AmbiguitySet& x, std::size_t left, double s, double mx, double scale) {
  if (left == 0) return mx;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& m : x.members()) {
    double v = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double next = s + m.support()[i][0];
      v += m.probs()[i] * max_rec(x, left - 1, next, std::max(mx, std::abs(scale * next)), scale);
    }
    best = std::max(best, v);
  }
  return best;
}

double mean_max(const AmbiguitySet& x, const std::function<double(double)>& f) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& m : x.members()) {
    double v = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) v += m.probs()[i] * f(m.support()[i][0]);
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

double path_sum_expect(const std::vector<AmbiguitySet>& steps, const std::function<double(double)>& g,
                       double scale) {
  return sum_rec(steps, 0, 0.0, g, scale);
}

double path_running_max(const AmbiguitySet& x, std::size_t n, double scale) {
  return max_rec(x, n, 0.0, 0.0, scale);
}

double peng_two(const AmbiguitySet& x, const AmbiguitySet& y, const std::function<double(double, double)>& f) {
  return mean_max(x, [&](double a) { return mean_max(y, [&](double b) { return f(a, b); }); });
}

std::size_t tau_scan(const std::vector<double>& variances, double t) {
  const std::size_t n = variances.size();
  if (t == 0.0) return 0;
  if (t == 1.0) return n;
  std::vector<double> b2(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) b2[k + 1] = b2[k] + variances[k];
  std::size_t found = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (b2[k] / b2[n] <= t && t < b2[k + 1] / b2[n]) found = k;
  return found;
}

double normal_expect(const std::function<double(double)>& phi, double variance) {
  if (variance == 0.0) return phi(0.0);
  const double sd = std::sqrt(variance);
  const double lo = -12.0 * sd, hi = 12.0 * sd;
  const std::size_t m = 20000;  // even
  const double h = (hi - lo) / static_cast<double>(m);
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * variance);
  double acc = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * phi(x) * norm * std::exp(-x * x / (2.0 * variance));
  }
  return acc * h / 3.0;
}

}  // namespace oracle
