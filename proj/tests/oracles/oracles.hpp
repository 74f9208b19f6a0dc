#pragma once

// Reference computations used only by the tests. Each one takes a different
// route from the library code it checks: explicit enumeration of strategies
// or paths, direct scans of defining inequalities, quadrature.

#include <cstddef>
#include <functional>
#include <vector>

#include "sublin/ambiguity.hpp"
#include "sublin/scenario_tree.hpp"

namespace oracle {

/// max over every assignment of one member per non-leaf node of the
/// subtree at `node` of the classical conditional expectation of a leaf
/// variable. Exponential in the subtree's internal node count.
double tree_strategy_expect(const sublin::tree::ScenarioTree& tree, const std::vector<double>& leaf_values,
                            std::size_t node);

/// E[g(scale * (X_1 + ... + X_n))] by recursion over raw paths (no state
/// merging): at each step maximize over members the member-weighted
/// continuation values.
double path_sum_expect(const std::vector<sublin::AmbiguitySet>& steps,
                       const std::function<double(double)>& g, double scale);

/// E[max_{i<=n} |scale * S_i|] by the same path recursion.
double path_running_max(const sublin::AmbiguitySet& x, std::size_t n, double scale);

/// max_P sum_x P(x) max_Q sum_y Q(y) f(x, y) for scalar laws.
double peng_two(const sublin::AmbiguitySet& x, const sublin::AmbiguitySet& y,
                const std::function<double(double, double)>& f);

/// The k in [0, n] with B_k^2 / B_n^2 <= t < B_{k+1}^2 / B_n^2 (largest such k),
/// found by scanning; n at t = 1 and 0 at t = 0.
std::size_t tau_scan(const std::vector<double>& variances, double t);

/// Classical E[phi(sqrt(v) N)] by composite Simpson quadrature.
double normal_expect(const std::function<double(double)>& phi, double variance);

}  // namespace oracle
