#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "sublin/law_report.hpp"
#include "sublin/scenario_tree.hpp"

namespace sublin::tree {

/// Checks the conditional-operator laws (a)-(g) nodewise on every level of
/// the tree, for every ordered pair of sample variables (any levels; they
/// are lifted to the leaves). Violations are absolute magnitudes.
LawReport verify_operator_laws(const ScenarioTree& tree, std::span<const TreeVariable> samples,
                               double tolerance = 1e-10);

/// Random leaf-level variables for the law checks.
std::vector<TreeVariable> random_variables(const ScenarioTree& tree, std::size_t count,
                                           std::mt19937_64& rng);

/// A pathwise sum of conditional expectations together with its upper
/// expectation over the tree.
struct ConditionalSum {
  TreeVariable pathwise;  // measurable at level max(last_term - 1, 0)
  double upper = 0.0;
};

/// sum_{k<=last} E[h(Z_k) | level k-1], expressed at level last-1.
ConditionalSum conditional_sum(const ScenarioTree& tree, const MartingaleArray& z,
                               std::size_t last, const std::function<double(const Point&)>& h);

/// sum_k E[(|Z_k|^2 - eps)^+ | level k-1].
ConditionalSum lindeberg_stat(const ScenarioTree& tree, const MartingaleArray& z, double eps);

/// Upper expectation of sum_k (|E[Z_k | k-1]| + |lower E[Z_k | k-1]|), with
/// conditional means taken componentwise and |.| the Euclidean norm.
double drift_stat(const ScenarioTree& tree, const MartingaleArray& z);

/// Upper expectation of sum_{k<=checkpoint} E[<Z_k A, Z_k> | k-1]; A is a
/// row-major symmetric dim x dim matrix.
double quadratic_characteristic(const ScenarioTree& tree, const MartingaleArray& z,
                                std::span<const double> a, std::size_t checkpoint);

struct RosenthalResult {
  // Maximal inequality under nonpositive conditional upper means (constant 1).
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
  // p-th moment bound: lhs_p against the three-term sum; the constant is
  // reported as the empirical ratio rather than asserted.
  double p = 2.0;
  double lhs_p = 0.0;
  double term_moment = 0.0;
  double term_variance = 0.0;
  double term_drift = 0.0;
  double ratio = 0.0;  // lhs_p / (sum of terms), 0 when both sides vanish
};

/// First display only; throws InvalidArgument("conditional mean sign
/// violated") when some node has a positive conditional upper mean.
RosenthalResult rosenthal_first(const ScenarioTree& tree, const MartingaleArray& z);
/// Second display only (no sign precondition).
RosenthalResult rosenthal_second(const ScenarioTree& tree, const MartingaleArray& z, double p);
/// Both displays.
RosenthalResult rosenthal_check(const ScenarioTree& tree, const MartingaleArray& z, double p);

}  // namespace sublin::tree
