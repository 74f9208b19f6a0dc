#pragma once

#include <cstddef>
#include <span>

#include "sublin/ambiguity.hpp"
#include "sublin/test_function.hpp"

namespace sublin {

/// Size caps for the exact engines. Exceeding one raises CapacityExceeded.
struct DpLimits {
  std::size_t max_nesting = 12;
  std::size_t max_states = std::size_t{1} << 26;
  std::size_t max_members = 1u << 16;  // peng_pair family size
};

/// E[f(X_1, ..., X_k)] where each X_j is independent of (X_1, ..., X_{j-1})
/// in Peng's sense. The last argument is integrated out first. Cost is the
/// product of the per-argument support counts.
double nested_expect(std::span<const AmbiguitySet> xs, const TestFunction& f,
                     const DpLimits& limits = {});

/// E[g(scale * (X_1 + ... + X_k))] for independent X_j with the given laws,
/// by backward dynamic programming on the partial-sum lattice. All laws must
/// share the lattice step and dimension. With no steps this is g(0).
double sum_expect(std::span<const AmbiguitySet> steps, const TestFunction& g, double scale,
                  const DpLimits& limits = {});

/// sum_expect with n copies of the same law.
double iid_sum_expect(const AmbiguitySet& x, std::size_t n, const TestFunction& g, double scale,
                      const DpLimits& limits = {});

/// E[max_{i<=n} |scale * S_i|] for iid one-dimensional steps, by dynamic
/// programming over (partial sum, running maximum).
double running_max_expect(const AmbiguitySet& x, std::size_t n, double scale,
                          const DpLimits& limits = {});

/// Joint law of (X, Y) with Y independent of X: one member per choice of an
/// X-member and a Y-member for every X-support point.
AmbiguitySet peng_pair(const AmbiguitySet& x, const AmbiguitySet& y, const DpLimits& limits = {});

}  // namespace sublin
