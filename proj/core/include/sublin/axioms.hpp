#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "sublin/ambiguity.hpp"
#include "sublin/law_report.hpp"
#include "sublin/test_function.hpp"

namespace sublin {

struct RandomSetOptions {
  std::size_t dim = 1;
  std::size_t max_members = 3;
  std::size_t max_support = 5;
  std::int64_t coord_range = 4;  // integer coordinates drawn from [-range, range]
  double step = 0.5;
};

AmbiguitySet random_ambiguity_set(std::mt19937_64& rng, const RandomSetOptions& options = {});

/// Smooth-plus-kink random function of one point in R^dim.
TestFunction random_test_function(std::mt19937_64& rng, std::size_t dim);

/// Checks monotonicity, constant preservation, sub-additivity, positive
/// homogeneity and conjugate ordering for the pair (f, g) on x, plus the
/// capacity sub-additivity bounds on two random half-space events.
void check_expectation_axioms(const AmbiguitySet& x, const TestFunction& f, const TestFunction& g,
                              std::mt19937_64& rng, LawReport& report);

/// `sets` random ambiguity sets, `pairs` random function pairs per set.
LawReport run_axiom_suite(std::uint64_t seed, std::size_t sets, std::size_t pairs,
                          const RandomSetOptions& options = {}, double tolerance = 1e-10);

}  // namespace sublin
