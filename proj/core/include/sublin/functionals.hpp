#pragma once

#include <string>
#include <vector>

#include "sublin/test_function.hpp"

namespace sublin::lab {

/// A test function with the identifier used in configs and reports.
struct NamedFunctional {
  std::string id;
  TestFunction fn;
};

/// One-argument functionals of a scalar s:
///   s, neg_s, s2, neg_s2, pos (s^+), neg_pos (-s^+), sin, cos, abs, one,
///   excess_sq ((s^2 - 1)^+), cube_abs (|s|^3).
/// Two-argument functionals of (x1, x2): incr, incr_sq, prod.
/// Throws InvalidArgument for an unknown id.
NamedFunctional functional(const std::string& id);

std::vector<std::string> scalar_functional_ids();
std::vector<std::string> pair_functional_ids();

}  // namespace sublin::lab
