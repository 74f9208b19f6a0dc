#include "sublin/functionals.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "sublin/errors.hpp"

namespace sublin::lab {

namespace {

using Scalar = std::function<double(double)>;
using Pair = std::function<double(double, double)>;

struct ScalarEntry {
  Scalar fn;
  GrowthTag growth;
};

const std::map<std::string, ScalarEntry>& scalar_table() {
  static const std::map<std::string, ScalarEntry> table = {
      {"s", {[](double s) { return s; }, GrowthTag::power(1.0)}},
      {"neg_s", {[](double s) { return -s; }, GrowthTag::power(1.0)}},
      {"s2", {[](double s) { return s * s; }, GrowthTag::quadratic()}},
      {"neg_s2", {[](double s) { return -s * s; }, GrowthTag::quadratic()}},
      {"pos", {[](double s) { return s > 0.0 ? s : 0.0; }, GrowthTag::power(1.0)}},
      {"neg_pos", {[](double s) { return s > 0.0 ? -s : 0.0; }, GrowthTag::power(1.0)}},
      {"sin", {[](double s) { return std::sin(s); }, GrowthTag::bounded()}},
      {"cos", {[](double s) { return std::cos(s); }, GrowthTag::bounded()}},
      {"abs", {[](double s) { return std::abs(s); }, GrowthTag::power(1.0)}},
      {"one", {[](double) { return 1.0; }, GrowthTag::bounded()}},
      {"excess_sq", {[](double s) { return std::max(s * s - 1.0, 0.0); }, GrowthTag::quadratic()}},
      {"cube_abs", {[](double s) { return std::abs(s * s * s); }, GrowthTag::power(3.0)}},
  };
  return table;
}

struct PairEntry {
  Pair fn;
  GrowthTag growth;
};

const std::map<std::string, PairEntry>& pair_table() {
  static const std::map<std::string, PairEntry> table = {
      {"incr", {[](double a, double b) { return b - a; }, GrowthTag::power(1.0)}},
      {"incr_sq", {[](double a, double b) { return (b - a) * (b - a); }, GrowthTag::quadratic()}},
      {"prod", {[](double a, double b) { return a * b; }, GrowthTag::quadratic()}},
  };
  return table;
}

}  // namespace

NamedFunctional functional(const std::string& id) {
  if (auto it = scalar_table().find(id); it != scalar_table().end())
    return {id, TestFunction::scalar(it->second.fn, it->second.growth)};
  if (auto it = pair_table().find(id); it != pair_table().end()) {
    const Pair f = it->second.fn;
    return {id, TestFunction(
                    2, 1, [f](std::span<const double> x) { return f(x[0], x[1]); },
                    it->second.growth)};
  }
  throw InvalidArgument("unknown functional '" + id + "'");
}

std::vector<std::string> scalar_functional_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, entry] : scalar_table()) ids.push_back(id);
  return ids;
}

std::vector<std::string> pair_functional_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, entry] : pair_table()) ids.push_back(id);
  return ids;
}

}  // namespace sublin::lab
