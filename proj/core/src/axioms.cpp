#include "sublin/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

namespace sublin {

AmbiguitySet random_ambiguity_set(std::mt19937_64& rng, const RandomSetOptions& options) {
  const std::size_t d = options.dim;
  std::uniform_int_distribution<std::size_t> member_count(1, options.max_members);
  std::uniform_int_distribution<std::size_t> support_count(1, options.max_support);
  std::uniform_int_distribution<std::int64_t> coord(-options.coord_range, options.coord_range);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  LatticeSpec lattice{d, options.step, std::vector<double>(d)};
  for (auto& o : lattice.origin) o = options.step * std::floor(4.0 * unit(rng)) / 4.0;

  std::vector<DiscreteDistribution> members;
  const std::size_t m = member_count(rng);
  for (std::size_t i = 0; i < m; ++i) {
    std::set<std::vector<std::int64_t>> picked;
    const std::size_t want = support_count(rng);
    for (std::size_t tries = 0; picked.size() < want && tries < 64; ++tries) {
      std::vector<std::int64_t> k(d);
      for (auto& v : k) v = coord(rng);
      picked.insert(k);
    }
    std::vector<Point> support;
    std::vector<double> weights;
    for (const auto& k : picked) {
      Point p(d);
      for (std::size_t a = 0; a < d; ++a) p[a] = lattice.value_at(k[a], a);
      support.push_back(std::move(p));
      weights.push_back(0.05 + unit(rng));
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto& w : weights) w /= total;
    members.emplace_back(std::move(support), std::move(weights));
  }
  return AmbiguitySet(std::move(lattice), std::move(members));
}

TestFunction random_test_function(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const double c0 = coef(rng);
  std::vector<double> c(5 * dim);
  for (auto& v : c) v = coef(rng);
  return TestFunction::of_point(
      dim,
      [c0, c, dim](std::span<const double> x) {
        double s = c0;
        for (std::size_t a = 0; a < dim; ++a) {
          const double* k = &c[5 * a];
          s += k[0] * x[a] + k[1] * x[a] * x[a] + k[2] * std::sin(k[3] * x[a]) +
               std::abs(x[a] - k[4]);
        }
        return s;
      },
      GrowthTag::quadratic());
}

void check_expectation_axioms(const AmbiguitySet& x, const TestFunction& f, const TestFunction& g,
                              std::mt19937_64& rng, LawReport& report) {
  const std::size_t d = x.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double ef = expect_upper(x, f);
  const double eg = expect_upper(x, g);

  const TestFunction dominating = TestFunction::of_point(
      d, [f, g](std::span<const double> p) { return f(p) + std::abs(g(p)); });
  report.record("monotonicity", std::max(0.0, ef - expect_upper(x, dominating)));

  const double c = 10.0 * (unit(rng) - 0.5);
  report.record("constant-preserving", std::abs(expect_upper(x, TestFunction::constant(c, 1, d)) - c));

  report.record("sub-additivity", std::max(0.0, expect_upper(x, f + g) - ef - eg));

  const double lambda = unit(rng) < 0.1 ? 0.0 : 5.0 * unit(rng);
  report.record("positive-homogeneity", std::abs(expect_upper(x, lambda * f) - lambda * ef));

  report.record("conjugate-ordering", std::max(0.0, expect_lower(x, f) - ef));

  // Two random half-space events.
  std::vector<double> w(d);
  for (auto& v : w) v = unit(rng) - 0.5;
  const double t = 2.0 * (unit(rng) - 0.5);
  const double s = 2.0 * (unit(rng) - 0.5);
  const Event a = [w, t](std::span<const double> p) {
    double v = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) v += w[i] * p[i];
    return v > t;
  };
  const Event b = [s](std::span<const double> p) { return p[0] <= s; };
  const Event both = [a, b](std::span<const double> p) { return a(p) || b(p); };
  report.record("capacity-subadditivity",
                std::max(0.0, capacity_upper(x, both) - capacity_upper(x, a) - capacity_upper(x, b)));
  report.record("capacity-mixed-bound",
                std::max(0.0, capacity_lower(x, both) - capacity_lower(x, a) - capacity_upper(x, b)));
}

LawReport run_axiom_suite(std::uint64_t seed, std::size_t sets, std::size_t pairs,
                          const RandomSetOptions& options, double tolerance) {
  std::mt19937_64 rng(seed);
  LawReport report(tolerance);
  for (std::size_t i = 0; i < sets; ++i) {
    const AmbiguitySet x = random_ambiguity_set(rng, options);
    for (std::size_t j = 0; j < pairs; ++j) {
      const TestFunction f = random_test_function(rng, x.dim());
      const TestFunction g = random_test_function(rng, x.dim());
      check_expectation_axioms(x, f, g, rng, report);
    }
  }
  return report;
}

}  // namespace sublin
