#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "sublin/clt_lab.hpp"
#include "sublin/errors.hpp"
#include "sublin/lattice_dp.hpp"
#include "sublin/tree_stats.hpp"

using namespace sublin;
using namespace sublin::lab;

namespace {

ArraySpec bernoulli(std::vector<std::size_t> schedule) {
  ArraySpec s;
  s.mode = Mode::iid;
  s.laws = {symmetric_three_point({0.5, 1.0})};
  s.schedule = std::move(schedule);
  return s;
}

double series_value(const ExperimentReport& r, const std::string& name, std::size_t n,
                    std::optional<double> param = std::nullopt) {
  for (const auto& p : r.series)
    if (p.name == name && p.n == n && (!param || (p.parameter && *p.parameter == *param))) return p.value;
  ADD_FAILURE() << "missing series " << name << " n=" << n;
  return std::nan("");
}

const Cell& cell(const ExperimentReport& r, const std::string& id, std::size_t n) {
  for (const auto& c : r.cells)
    if (c.functional == id && c.n == n) return c;
  throw std::runtime_error("missing cell");
}

}  // namespace

TEST(ArraySpec, Validation) {
  auto s = bernoulli({16, 16});
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.schedule = {};
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.schedule = {4};
  s.laws.push_back(s.laws.front());
  EXPECT_THROW(s.validate(), InvalidArgument);
  ArraySpec h;
  h.mode = Mode::heterogeneous;
  h.laws = {point_mass()};
  h.schedule = {4};
  EXPECT_THROW(h.scale(4), InvalidArgument);
  h.target_ratio = 1.5;
  EXPECT_THROW(h.validate(), InvalidArgument);
}

TEST(Lindeberg, IidRowsVanishAboveThreshold) {
  const auto spec = bernoulli({10, 16, 64});
  const double eps[1] = {0.1};
  const auto r = check_lindeberg(spec, eps, 3.0);
  for (std::size_t n : spec.schedule) {
    EXPECT_DOUBLE_EQ(series_value(r, "lindeberg", n, 0.1), 0.0);
    EXPECT_NEAR(series_value(r, "moment", n, 3.0), 1.0 / std::sqrt(static_cast<double>(n)), 1e-14);
  }
  for (const auto& v : r.verdicts) EXPECT_TRUE(v.pass) << v.name;
}

TEST(Lindeberg, UnscaledJumpPersists) {
  // Heterogeneous rows whose first step is a unit jump never scaled away:
  // tree rows with increments used as given.
  std::vector<tree::ScenarioTree> rows;
  for (std::size_t n : {2u, 4u, 8u}) {
    std::vector<AmbiguitySet> laws{symmetric_three_point({1.0})};
    for (std::size_t k = 1; k < n; ++k) laws.push_back(point_mass());
    rows.push_back(tree::independent_tree(laws));
  }
  ArraySpec s;
  s.mode = Mode::tree_martingale;
  s.trees = rows;
  s.schedule = {2, 4, 8};
  const double eps[1] = {0.25};
  const auto r = check_lindeberg(s, eps);
  for (std::size_t n : s.schedule) EXPECT_DOUBLE_EQ(series_value(r, "lindeberg", n, 0.25), 0.75);
}

TEST(MomentConditions, DriftAndRatio) {
  const auto r = check_moment_conditions(bernoulli({16, 64}));
  EXPECT_DOUBLE_EQ(series_value(r, "drift", 16), 0.0);

  ArraySpec alt;
  alt.mode = Mode::heterogeneous;
  alt.laws = {symmetric_three_point({0.5, 1.0})};
  alt.schedule = {3, 10, 41};
  const auto ra = check_moment_conditions(alt);
  for (std::size_t n : alt.schedule) EXPECT_DOUBLE_EQ(series_value(ra, "ratio", n), 0.5);

  // Lower variance 1 on even k, 0 on odd k: the ratio is floor(n/2)/n.
  ArraySpec blocks;
  blocks.mode = Mode::heterogeneous;
  blocks.laws = {symmetric_three_point({0.0, 1.0}), symmetric_three_point({1.0})};
  blocks.target_ratio = 0.5;
  blocks.schedule = {3, 9, 33, 129};
  const auto rb = check_moment_conditions(blocks);
  for (std::size_t n : blocks.schedule)
    EXPECT_NEAR(series_value(rb, "ratio", n), static_cast<double>(n / 2) / static_cast<double>(n), 1e-15);
  bool found = false;
  for (const auto& v : rb.verdicts)
    if (v.name == "ratio-trend") {
      found = true;
      EXPECT_TRUE(v.pass);
    }
  EXPECT_TRUE(found);
}

TEST(MomentConditions, HeterogeneousAgreesWithChainTrees) {
  // Sequence statistics against the same array built as a product tree.
  ArraySpec seq;
  seq.mode = Mode::heterogeneous;
  seq.laws = {symmetric_three_point({0.5, 1.0}), symmetric_three_point({0.25})};
  seq.schedule = {2, 4};
  ArraySpec tr;
  tr.mode = Mode::tree_martingale;
  tr.schedule = seq.schedule;
  for (std::size_t n : seq.schedule) {
    auto laws = seq.row_laws(n);
    // Tree rows carry the scaling in their increments.
    std::vector<AmbiguitySet> scaled;
    const double s = seq.scale(n);
    for (const auto& l : laws) {
      std::vector<DiscreteDistribution> ms;
      for (const auto& m : l.members()) {
        std::vector<Point> pts;
        for (const auto& p : m.support()) pts.push_back({s * p[0]});
        ms.emplace_back(pts, m.probs());
      }
      scaled.emplace_back(LatticeSpec{1, s, {0.0}}, ms);
    }
    tr.trees.push_back(tree::independent_tree(scaled));
  }
  const double eps[2] = {0.05, 0.3};
  const auto a = check_lindeberg(seq, eps, 3.0);
  const auto b = check_lindeberg(tr, eps, 3.0);
  ASSERT_EQ(a.series.size(), b.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) EXPECT_NEAR(a.series[i].value, b.series[i].value, 1e-13);
  const Matrix probes[2] = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, -1.0)};
  const auto qa = check_quadratic_characteristic(seq, probes);
  const auto qb = check_quadratic_characteristic(tr, probes);
  for (std::size_t i = 0; i < qa.series.size(); ++i) EXPECT_NEAR(qa.series[i].value, qb.series[i].value, 1e-13);
}

TEST(TimeChange, UniformAndEndpoints) {
  ArraySpec h;
  h.mode = Mode::heterogeneous;
  h.laws = {symmetric_three_point({1.0})};
  h.schedule = {4};
  const auto s = variance_time_change(h, 4);
  EXPECT_EQ(s.tau(0.5), 2u);
  EXPECT_EQ(s.tau(0.0), 0u);
  EXPECT_EQ(s.tau(1.0), 4u);
  EXPECT_EQ(s.tau(0.49), 1u);
  EXPECT_DOUBLE_EQ(s.rho(0.3), 0.3);
  EXPECT_THROW(s.tau(1.2), InvalidArgument);
}

TEST(TimeChange, GeometricVariancesMatchScan) {
  ArraySpec h;
  h.mode = Mode::heterogeneous;
  h.schedule = {10};
  // Integer supports +-round(2^((k+1)/2)) give roughly geometric variances.
  for (int k = 1; k <= 10; ++k) {
    const double a = std::sqrt(std::ldexp(1.0, k + 1));
    h.laws.push_back(AmbiguitySet(LatticeSpec{1, 1.0, {0.0}},
                                  {DiscreteDistribution({{-std::round(a)}, {0.0}, {std::round(a)}},
                                                        {0.25, 0.5, 0.25})}));
  }
  std::vector<double> vars;
  for (const auto& l : h.laws) vars.push_back(variance_bounds(l).upper);
  const auto s = variance_time_change(h, 10);
  for (int i = 0; i <= 200; ++i) {
    const double t = i / 200.0;
    EXPECT_EQ(s.tau(t), oracle::tau_scan(vars, t)) << t;
  }
}

TEST(CltExperiment, SquareHasZeroGap) {
  const auto spec = bernoulli({4, 16});
  const NamedFunctional fs[2] = {functional("s2"), functional("neg_s2")};
  const auto r = run_clt_experiment(spec, fs);
  for (const auto& c : r.cells) EXPECT_LE(c.gap, c.error_bar) << c.functional << " " << c.n;
  EXPECT_NEAR(cell(r, "s2", 16).prelimit, 1.0, 1e-12);
  EXPECT_NEAR(cell(r, "neg_s2", 16).prelimit, -0.5, 1e-12);
}

TEST(CltExperiment, ScaleConsistency) {
  const auto spec = bernoulli({3, 9, 27});
  const NamedFunctional fs[2] = {functional("s"), functional("neg_s")};
  const auto r = run_clt_experiment(spec, fs);
  for (const auto& c : r.cells) EXPECT_NEAR(c.prelimit, 0.0, 1e-15) << c.functional << " " << c.n;
}

TEST(CltExperiment, ConvexEnvelope) {
  // Convex functionals see the maximal-variance member at every n.
  const auto spec = bernoulli({8});
  const NamedFunctional fs[1] = {functional("pos")};
  const auto r = run_clt_experiment(spec, fs);
  ArraySpec classical = bernoulli({8});
  classical.laws = {symmetric_three_point({1.0})};
  EXPECT_DOUBLE_EQ(r.cells[0].prelimit, run_clt_experiment(classical, fs).cells[0].prelimit);
  EXPECT_NEAR(r.cells[0].limit, 1.0 / std::sqrt(2.0 * M_PI), 5e-4);
  const NamedFunctional neg[1] = {functional("neg_pos")};
  ArraySpec low = bernoulli({8});
  low.laws = {symmetric_three_point({0.5})};
  EXPECT_DOUBLE_EQ(run_clt_experiment(spec, neg).cells[0].prelimit,
                   run_clt_experiment(low, neg).cells[0].prelimit);
}

TEST(CltExperiment, GrowthGuardAndBlowup) {
  const auto spec = bernoulli({4});
  const NamedFunctional cube[1] = {functional("cube_abs")};
  EXPECT_THROW(run_clt_experiment(spec, cube), InvalidArgument);
  CltOptions o;
  o.verified_moment = 3.0;
  EXPECT_NO_THROW(run_clt_experiment(spec, cube, o));
  CltOptions tight;
  tight.limits.max_states = 10;
  const NamedFunctional pos[1] = {functional("pos")};
  try {
    run_clt_experiment(bernoulli({64}), pos, tight);
    FAIL() << "expected a capacity error";
  } catch (const CapacityExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("n=64"), std::string::npos);
  }
}

TEST(CltExperiment, ParallelCellsAreIdentical) {
  const auto spec = bernoulli({16, 32});
  const NamedFunctional fs[3] = {functional("pos"), functional("sin"), functional("cos")};
  CltOptions one, four;
  four.jobs = 4;
  std::ostringstream a, b;
  write_csv(a, run_clt_experiment(spec, fs, one));
  write_csv(b, run_clt_experiment(spec, fs, four));
  EXPECT_EQ(a.str(), b.str());
}

TEST(FddExperiment, IncrementsAndProducts) {
  const auto spec = bernoulli({16, 64});
  const double times[2] = {0.5, 1.0};
  const auto incr = run_fdd_experiment(spec, times, functional("incr"));
  for (const auto& c : incr.cells) {
    EXPECT_NEAR(c.prelimit, 0.0, 1e-13);
    EXPECT_NEAR(c.limit, 0.0, 1e-8);
  }
  const auto sq = run_fdd_experiment(spec, times, functional("incr_sq"));
  for (const auto& c : sq.cells) EXPECT_NEAR(c.prelimit, 0.5, 1e-12);
  const auto prod = run_fdd_experiment(bernoulli({64}), times, functional("prod"));
  EXPECT_LE(prod.cells[0].gap, 0.02);
}

TEST(FddExperiment, NestedDpMatchesDirectNesting) {
  // Two checkpoints with n = 4: psi(S_2, S_4) by brute-force path recursion.
  const auto spec = bernoulli({4});
  const double times[2] = {0.5, 1.0};
  const auto r = run_fdd_experiment(spec, times, functional("prod"));
  const auto b = spec.laws[0];
  const double s = 0.5;
  std::vector<AmbiguitySet> two(2, b);
  const double expected = oracle::path_sum_expect(
      two,
      [&](double x1) {
        return oracle::path_sum_expect(two, [&](double y) { return x1 * (x1 + y); }, s);
      },
      s);
  EXPECT_NEAR(r.cells[0].prelimit, expected, 1e-13);
}

TEST(FddExperiment, IncrementStationarity) {
  const auto spec = bernoulli({40});
  const NamedFunctional f = functional("incr_sq");
  const double t1[2] = {0.1, 0.4};
  const double t2[2] = {0.5, 0.8};
  EXPECT_NEAR(run_fdd_experiment(spec, t1, f).cells[0].prelimit,
              run_fdd_experiment(spec, t2, f).cells[0].prelimit, 1e-13);
  const double three[3] = {0.2, 0.5, 1.0};
  EXPECT_THROW(run_fdd_experiment(spec, three, f), CapacityExceeded);
}

TEST(IidConditions, BernoulliFamily) {
  const double cs[4] = {1, 2, 3, 4};
  const double xs[4] = {0.5, 1, 2, 3};
  const auto r = check_iid_necessary_conditions(symmetric_three_point({0.5, 1.0}), cs, xs);
  for (double c : cs) {
    EXPECT_DOUBLE_EQ(series_value(r.report, "moment-clip", 0, c), 1.0);
    EXPECT_DOUBLE_EQ(series_value(r.report, "truncated-mean", 0, c), 0.0);
  }
  EXPECT_DOUBLE_EQ(series_value(r.report, "tail", 0, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(series_value(r.report, "tail", 0, 3.0), 0.0);
  for (double a : {-2.0, -1.0, 0.0, 0.5, 3.0})
    EXPECT_DOUBLE_EQ(r.induced(Matrix::Constant(1, 1, a)), g_1d({0.5, 1.0}, a));
  for (const auto& v : r.report.verdicts) EXPECT_TRUE(v.pass) << v.name;
}

TEST(IidConditions, PointMass) {
  const double cs[2] = {1, 2};
  const double xs[2] = {1, 2};
  const auto r = check_iid_necessary_conditions(point_mass(), cs, xs);
  for (const auto& p : r.report.series) EXPECT_DOUBLE_EQ(p.value, 0.0) << p.name;
  EXPECT_DOUBLE_EQ(r.induced(Matrix::Constant(1, 1, 1.0)), 0.0);
}

TEST(IidConditions, ProductOfTwoFamilies) {
  const auto x = symmetric_three_point({0.5, 1.0});
  const auto y = symmetric_three_point({0.25, 1.0});
  const auto joint = peng_pair(x, y);
  const double cs[2] = {1, 2};
  const double xs[1] = {2};
  const auto r = check_iid_necessary_conditions(joint, cs, xs);
  for (std::size_t i = 0; i < r.probes.size(); ++i) {
    const Matrix& a = r.probes[i];
    const double nested = oracle::peng_two(x, y, [&](double u, double v) {
      return a(0, 0) * u * u + 2.0 * a(0, 1) * u * v + a(1, 1) * v * v;
    });
    EXPECT_NEAR(r.probe_values[i], nested, 1e-14) << i;
    EXPECT_NEAR(r.induced(a), r.probe_values[i], 1e-14) << i;
  }
  // Diagonal probes agree with the diagonal Theta of the two interval families.
  const GFunction diag_theta({diag({1.0, 1.0}), diag({0.5, 0.25}), diag({1.0, 0.25}), diag({0.5, 1.0})});
  EXPECT_NEAR(r.induced(Matrix::Identity(2, 2)), diag_theta(Matrix::Identity(2, 2)), 1e-14);
  EXPECT_NEAR(r.induced(-Matrix::Identity(2, 2)), diag_theta(-Matrix::Identity(2, 2)), 1e-14);
}

TEST(IidConditions, OffLatticeTruncation) {
  const double cs[1] = {0.5};
  const double xs[1] = {1};
  EXPECT_THROW(check_iid_necessary_conditions(symmetric_three_point({1.0}), cs, xs), InvalidArgument);
}

TEST(LimitG, Estimates) {
  const auto spec = bernoulli({64});
  EXPECT_DOUBLE_EQ(estimate_limit_g(spec, Matrix::Zero(1, 1), 5.0, 64), 0.0);
  EXPECT_NEAR(estimate_limit_g(spec, Matrix::Constant(1, 1, 1.0), 10.0, 64), 1.0, 0.02);
  EXPECT_NEAR(estimate_limit_g(spec, Matrix::Constant(1, 1, -1.0), 10.0, 64), -0.5, 0.02);
  EXPECT_THROW(estimate_limit_g(spec, Matrix::Zero(1, 1), 0.0, 64), InvalidArgument);
}
