#include "sublin/clt_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <utility>

#include "sublin/errors.hpp"
#include "sublin/tree_stats.hpp"

namespace sublin::lab {

namespace {

template <class F>
void parallel_for(std::size_t count, std::size_t jobs, F&& f) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < std::min(jobs, count); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

TestFunction coordinate(std::size_t dim, std::size_t axis) {
  return TestFunction::of_point(dim, [axis](std::span<const double> x) { return x[axis]; },
                                GrowthTag::power(1.0));
}

/// Euclidean norms of the componentwise upper and lower means of `scale * X`.
std::pair<double, double> mean_norms(const AmbiguitySet& x, double scale) {
  std::vector<double> up(x.dim()), low(x.dim());
  for (std::size_t a = 0; a < x.dim(); ++a) {
    const TestFunction f = coordinate(x.dim(), a);
    up[a] = scale * expect_upper(x, f);
    low[a] = scale * expect_lower(x, f);
  }
  return {norm(up), norm(low)};
}

double quad_form(const Matrix& a, std::span<const double> x) {
  double q = 0.0;
  const auto d = static_cast<Eigen::Index>(x.size());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) q += x[i] * a(i, j) * x[j];
  return q;
}

std::vector<double> row_major(const Matrix& a) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.push_back(a(i, j));
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

bool is_sequence(Mode m) { return m != Mode::tree_martingale; }

/// Values along the schedule must be non-increasing up to `slack[i] + slack[i+1]`.
bool non_increasing(const std::vector<double>& v, const std::vector<double>& slack = {}) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double s = slack.empty() ? 1e-12 : slack[i] + slack[i + 1];
    if (v[i + 1] > v[i] + s) return false;
  }
  return true;
}

std::string param_label(const std::string& key, double value) { return key + "=" + format_double(value); }

void add_trend(ExperimentReport& report, const std::string& name, const std::vector<double>& values,
               const std::vector<double>& slack = {}) {
  if (values.empty()) return;
  report.verdicts.push_back({name, values.back(), non_increasing(values, slack), false,
                             "non-increasing across the schedule"});
}

void add_grid_provenance(ExperimentReport& report, const pde::ScalarResult& r) {
  report.add_provenance("grid.spacing", format_double(r.grid.spacing));
  report.add_provenance("grid.half_width", format_double(r.grid.half_width));
  report.add_provenance("grid.time_step", format_double(r.grid.time_step));
  report.add_provenance("grid.steps", std::to_string(r.grid.steps));
}

double row_value(const ArraySpec& spec, std::size_t n, const TestFunction& phi,
                 const DpLimits& limits) {
  try {
    if (spec.mode == Mode::iid) return iid_sum_expect(spec.laws.front(), n, phi, spec.scale(n), limits);
    const auto laws = spec.row_laws(n);
    return sum_expect(laws, phi, spec.scale(n), limits);
  } catch (const CapacityExceeded& e) {
    throw CapacityExceeded("row n=" + std::to_string(n) + ": " + e.what());
  }
}

}  // namespace

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::iid:
      return "iid";
    case Mode::heterogeneous:
      return "heterogeneous";
    case Mode::tree_martingale:
      return "tree-martingale";
  }
  return "iid";
}

VarianceBounds variance_bounds(const AmbiguitySet& x) {
  if (x.dim() != 1) throw InvalidArgument("variance bounds need a one-dimensional law");
  VarianceBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& m : member_second_moments(x)) {
    b.lower = std::min(b.lower, m[0]);
    b.upper = std::max(b.upper, m[0]);
  }
  return b;
}

void ArraySpec::validate() const {
  if (schedule.empty()) throw InvalidArgument("schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0) throw InvalidArgument("row sizes must be positive");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw InvalidArgument("schedule must be strictly increasing");
  }
  if (target_ratio && !(*target_ratio >= 0.0 && *target_ratio <= 1.0))
    throw InvalidArgument("target ratio must lie in [0, 1]");
  switch (mode) {
    case Mode::iid:
      if (laws.size() != 1) throw InvalidArgument("iid mode needs exactly one law");
      break;
    case Mode::heterogeneous:
      if (laws.empty()) throw InvalidArgument("heterogeneous mode needs at least one law");
      for (const auto& l : laws) {
        if (l.dim() != 1) throw InvalidArgument("heterogeneous mode is one-dimensional");
        if (l.lattice().step != laws.front().lattice().step)
          throw InvalidArgument("heterogeneous laws must share the lattice step");
      }
      break;
    case Mode::tree_martingale:
      if (trees.size() != schedule.size())
        throw InvalidArgument("tree mode needs one tree per schedule row");
      for (std::size_t i = 0; i < trees.size(); ++i) {
        if (trees[i].depth() != schedule[i])
          throw InvalidArgument("tree " + std::to_string(i) + " depth differs from its row size");
        if (trees[i].dim() != trees.front().dim())
          throw InvalidArgument("tree rows differ in dimension");
      }
      break;
  }
  if (target_g && target_g->dim() != dim()) throw InvalidArgument("target G has the wrong dimension");
}

std::size_t ArraySpec::dim() const {
  if (mode == Mode::tree_martingale) return trees.empty() ? 1 : trees.front().dim();
  return laws.empty() ? 1 : laws.front().dim();
}

double ArraySpec::scale(std::size_t n) const {
  switch (mode) {
    case Mode::iid:
      return 1.0 / std::sqrt(static_cast<double>(n));
    case Mode::heterogeneous: {
      double b2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) b2 += variance_bounds(laws[k % laws.size()]).upper;
      if (!(b2 > 0.0)) throw InvalidArgument("zero total variance");
      return 1.0 / std::sqrt(b2);
    }
    case Mode::tree_martingale:
      return 1.0;
  }
  return 1.0;
}

std::vector<AmbiguitySet> ArraySpec::row_laws(std::size_t n) const {
  if (!is_sequence(mode)) throw InvalidArgument("row laws exist only in sequence modes");
  std::vector<AmbiguitySet> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(laws[k % laws.size()]);
  return out;
}

ExperimentReport check_lindeberg(const ArraySpec& spec, std::span<const double> eps,
                                 std::optional<double> moment_p) {
  spec.validate();
  ExperimentReport report;
  report.kind = "lindeberg";
  report.add_provenance("mode", mode_name(spec.mode));
  report.add_provenance("schedule", join(spec.schedule));
  for (double e : eps) {
    if (!(e > 0.0)) throw InvalidArgument("Lindeberg eps must be positive");
    std::vector<double> values;
    for (std::size_t r = 0; r < spec.schedule.size(); ++r) {
      const std::size_t n = spec.schedule[r];
      double v = 0.0;
      if (is_sequence(spec.mode)) {
        const double s2 = spec.scale(n) * spec.scale(n);
        const std::size_t d = spec.dim();
        for (std::size_t k = 0; k < n; ++k) {
          const TestFunction clip = TestFunction::of_point(
              d, [s2, e](std::span<const double> x) { return std::max(s2 * norm_sq(x) - e, 0.0); },
              GrowthTag::quadratic());
          v += expect_upper(spec.laws[k % spec.laws.size()], clip);
        }
      } else {
        const auto& t = spec.trees[r];
        v = tree::lindeberg_stat(t, tree::MartingaleArray::from_tree(t), e).upper;
      }
      values.push_back(v);
      report.series.push_back({"lindeberg", n, e, v, 0.0});
    }
    add_trend(report, "lindeberg-trend " + param_label("eps", e), values);
  }
  if (moment_p) {
    const double p = *moment_p;
    if (!(p > 2.0)) throw InvalidArgument("moment variant needs p > 2");
    std::vector<double> values;
    for (std::size_t r = 0; r < spec.schedule.size(); ++r) {
      const std::size_t n = spec.schedule[r];
      double v = 0.0;
      if (is_sequence(spec.mode)) {
        const double s = spec.scale(n);
        const TestFunction mom = TestFunction::of_point(
            spec.dim(), [s, p](std::span<const double> x) { return std::pow(s * norm(x), p); },
            GrowthTag::power(p));
        for (std::size_t k = 0; k < n; ++k) v += expect_upper(spec.laws[k % spec.laws.size()], mom);
      } else {
        const auto& t = spec.trees[r];
        v = tree::conditional_sum(t, tree::MartingaleArray::from_tree(t), t.depth(),
                                  [p](const Point& z) { return std::pow(norm(z), p); })
                .upper;
      }
      values.push_back(v);
      report.series.push_back({"moment", n, p, v, 0.0});
    }
    add_trend(report, "moment-trend " + param_label("p", p), values);
  }
  return report;
}

ExperimentReport check_moment_conditions(const ArraySpec& spec) {
  spec.validate();
  ExperimentReport report;
  report.kind = "moment-conditions";
  report.add_provenance("mode", mode_name(spec.mode));
  report.add_provenance("schedule", join(spec.schedule));
  std::vector<double> drifts, distances;
  for (std::size_t r = 0; r < spec.schedule.size(); ++r) {
    const std::size_t n = spec.schedule[r];
    double drift = 0.0;
    if (is_sequence(spec.mode)) {
      const double s = spec.scale(n);
      for (std::size_t k = 0; k < n; ++k) {
        const auto [up, low] = mean_norms(spec.laws[k % spec.laws.size()], s);
        drift += up + low;
      }
    } else {
      const auto& t = spec.trees[r];
      drift = tree::drift_stat(t, tree::MartingaleArray::from_tree(t));
    }
    drifts.push_back(drift);
    report.series.push_back({"drift", n, std::nullopt, drift, 0.0});
    if (spec.mode == Mode::heterogeneous) {
      double lo = 0.0, up = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto b = variance_bounds(spec.laws[k % spec.laws.size()]);
        lo += b.lower;
        up += b.upper;
      }
      if (!(up > 0.0)) throw InvalidArgument("zero total variance");
      const double ratio = lo / up;
      report.series.push_back({"ratio", n, std::nullopt, ratio, spec.target_ratio});
      if (spec.target_ratio) distances.push_back(std::abs(ratio - *spec.target_ratio));
    }
  }
  add_trend(report, "drift-trend", drifts);
  if (!distances.empty()) {
    report.verdicts.push_back({"ratio-trend", distances.back(),
                               distances.back() <= distances.front() + 1e-12, false,
                               "distance to the target ratio does not grow"});
  }
  return report;
}

ExperimentReport check_quadratic_characteristic(const ArraySpec& spec,
                                                std::span<const Matrix> probes) {
  spec.validate();
  ExperimentReport report;
  report.kind = "quadratic-characteristic";
  report.add_provenance("mode", mode_name(spec.mode));
  report.add_provenance("schedule", join(spec.schedule));
  const std::size_t d = spec.dim();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Matrix& a = probes[i];
    require_symmetric(a, d);
    const std::string name = "quadratic-" + std::to_string(i);
    std::vector<double> distances;
    for (std::size_t r = 0; r < spec.schedule.size(); ++r) {
      const std::size_t n = spec.schedule[r];
      double q = 0.0;
      std::optional<double> ref;
      if (is_sequence(spec.mode)) {
        const double s2 = spec.scale(n) * spec.scale(n);
        const TestFunction form = TestFunction::of_point(
            d, [a, s2](std::span<const double> x) { return s2 * quad_form(a, x); },
            GrowthTag::quadratic());
        for (std::size_t k = 0; k < n; ++k) q += expect_upper(spec.laws[k % spec.laws.size()], form);
        ref = limit_g(spec, n)(a);
      } else {
        const auto& t = spec.trees[r];
        const auto flat = row_major(a);
        q = tree::quadratic_characteristic(t, tree::MartingaleArray::from_tree(t), flat, t.depth());
        if (spec.target_g) ref = (*spec.target_g)(a);
      }
      report.series.push_back({name, n, std::nullopt, q, ref});
      if (ref) distances.push_back(std::abs(q - *ref));
    }
    if (!distances.empty()) add_trend(report, name + "-trend", distances);
  }
  return report;
}

std::size_t CheckpointSchedule::tau(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("checkpoint time must lie in [0, 1]");
  if (t == 0.0) return 0;
  if (t == 1.0) return k_n;
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  return static_cast<std::size_t>(it - breakpoints.begin()) - 1;
}

double CheckpointSchedule::rho(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("checkpoint time must lie in [0, 1]");
  return t;
}

CheckpointSchedule CheckpointSchedule::uniform(std::size_t k_n) {
  if (k_n == 0) throw InvalidArgument("row size must be positive");
  CheckpointSchedule s;
  s.k_n = k_n;
  for (std::size_t k = 0; k <= k_n; ++k)
    s.breakpoints.push_back(static_cast<double>(k) / static_cast<double>(k_n));
  return s;
}

CheckpointSchedule variance_time_change(const ArraySpec& spec, std::size_t n) {
  spec.validate();
  if (n == 0) throw InvalidArgument("row size must be positive");
  if (spec.mode == Mode::iid) return CheckpointSchedule::uniform(n);
  if (spec.mode != Mode::heterogeneous)
    throw InvalidArgument("variance time change needs a sequence mode");
  std::vector<double> b2(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k)
    b2[k] = b2[k - 1] + variance_bounds(spec.laws[(k - 1) % spec.laws.size()]).upper;
  if (!(b2[n] > 0.0)) throw InvalidArgument("zero total variance");
  CheckpointSchedule s;
  s.k_n = n;
  for (double v : b2) s.breakpoints.push_back(v / b2[n]);
  return s;
}

GFunction limit_g(const ArraySpec& spec, std::size_t n) {
  switch (spec.mode) {
    case Mode::iid: {
      const std::size_t d = spec.laws.front().dim();
      std::vector<Matrix> theta;
      for (const auto& m : member_second_moments(spec.laws.front()))
        theta.push_back(Eigen::Map<const Matrix>(m.data(), static_cast<Eigen::Index>(d),
                                                 static_cast<Eigen::Index>(d)));
      return GFunction(std::move(theta));
    }
    case Mode::heterogeneous: {
      double r = 0.0;
      if (spec.target_ratio) {
        r = *spec.target_ratio;
      } else {
        double lo = 0.0, up = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const auto b = variance_bounds(spec.laws[k % spec.laws.size()]);
          lo += b.lower;
          up += b.upper;
        }
        if (!(up > 0.0)) throw InvalidArgument("zero total variance");
        r = lo / up;
      }
      return g_from_interval({r, 1.0});
    }
    case Mode::tree_martingale:
      if (!spec.target_g) throw InvalidArgument("tree rows need a target G");
      return *spec.target_g;
  }
  throw InvalidArgument("unknown mode");
}

namespace {

void check_functional(const ArraySpec& spec, const NamedFunctional& f, std::size_t arity,
                      const CltOptions& options) {
  if (f.fn.arity() != arity || f.fn.dim() != spec.dim())
    throw InvalidArgument("functional '" + f.id + "' has the wrong shape");
  if (f.fn.growth().degree() > options.verified_moment)
    throw InvalidArgument("functional '" + f.id + "' grows faster (" + f.fn.growth().label() +
                          ") than the verified moment condition allows");
}

/// Shared cell loop for the CLT and FDD experiments. `prelimit(n, f)` and
/// `limit(n, f)` compute the two sides.
template <class Pre, class Lim>
ExperimentReport run_cells(const ArraySpec& spec, std::span<const NamedFunctional> fs,
                           const CltOptions& options, const std::string& kind, Pre&& prelimit,
                           Lim&& limit) {
  const bool fixed_limit = spec.mode == Mode::iid || spec.target_ratio.has_value();
  const std::size_t rows = spec.schedule.size();
  const std::size_t limit_rows = fixed_limit ? 1 : rows;

  std::vector<pde::ScalarResult> limits(limit_rows * fs.size());
  parallel_for(limits.size(), options.jobs, [&](std::size_t i) {
    limits[i] = limit(spec.schedule[i / fs.size()], fs[i % fs.size()]);
  });
  std::vector<double> pre(rows * fs.size());
  parallel_for(pre.size(), options.jobs, [&](std::size_t i) {
    pre[i] = prelimit(spec.schedule[i / fs.size()], fs[i % fs.size()]);
  });

  ExperimentReport report;
  report.kind = kind;
  report.add_provenance("mode", mode_name(spec.mode));
  report.add_provenance("schedule", join(spec.schedule));
  report.add_provenance("tolerance", format_double(options.tolerance));
  if (!limits.empty()) add_grid_provenance(report, limits.front());

  for (std::size_t j = 0; j < fs.size(); ++j) {
    std::vector<double> gaps, bars;
    bool margin_ok = true;
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& lim = limits[(fixed_limit ? 0 : r) * fs.size() + j];
      Cell c{spec.schedule[r], fs[j].id, pre[r * fs.size() + j], lim.value, 0.0, lim.error_bar};
      c.gap = std::abs(c.prelimit - c.limit);
      gaps.push_back(c.gap);
      bars.push_back(c.error_bar);
      margin_ok = margin_ok && lim.margin_ok;
      report.cells.push_back(std::move(c));
    }
    add_trend(report, "gap-trend:" + fs[j].id, gaps, bars);
    const double tol = options.tolerance + bars.back();
    report.verdicts.push_back({"final-gap:" + fs[j].id, gaps.back(), gaps.back() <= tol,
                               options.hard_tolerance, "tolerance " + format_double(tol)});
    report.verdicts.push_back({"pde-margin:" + fs[j].id, margin_ok ? 1.0 : 0.0, margin_ok, true,
                               "domain covers the boundary-influence radius"});
  }
  return report;
}

}  // namespace

ExperimentReport run_clt_experiment(const ArraySpec& spec, std::span<const NamedFunctional> functionals,
                                    const CltOptions& options) {
  spec.validate();
  if (!is_sequence(spec.mode)) throw InvalidArgument("CLT experiments need iid or heterogeneous mode");
  if (spec.dim() > 2) throw InvalidArgument("CLT experiments support d <= 2");
  for (const auto& f : functionals) check_functional(spec, f, 1, options);
  return run_cells(
      spec, functionals, options, "clt",
      [&](std::size_t n, const NamedFunctional& f) { return row_value(spec, n, f.fn, options.limits); },
      [&](std::size_t n, const NamedFunctional& f) {
        return pde::gnormal_expect(limit_g(spec, n), f.fn, options.hints);
      });
}

ExperimentReport run_fdd_experiment(const ArraySpec& spec, std::span<const double> times,
                                    const NamedFunctional& psi, const CltOptions& options) {
  spec.validate();
  if (!is_sequence(spec.mode)) throw InvalidArgument("FDD experiments need iid or heterogeneous mode");
  if (spec.dim() != 1) throw InvalidArgument("FDD experiments are one-dimensional");
  if (times.empty()) throw InvalidArgument("FDD needs at least one time");
  if (times.size() > 2) throw CapacityExceeded("FDD dynamic programming supports at most 2 checkpoints");
  check_functional(spec, psi, times.size(), options);
  double prev = 0.0;
  for (double t : times) {
    if (!(t > prev && t <= 1.0)) throw InvalidArgument("FDD times must increase within (0, 1]");
    prev = t;
  }
  const std::vector<double> ts(times.begin(), times.end());

  auto prelimit = [&](std::size_t n, const NamedFunctional& f) {
    const auto sched = variance_time_change(spec, n);
    const auto laws = spec.row_laws(n);
    const double s = spec.scale(n);
    const std::size_t k1 = sched.tau(ts[0]);
    const std::span<const AmbiguitySet> first(laws.data(), k1);
    try {
      if (ts.size() == 1) return sum_expect(first, f.fn, s, options.limits);
      const std::size_t k2 = sched.tau(ts[1]);
      const std::span<const AmbiguitySet> second(laws.data() + k1, k2 - k1);
      const TestFunction& fn = f.fn;
      const DpLimits& limits = options.limits;
      const TestFunction outer = TestFunction::scalar(
          [&fn, second, s, &limits](double x1) {
            const TestFunction inner = TestFunction::scalar(
                [&fn, x1](double y) {
                  const double args[2] = {x1, x1 + y};
                  return fn(std::span<const double>(args, 2));
                },
                fn.growth());
            return sum_expect(second, inner, s, limits);
          },
          fn.growth());
      return sum_expect(first, outer, s, options.limits);
    } catch (const CapacityExceeded& e) {
      throw CapacityExceeded("row n=" + std::to_string(n) + ": " + e.what());
    }
  };
  auto limit = [&](std::size_t n, const NamedFunctional& f) {
    const auto sched = variance_time_change(spec, n);
    std::vector<double> rho;
    for (double t : ts) rho.push_back(sched.rho(t));
    return pde::gbm_fdd_expect(limit_g(spec, n), rho, f.fn, options.hints);
  };
  auto report = run_cells(spec, std::span<const NamedFunctional>(&psi, 1), options, "fdd", prelimit, limit);
  std::string tlabel;
  for (double t : ts) tlabel += (tlabel.empty() ? "" : " ") + format_double(t);
  report.add_provenance("times", tlabel);
  return report;
}

namespace {

std::vector<Matrix> default_probes(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Matrix> probes;
  probes.push_back(Matrix::Identity(n, n));
  probes.push_back(-Matrix::Identity(n, n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = e(j, i) = 1.0;
      probes.push_back(e);
      probes.push_back(-e);
    }
  return probes;
}

void require_increasing(std::span<const double> s, const char* what) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0)) throw InvalidArgument(std::string(what) + " schedule must be positive");
    if (i > 0 && !(s[i] > s[i - 1])) throw InvalidArgument(std::string(what) + " schedule must increase");
  }
}

}  // namespace

IidConditions check_iid_necessary_conditions(const AmbiguitySet& x, std::span<const double> c_schedule,
                                             std::span<const double> x_schedule,
                                             std::span<const Matrix> probes) {
  require_increasing(c_schedule, "c");
  require_increasing(x_schedule, "x");
  if (c_schedule.empty()) throw InvalidArgument("c schedule is empty");
  const std::size_t d = x.dim();
  const double radius = x.support_radius();
  std::vector<Matrix> ps(probes.begin(), probes.end());
  if (ps.empty()) ps = default_probes(d);
  for (const auto& a : ps) require_symmetric(a, d);

  ExperimentReport report;
  report.kind = "iid-conditions";
  report.add_provenance("support_radius", format_double(radius));

  // (i)
  std::vector<double> clip;
  for (double c : c_schedule) {
    const TestFunction f = TestFunction::of_point(
        d, [c](std::span<const double> v) { return std::min(norm_sq(v), c); }, GrowthTag::bounded());
    clip.push_back(expect_upper(x, f));
    report.series.push_back({"moment-clip", 0, c, clip.back(), std::nullopt});
  }
  const bool stable = clip.size() < 2 || std::abs(clip.back() - clip[clip.size() - 2]) <= 1e-12;
  report.verdicts.push_back({"(i) clipped second moment stabilizes", clip.back(), stable, false,
                             "last two values of E[|X|^2 ^ c]"});

  // (ii)
  double tail_beyond = 0.0;
  std::size_t beyond = 0;
  for (double xv : x_schedule) {
    const double v =
        xv * xv * capacity_upper(x, [xv](std::span<const double> p) { return norm(p) >= xv; });
    report.series.push_back({"tail", 0, xv, v, std::nullopt});
    if (xv > radius) {
      tail_beyond = std::max(tail_beyond, v);
      ++beyond;
    }
  }
  report.verdicts.push_back({"(ii) tail vanishes beyond the support", tail_beyond,
                             tail_beyond == 0.0, false,
                             std::to_string(beyond) + " schedule points beyond the support radius"});

  // (iii) and (iv)
  std::vector<std::vector<double>> probe_series(ps.size());
  std::vector<Matrix> attaining(ps.size());
  double mean_last = 0.0;
  for (double c : c_schedule) {
    const AmbiguitySet t = truncate(x, c);
    const auto [up, low] = mean_norms(t, 1.0);
    mean_last = up + low;
    report.series.push_back({"truncated-mean", 0, c, mean_last, std::nullopt});
    const auto moments = member_second_moments(t);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const Matrix a = ps[i];
      const auto ext = upper_extremum(
          t, TestFunction::of_point(d, [a](std::span<const double> v) { return quad_form(a, v); },
                                    GrowthTag::quadratic()));
      probe_series[i].push_back(ext.value);
      report.series.push_back({"probe-" + std::to_string(i), 0, c, ext.value, std::nullopt});
      attaining[i] = Eigen::Map<const Matrix>(moments[ext.member].data(), static_cast<Eigen::Index>(d),
                                              static_cast<Eigen::Index>(d));
    }
  }
  report.verdicts.push_back({"(iii) truncated means vanish", mean_last, mean_last <= 1e-12, false,
                             "value at the largest c"});

  std::vector<Matrix> theta;
  std::vector<double> probe_values;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    double spread = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < c_schedule.size(); ++k) {
      if (c_schedule[k] < radius) continue;
      spread = std::max(spread, std::abs(probe_series[i][k] - probe_series[i].back()));
      ++count;
    }
    report.verdicts.push_back({"(iv) probe " + std::to_string(i) + " stabilizes", probe_series[i].back(),
                               count > 0 && spread <= 1e-12, false,
                               std::to_string(count) + " values with c >= support radius"});
    probe_values.push_back(probe_series[i].back());
    if (std::none_of(theta.begin(), theta.end(), [&](const Matrix& m) { return m == attaining[i]; }))
      theta.push_back(attaining[i]);
  }
  return IidConditions{std::move(report), std::move(ps), std::move(probe_values),
                       GFunction(std::move(theta))};
}

double estimate_limit_g(const ArraySpec& spec, const Matrix& a, double c, std::size_t n,
                        const DpLimits& limits) {
  spec.validate();
  if (spec.mode != Mode::iid) throw InvalidArgument("limit G estimation needs iid mode");
  if (!(c > 0.0)) throw InvalidArgument("truncation level must be positive");
  if (n == 0) throw InvalidArgument("row size must be positive");
  const std::size_t d = spec.dim();
  require_symmetric(a, d);
  const TestFunction phi = TestFunction::of_point(
      d,
      [a, c](std::span<const double> x) {
        std::vector<double> t(x.begin(), x.end());
        for (double& v : t) v = std::clamp(v, -c, c);
        return quad_form(a, t);
      },
      GrowthTag::bounded());
  return row_value(spec, n, phi, limits);
}

ExperimentReport limit_g_report(const ArraySpec& spec, std::span<const Matrix> probes, double c,
                                const DpLimits& limits) {
  spec.validate();
  ExperimentReport report;
  report.kind = "limit-g";
  report.add_provenance("schedule", join(spec.schedule));
  report.add_provenance("c", format_double(c));
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const std::string id = "probe-" + std::to_string(i);
    std::vector<double> gaps;
    for (std::size_t n : spec.schedule) {
      Cell cell{n, id, estimate_limit_g(spec, probes[i], c, n, limits), limit_g(spec, n)(probes[i]),
                0.0, 0.0};
      cell.gap = std::abs(cell.prelimit - cell.limit);
      gaps.push_back(cell.gap);
      report.cells.push_back(std::move(cell));
    }
    add_trend(report, "gap-trend:" + id, gaps);
  }
  return report;
}

}  // namespace sublin::lab
