#include "runner.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "sublin/axioms.hpp"
#include "sublin/clt_lab.hpp"
#include "sublin/functionals.hpp"
#include "sublin/g_function.hpp"
#include "sublin/gheat.hpp"
#include "sublin/scenario_tree.hpp"
#include "sublin/tree_stats.hpp"

namespace sublin::cli {

using lab::Cell;
using lab::ExperimentReport;
using lab::format_double;

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

lab::NamedFunctional named(const Field& f) {
  try {
    return lab::functional(f.string());
  } catch (const InvalidArgument& e) {
    f.fail(e.what());
  }
}

pde::SolveHints parse_hints(const Field& p) {
  pde::SolveHints h;
  h.spacing = p.number_or("spacing", 0.0);
  if (h.spacing < 0.0) p.at("spacing").fail("must be nonnegative");
  h.half_width = p.number_or("half_width", 0.0);
  if (h.half_width < 0.0) p.at("half_width").fail("must be nonnegative");
  h.cfl_fraction = p.positive_or("cfl_fraction", h.cfl_fraction);
  if (h.cfl_fraction > 1.0) p.at("cfl_fraction").fail("must not exceed 1");
  return h;
}

// ---- axioms -----------------------------------------------------------------

ExperimentReport run_axioms(const Suite& s) {
  const Field p = s.params();
  p.allow_only({"sets", "pairs", "dim", "max_members", "max_support", "coord_range", "step", "tolerance"});
  RandomSetOptions o;
  o.dim = p.count_or("dim", o.dim);
  o.max_members = p.count_or("max_members", o.max_members);
  o.max_support = p.count_or("max_support", o.max_support);
  o.coord_range = static_cast<std::int64_t>(p.count_or("coord_range", static_cast<std::size_t>(o.coord_range)));
  o.step = p.positive_or("step", o.step);
  if (o.dim == 0) p.at("dim").fail("must be positive");
  if (o.max_members == 0) p.at("max_members").fail("must be positive");
  if (o.max_support == 0) p.at("max_support").fail("must be positive");
  const std::size_t sets = p.count_or("sets", 1000);
  const std::size_t pairs = p.count_or("pairs", 10);
  ExperimentReport r;
  r.kind = s.kind;
  r.add_laws("", run_axiom_suite(s.require_seed(), sets, pairs, o, p.positive_or("tolerance", 1e-10)));
  r.add_provenance("sets", std::to_string(sets));
  r.add_provenance("pairs", std::to_string(pairs));
  return r;
}

// ---- trees ------------------------------------------------------------------

tree::TreeGenOptions parse_tree_options(const Field& p) {
  tree::TreeGenOptions o;
  o.max_levels = p.count_or("max_levels", o.max_levels);
  o.max_children = p.count_or("max_children", o.max_children);
  o.max_members = p.count_or("max_members", o.max_members);
  o.max_nodes = p.count_or("max_nodes", o.max_nodes);
  o.dim = p.count_or("dim", o.dim);
  o.step = p.positive_or("step", o.step);
  if (o.max_levels == 0) p.at("max_levels").fail("must be positive");
  if (o.max_children == 0) p.at("max_children").fail("must be positive");
  if (o.max_members == 0) p.at("max_members").fail("must be positive");
  if (o.dim == 0) p.at("dim").fail("must be positive");
  return o;
}

const std::vector<std::string> kTreeKeys = {"trees",     "max_levels", "max_children", "max_members",
                                            "max_nodes", "dim",        "step"};

std::vector<std::string> with_keys(std::vector<std::string> keys, std::initializer_list<const char*> extra) {
  for (const char* k : extra) keys.emplace_back(k);
  return keys;
}

ExperimentReport run_tree_laws(const Suite& s) {
  const Field p = s.params();
  p.allow_only(with_keys(kTreeKeys, {"samples", "tolerance"}));
  const auto o = parse_tree_options(p);
  const std::size_t trees = p.count_or("trees", 100);
  const std::size_t samples = p.count_or("samples", 4);
  if (samples < 2) p.at("samples").fail("needs at least 2 sample variables");
  LawReport laws(p.positive_or("tolerance", 1e-10));
  std::mt19937_64 rng(s.require_seed());
  for (std::size_t i = 0; i < trees; ++i) {
    const auto t = tree::random_tree(rng, o);
    const auto vars = tree::random_variables(t, samples, rng);
    laws.merge(tree::verify_operator_laws(t, vars, laws.tolerance()));
  }
  ExperimentReport r;
  r.kind = s.kind;
  r.add_laws("", laws);
  r.add_provenance("trees", std::to_string(trees));
  return r;
}

ExperimentReport run_rosenthal(const Suite& s) {
  const Field p = s.params();
  p.allow_only(with_keys(kTreeKeys, {"p"}));
  const auto o = parse_tree_options(p);
  const std::size_t trees = p.count_or("trees", 100);
  const double pw = p.number_or("p", 4.0);
  if (!(pw >= 2.0)) p.at("p").fail("must be at least 2");
  std::mt19937_64 rng(s.require_seed());
  ExperimentReport r;
  r.kind = s.kind;
  double worst_first = -std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  std::size_t failures = 0, non_finite = 0;
  for (std::size_t i = 0; i < trees; ++i) {
    const auto t = tree::make_mean_nonpositive(tree::random_tree(rng, o), rng);
    const auto res = tree::rosenthal_check(t, tree::MartingaleArray::from_tree(t), pw);
    r.series.push_back({"first", i, std::nullopt, res.lhs, res.rhs});
    r.series.push_back({"second-ratio", i, pw, res.ratio, std::nullopt});
    worst_first = std::max(worst_first, res.lhs - res.rhs);
    if (!res.pass) ++failures;
    if (!std::isfinite(res.ratio)) ++non_finite;
    else worst_ratio = std::max(worst_ratio, res.ratio);
  }
  r.verdicts.push_back({"first display lhs <= rhs", worst_first, failures == 0, true,
                        std::to_string(failures) + " failures over " + std::to_string(trees) + " trees"});
  r.verdicts.push_back({"second display ratio finite", worst_ratio, non_finite == 0, true,
                        "largest lhs/rhs ratio"});
  r.add_provenance("trees", std::to_string(trees));
  r.add_provenance("p", format_double(pw));
  return r;
}

// ---- G ----------------------------------------------------------------------

ExperimentReport run_g_laws(const Suite& s) {
  const Field p = s.params();
  p.allow_only({"dims", "trials", "members", "tolerance"});
  const auto dims = p.has("dims") ? p.at("dims").counts() : std::vector<std::size_t>{1, 2};
  const std::size_t trials = p.count_or("trials", 1000);
  const std::size_t members = p.count_or("members", 3);
  if (members == 0) p.at("members").fail("must be positive");
  const double tol = p.positive_or("tolerance", 1e-10);
  const std::uint64_t seed = s.require_seed();
  ExperimentReport r;
  r.kind = s.kind;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) p.at("dims").at(i).fail("must be positive");
    const GFunction g = random_g_function(dims[i], members, seed + dims[i]);
    r.add_laws("d=" + std::to_string(dims[i]) + " ", verify_g_laws(g, trials, seed, tol));
  }
  r.add_provenance("trials", std::to_string(trials));
  return r;
}

// ---- PDE --------------------------------------------------------------------

Matrix random_symmetric(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto n = static_cast<Eigen::Index>(d);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
  return a;
}

void dump_fields(const Suite& s, const RunOptions& options, const GFunction& g,
                 const std::vector<lab::NamedFunctional>& fs, const pde::SolveHints& hints,
                 std::size_t snapshot_every) {
  std::ostringstream out;
  out << "# sublin fields v1\nfunctional,time,x" << (g.dim() == 2 ? ",y" : "") << ",u\n";
  for (const auto& f : fs) {
    const auto res = pde::gnormal_expect(g, f.fn, hints);
    const std::size_t every = snapshot_every ? snapshot_every : std::max<std::size_t>(res.grid.steps / 10, 1);
    pde::solve_gheat(g, f.fn, res.grid,
                     [&](const pde::GridFunction& u) {
                       const auto& gr = u.grid;
                       const std::size_t n = gr.nodes_per_axis();
                       for (std::size_t k = 0; k < u.values.size(); ++k) {
                         out << f.id << ',' << format_double(u.time) << ',';
                         if (gr.dim == 1) {
                           out << format_double(gr.coordinate(k));
                         } else {
                           out << format_double(gr.coordinate(k / n)) << ',' << format_double(gr.coordinate(k % n));
                         }
                         out << ',' << format_double(u.values[k]) << '\n';
                       }
                     },
                     every);
  }
  write_atomic(options.out_dir / (s.output + ".fields.csv"), out.str());
}

ExperimentReport run_pde(const Suite& s, const RunOptions& options) {
  const Field p = s.params();
  p.allow_only({"g", "horizon", "spacing", "half_width", "cfl_fraction", "functionals", "expected",
                "tolerance", "snapshot_every", "quadratic"});
  ExperimentReport r;
  r.kind = s.kind;
  pde::SolveHints hints = parse_hints(p);
  hints.horizon = p.positive_or("horizon", 1.0);
  const double tol = p.positive_or("tolerance", 0.005);

  std::vector<lab::NamedFunctional> fs;
  if (p.has("functionals")) {
    const GFunction g = parse_g(p.at("g"));
    const Field list = p.at("functionals");
    for (std::size_t i = 0; i < list.size(); ++i) {
      fs.push_back(named(list.at(i)));
      if (fs.back().fn.arity() != 1 || fs.back().fn.dim() != g.dim())
        list.at(i).fail("functional does not match the dimension of G");
    }
    std::optional<Field> expected = p.find("expected");
    for (const auto& f : fs) {
      const auto res = pde::gnormal_expect(g, f.fn, hints);
      Cell c{0, f.id, res.value, res.value, 0.0, res.error_bar};
      if (expected && expected->has(f.id)) {
        c.limit = expected->at(f.id).number();
        c.gap = std::abs(c.prelimit - c.limit);
        r.verdicts.push_back({"closed-form:" + f.id, c.gap, c.gap <= tol, true,
                              "tolerance " + format_double(tol)});
        r.verdicts.push_back({"error-bar-brackets:" + f.id, c.gap, c.gap <= c.error_bar, true,
                              "error bar " + format_double(c.error_bar)});
      }
      r.verdicts.push_back({"pde-margin:" + f.id, res.margin, res.margin_ok, true,
                            "influence " + format_double(res.influence)});
      r.cells.push_back(c);
      if (r.provenance.empty()) {
        r.add_provenance("grid.spacing", format_double(res.grid.spacing));
        r.add_provenance("grid.half_width", format_double(res.grid.half_width));
        r.add_provenance("grid.time_step", format_double(res.grid.time_step));
        r.add_provenance("grid.steps", std::to_string(res.grid.steps));
      }
    }
    if (options.dump_fields) dump_fields(s, options, g, fs, hints, p.count_or("snapshot_every", 0));
  }

  if (auto q = p.find("quadratic")) {
    q->allow_only({"samples", "dims", "members", "tolerance", "t_min", "t_max"});
    const std::size_t samples = q->count_or("samples", 20);
    const auto dims = q->has("dims") ? q->at("dims").counts() : std::vector<std::size_t>{1, 2};
    if (dims.empty()) q->at("dims").fail("needs at least one dimension");
    for (std::size_t i = 0; i < dims.size(); ++i)
      if (dims[i] != 1 && dims[i] != 2) q->at("dims").at(i).fail("dimension must be 1 or 2");
    const std::size_t members = q->count_or("members", 3);
    if (members == 0) q->at("members").fail("must be positive");
    const double qtol = q->positive_or("tolerance", 0.03);
    const double t_min = q->positive_or("t_min", 0.2);
    const double t_max = q->positive_or("t_max", 1.0);
    if (t_max < t_min) q->at("t_max").fail("must not be below t_min");
    std::mt19937_64 rng(s.require_seed());
    std::uniform_real_distribution<double> ut(t_min, t_max);
    double worst = 0.0;
    std::size_t fails = 0;
    for (std::size_t i = 0; i < samples; ++i) {
      const std::size_t d = dims[i % dims.size()];
      const GFunction g = random_g_function(d, members, rng(), true);
      const Matrix a = random_symmetric(rng, d);
      const double t = ut(rng);
      pde::SolveHints h = hints;
      h.half_width = 0.0;
      const auto res = pde::gbm_quadratic_identity(g, a, t, h);
      Cell c{0, "quadratic-" + std::to_string(i), res.computed, res.reference,
             std::abs(res.computed - res.reference), res.error_bar};
      worst = std::max(worst, c.gap);
      if (c.gap > qtol) ++fails;
      r.cells.push_back(c);
    }
    r.verdicts.push_back({"quadratic-identity", worst, fails == 0, true,
                          std::to_string(fails) + " of " + std::to_string(samples) + " above " +
                              format_double(qtol)});
  }
  if (r.cells.empty()) p.fail("needs 'functionals' or 'quadratic'");
  return r;
}

// ---- CLT / FDD ---------------------------------------------------------------

lab::ArraySpec parse_array(const Field& p) {
  lab::ArraySpec spec;
  const std::string mode = p.has("mode") ? p.at("mode").string() : "iid";
  if (mode == "iid") {
    spec.mode = lab::Mode::iid;
    spec.laws.push_back(parse_law(p.at("law")));
  } else if (mode == "heterogeneous") {
    spec.mode = lab::Mode::heterogeneous;
    const Field laws = p.at("laws");
    for (std::size_t i = 0; i < laws.size(); ++i) spec.laws.push_back(parse_law(laws.at(i)));
    if (p.has("target_ratio")) spec.target_ratio = p.at("target_ratio").number();
  } else {
    p.at("mode").fail("expected 'iid' or 'heterogeneous'");
  }
  spec.schedule = p.has("schedule") ? p.at("schedule").counts() : std::vector<std::size_t>{16, 64, 256};
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    p.fail(e.what());
  }
  return spec;
}

lab::CltOptions parse_clt_options(const Field& p, const RunOptions& options) {
  lab::CltOptions o;
  o.hints = parse_hints(p);
  o.tolerance = p.positive_or("tolerance", o.tolerance);
  o.hard_tolerance = p.boolean_or("hard_tolerance", false);
  o.verified_moment = p.positive_or("verified_moment", 2.0);
  o.jobs = options.jobs;
  o.limits.max_states = p.count_or("max_states", o.limits.max_states);
  if (o.limits.max_states == 0) p.at("max_states").fail("must be positive");
  return o;
}

const std::vector<std::string> kArrayKeys = {"mode", "law", "laws", "target_ratio", "schedule",
                                             "spacing", "half_width", "cfl_fraction", "tolerance",
                                             "hard_tolerance", "verified_moment", "max_states"};

ExperimentReport run_clt(const Suite& s, const RunOptions& options) {
  const Field p = s.params();
  p.allow_only(with_keys(kArrayKeys, {"functionals", "lindeberg_eps", "moment_p"}));
  const auto spec = parse_array(p);
  auto o = parse_clt_options(p, options);
  std::optional<double> moment_p;
  if (p.has("moment_p")) {
    moment_p = p.at("moment_p").number();
    if (!(*moment_p > 2.0)) p.at("moment_p").fail("must exceed 2");
  }
  std::vector<lab::NamedFunctional> fs;
  const Field list = p.at("functionals");
  for (std::size_t i = 0; i < list.size(); ++i) fs.push_back(named(list.at(i)));
  if (fs.empty()) list.fail("needs at least one functional");

  ExperimentReport extra;
  if (moment_p) {
    // A decreasing p-th moment sum is what licenses power-p growth.
    extra = lab::check_lindeberg(spec, {}, moment_p);
    bool decreasing = true;
    for (const auto& v : extra.verdicts) decreasing = decreasing && v.pass;
    if (decreasing) o.verified_moment = std::max(o.verified_moment, *moment_p);
  }
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (fs[i].fn.growth().degree() > o.verified_moment)
      list.at(i).fail("growth " + fs[i].fn.growth().label() + " exceeds the verified moment condition");

  ExperimentReport r = lab::run_clt_experiment(spec, fs, o);
  if (p.has("lindeberg_eps")) {
    const auto eps = p.at("lindeberg_eps").numbers();
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (!(eps[i] > 0.0)) p.at("lindeberg_eps").at(i).fail("must be positive");
    r.append(lab::check_lindeberg(spec, eps));
  }
  r.append(extra);
  r.append(lab::check_moment_conditions(spec));
  r.kind = s.kind;
  return r;
}

ExperimentReport run_fdd(const Suite& s, const RunOptions& options) {
  const Field p = s.params();
  p.allow_only(with_keys(kArrayKeys, {"times", "functional", "expected", "expected_tolerance"}));
  const auto spec = parse_array(p);
  const auto o = parse_clt_options(p, options);
  const auto times = p.at("times").numbers();
  const auto psi = named(p.at("functional"));
  if (psi.fn.arity() != times.size()) p.at("functional").fail("arity differs from the number of times");
  ExperimentReport r = lab::run_fdd_experiment(spec, times, psi, o);
  if (p.has("expected")) {
    const double e = p.at("expected").number();
    const double etol = p.positive_or("expected_tolerance", 0.01);
    const double gap = std::abs(r.cells.back().prelimit - e);
    r.verdicts.push_back({"expected:" + psi.id, gap, gap <= etol, true,
                          "prelimit at the last row against " + format_double(e)});
  }
  r.kind = s.kind;
  return r;
}

// ---- iid conditions -----------------------------------------------------------

ExperimentReport run_iid_conditions(const Suite& s) {
  const Field p = s.params();
  p.allow_only({"law", "c", "x", "probes", "limit"});
  const AmbiguitySet law = parse_law(p.at("law"));
  const auto cs = p.at("c").numbers();
  const auto xs = p.at("x").numbers();
  std::vector<Matrix> probes;
  if (p.has("probes")) {
    const Field list = p.at("probes");
    for (std::size_t i = 0; i < list.size(); ++i) probes.push_back(parse_matrix(list.at(i)));
  }
  lab::IidConditions res = [&] {
    try {
      return lab::check_iid_necessary_conditions(law, cs, xs, probes);
    } catch (const CapacityExceeded&) {
      throw;
    } catch (const InvalidArgument& e) {
      p.fail(e.what());
    }
  }();
  ExperimentReport r = std::move(res.report);
  r.kind = s.kind;
  for (std::size_t i = 0; i < res.probes.size(); ++i)
    r.series.push_back({"induced-g", i, std::nullopt, res.induced(res.probes[i]), res.probe_values[i]});
  if (auto lim = p.find("limit")) {
    lim->allow_only({"c", "schedule", "tolerance"});
    lab::ArraySpec spec;
    spec.laws.push_back(law);
    spec.schedule = lim->has("schedule") ? lim->at("schedule").counts() : std::vector<std::size_t>{16, 64, 256};
    try {
      spec.validate();
    } catch (const InvalidArgument& e) {
      lim->fail(e.what());
    }
    const double c = lim->positive_or("c", 10.0);
    auto rep = lab::limit_g_report(spec, res.probes, c);
    if (lim->has("tolerance")) {
      const double tol = lim->at("tolerance").positive();
      const std::size_t rows = spec.schedule.size();
      for (std::size_t i = 0; i < res.probes.size(); ++i) {
        const auto& last = rep.cells[i * rows + rows - 1];
        rep.verdicts.push_back({"limit-g:" + last.functional, last.gap, last.gap <= tol, true,
                                "n=" + std::to_string(last.n) + " tolerance " + format_double(tol)});
      }
    }
    r.append(rep);
  }
  return r;
}

}  // namespace

ExperimentReport run_suite(const Suite& s, const RunOptions& options) {
  ExperimentReport r;
  if (s.kind == "axioms") r = run_axioms(s);
  else if (s.kind == "tree-laws") r = run_tree_laws(s);
  else if (s.kind == "g-laws") r = run_g_laws(s);
  else if (s.kind == "pde") r = run_pde(s, options);
  else if (s.kind == "clt") r = run_clt(s, options);
  else if (s.kind == "fdd") r = run_fdd(s, options);
  else if (s.kind == "rosenthal") r = run_rosenthal(s);
  else if (s.kind == "iid-conditions") r = run_iid_conditions(s);
  else throw SchemaError("kind: unknown experiment kind '" + s.kind + "'");
  r.add_provenance("config", s.source.filename().string());
  if (s.seed) r.add_provenance("seed", std::to_string(*s.seed));
  return r;
}

}  // namespace sublin::cli
