#include "sublin/gheat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sublin/errors.hpp"

namespace sublin::pde {

std::size_t Grid::nodes_per_axis() const {
  return 2 * static_cast<std::size_t>(std::llround(half_width / spacing)) + 1;
}

std::size_t Grid::node_count() const {
  std::size_t n = 1;
  for (std::size_t a = 0; a < dim; ++a) n *= nodes_per_axis();
  return n;
}

double Grid::coordinate(std::size_t i) const {
  const auto c = static_cast<std::int64_t>(center());
  return spacing * static_cast<double>(static_cast<std::int64_t>(i) - c);
}

void validate_grid(const Grid& grid, const GFunction& g) {
  if (grid.dim != 1 && grid.dim != 2) throw InvalidArgument("G-heat solver supports d in {1, 2}");
  if (g.dim() != grid.dim) throw InvalidArgument("grid and G differ in dimension");
  if (!(grid.spacing > 0.0) || !(grid.half_width >= grid.spacing) || !(grid.horizon > 0.0) ||
      !(grid.time_step > 0.0) || grid.steps == 0)
    throw InvalidArgument("grid parameters must be positive");
  const double cells = grid.half_width / grid.spacing;
  if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells))
    throw InvalidArgument("grid half width must be a multiple of the spacing");
  const double h2 = grid.spacing * grid.spacing;
  const double cfl = grid.time_step * static_cast<double>(grid.dim) * g.max_diagonal() / h2;
  if (cfl > 1.0 + 1e-12)
    throw InvalidArgument("CFL condition violated: tau * d * sigma_max^2 / h^2 = " +
                          std::to_string(cfl) + " > 1");
  for (const auto& s : g.theta()) {
    if (grid.dim == 2) {
      const double b = std::abs(s(0, 1));
      if (b > std::min(s(0, 0), s(1, 1)) + 1e-12)
        throw InvalidArgument("non-monotone stencil; regularize Theta or rotate coordinates");
      if (1.0 - grid.time_step * (s(0, 0) + s(1, 1) - b) / h2 < -1e-12)
        throw InvalidArgument("non-monotone stencil: negative center weight");
    } else if (1.0 - grid.time_step * s(0, 0) / h2 < -1e-12) {
      throw InvalidArgument("non-monotone stencil: negative center weight");
    }
  }
}

Grid make_grid(const GFunction& g, std::size_t dim, double half_width, double spacing,
               double horizon, double cfl_fraction) {
  if (!(spacing > 0.0) || !(half_width > 0.0) || !(horizon > 0.0))
    throw InvalidArgument("grid parameters must be positive");
  if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0))
    throw InvalidArgument("CFL fraction must lie in (0, 1]");
  Grid grid;
  grid.dim = dim;
  grid.spacing = spacing;
  grid.half_width = spacing * std::ceil(half_width / spacing - 1e-9);
  grid.horizon = horizon;
  const double speed = static_cast<double>(dim) * g.max_diagonal();
  const double tau_max = speed > 0.0 ? cfl_fraction * spacing * spacing / speed : horizon;
  grid.steps = static_cast<std::size_t>(std::ceil(horizon / tau_max - 1e-12));
  grid.steps = std::max<std::size_t>(grid.steps, 1);
  grid.time_step = horizon / static_cast<double>(grid.steps);
  validate_grid(grid, g);
  return grid;
}

double GridFunction::at_origin() const {
  const std::size_t c = grid.center();
  return grid.dim == 1 ? values[c] : values[c * grid.nodes_per_axis() + c];
}

double GridFunction::at(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t i : index) flat = flat * grid.nodes_per_axis() + i;
  return values.at(flat);
}

namespace {

void step_1d(const GFunction& g, const Grid& grid, const std::vector<double>& u,
             std::vector<double>& out) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : g.theta()) {
    lo = std::min(lo, s(0, 0));
    hi = std::max(hi, s(0, 0));
  }
  const std::size_t n = u.size();
  const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);
  const double half_tau = 0.5 * grid.time_step;
  out[0] = u[0];
  out[n - 1] = u[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_h2;
    out[i] = u[i] + half_tau * (d2 >= 0.0 ? hi * d2 : lo * d2);
  }
}

struct Stencil2 {
  double a, b, c;
};

void step_2d(const std::vector<Stencil2>& theta, const Grid& grid, const std::vector<double>& u,
             std::vector<double>& out) {
  const std::size_t n = grid.nodes_per_axis();
  const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);
  const double half_tau = 0.5 * grid.time_step;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i * n + j;
      if (i == 0 || j == 0 || i + 1 == n || j + 1 == n) {
        out[k] = u[k];
        continue;
      }
      const double c0 = u[k];
      const double xp = u[k + n], xm = u[k - n], yp = u[k + 1], ym = u[k - 1];
      const double dxx = (xp - 2.0 * c0 + xm) * inv_h2;
      const double dyy = (yp - 2.0 * c0 + ym) * inv_h2;
      const double cross = xp + xm + yp + ym - 2.0 * c0;
      const double dxy_pos = (u[k + n + 1] + u[k - n - 1] - cross) * 0.5 * inv_h2;
      const double dxy_neg = -(u[k + n - 1] + u[k - n + 1] - cross) * 0.5 * inv_h2;
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& s : theta) {
        const double v = s.a * dxx + s.c * dyy + 2.0 * s.b * (s.b >= 0.0 ? dxy_pos : dxy_neg);
        best = std::max(best, v);
      }
      out[k] = c0 + half_tau * best;
    }
  }
}

std::vector<double> tabulate(const TestFunction& phi, const Grid& grid) {
  std::vector<double> values(grid.node_count());
  const std::size_t n = grid.nodes_per_axis();
  if (grid.dim == 1) {
    for (std::size_t i = 0; i < n; ++i) values[i] = phi(grid.coordinate(i));
  } else {
    double p[2];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        p[0] = grid.coordinate(i);
        p[1] = grid.coordinate(j);
        values[i * n + j] = phi(std::span<const double>(p, 2));
      }
  }
  return values;
}

void check_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericError("non-finite value in G-heat march");
}

GridFunction run(const GFunction& g, const Grid& grid, std::vector<double> values,
                 const SnapshotObserver& observer, std::size_t every) {
  validate_grid(grid, g);
  if (values.size() != grid.node_count()) throw InvalidArgument("initial data does not match grid");
  std::vector<Stencil2> theta2;
  for (const auto& s : g.theta())
    if (grid.dim == 2) theta2.push_back({s(0, 0), s(0, 1), s(1, 1)});
  std::vector<double> next(values.size());
  if (observer) observer(GridFunction{grid, 0.0, values});
  for (std::size_t m = 1; m <= grid.steps; ++m) {
    if (grid.dim == 1)
      step_1d(g, grid, values, next);
    else
      step_2d(theta2, grid, values, next);
    values.swap(next);
    if (observer && ((every > 0 && m % every == 0) || m == grid.steps))
      observer(GridFunction{grid, grid.time_step * static_cast<double>(m), values});
  }
  check_finite(values);
  return GridFunction{grid, grid.horizon, std::move(values)};
}

double default_spacing(std::size_t dim) { return dim == 1 ? 0.05 : 0.2; }

double influence_radius(const GFunction& g, double horizon, double sigmas) {
  return sigmas * std::sqrt(g.max_diagonal() * horizon);
}

double auto_half_width(const GFunction& g, const SolveHints& hints, double horizon) {
  if (hints.half_width > 0.0) return hints.half_width;
  return influence_radius(g, horizon, hints.margin_sigmas) + hints.extra_margin;
}

ScalarResult two_grid(const SolveHints& hints, const GFunction& g, double horizon,
                      const std::function<double(double spacing, Grid&)>& solve) {
  const std::size_t dim = g.dim();
  const double h = hints.spacing > 0.0 ? hints.spacing : default_spacing(dim);
  ScalarResult r;
  Grid coarse;
  r.coarse_value = solve(h, coarse);
  r.value = solve(0.5 * h, r.grid);
  r.error_bar = std::abs(r.value - r.coarse_value) + kRoundoffFloor;
  r.influence = influence_radius(g, horizon, hints.margin_sigmas);
  r.margin = r.grid.half_width;
  r.margin_ok = r.margin >= r.influence;
  return r;
}

}  // namespace

std::vector<double> march(const GFunction& g, const Grid& grid, std::vector<double> values) {
  return run(g, grid, std::move(values), {}, 0).values;
}

GridFunction solve_gheat(const GFunction& g, const TestFunction& phi, const Grid& grid,
                         const SnapshotObserver& observer, std::size_t snapshot_every) {
  if (phi.arity() != 1 || phi.dim() != grid.dim)
    throw InvalidArgument("initial data shape does not match the grid");
  validate_grid(grid, g);
  return run(g, grid, tabulate(phi, grid), observer, snapshot_every);
}

ScalarResult gnormal_expect(const GFunction& g, const TestFunction& phi, const SolveHints& hints) {
  const std::size_t dim = g.dim();
  if (dim > 2) throw InvalidArgument("G-heat solver supports d in {1, 2}");
  const double horizon = hints.horizon;
  const double half_width = auto_half_width(g, hints, horizon);
  return two_grid(hints, g, horizon, [&](double spacing, Grid& grid) {
    grid = make_grid(g, dim, half_width, spacing, horizon, hints.cfl_fraction);
    return solve_gheat(g, phi, grid).at_origin();
  });
}

namespace {

// Values over the grid of F_j(prefix, y): F_p = phi, and F_j integrates the
// increment W_{t_{j+1}} - W_{t_j} out of F_{j+1} with y frozen as the start.
std::vector<double> fdd_layer(const GFunction& g, std::span<const double> times,
                              const TestFunction& phi, const std::vector<Grid>& grids,
                              std::vector<double>& prefix) {
  const Grid& shape = grids.front();
  const std::size_t n = shape.nodes_per_axis();
  const std::size_t j = prefix.size() + 1;  // arguments fixed after this layer
  std::vector<double> out(n);
  if (j == times.size()) {
    prefix.push_back(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      prefix.back() = shape.coordinate(i);
      out[i] = phi(prefix);
    }
    prefix.pop_back();
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    prefix.push_back(shape.coordinate(i));
    auto data = fdd_layer(g, times, phi, grids, prefix);
    prefix.pop_back();
    out[i] = march(g, grids[j], std::move(data))[i];
  }
  return out;
}

}  // namespace

ScalarResult gbm_fdd_expect(const GFunction& g, std::span<const double> times,
                            const TestFunction& phi, const SolveHints& hints) {
  if (g.dim() != 1) throw InvalidArgument("finite-dimensional laws are solved in d = 1 only");
  if (times.empty()) throw InvalidArgument("fdd needs at least one time");
  if (times.size() > 3) throw CapacityExceeded("fdd arity cap");
  if (phi.arity() != times.size() || phi.dim() != 1) throw InvalidArgument("arity mismatch");
  double prev = 0.0;
  for (double t : times) {
    if (!(t > prev)) throw InvalidArgument("fdd times must be strictly increasing and positive");
    prev = t;
  }
  if (times.back() > 1.0 + 1e-12) throw InvalidArgument("fdd times must not exceed 1");

  const double half_width = auto_half_width(g, hints, times.back());
  return two_grid(hints, g, times.back(), [&](double spacing, Grid& fine) {
    // grids[j] marches over t_{j+1} - t_j (t_0 = 0).
    std::vector<Grid> grids;
    double start = 0.0;
    for (double t : times) {
      grids.push_back(make_grid(g, 1, half_width, spacing, t - start, hints.cfl_fraction));
      start = t;
    }
    std::vector<double> prefix;
    auto first = fdd_layer(g, times, phi, grids, prefix);
    fine = grids.front();
    fine.horizon = times.back();
    return march(g, grids.front(), std::move(first))[grids.front().center()];
  });
}

QuadraticIdentity gbm_quadratic_identity(const GFunction& g, const Matrix& a, double t,
                                         const SolveHints& hints) {
  if (!(t > 0.0)) throw InvalidArgument("time must be positive");
  const std::size_t d = g.dim();
  require_symmetric(a, d);
  const Matrix form = a;
  const TestFunction phi = TestFunction::of_point(
      d,
      [form, d](std::span<const double> x) {
        double q = 0.0;
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j)
            q += x[i] * form(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
        return q;
      },
      GrowthTag::quadratic());
  SolveHints h = hints;
  h.horizon = t;
  const auto r = gnormal_expect(g, phi, h);
  return QuadraticIdentity{r.value, g(a) * t, r.error_bar};
}

}  // namespace sublin::pde
