#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sublin/g_function.hpp"
#include "sublin/test_function.hpp"

namespace sublin::pde {

/// Uniform grid on [-L, L]^dim with an explicit time march to `horizon`.
struct Grid {
  std::size_t dim = 1;
  double half_width = 1.0;  // L, an integer multiple of spacing
  double spacing = 0.1;     // h
  double time_step = 0.01;  // tau, horizon / steps
  double horizon = 1.0;     // T
  std::size_t steps = 100;

  std::size_t nodes_per_axis() const;
  std::size_t node_count() const;
  std::size_t center() const { return nodes_per_axis() / 2; }
  double coordinate(std::size_t i) const;
};

/// Builds a grid with tau = cfl_fraction * h^2 / (dim * max diagonal of theta)
/// shrunk so that a whole number of steps reaches the horizon, and validates
/// it against `g`. L is rounded up to a multiple of h.
Grid make_grid(const GFunction& g, std::size_t dim, double half_width, double spacing,
               double horizon, double cfl_fraction = 0.5);

/// Throws InvalidArgument if the explicit scheme would not be monotone for
/// `g` on this grid (CFL, or a non-diagonally-dominant 2-d covariance).
void validate_grid(const Grid& grid, const GFunction& g);

/// Sampled solution u(t, .) on a grid, row-major with the last axis fastest.
struct GridFunction {
  Grid grid;
  double time = 0.0;
  std::vector<double> values;

  double at_origin() const;
  double at(std::span<const std::size_t> index) const;
};

using SnapshotObserver = std::function<void(const GridFunction&)>;

/// Forward march u <- u + tau/2 G(D^2_h u) from u(0) = phi to the grid's
/// horizon with boundary nodes frozen at phi. `observer`, if set, sees the
/// initial layer, every `snapshot_every`-th layer and the final one.
GridFunction solve_gheat(const GFunction& g, const TestFunction& phi, const Grid& grid,
                         const SnapshotObserver& observer = {}, std::size_t snapshot_every = 0);

/// Same march from tabulated initial data; returns the final layer.
std::vector<double> march(const GFunction& g, const Grid& grid, std::vector<double> values);

struct SolveHints {
  double horizon = 1.0;
  double spacing = 0.0;     // 0 picks 0.05 in 1-d and 0.2 in 2-d
  double half_width = 0.0;  // 0 sizes from the boundary-influence margin
  double cfl_fraction = 0.5;
  double margin_sigmas = 6.0;
  double extra_margin = 2.0;
};

/// A scalar computed on two grids (h and h/2).
struct ScalarResult {
  double value = 0.0;         // fine-grid value
  double coarse_value = 0.0;  // h-grid value
  double error_bar = 0.0;     // |fine - coarse| plus a round-off floor
  Grid grid;                  // fine grid
  double influence = 0.0;     // margin_sigmas * sqrt(max diag * horizon)
  double margin = 0.0;        // distance from the evaluation point to the boundary
  bool margin_ok = true;
};

/// Round-off floor added to every two-grid error bar.
inline constexpr double kRoundoffFloor = 1e-9;

/// E[phi(sqrt(horizon) * xi)] for xi ~ N(0, G), i.e. u(horizon, 0).
ScalarResult gnormal_expect(const GFunction& g, const TestFunction& phi, const SolveHints& hints = {});

/// E[phi(W_{t_1}, ..., W_{t_p})] for a one-dimensional G-Brownian motion by
/// nested solves over the increments, 0 < t_1 < ... < t_p <= 1, p <= 3.
ScalarResult gbm_fdd_expect(const GFunction& g, std::span<const double> times,
                            const TestFunction& phi, const SolveHints& hints = {});

struct QuadraticIdentity {
  double computed = 0.0;   // E[<W_t A, W_t>] from the solver
  double reference = 0.0;  // G(A) t
  double error_bar = 0.0;
};

QuadraticIdentity gbm_quadratic_identity(const GFunction& g, const Matrix& a, double t,
                                         const SolveHints& hints = {});

}  // namespace sublin::pde
