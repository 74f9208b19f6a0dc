#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sublin/test_function.hpp"

namespace sublin {

using Point = std::vector<double>;

/// Common mesh shared by every support point of an ambiguity set.
///
/// Points are `origin + m * step` for integer vectors m. Internally every
/// point is re-expressed against the canonical offset `origin mod step`, so
/// two specs whose origins differ by whole steps describe the same lattice
/// and produce bit-identical values.
struct LatticeSpec {
  std::size_t dim = 1;
  double step = 1.0;
  std::vector<double> origin = {0.0};

  static LatticeSpec integer(std::size_t dim = 1, double step = 1.0);

  void validate() const;
  double canonical_offset(std::size_t axis) const;
  /// Integer coordinate of x along `axis`, or throws if x is off the lattice
  /// by more than 1e-12 relative tolerance.
  std::int64_t index_of(double x, std::size_t axis) const;
  bool contains(double x, std::size_t axis) const;
  double value_at(std::int64_t index, std::size_t axis) const;
};

/// One classical law with finite support.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<Point> support, std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<Point>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::size_t dim_;
  std::vector<Point> support_;
  std::vector<double> probs_;
};

/// A finite family of discrete laws on a shared lattice; the upper
/// expectation of a random vector is the maximum over the family.
class AmbiguitySet {
 public:
  AmbiguitySet(LatticeSpec lattice, std::vector<DiscreteDistribution> members);

  const LatticeSpec& lattice() const { return lattice_; }
  std::size_t dim() const { return lattice_.dim; }
  std::size_t member_count() const { return members_.size(); }
  const std::vector<DiscreteDistribution>& members() const { return members_; }
  const DiscreteDistribution& member(std::size_t i) const { return members_[i]; }

  /// Integer lattice coordinates of member i, flattened `dim` per point.
  std::span<const std::int64_t> coords(std::size_t i) const { return coords_[i]; }
  /// Smallest / largest integer coordinate per axis over all members.
  const std::vector<std::int64_t>& min_coord() const { return min_coord_; }
  const std::vector<std::int64_t>& max_coord() const { return max_coord_; }

  /// Largest sup-norm of any support point.
  double support_radius() const;

 private:
  LatticeSpec lattice_;
  std::vector<DiscreteDistribution> members_;
  std::vector<std::vector<std::int64_t>> coords_;
  std::vector<std::int64_t> min_coord_;
  std::vector<std::int64_t> max_coord_;
};

/// Symmetric three-point law on {-a, 0, a}: one member per variance v with
/// P(+-a) = v / (2 a^2), P(0) = 1 - v / a^2. B(0.5, 1) is
/// `symmetric_three_point({0.5, 1.0})`.
AmbiguitySet symmetric_three_point(const std::vector<double>& variances, double a = 1.0);

/// Point mass at the origin of R^dim.
AmbiguitySet point_mass(std::size_t dim = 1);

/// Maximum value with the lowest attaining member index.
struct Extremum {
  double value = 0.0;
  std::size_t member = 0;
};

Extremum upper_extremum(const AmbiguitySet& x, const TestFunction& f);
double expect_upper(const AmbiguitySet& x, const TestFunction& f);
/// Conjugate expectation: -expect_upper(x, -f).
double expect_lower(const AmbiguitySet& x, const TestFunction& f);

using Event = std::function<bool(std::span<const double>)>;

double capacity_upper(const AmbiguitySet& x, const Event& event);
/// 1 - capacity_upper of the complement.
double capacity_lower(const AmbiguitySet& x, const Event& event);

/// Componentwise clamp to [-c, c]; colliding points merge their mass. Both
/// +c and -c must be lattice points.
AmbiguitySet truncate(const AmbiguitySet& x, double c);

/// Second-moment matrix E_P[X X^T] of every member, row-major d*d.
std::vector<std::vector<double>> member_second_moments(const AmbiguitySet& x);

}  // namespace sublin
