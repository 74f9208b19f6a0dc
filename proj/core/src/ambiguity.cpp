#include "sublin/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "sublin/errors.hpp"

namespace sublin {

namespace {

constexpr double kProbTolerance = 1e-12;
constexpr double kLatticeTolerance = 1e-12;

}  // namespace

LatticeSpec LatticeSpec::integer(std::size_t dim, double step) {
  return LatticeSpec{dim, step, std::vector<double>(dim, 0.0)};
}

void LatticeSpec::validate() const {
  if (dim == 0) throw InvalidArgument("lattice dimension must be positive");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("lattice step must be positive");
  if (origin.size() != dim) throw InvalidArgument("lattice origin has wrong dimension");
  for (double o : origin)
    if (!std::isfinite(o)) throw InvalidArgument("lattice origin is not finite");
}

double LatticeSpec::canonical_offset(std::size_t axis) const {
  const double o = origin[axis];
  double c = o - step * std::floor(o / step);
  if (c >= step || std::abs(c - step) <= kLatticeTolerance * step) c = 0.0;
  if (std::abs(c) <= kLatticeTolerance * step) c = 0.0;
  return c;
}

bool LatticeSpec::contains(double x, std::size_t axis) const {
  if (!std::isfinite(x)) return false;
  const double c = canonical_offset(axis);
  const double m = std::round((x - c) / step);
  const double snapped = c + step * m;
  return std::abs(x - snapped) <= kLatticeTolerance * std::max({1.0, std::abs(x), step});
}

std::int64_t LatticeSpec::index_of(double x, std::size_t axis) const {
  if (!contains(x, axis))
    throw InvalidArgument("point " + std::to_string(x) + " is not on the lattice");
  return static_cast<std::int64_t>(std::llround((x - canonical_offset(axis)) / step));
}

double LatticeSpec::value_at(std::int64_t index, std::size_t axis) const {
  return canonical_offset(axis) + step * static_cast<double>(index);
}

DiscreteDistribution::DiscreteDistribution(std::vector<Point> support, std::vector<double> probs)
    : dim_(support.empty() ? 0 : support.front().size()),
      support_(std::move(support)),
      probs_(std::move(probs)) {
  if (support_.empty()) throw InvalidArgument("distribution has empty support");
  if (support_.size() != probs_.size())
    throw InvalidArgument("support and probability lists differ in length");
  if (dim_ == 0) throw InvalidArgument("support points must have positive dimension");
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!std::isfinite(p) || p < 0.0) throw InvalidArgument("negative probability");
    total += p;
    if (support_[i].size() != dim_) throw InvalidArgument("support points differ in dimension");
    for (double v : support_[i])
      if (!std::isfinite(v)) throw InvalidArgument("support point is not finite");
  }
  if (std::abs(total - 1.0) > kProbTolerance)
    throw InvalidArgument("probabilities sum to " + std::to_string(total) + ", not 1");
  auto sorted = support_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgument("support points are not pairwise distinct");
}

AmbiguitySet::AmbiguitySet(LatticeSpec lattice, std::vector<DiscreteDistribution> members)
    : lattice_(std::move(lattice)) {
  lattice_.validate();
  if (members.empty()) throw InvalidArgument("ambiguity set needs at least one member");
  const std::size_t d = lattice_.dim;
  min_coord_.assign(d, std::numeric_limits<std::int64_t>::max());
  max_coord_.assign(d, std::numeric_limits<std::int64_t>::min());
  for (const auto& m : members) {
    if (m.dim() != d) throw InvalidArgument("member dimension differs from lattice dimension");
    std::vector<std::int64_t> coords;
    std::vector<Point> snapped;
    coords.reserve(m.size() * d);
    for (const auto& x : m.support()) {
      Point s(d);
      for (std::size_t a = 0; a < d; ++a) {
        const std::int64_t idx = lattice_.index_of(x[a], a);
        coords.push_back(idx);
        s[a] = lattice_.value_at(idx, a);
        min_coord_[a] = std::min(min_coord_[a], idx);
        max_coord_[a] = std::max(max_coord_[a], idx);
      }
      snapped.push_back(std::move(s));
    }
    coords_.push_back(std::move(coords));
    members_.emplace_back(std::move(snapped), m.probs());
  }
}

double AmbiguitySet::support_radius() const {
  double r = 0.0;
  for (const auto& m : members_)
    for (const auto& x : m.support())
      for (double v : x) r = std::max(r, std::abs(v));
  return r;
}

AmbiguitySet symmetric_three_point(const std::vector<double>& variances, double a) {
  if (!(a > 0.0)) throw InvalidArgument("three-point half width must be positive");
  std::vector<DiscreteDistribution> members;
  for (double v : variances) {
    if (v < 0.0 || v > a * a) throw InvalidArgument("three-point variance outside [0, a^2]");
    const double tail = v / (2.0 * a * a);
    members.emplace_back(std::vector<Point>{{-a}, {0.0}, {a}},
                         std::vector<double>{tail, 1.0 - 2.0 * tail, tail});
  }
  return AmbiguitySet(LatticeSpec::integer(1, a), std::move(members));
}

AmbiguitySet point_mass(std::size_t dim) {
  return AmbiguitySet(LatticeSpec::integer(dim),
                      {DiscreteDistribution({Point(dim, 0.0)}, {1.0})});
}

Extremum upper_extremum(const AmbiguitySet& x, const TestFunction& f) {
  if (f.arity() != 1 || f.dim() != x.dim())
    throw InvalidArgument("test function shape does not match the random vector");
  Extremum best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < x.member_count(); ++i) {
    const auto& m = x.member(i);
    double mean = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) mean += m.probs()[j] * f(m.support()[j]);
    if (mean > best.value) best = {mean, i};
  }
  return best;
}

double expect_upper(const AmbiguitySet& x, const TestFunction& f) {
  return upper_extremum(x, f).value;
}

double expect_lower(const AmbiguitySet& x, const TestFunction& f) {
  return -expect_upper(x, -f);
}

double capacity_upper(const AmbiguitySet& x, const Event& event) {
  double best = 0.0;
  for (const auto& m : x.members()) {
    double p = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j)
      if (event(m.support()[j])) p += m.probs()[j];
    best = std::max(best, p);
  }
  return std::clamp(best, 0.0, 1.0);
}

double capacity_lower(const AmbiguitySet& x, const Event& event) {
  const double complement =
      capacity_upper(x, [&event](std::span<const double> p) { return !event(p); });
  return std::clamp(1.0 - complement, 0.0, 1.0);
}

AmbiguitySet truncate(const AmbiguitySet& x, double c) {
  if (!(c > 0.0)) throw InvalidArgument("truncation level must be positive");
  const auto& lat = x.lattice();
  const std::size_t d = x.dim();
  std::vector<std::int64_t> lo(d), hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    if (!lat.contains(c, a) || !lat.contains(-c, a)) throw InvalidArgument("truncation off-lattice");
    lo[a] = lat.index_of(-c, a);
    hi[a] = lat.index_of(c, a);
  }
  std::vector<DiscreteDistribution> members;
  for (std::size_t i = 0; i < x.member_count(); ++i) {
    const auto coords = x.coords(i);
    const auto& probs = x.member(i).probs();
    std::vector<std::vector<std::int64_t>> keys;
    std::vector<double> merged;
    std::map<std::vector<std::int64_t>, std::size_t> slot;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      std::vector<std::int64_t> k(d);
      for (std::size_t a = 0; a < d; ++a) k[a] = std::clamp(coords[j * d + a], lo[a], hi[a]);
      auto [it, fresh] = slot.emplace(k, keys.size());
      if (fresh) {
        keys.push_back(k);
        merged.push_back(probs[j]);
      } else {
        merged[it->second] += probs[j];
      }
    }
    std::vector<Point> support;
    for (const auto& k : keys) {
      Point p(d);
      for (std::size_t a = 0; a < d; ++a) p[a] = lat.value_at(k[a], a);
      support.push_back(std::move(p));
    }
    members.emplace_back(std::move(support), std::move(merged));
  }
  return AmbiguitySet(lat, std::move(members));
}

std::vector<std::vector<double>> member_second_moments(const AmbiguitySet& x) {
  const std::size_t d = x.dim();
  std::vector<std::vector<double>> out;
  for (const auto& m : x.members()) {
    std::vector<double> s(d * d, 0.0);
    for (std::size_t j = 0; j < m.size(); ++j) {
      const auto& p = m.support()[j];
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) s[r * d + c] += m.probs()[j] * p[r] * p[c];
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace sublin
