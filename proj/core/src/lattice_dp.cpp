#include "sublin/lattice_dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sublin/errors.hpp"

namespace sublin {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double nested_recurse(std::span<const AmbiguitySet> xs, const TestFunction& f, std::size_t k,
                      std::vector<double>& args) {
  if (k == xs.size()) return f(args);
  const std::size_t d = xs[k].dim();
  double best = kNegInf;
  for (const auto& m : xs[k].members()) {
    double mean = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      std::copy(m.support()[j].begin(), m.support()[j].end(), args.begin() + k * d);
      mean += m.probs()[j] * nested_recurse(xs, f, k + 1, args);
    }
    if (mean > best) best = mean;
  }
  return best;
}

// Axis-aligned box of integer lattice points [lo, hi], row-major with the
// last axis fastest.
struct Box {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;
  std::vector<std::size_t> stride;
  std::size_t size = 1;

  Box(std::vector<std::int64_t> l, std::vector<std::int64_t> h) : lo(std::move(l)), hi(std::move(h)) {
    const std::size_t d = lo.size();
    stride.assign(d, 1);
    size = 1;
    for (std::size_t a = d; a-- > 0;) {
      stride[a] = size;
      size *= static_cast<std::size_t>(hi[a] - lo[a] + 1);
    }
  }
  // Same count in floating point, so huge boxes are caught before overflow.
  static double count(const std::vector<std::int64_t>& l, const std::vector<std::int64_t>& h) {
    double c = 1.0;
    for (std::size_t a = 0; a < l.size(); ++a) c *= static_cast<double>(h[a] - l[a] + 1);
    return c;
  }
};

void check_same_lattice(std::span<const AmbiguitySet> steps, std::size_t dim) {
  for (const auto& x : steps) {
    if (x.dim() != dim) throw InvalidArgument("summands differ in dimension");
    if (x.lattice().step != steps.front().lattice().step)
      throw InvalidArgument("summands live on lattices with different steps");
  }
}

}  // namespace

double nested_expect(std::span<const AmbiguitySet> xs, const TestFunction& f,
                     const DpLimits& limits) {
  if (xs.empty()) throw InvalidArgument("nested_expect needs at least one argument");
  if (xs.size() > limits.max_nesting) throw CapacityExceeded("nesting too deep");
  if (f.arity() != xs.size()) throw InvalidArgument("arity mismatch");
  for (const auto& x : xs)
    if (x.dim() != f.dim()) throw InvalidArgument("arity mismatch: argument dimension");
  std::vector<double> args(f.width(), 0.0);
  return nested_recurse(xs, f, 0, args);
}

double sum_expect(std::span<const AmbiguitySet> steps, const TestFunction& g, double scale,
                  const DpLimits& limits) {
  if (!(scale > 0.0)) throw InvalidArgument("scale must be positive");
  if (g.arity() != 1) throw InvalidArgument("partial-sum functional must have arity 1");
  const std::size_t d = g.dim();
  if (steps.empty()) return g(std::vector<double>(d, 0.0));
  check_same_lattice(steps, d);
  const double step = steps.front().lattice().step;
  const std::size_t n = steps.size();

  // lo/hi of every level and the accumulated canonical offset of the sum.
  std::vector<std::vector<std::int64_t>> lo(n + 1, std::vector<std::int64_t>(d, 0));
  std::vector<std::vector<std::int64_t>> hi(n + 1, std::vector<std::int64_t>(d, 0));
  std::vector<double> offset(d, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const auto& x = steps[k - 1];
    for (std::size_t a = 0; a < d; ++a) {
      lo[k][a] = lo[k - 1][a] + x.min_coord()[a];
      hi[k][a] = hi[k - 1][a] + x.max_coord()[a];
      offset[a] += x.lattice().canonical_offset(a);
    }
  }
  const double states = Box::count(lo[n], hi[n]);
  if (states > static_cast<double>(limits.max_states))
    throw CapacityExceeded("lattice blowup: " + std::to_string(static_cast<long double>(states)) +
                           " states at n=" + std::to_string(n));

  Box last(lo[n], hi[n]);
  std::vector<double> next(last.size);
  {
    std::vector<std::int64_t> k(lo[n]);
    std::vector<double> point(d);
    for (std::size_t idx = 0; idx < last.size; ++idx) {
      for (std::size_t a = 0; a < d; ++a)
        point[a] = scale * (offset[a] + step * static_cast<double>(k[a]));
      next[idx] = g(point);
      for (std::size_t a = d; a-- > 0;) {
        if (++k[a] <= hi[n][a]) break;
        k[a] = lo[n][a];
      }
    }
  }

  for (std::size_t level = n; level-- > 0;) {
    const auto& x = steps[level];
    const Box nb(lo[level + 1], hi[level + 1]);
    const Box cb(lo[level], hi[level]);
    // Flat offset of every support point inside the next box, relative to
    // the image of the current point.
    std::vector<std::vector<std::size_t>> member_offsets;
    for (std::size_t m = 0; m < x.member_count(); ++m) {
      const auto coords = x.coords(m);
      std::vector<std::size_t> off(x.member(m).size());
      for (std::size_t j = 0; j < off.size(); ++j) {
        std::size_t o = 0;
        for (std::size_t a = 0; a < d; ++a)
          o += static_cast<std::size_t>(coords[j * d + a] - x.min_coord()[a]) * nb.stride[a];
        off[j] = o;
      }
      member_offsets.push_back(std::move(off));
    }
    std::vector<double> cur(cb.size);
    std::vector<std::int64_t> r(d, 0);
    for (std::size_t idx = 0; idx < cb.size; ++idx) {
      std::size_t base = 0;
      for (std::size_t a = 0; a < d; ++a) base += static_cast<std::size_t>(r[a]) * nb.stride[a];
      double best = kNegInf;
      for (std::size_t m = 0; m < member_offsets.size(); ++m) {
        const auto& probs = x.member(m).probs();
        const auto& off = member_offsets[m];
        double mean = 0.0;
        for (std::size_t j = 0; j < off.size(); ++j) mean += probs[j] * next[base + off[j]];
        if (mean > best) best = mean;
      }
      cur[idx] = best;
      for (std::size_t a = d; a-- > 0;) {
        if (++r[a] <= cb.hi[a] - cb.lo[a]) break;
        r[a] = 0;
      }
    }
    next = std::move(cur);
  }
  return next.front();
}

double iid_sum_expect(const AmbiguitySet& x, std::size_t n, const TestFunction& g, double scale,
                      const DpLimits& limits) {
  if (n == 0) throw InvalidArgument("iid_sum_expect needs n >= 1");
  const std::vector<AmbiguitySet> steps(n, x);
  return sum_expect(steps, g, scale, limits);
}

double running_max_expect(const AmbiguitySet& x, std::size_t n, double scale,
                          const DpLimits& limits) {
  if (x.dim() != 1) throw InvalidArgument("1-d only");
  if (n == 0) throw InvalidArgument("running_max_expect needs n >= 1");
  if (!(scale > 0.0)) throw InvalidArgument("scale must be positive");

  // Union of support coordinates, ascending.
  std::vector<std::int64_t> moves;
  for (std::size_t m = 0; m < x.member_count(); ++m)
    for (std::int64_t c : x.coords(m)) moves.push_back(c);
  std::sort(moves.begin(), moves.end());
  moves.erase(std::unique(moves.begin(), moves.end()), moves.end());

  const double step = x.lattice().step;
  const double c0 = x.lattice().canonical_offset(0);
  using State = std::pair<std::int64_t, double>;  // (partial sum index, running max)
  std::vector<std::map<State, std::size_t>> levels(n + 1);
  levels[0].emplace(State{0, 0.0}, 0);
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double off = static_cast<double>(k + 1) * c0;
    for (const auto& [s, _] : levels[k]) {
      for (std::int64_t z : moves) {
        const std::int64_t sum = s.first + z;
        const double value = std::abs(scale * (off + step * static_cast<double>(sum)));
        levels[k + 1].emplace(State{sum, std::max(s.second, value)}, 0);
      }
    }
    std::size_t i = 0;
    for (auto& [s, idx] : levels[k + 1]) idx = i++;
    total += levels[k + 1].size();
    if (total > limits.max_states)
      throw CapacityExceeded("lattice blowup: running-max state count exceeds " +
                             std::to_string(limits.max_states) + " at step " +
                             std::to_string(k + 1));
  }

  std::vector<double> next;
  next.reserve(levels[n].size());
  for (const auto& [s, _] : levels[n]) next.push_back(s.second);
  for (std::size_t k = n; k-- > 0;) {
    const double off = static_cast<double>(k + 1) * c0;
    std::vector<double> cur;
    cur.reserve(levels[k].size());
    for (const auto& [s, _] : levels[k]) {
      double best = kNegInf;
      for (std::size_t m = 0; m < x.member_count(); ++m) {
        const auto coords = x.coords(m);
        const auto& probs = x.member(m).probs();
        double mean = 0.0;
        for (std::size_t j = 0; j < probs.size(); ++j) {
          const std::int64_t sum = s.first + coords[j];
          const double value = std::abs(scale * (off + step * static_cast<double>(sum)));
          mean += probs[j] * next[levels[k + 1].at(State{sum, std::max(s.second, value)})];
        }
        if (mean > best) best = mean;
      }
      cur.push_back(best);
    }
    next = std::move(cur);
  }
  return next.front();
}

AmbiguitySet peng_pair(const AmbiguitySet& x, const AmbiguitySet& y, const DpLimits& limits) {
  if (x.lattice().step != y.lattice().step)
    throw InvalidArgument("peng_pair needs a common lattice step");
  const std::size_t dx = x.dim();
  const std::size_t dy = y.dim();
  LatticeSpec lattice{dx + dy, x.lattice().step, x.lattice().origin};
  lattice.origin.insert(lattice.origin.end(), y.lattice().origin.begin(), y.lattice().origin.end());

  double family = 0.0;
  for (const auto& m : x.members())
    family += std::pow(static_cast<double>(y.member_count()), static_cast<double>(m.size()));
  if (family > static_cast<double>(limits.max_members))
    throw CapacityExceeded("peng_pair family too large: " + std::to_string(family));

  std::vector<DiscreteDistribution> members;
  for (const auto& mx : x.members()) {
    // Odometer over the Y-member chosen at each X-support point.
    std::vector<std::size_t> choice(mx.size(), 0);
    while (true) {
      std::vector<Point> support;
      std::vector<double> probs;
      for (std::size_t j = 0; j < mx.size(); ++j) {
        const auto& my = y.member(choice[j]);
        for (std::size_t i = 0; i < my.size(); ++i) {
          Point p = mx.support()[j];
          p.insert(p.end(), my.support()[i].begin(), my.support()[i].end());
          support.push_back(std::move(p));
          probs.push_back(mx.probs()[j] * my.probs()[i]);
        }
      }
      members.emplace_back(std::move(support), std::move(probs));
      std::size_t pos = 0;
      while (pos < choice.size() && ++choice[pos] == y.member_count()) choice[pos++] = 0;
      if (pos == choice.size()) break;
    }
  }
  return AmbiguitySet(std::move(lattice), std::move(members));
}

}  // namespace sublin
