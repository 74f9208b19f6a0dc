#include "sublin/g_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "sublin/errors.hpp"

namespace sublin {

void require_symmetric(const Matrix& a, std::size_t dim) {
  if (static_cast<std::size_t>(a.rows()) != dim || static_cast<std::size_t>(a.cols()) != dim)
    throw InvalidArgument("matrix has wrong dimension");
  if (!a.allFinite()) throw InvalidArgument("matrix is not finite");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("matrix is not symmetric");
}

GFunction::GFunction(std::vector<Matrix> theta) : dim_(0), theta_(std::move(theta)) {
  if (theta_.empty()) throw InvalidArgument("G needs at least one covariance matrix");
  dim_ = static_cast<std::size_t>(theta_.front().rows());
  if (dim_ == 0) throw InvalidArgument("G dimension must be positive");
  for (const auto& s : theta_) {
    require_symmetric(s, dim_);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
      throw InvalidArgument("covariance matrix is not positive semidefinite");
  }
}

GFunction::Value GFunction::evaluate(const Matrix& a) const {
  require_symmetric(a, dim_);
  Value best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    const double v = (a * theta_[i]).trace();
    if (v > best.value) best = {v, i};
  }
  return best;
}

double GFunction::max_diagonal() const {
  double m = 0.0;
  for (const auto& s : theta_) m = std::max(m, s.diagonal().maxCoeff());
  return m;
}

GFunction regularize(const GFunction& g, double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("regularization must be nonnegative");
  std::vector<Matrix> theta = g.theta();
  const auto d = static_cast<Eigen::Index>(g.dim());
  for (auto& s : theta) s += eps * Matrix::Identity(d, d);
  return GFunction(std::move(theta));
}

void SigmaInterval::validate() const {
  if (!(lower >= 0.0) || !(upper >= lower) || !std::isfinite(upper))
    throw InvalidArgument("variance interval must satisfy 0 <= lower <= upper");
}

double g_1d(const SigmaInterval& s, double alpha) {
  s.validate();
  return alpha >= 0.0 ? alpha * s.upper : alpha * s.lower;
}

GFunction g_from_interval(const SigmaInterval& s) {
  s.validate();
  return GFunction({Matrix::Constant(1, 1, s.lower), Matrix::Constant(1, 1, s.upper)});
}

Matrix diag(std::initializer_list<double> entries) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(entries.size()),
                          static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) {
    m(i, i) = e;
    ++i;
  }
  return m;
}

namespace {

Matrix random_symmetric(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto n = static_cast<Eigen::Index>(d);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = 2.0 * unit(rng);
  return a;
}

}  // namespace

LawReport verify_g_laws(const GFunction& g, std::size_t trials, std::uint64_t seed,
                        double tolerance) {
  if (trials == 0) throw InvalidArgument("verify_g_laws needs at least one trial");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = g.dim();
  const auto n = static_cast<Eigen::Index>(d);
  const double g_identity = g(Matrix::Identity(n, n));
  LawReport report(tolerance);
  for (std::size_t t = 0; t < trials; ++t) {
    const Matrix a = random_symmetric(rng, d);
    const Matrix b = random_symmetric(rng, d);
    const double ga = g(a);
    const double gb = g(b);
    const double scale = std::max({1.0, std::abs(ga), std::abs(gb)});

    report.record("sub-additivity", std::max(0.0, g(a + b) - ga - gb) / scale);

    const double lambda = 5.0 * unit(rng) + 1e-3;
    report.record("positive-homogeneity", std::abs(g(lambda * a) - lambda * ga) / (lambda * scale));

    const Matrix root = random_symmetric(rng, d);
    const Matrix above = b + root * root.transpose();
    report.record("psd-monotonicity", std::max(0.0, gb - g(above)) / scale);

    if (g_identity > 0.0) {
      const double diff = std::abs(ga - gb) / g_identity;
      const double bound = static_cast<double>(d) * (a - b).cwiseAbs().maxCoeff();
      report.record("lipschitz", std::max(0.0, diff - bound));
    }
  }
  return report;
}

GFunction random_g_function(std::size_t dim, std::size_t count, std::uint64_t seed,
                            bool diagonally_dominant) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(dim);
  std::vector<Matrix> theta;
  for (std::size_t c = 0; c < count; ++c) {
    Matrix s(n, n);
    if (diagonally_dominant) {
      s.setZero();
      for (Eigen::Index i = 0; i < n; ++i) s(i, i) = 0.2 + 0.8 * unit(rng);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) {
          const double cap = std::min(s(i, i), s(j, j)) / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
          s(i, j) = s(j, i) = cap * (2.0 * unit(rng) - 1.0);
        }
    } else {
      Matrix r(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) r(i, j) = 2.0 * unit(rng) - 1.0;
      s = r * r.transpose();
    }
    theta.push_back(std::move(s));
  }
  return GFunction(std::move(theta));
}

}  // namespace sublin
