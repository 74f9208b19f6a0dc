#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sublin/law_report.hpp"

namespace sublin {

using Matrix = Eigen::MatrixXd;

/// Sub-linear monotone function on symmetric matrices, represented as the
/// support function G(A) = max_{S in theta} trace(A S) of a finite set of
/// positive semidefinite matrices.
class GFunction {
 public:
  explicit GFunction(std::vector<Matrix> theta);

  std::size_t dim() const { return dim_; }
  const std::vector<Matrix>& theta() const { return theta_; }

  struct Value {
    double value = 0.0;
    std::size_t index = 0;  // lowest attaining theta index
  };
  Value evaluate(const Matrix& a) const;
  double operator()(const Matrix& a) const { return evaluate(a).value; }

  /// Largest diagonal entry over theta (the CFL speed of the heat solver).
  double max_diagonal() const;

 private:
  std::size_t dim_;
  std::vector<Matrix> theta_;
};

/// Adds eps * I to every matrix of theta.
GFunction regularize(const GFunction& g, double eps);

/// Throws InvalidArgument unless `a` is square and symmetric within 1e-12.
void require_symmetric(const Matrix& a, std::size_t dim);

struct SigmaInterval {
  double lower = 0.0;  // lower variance
  double upper = 0.0;  // upper variance

  void validate() const;
};

/// G(alpha) = alpha^+ upper - alpha^- lower.
double g_1d(const SigmaInterval& s, double alpha);
/// theta = {lower, upper} as 1x1 matrices.
GFunction g_from_interval(const SigmaInterval& s);
/// Diagonal matrix from entries.
Matrix diag(std::initializer_list<double> entries);

/// Seeded property run over random symmetric pairs: sub-additivity, positive
/// homogeneity, monotonicity in the PSD order, and the Lipschitz bound
/// |G(A) - G(B)| <= d * max|A - B| after scaling G so that G(I) = 1.
LawReport verify_g_laws(const GFunction& g, std::size_t trials, std::uint64_t seed,
                        double tolerance = 1e-10);

/// Random theta of `count` PSD matrices; with `diagonally_dominant` every
/// off-diagonal entry is bounded by both diagonal entries of its row pair.
GFunction random_g_function(std::size_t dim, std::size_t count, std::uint64_t seed,
                            bool diagonally_dominant = false);

}  // namespace sublin
