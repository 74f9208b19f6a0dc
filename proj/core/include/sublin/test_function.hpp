#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

namespace sublin {

enum class Growth { bounded, quadratic, power };

/// Growth class of a test function. Only used to label reports and to size
/// PDE domains; evaluation never consults it.
struct GrowthTag {
  Growth kind = Growth::bounded;
  double exponent = 0.0;  // meaningful for Growth::power

  static GrowthTag bounded() { return {}; }
  static GrowthTag quadratic() { return {Growth::quadratic, 2.0}; }
  static GrowthTag power(double p) { return {Growth::power, p}; }

  /// Polynomial degree bound (0 for bounded functions).
  double degree() const;
  std::string label() const;
};

/// A deterministic map from `arity` points of R^dim to R.
///
/// Arguments are passed flattened: `args.size() == arity * dim`, point i
/// occupying `args[i*dim, (i+1)*dim)`. Every evaluation through operator()
/// is checked for finiteness.
class TestFunction {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  TestFunction(std::size_t arity, std::size_t dim, Fn fn, GrowthTag growth = {});

  /// Scalar function of one real argument (arity 1, dim 1).
  static TestFunction scalar(std::function<double(double)> f, GrowthTag growth = {});
  /// Function of one point in R^dim.
  static TestFunction of_point(std::size_t dim, Fn f, GrowthTag growth = {});
  static TestFunction constant(double c, std::size_t arity = 1, std::size_t dim = 1);

  double operator()(std::span<const double> args) const;
  double operator()(double x) const;

  std::size_t arity() const { return arity_; }
  std::size_t dim() const { return dim_; }
  std::size_t width() const { return arity_ * dim_; }
  const GrowthTag& growth() const { return growth_; }

 private:
  std::size_t arity_;
  std::size_t dim_;
  Fn fn_;
  GrowthTag growth_;
};

TestFunction operator-(const TestFunction& f);
TestFunction operator+(const TestFunction& f, const TestFunction& g);
TestFunction operator-(const TestFunction& f, const TestFunction& g);
TestFunction operator*(double lambda, const TestFunction& f);

}  // namespace sublin
