#include "morley/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace morley {

GaussRule1d gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one point");
  GaussRule1d rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // P_n(x) and its derivative by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  // Newton from a Chebyshev-like guess; the rule is symmetric, so only half
  // the roots are computed.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      auto [p, dp] = legendre(x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

QuadratureRule::QuadratureRule(int dim, int points_per_axis) : dim_(dim) {
  if (dim < 0) throw std::invalid_argument("negative quadrature dimension");
  const auto base = gauss_legendre(points_per_axis);
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= points_per_axis;
  points_.resize(total * dim);
  weights_.resize(total);
  for (std::size_t q = 0; q < total; ++q) {
    std::size_t rem = q;
    double w = 1.0;
    for (int j = 0; j < dim; ++j) {
      const std::size_t k = rem % points_per_axis;
      rem /= points_per_axis;
      points_[q * dim + j] = base.points[k];
      w *= base.weights[k];
    }
    weights_[q] = w;
  }
}

}  // namespace morley
