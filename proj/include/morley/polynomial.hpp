#ifndef MORLEY_POLYNOMIAL_HPP
#define MORLEY_POLYNOMIAL_HPP

#include <random>
#include <span>
#include <vector>

#include "morley/smooth_field.hpp"

namespace morley {

struct Monomial {
  double coefficient = 0.0;
  std::vector<int> exponents;
};

/// Sparse polynomial in physical coordinates with exact derivatives.
class Polynomial {
 public:
  explicit Polynomial(int dim) : dim_(dim) {}
  Polynomial(int dim, std::vector<Monomial> terms);

  int dim() const { return dim_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  void add(double coefficient, std::vector<int> exponents);

  double operator()(std::span<const double> x) const { return derivative(x, {}); }
  /// d^alpha p (x); an empty alpha means the value.
  double derivative(std::span<const double> x, std::span<const int> alpha) const;
  int total_degree() const;

  SmoothField to_field() const;

 private:
  int dim_;
  std::vector<Monomial> terms_;
};

/// All monomials of total degree <= `degree` with coefficients uniform in [-1, 1].
Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng);

/// c_0 + sum_i c_i x_i with coefficients uniform in [-1, 1].
Polynomial random_linear(int dim, std::mt19937_64& rng);

}  // namespace morley

#endif
