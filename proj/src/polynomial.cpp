#include "morley/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace morley {

Polynomial::Polynomial(int dim, std::vector<Monomial> terms) : dim_(dim) {
  for (auto& t : terms) add(t.coefficient, std::move(t.exponents));
}

void Polynomial::add(double coefficient, std::vector<int> exponents) {
  if (static_cast<int>(exponents.size()) != dim_)
    throw std::invalid_argument("monomial exponent count differs from dimension");
  terms_.push_back({coefficient, std::move(exponents)});
}

double Polynomial::derivative(std::span<const double> x, std::span<const int> alpha) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coefficient;
    for (int j = 0; j < dim_ && v != 0.0; ++j) {
      int e = t.exponents[j];
      const int a = alpha.empty() ? 0 : alpha[j];
      if (a > e) {
        v = 0.0;
        break;
      }
      for (int k = 0; k < a; ++k) v *= (e - k);
      e -= a;
      for (int k = 0; k < e; ++k) v *= x[j];
    }
    sum += v;
  }
  return sum;
}

int Polynomial::total_degree() const {
  int deg = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exponents) s += e;
    if (t.coefficient != 0.0) deg = std::max(deg, s);
  }
  return deg;
}

SmoothField Polynomial::to_field() const {
  SmoothField f;
  f.dim = dim_;
  const Polynomial p = *this;
  f.value = [p](std::span<const double> x) { return p(x); };
  f.gradient = [p](std::span<const double> x, std::span<double> g) {
    std::vector<int> alpha(p.dim(), 0);
    for (int j = 0; j < p.dim(); ++j) {
      alpha[j] = 1;
      g[j] = p.derivative(x, alpha);
      alpha[j] = 0;
    }
  };
  f.laplacian = [p](std::span<const double> x) {
    std::vector<int> alpha(p.dim(), 0);
    double s = 0.0;
    for (int j = 0; j < p.dim(); ++j) {
      alpha[j] = 2;
      s += p.derivative(x, alpha);
      alpha[j] = 0;
    }
    return s;
  };
  f.partial = [p](std::span<const double> x, std::span<const int> alpha) {
    return p.derivative(x, alpha);
  };
  return f;
}

Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Polynomial p(dim);
  std::vector<int> e(dim, 0);
  // Enumerate exponent vectors in the box [0, degree]^dim, keep total <= degree.
  while (true) {
    int total = 0;
    for (int v : e) total += v;
    if (total <= degree) p.add(coef(rng), e);
    int j = 0;
    while (j < dim && ++e[j] > degree) e[j++] = 0;
    if (j == dim) break;
  }
  return p;
}

Polynomial random_linear(int dim, std::mt19937_64& rng) { return random_polynomial(dim, 1, rng); }

}  // namespace morley
