#include "morley/linear_solver.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace morley {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

SolveResult cg_solve(const CsrMatrix& matrix, std::span<const double> rhs, const CgOptions& options) {
  const std::size_t n = matrix.size();
  if (rhs.size() != n) throw std::invalid_argument("right-hand side size differs from matrix");
  if (!(options.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  const int max_iter = options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * n + 100);

  SolveResult result;
  result.solution.assign(n, 0.0);
  const double bnorm = std::sqrt(dot(rhs, rhs));
  if (bnorm == 0.0) {
    result.report = {0, 0.0, true};
    return result;
  }

  std::vector<double> inv_diag = matrix.diagonal();
  for (auto& v : inv_diag) {
    if (!(v > 0.0)) throw std::invalid_argument("Jacobi preconditioner needs a positive diagonal");
    v = 1.0 / v;
  }

  std::vector<double> x(n, 0.0), r(rhs.begin(), rhs.end()), z(n), p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  double best = 1.0;
  double res = 1.0;
  int iter = 0;
  while (res > options.tol && iter < max_iter) {
    matrix.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;  // breakdown: matrix not positive definite on p
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    ++iter;
    res = std::sqrt(dot(r, r)) / bnorm;
    if (options.observer) options.observer(iter, x, res);
    if (res < best) {
      best = res;
      result.solution = x;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  result.report = {iter, best, best <= options.tol};
  return result;
}

SolveResult cg_solve(const SparseSystem& system, double tol, int max_iter) {
  CgOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return cg_solve(system.matrix, system.rhs, options);
}

}  // namespace morley
