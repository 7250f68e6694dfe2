#ifndef MORLEY_LINEAR_SOLVER_HPP
#define MORLEY_LINEAR_SOLVER_HPP

#include <functional>
#include <span>
#include <vector>

#include "morley/fe_space.hpp"
#include "morley/sparse.hpp"

namespace morley {

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct SolveResult {
  std::vector<double> solution;
  SolveReport report;
};

struct CgOptions {
  double tol = 1e-12;
  int max_iter = 0;  ///< 0 selects 10 * n + 100
  /// Called after every iteration with the iteration count, current iterate
  /// and relative residual.
  std::function<void(int, std::span<const double>, double)> observer;
};

/// Jacobi-preconditioned conjugate gradients. Stops when ||r||/||b|| <= tol
/// or after max_iter iterations, returning the iterate with the smallest
/// residual seen. A zero right-hand side returns zero after 0 iterations.
SolveResult cg_solve(const CsrMatrix& matrix, std::span<const double> rhs, const CgOptions& options = {});

SolveResult cg_solve(const SparseSystem& system, double tol = 1e-12, int max_iter = 0);

}  // namespace morley

#endif
