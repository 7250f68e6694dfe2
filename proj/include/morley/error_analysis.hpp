#ifndef MORLEY_ERROR_ANALYSIS_HPP
#define MORLEY_ERROR_ANALYSIS_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "morley/fe_space.hpp"
#include "morley/linear_solver.hpp"
#include "morley/mesh_spec.hpp"
#include "morley/problems.hpp"

namespace morley {

/// ||exact - v||_0 by per-cell tensor Gauss quadrature.
double l2_error(const FeFunction& v, const SmoothField& exact, int quad_points_per_axis = 5);

/// |exact - v|_{1,h} by per-cell tensor Gauss quadrature.
double broken_h1_error(const FeFunction& v, const SmoothField& exact, int quad_points_per_axis = 5);

/// |v|_{1,h}.
double broken_h1_seminorm(const FeFunction& v);

struct SolveOptions {
  int quad_points = 5;
  double tol = 1e-12;
  int max_iter = 0;  ///< 0: solver default
};

struct DiscreteSolution {
  FeFunction uh;
  SolveReport report;
  std::size_t ndof = 0;  ///< free unknowns
};

/// Assembles, eliminates boundary vertices and solves for u_h in V_h0.
DiscreteSolution solve_problem(const TensorMesh& mesh, const ManufacturedProblem& problem,
                               const SolveOptions& options = {});

struct ConvergenceRecord {
  int level = 0;
  double h = 0.0;
  std::size_t ndof = 0;
  double err_l2 = 0.0;
  double err_h1 = 0.0;
  std::optional<double> rate_l2;
  std::optional<double> rate_h1;
  double lb_ratio = 0.0;  ///< err_l2 / h^2
  bool converged = true;
  int iterations = 0;
};

/// Solves on base.refined(0..levels-1) and measures errors and rates.
std::vector<ConvergenceRecord> run_study(const ManufacturedProblem& problem, const MeshSpec& base, int levels,
                                         const SolveOptions& options = {});

/// log(e0/e1) / log(h0/h1); absent when either error is not positive.
std::optional<double> pairwise_rate(double e0, double e1, double h0, double h1);

struct RateEstimate {
  std::vector<std::optional<double>> pairwise;  ///< pairwise[k] compares levels k and k+1
  std::optional<double> slope;                  ///< least squares over the last m levels
};

RateEstimate estimate_rate(std::span<const double> errors, std::span<const double> hs, int m = 3);

/// a_h(u - Pi_h u, Pi_h u).
double superclose_pairing(const std::shared_ptr<const FeSpace>& space, const SmoothField& u,
                          int quad_points_per_axis = 5);

/// CSV with header level,h,ndof,err_l2,err_h1,rate_l2,rate_h1,lb_ratio.
void write_csv(std::ostream& out, std::span<const ConvergenceRecord> records);
std::vector<ConvergenceRecord> read_csv(std::istream& in);

nlohmann::json to_json(const ConvergenceRecord& record);

}  // namespace morley

#endif
