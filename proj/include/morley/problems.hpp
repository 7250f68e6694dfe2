#ifndef MORLEY_PROBLEMS_HPP
#define MORLEY_PROBLEMS_HPP

#include <string>
#include <vector>

#include "morley/smooth_field.hpp"

namespace morley {

/// -Laplace u = f on the unit box with exact solution u.
struct ManufacturedProblem {
  std::string name;
  SmoothField u;  // value, gradient, laplacian and partials up to order 3
  SmoothField f;
  bool homogeneous = true;  ///< u vanishes on the boundary of the unit box
};

/// Registered names:
///   bubble  prod x_i (1 - x_i)
///   sinsin  prod sin(pi x_i)
///   zero    u = 0
///   linear  1 + sum (i+1) x_i   (f = 0, not homogeneous)
ManufacturedProblem make_problem(const std::string& name, int dim);

std::vector<std::string> problem_names();

}  // namespace morley

#endif
