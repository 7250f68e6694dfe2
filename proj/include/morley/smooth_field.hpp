#ifndef MORLEY_SMOOTH_FIELD_HPP
#define MORLEY_SMOOTH_FIELD_HPP

#include <functional>
#include <span>

namespace morley {

/// A C^1 (or smoother) scalar field on a subset of R^dim.
///
/// `value` and `gradient` are required. `laplacian` is needed to build load
/// vectors from a manufactured solution. `partial` evaluates an arbitrary
/// partial derivative (multi-index of total order <= 3) and is only supplied
/// by fields that know their third derivatives.
struct SmoothField {
  int dim = 0;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::function<double(std::span<const double>)> laplacian;
  std::function<double(std::span<const double>, std::span<const int>)> partial;
};

}  // namespace morley

#endif
