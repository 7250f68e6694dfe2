#ifndef MORLEY_QUADRATURE_HPP
#define MORLEY_QUADRATURE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace morley {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule1d {
  std::vector<double> points;
  std::vector<double> weights;
};

GaussRule1d gauss_legendre(int n);

/// Tensor Gauss rule on [-1,1]^dim. With p points per axis it is exact for
/// polynomials of degree <= 2p-1 in each variable. dim == 0 yields the single
/// point rule with weight 1 (used for faces of 1-d objects).
class QuadratureRule {
 public:
  QuadratureRule(int dim, int points_per_axis);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> point(std::size_t q) const {
    return {points_.data() + q * dim_, static_cast<std::size_t>(dim_)};
  }
  double weight(std::size_t q) const { return weights_[q]; }
  std::span<const double> weights() const { return weights_; }

 private:
  int dim_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

}  // namespace morley

#endif
