#ifndef MORLEY_ELEMENT_HPP
#define MORLEY_ELEMENT_HPP

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "morley/polynomial.hpp"
#include "morley/quadrature.hpp"
#include "morley/smooth_field.hpp"
#include "morley/tensor_mesh.hpp"

namespace morley {

enum class DofKind { vertex, face };

/// Local basis function label, 0-based.
///
/// Vertex i has reference coordinates xi_j = +1 where bit j of i is set and
/// -1 otherwise. Face 2j is the xi_j = +1 face, face 2j+1 the xi_j = -1 face.
struct LocalBasisIndex {
  DofKind kind = DofKind::vertex;
  int index = 0;
};

/// Values and reference gradients of every shape function at the points of a
/// reference quadrature rule.
struct Tabulation {
  QuadratureRule rule;
  Eigen::MatrixXd values;                  // [point][dof]
  std::vector<Eigen::MatrixXd> gradients;  // per axis: [point][dof], d/dxi_j
};

/// Rectangular Morley element on [-1,1]^d.
///
/// The shape space is Q1 + span{x_i^2, x_i^3}; the degrees of freedom are the
/// 2^d vertex values followed by the 2d face averages of the outward normal
/// derivative. Every basis function is stored as
///   phi_r(x) = scale_r(cell) * Phi_r(xi),   x = center + xi * h,
/// where Phi_r is a sum of products of one-variable cubics in xi and the scale
/// is 1 for vertex functions and h_k for the two face functions of axis k.
class MorleyElement {
 public:
  explicit MorleyElement(int dim);

  int dim() const { return dim_; }
  int num_vertices() const { return 1 << dim_; }
  int num_faces() const { return 2 * dim_; }
  int num_dofs() const { return num_vertices() + num_faces(); }

  int flat_index(LocalBasisIndex idx) const;
  LocalBasisIndex basis_index(int r) const;

  int vertex_sign(int vertex, int axis) const { return (vertex >> axis) & 1 ? 1 : -1; }
  static int face_axis(int face) { return face / 2; }
  static int face_side(int face) { return face % 2 == 0 ? 1 : -1; }

  /// d^alpha Phi_r / d xi^alpha at reference point xi. Empty alpha is the value.
  double reference_derivative(int r, std::span<const double> xi, std::span<const int> alpha) const;

  double scale(const Cell& cell, int r) const;

  /// G_j[r][s] = integral over [-1,1]^d of dPhi_r/dxi_j * dPhi_s/dxi_j, by the
  /// 3-point tensor Gauss rule (exact: per-axis degree <= 4).
  const Eigen::MatrixXd& reference_stiffness(int axis) const { return ref_stiffness_[axis]; }

  /// Cached tabulation on the tensor Gauss rule with `points_per_axis` points.
  const Tabulation& tabulation(int points_per_axis) const;

 private:
  struct Term {
    double coefficient;
    std::vector<std::array<double, 4>> factors;  // per axis, c0 + c1 t + c2 t^2 + c3 t^3
  };

  Tabulation make_tabulation(int points_per_axis) const;

  int dim_;
  std::vector<std::vector<Term>> shapes_;
  std::vector<Eigen::MatrixXd> ref_stiffness_;
  mutable std::mutex cache_mutex_;
  mutable std::map<int, std::unique_ptr<Tabulation>> tabulations_;
};

/// Shared, lazily built element for dimension `dim` (thread safe).
const MorleyElement& element_for(int dim);

/// d^deriv of basis function `idx` of `cell` at physical point `point`,
/// |deriv| <= 3.
double eval_basis(const Cell& cell, LocalBasisIndex idx, std::span<const double> point,
                  std::span<const int> deriv);

/// Vertex values followed by outward normal-derivative face averages of
/// `field`, face integrals by a (d-1)-dimensional Gauss rule.
Eigen::VectorXd dof_functionals(const Cell& cell, const SmoothField& field, int face_points = 4);

/// Coefficients of Pi_K field in the local basis (equal to the DOF values).
Eigen::VectorXd local_interpolate(const Cell& cell, const SmoothField& field, int face_points = 4);

/// d^deriv of sum_r coefficients[r] phi_r at `point`.
double eval_local(const Cell& cell, const Eigen::VectorXd& coefficients,
                  std::span<const double> point, std::span<const int> deriv);

/// Multilinear interpolant through the vertex values of a field.
class Q1Interpolant {
 public:
  Q1Interpolant(Cell cell, std::vector<double> vertex_values);

  const Cell& cell() const { return cell_; }
  std::span<const double> vertex_values() const { return vertex_values_; }
  /// d^deriv at `point`; derivatives of order > 1 in a single variable vanish.
  double operator()(std::span<const double> point, std::span<const int> deriv = {}) const;

 private:
  Cell cell_;
  std::vector<double> vertex_values_;
};

Q1Interpolant local_q1_interpolate(const Cell& cell, const SmoothField& field);

/// (grad phi_r, grad phi_s)_K.
Eigen::MatrixXd local_stiffness(const Cell& cell);

/// integral over K of f * phi_r by tensor Gauss quadrature.
Eigen::VectorXd local_load(const Cell& cell, const SmoothField& f, int quad_points_per_axis = 5);

/// Both sides of the cubic expansion identity
///   (grad(u - Pi_K u), grad v)_K
///     = sum_i sum_{j != i} [ -(h_j^2/3) (u_ijj, v_i)_K + (h_i^2 h_j^2/45) (u_ijj, v_iii)_K ]
/// for u in P_3(K) and v in P_M(K) given by local coefficients.
struct ExpansionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  ///< |lhs - rhs|
  double scale = 0.0;     ///< |u - Pi_K u|_{1,K} |v|_{1,K}, bounds |lhs|
  double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

ExpansionCheck expansion_residual(const Cell& cell, const Polynomial& u, const Eigen::VectorXd& v);

}  // namespace morley

#endif
