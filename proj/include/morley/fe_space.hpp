#ifndef MORLEY_FE_SPACE_HPP
#define MORLEY_FE_SPACE_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "morley/smooth_field.hpp"
#include "morley/sparse.hpp"
#include "morley/tensor_mesh.hpp"

namespace morley {

/// Ordering tag written with serialized coefficient vectors.
inline constexpr std::string_view kDofOrderingTag = "vertex-major/axis-major-faces/v1";

struct SignedDof {
  std::size_t index = 0;
  int sign = 1;
};

/// Global numbering: all vertex values (mesh vertex order), then one face
/// DOF per mesh face (mesh face order). A face DOF is the face average of the
/// derivative along the positive axis direction; a cell sees it with sign +1
/// on its upper face along that axis and -1 on its lower face.
class DofMap {
 public:
  std::size_t num_vertex_dofs() const { return num_vertex_dofs_; }
  std::size_t num_face_dofs() const { return num_face_dofs_; }
  std::size_t size() const { return num_vertex_dofs_ + num_face_dofs_; }
  int dofs_per_cell() const { return dofs_per_cell_; }

  /// Local-to-global map of one cell, in local basis order.
  std::span<const SignedDof> cell_dofs(std::size_t cell) const {
    return {table_.data() + cell * dofs_per_cell_, static_cast<std::size_t>(dofs_per_cell_)};
  }
  const std::vector<std::size_t>& boundary_vertex_dofs() const { return boundary_vertex_dofs_; }
  bool is_face_dof(std::size_t g) const { return g >= num_vertex_dofs_; }
  std::size_t face_dof(std::size_t face) const { return num_vertex_dofs_ + face; }

  /// Copy with every face orientation sign negated. Only meant for checking
  /// that the conformity tests detect a broken orientation convention.
  DofMap with_flipped_face_signs() const;

 private:
  friend DofMap build_dof_map(const TensorMesh& mesh);

  std::size_t num_vertex_dofs_ = 0;
  std::size_t num_face_dofs_ = 0;
  int dofs_per_cell_ = 0;
  std::vector<SignedDof> table_;
  std::vector<std::size_t> boundary_vertex_dofs_;
};

DofMap build_dof_map(const TensorMesh& mesh);

struct FeSpace {
  TensorMesh mesh;
  DofMap dofs;
};

std::shared_ptr<const FeSpace> make_space(TensorMesh mesh);
std::shared_ptr<const FeSpace> make_space(TensorMesh mesh, DofMap dofs);

/// A member of V_h: global coefficients over a shared space.
class FeFunction {
 public:
  FeFunction(std::shared_ptr<const FeSpace> space, std::vector<double> coefficients);
  static FeFunction zero(std::shared_ptr<const FeSpace> space);

  const FeSpace& space() const { return *space_; }
  const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
  std::span<const double> coefficients() const { return coefficients_; }
  std::span<double> coefficients() { return coefficients_; }

  /// Signed coefficients of the restriction to one cell.
  Eigen::VectorXd local_coefficients(std::size_t cell) const;

 private:
  std::shared_ptr<const FeSpace> space_;
  std::vector<double> coefficients_;
};

/// Pi_h: vertex values and positive-axis face averages of the derivative,
/// faces integrated with a (d-1)-dimensional Gauss rule.
FeFunction global_interpolate(std::shared_ptr<const FeSpace> space, const SmoothField& field,
                              int face_points = 4);

/// Linear system over the DOFs listed in `free_dofs` (all DOFs before
/// constraints). Matrix rows/columns follow the order of `free_dofs`.
struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::vector<std::size_t> free_dofs;
  std::size_t full_size = 0;

  /// Scatters a solution over the free DOFs into a full coefficient vector,
  /// zero on eliminated DOFs.
  std::vector<double> expand(std::span<const double> solution) const;
};

/// Unconstrained stiffness matrix and load vector for -Laplace u = f.
SparseSystem assemble(const FeSpace& space, const SmoothField& f, int quad_points_per_axis = 5);

/// Eliminates the boundary vertex DOFs (homogeneous values). Face DOFs,
/// including those on boundary faces, stay free.
SparseSystem apply_dirichlet(const SparseSystem& system, const DofMap& dofs);

/// v = v_X + v_F with v_X carrying only vertex coefficients.
struct Decomposition {
  FeFunction vertex_part;
  FeFunction face_part;

  /// The component of v_F spanned by the single face DOF of mesh face `face`.
  FeFunction face_component(std::size_t face) const;
};

Decomposition decompose(const FeFunction& v);

/// d^deriv of v at `point` (|deriv| <= 3). Points on shared cell boundaries
/// are evaluated in the cell with the smaller multi-index.
double evaluate(const FeFunction& v, std::span<const double> point, std::span<const int> deriv = {});

/// Linear index of the cell used by `evaluate` for `point`.
std::size_t locate_cell(const TensorMesh& mesh, std::span<const double> point);

nlohmann::json to_json(const FeFunction& v);
FeFunction fe_function_from_json(const nlohmann::json& doc);

}  // namespace morley

#endif
