#include "morley/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "morley/element.hpp"
#include "morley/mesh_spec.hpp"
#include "morley/parallel.hpp"
#include "morley/quadrature.hpp"

namespace morley {

DofMap build_dof_map(const TensorMesh& mesh) {
  const int d = mesh.dim();
  const auto& el = element_for(d);
  DofMap map;
  map.num_vertex_dofs_ = mesh.num_vertices();
  map.num_face_dofs_ = mesh.num_faces();
  map.dofs_per_cell_ = el.num_dofs();
  map.table_.resize(mesh.num_cells() * el.num_dofs());

  MultiIndex corner(d);
  FaceId face;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto m = mesh.cell_index(c);
    SignedDof* out = map.table_.data() + c * el.num_dofs();
    for (int i = 0; i < el.num_vertices(); ++i) {
      for (int j = 0; j < d; ++j) corner[j] = m[j] + ((i >> j) & 1);
      out[i] = {mesh.vertex_linear(corner), 1};
    }
    for (int f = 0; f < el.num_faces(); ++f) {
      const int k = MorleyElement::face_axis(f);
      const int side = MorleyElement::face_side(f);
      face.axis = k;
      face.layer = m[k] + (side > 0 ? 1 : 0);
      face.cross_index.clear();
      for (int j = 0; j < d; ++j)
        if (j != k) face.cross_index.push_back(m[j]);
      out[el.num_vertices() + f] = {map.num_vertex_dofs_ + mesh.face_linear(face), side};
    }
  }
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.is_boundary_vertex(mesh.vertex_index(v))) map.boundary_vertex_dofs_.push_back(v);
  return map;
}

DofMap DofMap::with_flipped_face_signs() const {
  DofMap out = *this;
  for (auto& entry : out.table_)
    if (is_face_dof(entry.index)) entry.sign = -entry.sign;
  return out;
}

std::shared_ptr<const FeSpace> make_space(TensorMesh mesh) {
  auto dofs = build_dof_map(mesh);
  return std::make_shared<const FeSpace>(FeSpace{std::move(mesh), std::move(dofs)});
}

std::shared_ptr<const FeSpace> make_space(TensorMesh mesh, DofMap dofs) {
  return std::make_shared<const FeSpace>(FeSpace{std::move(mesh), std::move(dofs)});
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> space, std::vector<double> coefficients)
    : space_(std::move(space)), coefficients_(std::move(coefficients)) {
  if (!space_) throw std::invalid_argument("finite element function needs a space");
  if (coefficients_.size() != space_->dofs.size())
    throw std::invalid_argument("coefficient count differs from the number of DOFs");
}

FeFunction FeFunction::zero(std::shared_ptr<const FeSpace> space) {
  const auto n = space->dofs.size();
  return FeFunction(std::move(space), std::vector<double>(n, 0.0));
}

Eigen::VectorXd FeFunction::local_coefficients(std::size_t cell) const {
  const auto dofs = space_->dofs.cell_dofs(cell);
  Eigen::VectorXd local(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t r = 0; r < dofs.size(); ++r) local[r] = dofs[r].sign * coefficients_[dofs[r].index];
  return local;
}

FeFunction global_interpolate(std::shared_ptr<const FeSpace> space, const SmoothField& field,
                              int face_points) {
  const auto& mesh = space->mesh;
  const int d = mesh.dim();
  std::vector<double> coef(space->dofs.size(), 0.0);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) coef[v] = field.value(mesh.vertex_point(v));

  const QuadratureRule rule(d - 1, face_points);
  const double ref_measure = std::ldexp(1.0, d - 1);
  std::vector<double> x(d), grad(d), center(d), half(d);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const FaceId id = mesh.face_id(f);
    for (int j = 0, c = 0; j < d; ++j) {
      auto bp = mesh.partition(j).breakpoints();
      if (j == id.axis) {
        center[j] = bp[id.layer];
        half[j] = 0.0;
      } else {
        const int slot = id.cross_index[c++];
        center[j] = 0.5 * (bp[slot] + bp[slot + 1]);
        half[j] = 0.5 * (bp[slot + 1] - bp[slot]);
      }
    }
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      auto eta = rule.point(q);
      for (int j = 0, c = 0; j < d; ++j) x[j] = j == id.axis ? center[j] : center[j] + half[j] * eta[c++];
      field.gradient(x, grad);
      sum += rule.weight(q) * grad[id.axis];
    }
    coef[space->dofs.face_dof(f)] = sum / ref_measure;
  }
  return FeFunction(std::move(space), std::move(coef));
}

std::vector<double> SparseSystem::expand(std::span<const double> solution) const {
  if (solution.size() != free_dofs.size()) throw std::invalid_argument("solution size differs from free DOF count");
  std::vector<double> full(full_size, 0.0);
  for (std::size_t k = 0; k < free_dofs.size(); ++k) full[free_dofs[k]] = solution[k];
  return full;
}

SparseSystem assemble(const FeSpace& space, const SmoothField& f, int quad_points_per_axis) {
  const auto& mesh = space.mesh;
  const auto& dofs = space.dofs;
  const int nloc = dofs.dofs_per_cell();
  const std::size_t ncells = mesh.num_cells();

  const int chunks = static_cast<int>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, ncells / 64)));
  std::vector<std::vector<Triplet>> chunk_triplets(chunks);
  std::vector<double> cell_loads(ncells * nloc);
  parallel_chunks(ncells, chunks, [&](int chunk, std::size_t begin, std::size_t end) {
    auto& trip = chunk_triplets[chunk];
    trip.reserve((end - begin) * nloc * nloc);
    for (std::size_t c = begin; c < end; ++c) {
      const Cell cell = mesh.cell(c);
      const Eigen::MatrixXd a = local_stiffness(cell);
      const Eigen::VectorXd b = local_load(cell, f, quad_points_per_axis);
      const auto map = dofs.cell_dofs(c);
      for (int r = 0; r < nloc; ++r) {
        cell_loads[c * nloc + r] = map[r].sign * b[r];
        for (int s = 0; s < nloc; ++s)
          trip.push_back({map[r].index, map[s].index, map[r].sign * map[s].sign * a(r, s)});
      }
    }
  });

  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& t : chunk_triplets) total += t.size();
  all.reserve(total);
  for (auto& t : chunk_triplets) all.insert(all.end(), t.begin(), t.end());

  SparseSystem sys;
  sys.full_size = dofs.size();
  sys.matrix = CsrMatrix(dofs.size(), std::move(all));
  sys.rhs.assign(dofs.size(), 0.0);
  for (std::size_t c = 0; c < ncells; ++c) {
    const auto map = dofs.cell_dofs(c);
    for (int r = 0; r < nloc; ++r) sys.rhs[map[r].index] += cell_loads[c * nloc + r];
  }
  sys.free_dofs.resize(dofs.size());
  for (std::size_t g = 0; g < dofs.size(); ++g) sys.free_dofs[g] = g;
  return sys;
}

SparseSystem apply_dirichlet(const SparseSystem& system, const DofMap& dofs) {
  std::vector<bool> constrained(system.full_size, false);
  for (auto g : dofs.boundary_vertex_dofs()) constrained[g] = true;
  std::vector<std::size_t> keep_rows;  // positions within system.free_dofs
  SparseSystem out;
  out.full_size = system.full_size;
  for (std::size_t k = 0; k < system.free_dofs.size(); ++k) {
    if (constrained[system.free_dofs[k]]) continue;
    keep_rows.push_back(k);
    out.free_dofs.push_back(system.free_dofs[k]);
    out.rhs.push_back(system.rhs[k]);
  }
  // Homogeneous values: dropping the columns leaves the right-hand side unchanged.
  out.matrix = system.matrix.submatrix(keep_rows);
  return out;
}

FeFunction Decomposition::face_component(std::size_t face) const {
  const auto& dofs = face_part.space().dofs;
  if (face >= dofs.num_face_dofs()) throw std::out_of_range("face index out of range");
  std::vector<double> coef(dofs.size(), 0.0);
  const auto g = dofs.face_dof(face);
  coef[g] = face_part.coefficients()[g];
  return FeFunction(face_part.space_ptr(), std::move(coef));
}

Decomposition decompose(const FeFunction& v) {
  const auto& dofs = v.space().dofs;
  std::vector<double> vx(v.coefficients().begin(), v.coefficients().end());
  std::vector<double> vf(vx.size(), 0.0);
  for (std::size_t g = dofs.num_vertex_dofs(); g < dofs.size(); ++g) {
    vf[g] = vx[g];
    vx[g] = 0.0;
  }
  return {FeFunction(v.space_ptr(), std::move(vx)), FeFunction(v.space_ptr(), std::move(vf))};
}

std::size_t locate_cell(const TensorMesh& mesh, std::span<const double> point) {
  if (static_cast<int>(point.size()) != mesh.dim()) throw std::invalid_argument("point dimension differs from mesh");
  MultiIndex idx(mesh.dim());
  for (int j = 0; j < mesh.dim(); ++j) {
    const auto& p = mesh.partition(j);
    const double tol = 1e-12 * (p.hi() - p.lo());
    if (!(point[j] >= p.lo() - tol && point[j] <= p.hi() + tol))
      throw std::out_of_range("point lies outside the mesh domain");
    idx[j] = p.locate(point[j]);
  }
  return mesh.cell_linear(idx);
}

double evaluate(const FeFunction& v, std::span<const double> point, std::span<const int> deriv) {
  const auto& mesh = v.space().mesh;
  const auto c = locate_cell(mesh, point);
  return eval_local(mesh.cell(c), v.local_coefficients(c), point, deriv);
}

nlohmann::json to_json(const FeFunction& v) {
  nlohmann::json doc;
  doc["mesh"] = to_json(explicit_spec(v.space().mesh));
  doc["ordering"] = std::string(kDofOrderingTag);
  doc["coefficients"] = std::vector<double>(v.coefficients().begin(), v.coefficients().end());
  return doc;
}

FeFunction fe_function_from_json(const nlohmann::json& doc) {
  if (doc.at("ordering").get<std::string>() != kDofOrderingTag)
    throw std::invalid_argument("unsupported DOF ordering tag");
  auto space = make_space(mesh_spec_from_json(doc.at("mesh")).build());
  return FeFunction(std::move(space), doc.at("coefficients").get<std::vector<double>>());
}

}  // namespace morley
