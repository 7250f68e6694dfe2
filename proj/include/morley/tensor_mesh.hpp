#ifndef MORLEY_TENSOR_MESH_HPP
#define MORLEY_TENSOR_MESH_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace morley {

using MultiIndex = std::vector<int>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Strictly increasing breakpoints of one coordinate axis.
class AxisPartition {
 public:
  explicit AxisPartition(std::vector<double> breakpoints);

  std::span<const double> breakpoints() const { return breakpoints_; }
  int cell_count() const { return static_cast<int>(breakpoints_.size()) - 1; }
  double lo() const { return breakpoints_.front(); }
  double hi() const { return breakpoints_.back(); }
  double width(int k) const { return breakpoints_[k + 1] - breakpoints_[k]; }

  /// Index of the interval containing x. Points on an interior breakpoint
  /// resolve to the interval on the left (smaller index).
  int locate(double x) const;

 private:
  std::vector<double> breakpoints_;
};

/// One d-rectangle: x_i = center_i + xi_i * half_length_i, xi in [-1,1]^d.
struct Cell {
  std::vector<double> center;
  std::vector<double> half_lengths;

  int dim() const { return static_cast<int>(center.size()); }
  double volume() const;
  double diameter() const;
  void to_physical(std::span<const double> xi, std::span<double> x) const;
  void to_reference(std::span<const double> x, std::span<double> xi) const;
};

/// A (d-1)-face perpendicular to `axis`, lying on breakpoint `layer` of that
/// axis. `cross_index` holds the cell slots of the remaining axes in
/// increasing axis order (d-1 entries). Axes are 0-based.
struct FaceId {
  int axis = 0;
  int layer = 0;
  MultiIndex cross_index;

  friend bool operator==(const FaceId&, const FaceId&) = default;
};

/// Tensor product of axis partitions. Cells, vertices and faces are numbered
/// lexicographically with axis 0 varying fastest; faces are grouped by axis.
class TensorMesh {
 public:
  explicit TensorMesh(std::vector<AxisPartition> partitions);

  int dim() const { return static_cast<int>(partitions_.size()); }
  const AxisPartition& partition(int axis) const { return partitions_[axis]; }
  const std::vector<AxisPartition>& partitions() const { return partitions_; }
  int cells_along(int axis) const { return partitions_[axis].cell_count(); }

  std::size_t num_cells() const { return num_cells_; }
  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_faces() const { return face_offsets_.back(); }
  std::size_t num_faces(int axis) const {
    return face_offsets_[axis + 1] - face_offsets_[axis];
  }
  std::size_t face_offset(int axis) const { return face_offsets_[axis]; }

  MultiIndex cell_index(std::size_t linear) const;
  std::size_t cell_linear(std::span<const int> index) const;
  Cell cell(std::size_t linear) const;
  Cell cell(std::span<const int> index) const;

  MultiIndex vertex_index(std::size_t linear) const;
  std::size_t vertex_linear(std::span<const int> index) const;
  std::vector<double> vertex_point(std::size_t linear) const;
  bool is_boundary_vertex(std::span<const int> index) const;

  FaceId face_id(std::size_t linear) const;
  std::size_t face_linear(const FaceId& face) const;
  bool is_boundary(const FaceId& face) const;
  /// Linear indices of the cells sharing `face`: one for boundary faces,
  /// two (lower side first) for interior faces.
  std::vector<std::size_t> adjacent_cells(const FaceId& face) const;

  double domain_volume() const;

 private:
  std::vector<AxisPartition> partitions_;
  std::size_t num_cells_ = 0;
  std::size_t num_vertices_ = 0;
  std::vector<std::size_t> face_offsets_;
};

TensorMesh build_uniform(std::span<const Interval> domain, std::span<const int> n);

/// Per axis, `splits[j]` are interior block boundaries and `counts[j]` the
/// number of equal cells in each block (counts[j].size() == splits[j].size()+1).
TensorMesh build_divisionally_uniform(std::span<const Interval> domain,
                                      const std::vector<std::vector<double>>& splits,
                                      const std::vector<std::vector<int>>& counts);

/// Each axis is `level` copies of the weight pattern `ratios[j]`, rescaled to
/// the axis interval.
TensorMesh build_pattern(std::span<const Interval> domain,
                         const std::vector<std::vector<double>>& ratios, int level);

/// Uniform breakpoints perturbed by up to `amplitude` (fraction of the
/// spacing, < 0.5) with a seeded generator; end points stay fixed.
TensorMesh build_jittered(std::span<const Interval> domain, std::span<const int> n,
                          double amplitude, std::uint64_t seed);

/// Splits every interval of every axis into `factor` equal pieces.
TensorMesh subdivide(const TensorMesh& mesh, int factor);

/// Largest cell diameter.
double mesh_size(const TensorMesh& mesh);

/// Largest ratio of longest to shortest cell edge.
double max_aspect_ratio(const TensorMesh& mesh);

/// True iff the two cells sharing an interior face have equal measure.
bool is_uniform_patch(const TensorMesh& mesh, const FaceId& face);

std::vector<Interval> unit_box(int dim);

}  // namespace morley

#endif
