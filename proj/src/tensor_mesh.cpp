#include "morley/tensor_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace morley {

namespace {

void check_domain(std::span<const Interval> domain) {
  if (domain.size() < 2) throw std::invalid_argument("mesh dimension must be at least 2");
  for (const auto& iv : domain) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.hi > iv.lo))
      throw std::invalid_argument("degenerate domain interval");
  }
}

// Lexicographic index with axis 0 fastest over the given extents.
std::size_t flatten(std::span<const int> index, std::span<const int> extents) {
  std::size_t linear = 0;
  for (std::size_t j = extents.size(); j-- > 0;) linear = linear * extents[j] + index[j];
  return linear;
}

MultiIndex unflatten(std::size_t linear, std::span<const int> extents) {
  MultiIndex index(extents.size());
  for (std::size_t j = 0; j < extents.size(); ++j) {
    index[j] = static_cast<int>(linear % extents[j]);
    linear /= extents[j];
  }
  return index;
}

}  // namespace

AxisPartition::AxisPartition(std::vector<double> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.size() < 2)
    throw std::invalid_argument("axis partition needs at least 2 breakpoints");
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    if (!std::isfinite(breakpoints_[k]))
      throw std::invalid_argument("axis partition breakpoint is not finite");
    if (k > 0 && !(breakpoints_[k] > breakpoints_[k - 1]))
      throw std::invalid_argument("axis partition breakpoints must be strictly increasing");
  }
}

int AxisPartition::locate(double x) const {
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  int k = static_cast<int>(it - breakpoints_.begin()) - 1;
  return std::clamp(k, 0, cell_count() - 1);
}

double Cell::volume() const {
  double v = 1.0;
  for (double h : half_lengths) v *= 2.0 * h;
  return v;
}

double Cell::diameter() const {
  double s = 0.0;
  for (double h : half_lengths) s += 4.0 * h * h;
  return std::sqrt(s);
}

void Cell::to_physical(std::span<const double> xi, std::span<double> x) const {
  for (std::size_t j = 0; j < center.size(); ++j) x[j] = center[j] + xi[j] * half_lengths[j];
}

void Cell::to_reference(std::span<const double> x, std::span<double> xi) const {
  for (std::size_t j = 0; j < center.size(); ++j)
    xi[j] = (x[j] - center[j]) / half_lengths[j];
}

TensorMesh::TensorMesh(std::vector<AxisPartition> partitions)
    : partitions_(std::move(partitions)) {
  const int d = dim();
  if (d < 2) throw std::invalid_argument("mesh dimension must be at least 2");
  num_cells_ = 1;
  num_vertices_ = 1;
  for (const auto& p : partitions_) {
    num_cells_ *= p.cell_count();
    num_vertices_ *= p.cell_count() + 1;
  }
  face_offsets_.assign(d + 1, 0);
  for (int j = 0; j < d; ++j) {
    std::size_t count = cells_along(j) + 1;
    for (int i = 0; i < d; ++i)
      if (i != j) count *= cells_along(i);
    face_offsets_[j + 1] = face_offsets_[j] + count;
  }
}

MultiIndex TensorMesh::cell_index(std::size_t linear) const {
  std::vector<int> ext(dim());
  for (int j = 0; j < dim(); ++j) ext[j] = cells_along(j);
  return unflatten(linear, ext);
}

std::size_t TensorMesh::cell_linear(std::span<const int> index) const {
  std::vector<int> ext(dim());
  for (int j = 0; j < dim(); ++j) ext[j] = cells_along(j);
  return flatten(index, ext);
}

Cell TensorMesh::cell(std::size_t linear) const { return cell(cell_index(linear)); }

Cell TensorMesh::cell(std::span<const int> index) const {
  Cell c;
  c.center.resize(dim());
  c.half_lengths.resize(dim());
  for (int j = 0; j < dim(); ++j) {
    auto bp = partitions_[j].breakpoints();
    c.center[j] = 0.5 * (bp[index[j]] + bp[index[j] + 1]);
    c.half_lengths[j] = 0.5 * (bp[index[j] + 1] - bp[index[j]]);
  }
  return c;
}

MultiIndex TensorMesh::vertex_index(std::size_t linear) const {
  std::vector<int> ext(dim());
  for (int j = 0; j < dim(); ++j) ext[j] = cells_along(j) + 1;
  return unflatten(linear, ext);
}

std::size_t TensorMesh::vertex_linear(std::span<const int> index) const {
  std::vector<int> ext(dim());
  for (int j = 0; j < dim(); ++j) ext[j] = cells_along(j) + 1;
  return flatten(index, ext);
}

std::vector<double> TensorMesh::vertex_point(std::size_t linear) const {
  auto idx = vertex_index(linear);
  std::vector<double> x(dim());
  for (int j = 0; j < dim(); ++j) x[j] = partitions_[j].breakpoints()[idx[j]];
  return x;
}

bool TensorMesh::is_boundary_vertex(std::span<const int> index) const {
  for (int j = 0; j < dim(); ++j)
    if (index[j] == 0 || index[j] == cells_along(j)) return true;
  return false;
}

FaceId TensorMesh::face_id(std::size_t linear) const {
  if (linear >= num_faces()) throw std::out_of_range("face index out of range");
  int axis = 0;
  while (linear >= face_offsets_[axis + 1]) ++axis;
  std::vector<int> ext(dim());
  for (int j = 0; j < dim(); ++j) ext[j] = cells_along(j) + (j == axis ? 1 : 0);
  auto full = unflatten(linear - face_offsets_[axis], ext);
  FaceId f;
  f.axis = axis;
  f.layer = full[axis];
  for (int j = 0; j < dim(); ++j)
    if (j != axis) f.cross_index.push_back(full[j]);
  return f;
}

std::size_t TensorMesh::face_linear(const FaceId& face) const {
  const int d = dim();
  if (face.axis < 0 || face.axis >= d || static_cast<int>(face.cross_index.size()) != d - 1)
    throw std::invalid_argument("malformed face id");
  std::vector<int> ext(d), full(d);
  for (int j = 0, c = 0; j < d; ++j) {
    ext[j] = cells_along(j) + (j == face.axis ? 1 : 0);
    full[j] = (j == face.axis) ? face.layer : face.cross_index[c++];
    if (full[j] < 0 || full[j] >= ext[j]) throw std::out_of_range("face id out of range");
  }
  return face_offsets_[face.axis] + flatten(full, ext);
}

bool TensorMesh::is_boundary(const FaceId& face) const {
  return face.layer == 0 || face.layer == cells_along(face.axis);
}

std::vector<std::size_t> TensorMesh::adjacent_cells(const FaceId& face) const {
  const int d = dim();
  MultiIndex idx(d);
  for (int j = 0, c = 0; j < d; ++j)
    if (j != face.axis) idx[j] = face.cross_index[c++];
  std::vector<std::size_t> out;
  if (face.layer > 0) {
    idx[face.axis] = face.layer - 1;
    out.push_back(cell_linear(idx));
  }
  if (face.layer < cells_along(face.axis)) {
    idx[face.axis] = face.layer;
    out.push_back(cell_linear(idx));
  }
  return out;
}

double TensorMesh::domain_volume() const {
  double v = 1.0;
  for (const auto& p : partitions_) v *= p.hi() - p.lo();
  return v;
}

TensorMesh build_uniform(std::span<const Interval> domain, std::span<const int> n) {
  check_domain(domain);
  if (n.size() != domain.size()) throw std::invalid_argument("cell counts do not match dimension");
  std::vector<AxisPartition> parts;
  for (std::size_t j = 0; j < domain.size(); ++j) {
    if (n[j] < 1) throw std::invalid_argument("cell count must be positive");
    std::vector<double> bp(n[j] + 1);
    for (int k = 0; k <= n[j]; ++k)
      bp[k] = domain[j].lo + (domain[j].hi - domain[j].lo) * k / n[j];
    bp.back() = domain[j].hi;
    parts.emplace_back(std::move(bp));
  }
  return TensorMesh(std::move(parts));
}

TensorMesh build_divisionally_uniform(std::span<const Interval> domain,
                                      const std::vector<std::vector<double>>& splits,
                                      const std::vector<std::vector<int>>& counts) {
  check_domain(domain);
  if (splits.size() != domain.size() || counts.size() != domain.size())
    throw std::invalid_argument("block description does not match dimension");
  std::vector<AxisPartition> parts;
  for (std::size_t j = 0; j < domain.size(); ++j) {
    std::vector<double> ends{domain[j].lo};
    for (double s : splits[j]) {
      if (!(s > ends.back()) || !(s < domain[j].hi))
        throw std::invalid_argument("block split must lie strictly inside the domain, increasing");
      ends.push_back(s);
    }
    ends.push_back(domain[j].hi);
    if (counts[j].size() != ends.size() - 1)
      throw std::invalid_argument("need one cell count per block");
    std::vector<double> bp{ends.front()};
    for (std::size_t b = 0; b + 1 < ends.size(); ++b) {
      int m = counts[j][b];
      if (m < 1) throw std::invalid_argument("block cell count must be positive");
      for (int k = 1; k <= m; ++k) bp.push_back(ends[b] + (ends[b + 1] - ends[b]) * k / m);
      bp.back() = ends[b + 1];
    }
    parts.emplace_back(std::move(bp));
  }
  return TensorMesh(std::move(parts));
}

TensorMesh build_pattern(std::span<const Interval> domain,
                         const std::vector<std::vector<double>>& ratios, int level) {
  check_domain(domain);
  if (ratios.size() != domain.size()) throw std::invalid_argument("one ratio pattern per axis");
  if (level < 1) throw std::invalid_argument("pattern level must be positive");
  std::vector<AxisPartition> parts;
  for (std::size_t j = 0; j < domain.size(); ++j) {
    if (ratios[j].empty()) throw std::invalid_argument("empty ratio pattern");
    double total = 0.0;
    for (double r : ratios[j]) {
      if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("pattern weights must be positive");
      total += r;
    }
    const double len = domain[j].hi - domain[j].lo;
    std::vector<double> bp{domain[j].lo};
    double acc = 0.0;
    for (int rep = 0; rep < level; ++rep) {
      for (double r : ratios[j]) {
        acc += r;
        bp.push_back(domain[j].lo + len * acc / (total * level));
      }
    }
    bp.back() = domain[j].hi;
    parts.emplace_back(std::move(bp));
  }
  return TensorMesh(std::move(parts));
}

TensorMesh build_jittered(std::span<const Interval> domain, std::span<const int> n,
                          double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0) || !(amplitude < 0.5))
    throw std::invalid_argument("jitter amplitude must lie in [0, 0.5)");
  TensorMesh base = build_uniform(domain, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<AxisPartition> parts;
  for (int j = 0; j < base.dim(); ++j) {
    auto src = base.partition(j).breakpoints();
    std::vector<double> bp(src.begin(), src.end());
    const double spacing = (domain[j].hi - domain[j].lo) / n[j];
    for (std::size_t k = 1; k + 1 < bp.size(); ++k) bp[k] += amplitude * spacing * unit(rng);
    parts.emplace_back(std::move(bp));
  }
  return TensorMesh(std::move(parts));
}

TensorMesh subdivide(const TensorMesh& mesh, int factor) {
  if (factor < 1) throw std::invalid_argument("subdivision factor must be positive");
  std::vector<AxisPartition> parts;
  for (const auto& p : mesh.partitions()) {
    auto src = p.breakpoints();
    std::vector<double> bp{src.front()};
    for (std::size_t k = 0; k + 1 < src.size(); ++k) {
      for (int s = 1; s <= factor; ++s) bp.push_back(src[k] + (src[k + 1] - src[k]) * s / factor);
      bp.back() = src[k + 1];
    }
    parts.emplace_back(std::move(bp));
  }
  return TensorMesh(std::move(parts));
}

double mesh_size(const TensorMesh& mesh) {
  // Cell diameters are separable: the widest cell per axis gives the maximum.
  double s = 0.0;
  for (const auto& p : mesh.partitions()) {
    double w = 0.0;
    for (int k = 0; k < p.cell_count(); ++k) w = std::max(w, p.width(k));
    s += w * w;
  }
  return std::sqrt(s);
}

double max_aspect_ratio(const TensorMesh& mesh) {
  const int d = mesh.dim();
  std::vector<double> widest(d, 0.0), narrowest(d, INFINITY);
  for (int j = 0; j < d; ++j) {
    const auto& p = mesh.partition(j);
    for (int k = 0; k < p.cell_count(); ++k) {
      widest[j] = std::max(widest[j], p.width(k));
      narrowest[j] = std::min(narrowest[j], p.width(k));
    }
  }
  // Any combination of per-axis widths is a cell, so the extreme pairs two
  // distinct axes.
  double ratio = 1.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      if (a != b) ratio = std::max(ratio, widest[a] / narrowest[b]);
  return ratio;
}

bool is_uniform_patch(const TensorMesh& mesh, const FaceId& face) {
  if (mesh.is_boundary(face))
    throw std::invalid_argument("uniform-patch test needs an interior face");
  const auto& p = mesh.partition(face.axis);
  // Cross-sections coincide on a tensor mesh, so equal measure means equal width.
  const double wl = p.width(face.layer - 1);
  const double wr = p.width(face.layer);
  return std::abs(wl - wr) <= 1e-12 * std::max(wl, wr);
}

std::vector<Interval> unit_box(int dim) { return std::vector<Interval>(dim, Interval{0.0, 1.0}); }

}  // namespace morley
