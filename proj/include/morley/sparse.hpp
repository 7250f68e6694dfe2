#ifndef MORLEY_SPARSE_HPP
#define MORLEY_SPARSE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace morley {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Square compressed-sparse-row matrix.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Duplicate (row, col) entries are summed in input order.
  CsrMatrix(std::size_t n, std::vector<Triplet> triplets);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  double at(std::size_t row, std::size_t col) const;
  std::vector<double> diagonal() const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  /// Rows and columns restricted to `keep` (in that order).
  CsrMatrix submatrix(std::span<const std::size_t> keep) const;
  /// max |a_ij - a_ji| / max |a_ij|.
  double asymmetry() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace morley

#endif
