#include "morley/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace morley {

CsrMatrix::CsrMatrix(std::size_t n, std::vector<Triplet> triplets) : n_(n) {
  for (const auto& t : triplets)
    if (t.row >= n || t.col >= n) throw std::out_of_range("triplet outside matrix");
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    const auto row = triplets[k].row, col = triplets[k].col;
    double sum = 0.0;
    for (; k < triplets.size() && triplets[k].row == row && triplets[k].col == col; ++k)
      sum += triplets[k].value;
    col_idx_.push_back(col);
    values_.push_back(sum);
    ++row_ptr_[row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] += row_ptr_[i];
}

double CsrMatrix::at(std::size_t row, std::size_t col) const {
  auto begin = col_idx_.begin() + row_ptr_[row];
  auto end = col_idx_.begin() + row_ptr_[row + 1];
  auto it = std::lower_bound(begin, end, col);
  return (it != end && *it == col) ? values_[it - col_idx_.begin()] : 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("matrix-vector size mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

CsrMatrix CsrMatrix::submatrix(std::span<const std::size_t> keep) const {
  constexpr auto dropped = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> new_index(n_, dropped);
  for (std::size_t k = 0; k < keep.size(); ++k) new_index[keep[k]] = k;
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto row = keep[k];
    for (std::size_t p = row_ptr_[row]; p < row_ptr_[row + 1]; ++p)
      if (new_index[col_idx_[p]] != dropped) t.push_back({k, new_index[col_idx_[p]], values_[p]});
  }
  return CsrMatrix(keep.size(), std::move(t));
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0, biggest = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      biggest = std::max(biggest, std::abs(values_[k]));
      worst = std::max(worst, std::abs(values_[k] - at(col_idx_[k], i)));
    }
  }
  return biggest > 0.0 ? worst / biggest : 0.0;
}

}  // namespace morley
