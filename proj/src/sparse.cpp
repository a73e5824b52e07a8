#include "rbws/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rbws {

CsrMatrix::CsrMatrix(Index rows, Index cols, std::vector<std::int64_t> row_ptr,
                     std::vector<Index> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (rows < 0 || cols < 0) throw DomainError("CsrMatrix: negative dimension");
  require_size(row_ptr_.size(), static_cast<std::size_t>(rows) + 1, "CsrMatrix row_ptr");
  require_size(values_.size(), col_idx_.size(), "CsrMatrix values");
  if (row_ptr_.front() != 0 || row_ptr_.back() != static_cast<std::int64_t>(col_idx_.size())) {
    throw DomainError("CsrMatrix: inconsistent row pointer");
  }
  for (Index i = 0; i < rows_; ++i) {
    for (std::int64_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] < 0 || col_idx_[p] >= cols_) throw DomainError("CsrMatrix: column out of range");
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1]) {
        throw DomainError("CsrMatrix: columns must be strictly increasing within a row");
      }
    }
  }
  index_diagonal();
}

void CsrMatrix::index_diagonal() {
  diag_pos_.assign(static_cast<std::size_t>(rows_), -1);
  for (Index i = 0; i < rows_; ++i) {
    const auto begin = col_idx_.begin() + row_ptr_[i];
    const auto end = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(begin, end, i);
    if (it != end && *it == i) diag_pos_[i] = it - col_idx_.begin();
  }
}

CsrMatrix CsrMatrix::identity(Index n) {
  std::vector<std::int64_t> ptr(static_cast<std::size_t>(n) + 1);
  std::iota(ptr.begin(), ptr.end(), 0);
  std::vector<Index> cols(static_cast<std::size_t>(n));
  std::iota(cols.begin(), cols.end(), 0);
  return CsrMatrix(n, n, std::move(ptr), std::move(cols), std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::from_dense(const Eigen::MatrixXd& dense, double drop_tol) {
  std::vector<std::int64_t> ptr{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (std::abs(dense(i, j)) > drop_tol) {
        cols.push_back(static_cast<Index>(j));
        vals.push_back(dense(i, j));
      }
    }
    ptr.push_back(static_cast<std::int64_t>(cols.size()));
  }
  return CsrMatrix(static_cast<Index>(dense.rows()), static_cast<Index>(dense.cols()), std::move(ptr),
                   std::move(cols), std::move(vals));
}

double CsrMatrix::at(Index i, Index j) const noexcept {
  const auto begin = col_idx_.begin() + row_ptr_[i];
  const auto end = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return (it != end && *it == j) ? values_[it - col_idx_.begin()] : 0.0;
}

simd::CsrView CsrMatrix::view() const noexcept {
  return simd::CsrView{rows_, row_ptr_.data(), col_idx_.data(), values_.data()};
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require_size(x.size(), static_cast<std::size_t>(cols_), "CsrMatrix::multiply x");
  require_size(y.size(), static_cast<std::size_t>(rows_), "CsrMatrix::multiply y");
  simd::active().spmv(view(), x.data(), y.data());
}

Vector CsrMatrix::multiply(std::span<const double> x) const {
  Vector y(static_cast<std::size_t>(rows_));
  multiply(x, y);
  return y;
}

void CsrMatrix::transpose_multiply(std::span<const double> x, std::span<double> y) const {
  require_size(x.size(), static_cast<std::size_t>(rows_), "CsrMatrix::transpose_multiply x");
  require_size(y.size(), static_cast<std::size_t>(cols_), "CsrMatrix::transpose_multiply y");
  std::fill(y.begin(), y.end(), 0.0);
  for (Index i = 0; i < rows_; ++i) {
    const double xi = x[i];
    for (std::int64_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) y[col_idx_[p]] += values_[p] * xi;
  }
}

void CsrMatrix::residual(std::span<const double> b, std::span<const double> x,
                         std::span<double> r) const {
  require_size(b.size(), static_cast<std::size_t>(rows_), "CsrMatrix::residual b");
  require_size(x.size(), static_cast<std::size_t>(cols_), "CsrMatrix::residual x");
  require_size(r.size(), static_cast<std::size_t>(rows_), "CsrMatrix::residual r");
  simd::active().residual(view(), b.data(), x.data(), r.data());
}

Vector CsrMatrix::residual(std::span<const double> b, std::span<const double> x) const {
  Vector r(static_cast<std::size_t>(rows_));
  residual(b, x, r);
  return r;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<std::int64_t> ptr(static_cast<std::size_t>(cols_) + 1, 0);
  for (Index c : col_idx_) ++ptr[c + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<Index> cols(col_idx_.size());
  std::vector<double> vals(values_.size());
  std::vector<std::int64_t> next(ptr.begin(), ptr.end() - 1);
  for (Index i = 0; i < rows_; ++i) {
    for (std::int64_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const std::int64_t dst = next[col_idx_[p]]++;
      cols[dst] = i;
      vals[dst] = values_[p];
    }
  }
  return CsrMatrix(cols_, rows_, std::move(ptr), std::move(cols), std::move(vals));
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(rows_, cols_);
  for (Index i = 0; i < rows_; ++i) {
    for (std::int64_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) dense(i, col_idx_[p]) = values_[p];
  }
  return dense;
}

CsrMatrix CsrMatrix::select_rows(std::span<const Index> rows) const {
  std::vector<std::int64_t> ptr{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i : rows) {
    if (i < 0 || i >= rows_) throw DomainError("select_rows: row out of range");
    cols.insert(cols.end(), col_idx_.begin() + row_ptr_[i], col_idx_.begin() + row_ptr_[i + 1]);
    vals.insert(vals.end(), values_.begin() + row_ptr_[i], values_.begin() + row_ptr_[i + 1]);
    ptr.push_back(static_cast<std::int64_t>(cols.size()));
  }
  return CsrMatrix(static_cast<Index>(rows.size()), cols_, std::move(ptr), std::move(cols),
                   std::move(vals));
}

// Gustavson row-by-row product with a dense accumulator.
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("sparse multiply: dimension mismatch");
  const auto& ap = a.row_ptr();
  const auto& ac = a.col_idx();
  const auto& av = a.values();
  const auto& bp = b.row_ptr();
  const auto& bc = b.col_idx();
  const auto& bv = b.values();

  std::vector<double> acc(static_cast<std::size_t>(b.cols()), 0.0);
  std::vector<char> used(static_cast<std::size_t>(b.cols()), 0);
  std::vector<Index> pattern;
  std::vector<std::int64_t> ptr{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i = 0; i < a.rows(); ++i) {
    pattern.clear();
    for (std::int64_t p = ap[i]; p < ap[i + 1]; ++p) {
      const Index k = ac[p];
      const double aik = av[p];
      for (std::int64_t q = bp[k]; q < bp[k + 1]; ++q) {
        const Index j = bc[q];
        if (!used[j]) {
          used[j] = 1;
          pattern.push_back(j);
        }
        acc[j] += aik * bv[q];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (Index j : pattern) {
      cols.push_back(j);
      vals.push_back(acc[j]);
      acc[j] = 0.0;
      used[j] = 0;
    }
    ptr.push_back(static_cast<std::int64_t>(cols.size()));
  }
  return CsrMatrix(a.rows(), b.cols(), std::move(ptr), std::move(cols), std::move(vals));
}

double symmetry_defect(const CsrMatrix& a) {
  if (a.rows() != a.cols()) throw DomainError("symmetry_defect: matrix not square");
  double max_entry = 0.0;
  double max_diff = 0.0;
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_idx();
  const auto& val = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    for (std::int64_t p = ptr[i]; p < ptr[i + 1]; ++p) {
      max_entry = std::max(max_entry, std::abs(val[p]));
      max_diff = std::max(max_diff, std::abs(val[p] - a.at(col[p], i)));
    }
  }
  return max_entry > 0.0 ? max_diff / max_entry : 0.0;
}

}  // namespace rbws
