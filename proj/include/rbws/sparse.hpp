#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "rbws/common.hpp"
#include "rbws/simd.hpp"

namespace rbws {

// Compressed-row matrix with sorted column indices in every row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(Index rows, Index cols, std::vector<std::int64_t> row_ptr, std::vector<Index> col_idx,
            std::vector<double> values);

  static CsrMatrix identity(Index n);
  static CsrMatrix from_dense(const Eigen::MatrixXd& dense, double drop_tol = 0.0);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  std::int64_t nnz() const noexcept { return static_cast<std::int64_t>(values_.size()); }

  const std::vector<std::int64_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<Index>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  // Position of a(i,i) in values(), or -1 when the entry is not stored.
  std::int64_t diag_pos(Index i) const noexcept { return diag_pos_[static_cast<std::size_t>(i)]; }

  double at(Index i, Index j) const noexcept;

  simd::CsrView view() const noexcept;

  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector multiply(std::span<const double> x) const;
  void transpose_multiply(std::span<const double> x, std::span<double> y) const;
  // r = b - A x
  void residual(std::span<const double> b, std::span<const double> x, std::span<double> r) const;
  Vector residual(std::span<const double> b, std::span<const double> x) const;

  CsrMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;

  // Subset of rows, columns unchanged.
  CsrMatrix select_rows(std::span<const Index> rows) const;

  bool operator==(const CsrMatrix& other) const = default;

 private:
  void index_diagonal();

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
  std::vector<std::int64_t> diag_pos_;
};

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);

// max |a_ij - a_ji| / max |a_ij|; 0 for an empty matrix.
double symmetry_defect(const CsrMatrix& a);

}  // namespace rbws
