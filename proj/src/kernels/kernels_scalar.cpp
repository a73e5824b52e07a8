#include "kernels_internal.hpp"

namespace rbws::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby_scalar(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void spmv_scalar(const CsrView& a, const double* x, double* y) {
  for (Index i = 0; i < a.rows; ++i) {
    double sum = 0.0;
    for (std::int64_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      sum += a.values[p] * x[a.col_idx[p]];
    }
    y[i] = sum;
  }
}

void residual_scalar(const CsrView& a, const double* b, const double* x, double* r) {
  for (Index i = 0; i < a.rows; ++i) {
    double sum = 0.0;
    for (std::int64_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      sum += a.values[p] * x[a.col_idx[p]];
    }
    r[i] = b[i] - sum;
  }
}

}  // namespace

const KernelTable kScalarTable{Isa::scalar, dot_scalar, axpy_scalar, xpby_scalar, spmv_scalar,
                               residual_scalar};

}  // namespace rbws::simd::detail
