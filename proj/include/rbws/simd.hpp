#pragma once

// Level-1 vector and CSR kernels. Each kernel has a scalar reference
// implementation and, on x86-64 builds, an AVX2/FMA variant. The variant is
// chosen once at startup from CPUID and can be overridden with the
// RBWS_ISA environment variable ("scalar" or "avx2") or force_isa().

#include <cstddef>
#include <cstdint>
#include <span>

#include "rbws/common.hpp"

namespace rbws::simd {

enum class Isa { scalar, avx2 };

struct CsrView {
  Index rows = 0;
  const std::int64_t* row_ptr = nullptr;
  const Index* col_idx = nullptr;
  const double* values = nullptr;
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = x + beta * y
  void (*xpby)(const double* x, double beta, double* y, std::size_t n);
  // y = A x
  void (*spmv)(const CsrView& a, const double* x, double* y);
  // r = b - A x
  void (*residual)(const CsrView& a, const double* b, const double* x, double* r);
};

const KernelTable& scalar_table() noexcept;
// Returns nullptr when the variant was not compiled in.
const KernelTable* avx2_table() noexcept;

bool cpu_supports(Isa isa) noexcept;
const char* isa_name(Isa isa) noexcept;

// Currently selected table.
const KernelTable& active() noexcept;
Isa active_isa() noexcept;
// Throws DomainError when the requested variant is unavailable on this host.
void force_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_size(b.size(), a.size(), "dot");
  return active().dot(a.data(), b.data(), a.size());
}

double norm2(std::span<const double> a);

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_size(y.size(), x.size(), "axpy");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void xpby(std::span<const double> x, double beta, std::span<double> y) {
  require_size(y.size(), x.size(), "xpby");
  active().xpby(x.data(), beta, y.data(), x.size());
}

}  // namespace rbws::simd
