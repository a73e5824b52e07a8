#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace rbws::simd {
namespace {

const KernelTable* initial_table() {
  const KernelTable* best = &detail::kScalarTable;
  if (cpu_supports(Isa::avx2)) best = avx2_table();
  if (const char* env = std::getenv("RBWS_ISA")) {
    const std::string_view want(env);
    if (want == "scalar") best = &detail::kScalarTable;
    // An unavailable "avx2" request falls back to the detected default.
  }
  return best;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return detail::kScalarTable; }

const KernelTable* avx2_table() noexcept {
#if defined(RBWS_HAVE_AVX2)
  return &detail::kAvx2Table;
#else
  return nullptr;
#endif
}

bool cpu_supports(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(RBWS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const char* isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

Isa active_isa() noexcept { return active().isa; }

void force_isa(Isa isa) {
  if (isa == Isa::scalar) {
    current().store(&detail::kScalarTable);
    return;
  }
  if (!cpu_supports(isa) || avx2_table() == nullptr) {
    throw DomainError(std::string("kernel variant unavailable: ") + isa_name(isa));
  }
  current().store(avx2_table());
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace rbws::simd
