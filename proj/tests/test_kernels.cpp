#include <doctest.h>

#include <cmath>

#include "rbws/simd.hpp"
#include "rbws/sparse.hpp"
#include "support.hpp"

using namespace rbws;
using rbws::testing::random_vector;

namespace {

// Tables to compare against the scalar reference on this host.
std::vector<const simd::KernelTable*> variants() {
  std::vector<const simd::KernelTable*> out;
  if (simd::avx2_table() && simd::cpu_supports(simd::Isa::avx2)) out.push_back(simd::avx2_table());
  return out;
}

CsrMatrix random_sparse(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::uniform_int_distribution<int> len(0, 40);
  std::vector<std::int64_t> rp{0};
  std::vector<Index> ci;
  std::vector<double> v;
  for (Index i = 0; i < n; ++i) {
    std::vector<Index> cols;
    const int m = len(rng);
    for (int t = 0; t < m; ++t) cols.push_back(static_cast<Index>(rng() % static_cast<std::uint64_t>(n)));
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    for (Index c : cols) {
      ci.push_back(c);
      v.push_back(d(rng));
    }
    rp.push_back(static_cast<std::int64_t>(ci.size()));
  }
  return CsrMatrix(n, n, rp, ci, v);
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("dispatch reports a usable table") {
    CHECK(simd::scalar_table().isa == simd::Isa::scalar);
    CHECK(simd::active().dot != nullptr);
    CHECK(std::string(simd::isa_name(simd::active_isa())).size() > 0);
    CHECK_NOTHROW(simd::force_isa(simd::Isa::scalar));
    CHECK(simd::active_isa() == simd::Isa::scalar);
    if (simd::cpu_supports(simd::Isa::avx2) && simd::avx2_table()) {
      simd::force_isa(simd::Isa::avx2);
      CHECK(simd::active_isa() == simd::Isa::avx2);
    } else {
      CHECK_THROWS_AS(simd::force_isa(simd::Isa::avx2), DomainError);
    }
  }

  TEST_CASE("vector kernels match the scalar reference") {
    const auto& ref = simd::scalar_table();
    for (const auto* k : variants()) {
      for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 63u, 64u, 257u, 1000u}) {
        const Vector x = random_vector(n, 11 + n), y0 = random_vector(n, 29 + n);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y0[i]);
        CHECK(std::abs(k->dot(x.data(), y0.data(), n) - ref.dot(x.data(), y0.data(), n)) <= 1e-14 * (scale + 1e-300));

        Vector ya = y0, yb = y0;
        k->axpy(-0.75, x.data(), ya.data(), n);
        ref.axpy(-0.75, x.data(), yb.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-15));

        ya = y0;
        yb = y0;
        k->xpby(x.data(), 1.25, ya.data(), n);
        ref.xpby(x.data(), 1.25, yb.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-15));
      }
    }
  }

  TEST_CASE("sparse kernels match the scalar reference") {
    const auto& ref = simd::scalar_table();
    for (const auto* k : variants()) {
      for (Index n : {1, 5, 33, 300}) {
        const CsrMatrix a = random_sparse(n, 7 + static_cast<std::uint64_t>(n));
        const Vector x = random_vector(static_cast<std::size_t>(n), 3), b = random_vector(static_cast<std::size_t>(n), 4);
        Vector ya(static_cast<std::size_t>(n)), yb(static_cast<std::size_t>(n));
        k->spmv(a.view(), x.data(), ya.data());
        ref.spmv(a.view(), x.data(), yb.data());
        for (Index i = 0; i < n; ++i) CHECK(ya[static_cast<std::size_t>(i)] == doctest::Approx(yb[static_cast<std::size_t>(i)]).epsilon(1e-13));
        k->residual(a.view(), b.data(), x.data(), ya.data());
        ref.residual(a.view(), b.data(), x.data(), yb.data());
        for (Index i = 0; i < n; ++i) CHECK(ya[static_cast<std::size_t>(i)] == doctest::Approx(yb[static_cast<std::size_t>(i)]).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("FEM solve agrees across kernel variants") {
    if (variants().empty()) return;
    auto p = rbws::testing::make_problem("example-1", 2, 4);
    const AssembledSystem sys = p.problem->assemble(ParamPoint{1.3, 0.4});
    auto ctx = std::make_shared<const MgContext>(MgContext::build(sys.matrix, p.mesh));
    simd::force_isa(simd::Isa::scalar);
    const auto a = mgcg_solve(sys.A(), sys.rhs, Vector(sys.rhs.size(), 0.0), ctx, SolveOptions{1e-12, 40});
    simd::force_isa(simd::Isa::avx2);
    const auto b = mgcg_solve(sys.A(), sys.rhs, Vector(sys.rhs.size(), 0.0), ctx, SolveOptions{1e-12, 40});
    CHECK(a.report.iterations == b.report.iterations);
    CHECK(rbws::testing::rel_diff(a.x, b.x) < 1e-12);
  }
}
