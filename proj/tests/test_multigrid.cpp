#include <doctest.h>

#include "support.hpp"

using namespace rbws;
using namespace rbws::testing;

namespace {

// Frozen regression bound; the first measured run gave 0.0236 on the 9^3
// Laplacian (mu1 = 0).
constexpr double kLaplaceContraction9 = 0.03;

std::shared_ptr<const MgContext> context_for(const SmallProblem& p, const AssembledSystem& sys, MgOptions opt = {}) {
  return std::make_shared<const MgContext>(MgContext::build(sys.matrix, p.mesh, opt));
}

}  // namespace

TEST_SUITE("multigrid") {
  TEST_CASE("coarse operators have the coarse DoF counts and are symmetric") {
    auto p = make_problem("example-1", 3, 2);
    const AssembledSystem sys = p.problem->assemble(ParamPoint{1.0, 0.5});
    const auto ctx = context_for(p, sys);
    REQUIRE(ctx->levels() == 3);
    for (int l = 0; l < ctx->levels(); ++l) {
      CHECK(ctx->op(l).rows() == p.mesh->levels[static_cast<std::size_t>(l)]->dofs());
      CHECK(symmetry_defect(ctx->op(l)) <= 1e-13);
    }
    const auto again = context_for(p, sys);
    for (int l = 0; l < ctx->levels(); ++l) CHECK(ctx->op(l) == again->op(l));
    CHECK(ctx->op(1) == galerkin_coarsen(ctx->op(2), p.mesh->prolongations[1]));
  }

  TEST_CASE("V-cycle is linear with a zero fixed point") {
    auto p = make_problem("example-2", 2, 4);
    const AssembledSystem sys = p.problem->assemble(ParamPoint{0.5, 0.2, 0.9, 0.6, 0.5, 0.5, 0.3});
    const auto ctx = context_for(p, sys);
    const std::size_t n = sys.rhs.size();
    const Vector zero = ctx->vcycle(Vector(n, 0.0));
    CHECK(simd::norm2(zero) == 0.0);
    const Vector b = random_vector(n, 1);
    Vector scaled = b;
    for (double& v : scaled) v *= -2.5;
    Vector mb = ctx->vcycle(b);
    for (double& v : mb) v *= -2.5;
    CHECK(rel_diff(ctx->vcycle(scaled), mb) <= 1e-12);
  }

  TEST_CASE("V-cycle preconditioner is symmetric") {
    for (const char* name : {"example-1", "example-2"}) {
      auto p = make_problem(name, 3, 2);
      const auto mu = lhs_sample(static_cast<int>(p.spec.parameter_dimension()), 1, p.spec.box(), 2).front();
      const AssembledSystem sys = p.problem->assemble(mu);
      const auto ctx = context_for(p, sys);
      CHECK(MgPreconditioner(ctx).is_symmetric());
      for (std::uint64_t s = 0; s < 4; ++s) {
        const Vector x = random_vector(sys.rhs.size(), 10 + s), y = random_vector(sys.rhs.size(), 20 + s);
        const double xy = simd::dot(ctx->vcycle(x), y), yx = simd::dot(x, ctx->vcycle(y));
        CHECK(std::abs(xy - yx) <= 1e-10 * std::abs(xy));
      }
    }
    MgOptions forward_only;
    forward_only.post_smoother = SmootherKind::gauss_seidel_forward;
    auto p = make_problem("example-1", 2, 2);
    const AssembledSystem sys = p.problem->assemble(ParamPoint{1.0, 0.5});
    CHECK_FALSE(MgPreconditioner(context_for(p, sys, forward_only)).is_symmetric());
  }

  TEST_CASE("one V-cycle reduces the residual") {
    for (const char* name : {"example-1", "example-2"}) {
      auto p = make_problem(name, 2, 4);
      const auto pts = lhs_sample(static_cast<int>(p.spec.parameter_dimension()), 3, p.spec.box(), 5);
      for (const auto& mu : pts) {
        const AssembledSystem sys = p.problem->assemble(mu);
        const auto ctx = context_for(p, sys);
        const Vector u = ctx->vcycle(sys.rhs);
        CHECK(simd::norm2(sys.A().residual(sys.rhs, u)) < simd::norm2(sys.rhs));
      }
    }
  }

  TEST_CASE("stationary contraction on the 9^3 Laplacian stays below the frozen bound") {
    auto p = make_problem("example-1", 2, 4);
    const AssembledSystem sys = p.problem->assemble(laplace_mu(p.spec));
    const auto ctx = context_for(p, sys);
    const SolveResult r = mg_stationary(sys.A(), sys.rhs, Vector(sys.rhs.size(), 0.0), *ctx, SolveOptions{1e-12, 30});
    CHECK(r.report.converged);
    const Vector exact = dense_solve(sys.A(), sys.rhs);
    CHECK(rel_diff(r.x, exact) <= 1e-10);
    for (std::size_t k = 1; k < r.report.history.size(); ++k) {
      CHECK(r.report.history[k] / r.report.history[k - 1] <= kLaplaceContraction9);
    }
  }

  TEST_CASE("a direct one-level context converges in one iteration") {
    auto p = make_problem("example-1", 2, 2);
    const AssembledSystem sys = p.problem->assemble(ParamPoint{0.4, 0.6});
    auto ctx = std::make_shared<const MgContext>(MgContext::direct(sys.matrix));
    const SolveResult r = mgcg_solve(sys.A(), sys.rhs, Vector(sys.rhs.size(), 0.0), ctx, SolveOptions{1e-12, 5});
    CHECK(r.report.iterations == 1);
    CHECK(r.report.converged);
  }

  TEST_CASE("MGCG iterations are robust under refinement") {
    std::vector<int> counts;
    for (int levels = 2; levels <= 4; ++levels) {
      auto q = make_problem("example-1", levels, 4);
      const AssembledSystem sys = q.problem->assemble(ParamPoint{1.2, 0.7});
      const auto ctx = context_for(q, sys);
      const SolveResult r = mgcg_solve(sys.A(), sys.rhs, Vector(sys.rhs.size(), 0.0), ctx, SolveOptions{1e-8, 40});
      CHECK(r.report.converged);
      counts.push_back(r.report.iterations);
    }
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(*hi - *lo <= 3);
  }

  TEST_CASE("training solver reaches its tolerance") {
    auto p = make_problem("example-2", 2, 4);
    const AssembledSystem sys = p.problem->assemble(ParamPoint{0.5, 0.2, 0.9, 0.6, 0.5, 0.5, 0.3});
    const MgcgSolver solver(p.mesh, SolveOptions{1e-12, 200});
    const Vector x = solver.solve(sys, sys.rhs);
    CHECK(simd::norm2(sys.A().residual(sys.rhs, x)) / simd::norm2(sys.rhs) <= 1e-11);
  }
}
