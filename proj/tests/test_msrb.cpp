#include <doctest.h>

#include "support.hpp"

using namespace rbws;
using namespace rbws::testing;

namespace {

struct MsrbFixture {
  SmallProblem p = make_problem("example-1", 2, 4);
  std::vector<ParamPoint> train = lhs_sample(2, 25, p.spec.box(), 11);
  MgcgSolver hf{p.mesh, SolveOptions{1e-13, 200}};
  MsrbHierarchy hier = [this] {
    MsrbTrainOptions opt;
    opt.rb_dimension = 6;
    opt.max_spaces = 5;
    return msrb_train(*p.problem, train, opt, hf);
  }();
};

const MsrbFixture& fixture() {
  static const MsrbFixture f;
  return f;
}

}  // namespace

TEST_SUITE("msrb") {
  TEST_CASE("hierarchy shape and orthonormal bases") {
    const auto& h = fixture().hier;
    CHECK(h.initial.dimension() == 6);
    CHECK(h.max_spaces() == 5);
    CHECK(h.residual_spectra.size() == 5);
    for (const auto& w : h.iteration_bases) {
      CHECK(w.cols() <= 6);
      CHECK((w.transpose() * w - Eigen::MatrixXd::Identity(w.cols(), w.cols())).norm() <= 1e-12);
    }
    for (const auto& s : h.residual_spectra) CHECK(s.front() == 1.0);
    CHECK(h.basis_for(0) == &h.iteration_bases[0]);
    CHECK(h.basis_for(99) == &h.iteration_bases[4]);
  }

  TEST_CASE("error equations are solved to the training tolerance") {
    CHECK(fixture().hier.max_error_equation_residual <= 1e-9);
    CHECK(fixture().hier.max_error_equation_residual > 0.0);
  }

  TEST_CASE("K_max = 0 keeps only the initial space") {
    const auto& f = fixture();
    MsrbTrainOptions opt;
    opt.rb_dimension = 4;
    opt.max_spaces = 0;
    const MsrbHierarchy h = msrb_train(*f.p.problem, f.train, opt, f.hf);
    CHECK(h.initial.dimension() == 4);
    CHECK(h.max_spaces() == 0);
    CHECK(h.basis_for(0) == nullptr);
  }

  TEST_CASE("msrb_apply limits") {
    const CsrMatrix a = random_spd(10, 8, 20.0);
    const Vector b = random_vector(10, 1);
    CHECK(simd::norm2(msrb_apply(Vector(10, 0.0), a, Eigen::MatrixXd::Identity(10, 3))) == 0.0);
    CHECK(rel_diff(msrb_apply(b, a, Eigen::MatrixXd::Identity(10, 10)), dense_solve(a, b)) <= 1e-12);
    Vector smoothed(10, 0.0);
    smooth(smoothed, a, b, 1, SmootherKind::gauss_seidel_symmetric);
    CHECK(msrb_apply(b, a, Eigen::MatrixXd(10, 0)) == smoothed);
  }

  TEST_CASE("msrb_apply is linear") {
    const auto& f = fixture();
    const AssembledSystem sys = f.p.problem->assemble(ParamPoint{1.1, 0.2});
    const Eigen::MatrixXd& w = f.hier.iteration_bases[1];
    const Vector x = random_vector(sys.rhs.size(), 2), y = random_vector(sys.rhs.size(), 3);
    Vector comb(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) comb[i] = 0.7 * x[i] - 1.9 * y[i];
    const Vector px = msrb_apply(x, sys.A(), w), py = msrb_apply(y, sys.A(), w);
    Vector expect(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) expect[i] = 0.7 * px[i] - 1.9 * py[i];
    CHECK(rel_diff(msrb_apply(comb, sys.A(), w), expect) <= 1e-11);
  }

  TEST_CASE("RB correction cannot beat the energy-norm best approximation") {
    const auto& f = fixture();
    const AssembledSystem sys = f.p.problem->assemble(ParamPoint{0.3, 0.8});
    const Eigen::MatrixXd& w = f.hier.iteration_bases[2];
    const Eigen::MatrixXd ad = sys.A().to_dense();
    const Vector b = random_vector(sys.rhs.size(), 4);
    Vector half(b.size(), 0.0);
    smooth(half, sys.A(), b, 1, SmootherKind::gauss_seidel_symmetric);
    const Eigen::VectorXd e_half = as_eigen(dense_solve(sys.A(), sys.A().residual(b, half)));
    const Eigen::VectorXd e_new = as_eigen(dense_solve(sys.A(), b)) - as_eigen(msrb_apply(b, sys.A(), w));
    // Dense A-orthogonal projection oracle.
    const Eigen::MatrixXd g = w.transpose() * ad * w;
    const Eigen::VectorXd best = e_half - w * g.ldlt().solve(w.transpose() * ad * e_half);
    auto energy = [&](const Eigen::VectorXd& e) { return std::sqrt(e.dot(ad * e)); };
    CHECK(energy(e_new) >= energy(best) * (1.0 - 1e-9));
    CHECK(energy(e_new) == doctest::Approx(energy(best)).epsilon(1e-8));
  }

  TEST_CASE("reduction to smoother-preconditioned CG") {
    const auto& f = fixture();
    const AssembledSystem sys = f.p.problem->assemble(ParamPoint{1.7, 0.6});
    auto empty = std::make_shared<MsrbHierarchy>();
    const Vector x0(sys.rhs.size(), 0.0);
    const SolveOptions opt{1e-12, 60};
    const SolveResult a = msrbcg_solve(sys.matrix, sys.rhs, x0, empty, opt);
    const FunctionPreconditioner gs(
        [&](std::span<const double> r, std::span<double> s, int) {
          std::fill(s.begin(), s.end(), 0.0);
          smooth(s, sys.A(), r, 1, SmootherKind::gauss_seidel_symmetric);
        },
        "sgs", true);
    const SolveResult b = pcg_solve(sys.A(), sys.rhs, x0, gs, opt);
    REQUIRE(a.report.iterations == b.report.iterations);
    for (std::size_t k = 0; k < a.report.history.size(); ++k) {
      CHECK(a.report.history[k] == doctest::Approx(b.report.history[k]).epsilon(1e-12));
    }
  }

  TEST_CASE("MSRBCG from the POD warm start converges") {
    const auto& f = fixture();
    const AssembledSystem sys = f.p.problem->assemble(ParamPoint{0.5, 0.5});
    auto h = std::make_shared<const MsrbHierarchy>(f.hier);
    const Vector x0 = rbm_pod_solve(sys.A(), sys.rhs, f.hier.initial.basis);
    const SolveResult r = msrbcg_solve(sys.matrix, sys.rhs, x0, h, SolveOptions{1e-12, 100});
    CHECK(r.report.converged);
    CHECK(rel_diff(r.x, dense_solve(sys.A(), sys.rhs)) <= 1e-10);
  }

  TEST_CASE("Richardson variant records its half-step residuals") {
    const auto& f = fixture();
    const AssembledSystem sys = f.p.problem->assemble(ParamPoint{1.3, 0.1});
    const RichardsonResult r = msrb_richardson(sys.A(), sys.rhs, f.hier, SolveOptions{1e-14, 6});
    REQUIRE(r.half_step_residuals.size() == static_cast<std::size_t>(r.report.iterations));
    REQUIRE(r.report.iterations >= 1);
    // Recompute the first half step independently.
    Vector u = rbm_pod_solve(sys.A(), sys.rhs, f.hier.initial.basis);
    Vector s(u.size(), 0.0);
    smooth(s, sys.A(), sys.A().residual(sys.rhs, u), 1, SmootherKind::gauss_seidel_symmetric);
    simd::axpy(1.0, s, u);
    CHECK(rel_diff(r.half_step_residuals.front(), sys.A().residual(sys.rhs, u)) <= 1e-12);
    // Residuals do not grow until they stagnate at round-off.
    for (std::size_t k = 1; k < r.report.history.size(); ++k) {
      if (r.report.history[k - 1] < 1e-12) break;
      CHECK(r.report.history[k] <= r.report.history[k - 1]);
    }
    const Vector check = sys.A().residual(sys.rhs, r.x);
    CHECK(simd::norm2(check) / simd::norm2(sys.rhs) == doctest::Approx(r.report.history.back()).epsilon(1e-6));
  }

  TEST_CASE("Richardson with exact spaces converges in one step") {
    const CsrMatrix a = random_spd(8, 3, 10.0);
    const Vector f = random_vector(8, 4);
    MsrbHierarchy h;
    h.iteration_bases.push_back(Eigen::MatrixXd::Identity(8, 8));
    h.residual_spectra.push_back({1.0});
    const RichardsonResult r = msrb_richardson(a, f, h, SolveOptions{1e-12, 5});
    CHECK(r.report.iterations == 1);
    CHECK(r.report.converged);
  }

  TEST_CASE("residual spectra widen with the iteration index") {
    const auto& h = fixture().hier;
    std::vector<int> counts;
    for (const auto& s : h.residual_spectra) counts.push_back(count_above(s, 1e-8));
    CHECK(counts[1] >= counts[0]);
    CHECK(counts[3] > counts[0]);
  }

  TEST_CASE("training failures name the parameter and iteration") {
    const auto& f = fixture();
    MsrbTrainOptions opt;
    opt.rb_dimension = 3;
    opt.max_spaces = 2;
    opt.solve_tolerance = 1e-9;
    const MgcgSolver weak(f.p.mesh, SolveOptions{1e-2, 1});
    try {
      (void)msrb_train(*f.p.problem, f.train, opt, weak);
      FAIL("expected a training failure");
    } catch (const OperatorError& e) {
      CHECK(std::string(e.what()).find("mu = ") != std::string::npos);
    }
  }
}
