#include <doctest.h>

#include <numeric>

#include "support.hpp"

using namespace rbws;
using namespace rbws::testing;

namespace {

std::vector<Vector> random_snapshots(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_vector(n, seed + i));
  return out;
}

// Small Ex.1 L1ROC setup shared by several cases.
struct L1rocFixture {
  SmallProblem p = make_problem("example-1", 2, 4);
  std::vector<ParamPoint> train = lhs_sample(2, 30, p.spec.box(), 3);
  MgcgSolver hf{p.mesh, SolveOptions{1e-13, 200}};
  L1rocModel model = l1roc_offline(*p.problem, train, L1rocOptions{8, 5}, hf);
};

const L1rocFixture& fixture() {
  static const L1rocFixture f;
  return f;
}

// Frozen regression bound on the worst residual of the 8-dimensional 9^3 model
// at its own greedy parameters; first measured run: 5.3e-14.
constexpr double kTrainingReproduction = 1e-12;

}  // namespace

TEST_SUITE("reduced_basis") {
  TEST_CASE("POD basis is orthonormal and obeys the projection-error identity") {
    const auto snaps = random_snapshots(50, 12, 100);
    const std::vector<double> spectrum = correlation_spectrum(snaps);
    for (int n : {1, 4, 8, 12}) {
      const PodBasis pod = pod_build(snaps, n);
      REQUIRE(pod.dimension() == n);
      CHECK((pod.basis.transpose() * pod.basis - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-12);
      double err = 0.0;
      for (const auto& s : snaps) {
        const Eigen::VectorXd v = as_eigen(s);
        err += (v - pod.basis * (pod.basis.transpose() * v)).squaredNorm();
      }
      const double tail = std::accumulate(spectrum.begin() + n, spectrum.end(), 0.0);
      CHECK(std::abs(err - tail) <= 1e-10 * std::accumulate(spectrum.begin(), spectrum.end(), 0.0));
    }
  }

  TEST_CASE("POD truncates to the numerical rank") {
    std::vector<Vector> snaps = random_snapshots(30, 3, 7);
    for (int i = 0; i < 4; ++i) {
      Vector c(30);
      for (std::size_t j = 0; j < 30; ++j) c[j] = 0.5 * snaps[0][j] - (i + 1.0) * snaps[2][j];
      snaps.push_back(c);
    }
    const PodBasis pod = pod_build(snaps, 7);
    CHECK(pod.dimension() == 3);
    CHECK(pod.snapshot_count == 7);
    CHECK(pod.eigenvalues.size() == 7);
    CHECK(pod_build(std::vector<Vector>{Vector(5, 0.0)}, 2).dimension() == 0);
    CHECK_THROWS_AS(pod_build(std::vector<Vector>{}, 2), DomainError);
  }

  TEST_CASE("correlation spectrum of identical snapshots") {
    const Vector s = random_vector(20, 1);
    const Spectrum sp = residual_spectrum(std::vector<Vector>{s, s, s});
    REQUIRE(sp.values.size() == 3);
    CHECK(sp.values[0] == 1.0);
    CHECK(sp.values[1] <= 1e-14);
    CHECK(sp.values[2] <= 1e-14);
    CHECK_FALSE(sp.trivial);
  }

  TEST_CASE("Galerkin RB solve with a complete basis is exact") {
    const CsrMatrix a = random_spd(12, 2, 30.0);
    const Vector b = random_vector(12, 3);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(12, 12);
    CHECK(rel_diff(rbm_pod_solve(a, b, w), dense_solve(a, b)) <= 1e-12);
    Eigen::MatrixXd dep(12, 2);
    dep.col(0) = Eigen::VectorXd::Unit(12, 0);
    dep.col(1) = Eigen::VectorXd::Unit(12, 0);
    CHECK_THROWS_AS(RbGalerkinSolver(a, dep), DegenerateBasisError);
  }

  TEST_CASE("Galerkin RB solution is the energy-norm best approximation") {
    const CsrMatrix a = random_spd(20, 5, 100.0);
    const Vector b = random_vector(20, 6);
    const Eigen::MatrixXd w = pod_build(random_snapshots(20, 4, 30), 4).basis;
    const Eigen::VectorXd u = as_eigen(dense_solve(a, b));
    const Eigen::VectorXd rb = as_eigen(rbm_pod_solve(a, b, w));
    const Eigen::MatrixXd ad = a.to_dense();
    auto energy = [&](const Eigen::VectorXd& e) { return e.dot(ad * e); };
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Eigen::VectorXd other = w * as_eigen(random_vector(4, 90 + s));
      CHECK(energy(u - rb) <= energy(u - other) + 1e-12);
    }
  }

  TEST_CASE("DEIM interpolates exactly at the chosen points") {
    const auto snaps = random_snapshots(40, 6, 200);
    Eigen::MatrixXd w(40, 0);
    std::vector<Index> pts;
    for (const auto& s : snaps) {
      const DeimStep step = deim_extend(w, pts, s);
      CHECK(step.column[static_cast<std::size_t>(step.index)] == doctest::Approx(1.0));
      CHECK(std::find(pts.begin(), pts.end(), step.index) == pts.end());
      w.conservativeResize(40, w.cols() + 1);
      w.col(w.cols() - 1) = as_eigen(step.column);
      pts.push_back(step.index);
    }
    // Any vector in span(W) is reproduced from its values at the points.
    const Eigen::VectorXd v = w * as_eigen(random_vector(6, 5));
    Eigen::MatrixXd pw(6, 6);
    Eigen::VectorXd pv(6);
    for (int i = 0; i < 6; ++i) {
      pw.row(i) = w.row(pts[static_cast<std::size_t>(i)]);
      pv(i) = v(pts[static_cast<std::size_t>(i)]);
    }
    CHECK((w * pw.partialPivLu().solve(pv) - v).norm() <= 1e-12 * v.norm());
    // The interpolation matrix is unit lower triangular in pick order.
    for (int i = 0; i < 6; ++i) {
      CHECK(pw(i, i) == doctest::Approx(1.0));
      for (int j = i + 1; j < 6; ++j) CHECK(std::abs(pw(i, j)) <= 1e-14);
    }
    CHECK_THROWS_AS(deim_extend(w, pts, as_vector(v)), DependentSnapshotError);
  }

  TEST_CASE("DEIM honours excluded indices") {
    const Vector v{0.1, 5.0, -0.2, 1.0};
    const std::vector<Index> excluded{1};
    const DeimStep step = deim_extend(Eigen::MatrixXd(4, 0), {}, v, excluded);
    CHECK(step.index == 3);
    CHECK(step.pivot == 1.0);
  }

  TEST_CASE("l1 indicator") {
    CHECK(l1_indicator(std::vector<double>{1.0, -2.0, 0.5}) == 3.5);
    CHECK(l1_indicator(std::vector<double>{}) == 0.0);
  }

  TEST_CASE("L1ROC model structure") {
    const L1rocModel& m = fixture().model;
    REQUIRE(m.dimension() == 8);
    CHECK_FALSE(m.saturated);
    CHECK(m.solution_points.size() == 8);
    CHECK(m.residual_points.size() == 7);
    CHECK(m.indicator_history.size() == 7);
    auto pts = m.collocation_points();
    CHECK(pts.size() == 15);
    std::sort(pts.begin(), pts.end());
    CHECK(std::adjacent_find(pts.begin(), pts.end()) == pts.end());
    // W = U T with T upper triangular.
    CHECK(m.snapshot_transform.rows() == 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < i; ++j) CHECK(m.snapshot_transform(i, j) == 0.0);
  }

  TEST_CASE("L1ROC reproduces its snapshots") {
    const auto& f = fixture();
    double worst = 0.0;
    for (const auto& mu : f.model.parameters) {
      const AssembledSystem sys = f.p.problem->assemble(mu);
      const OnlineSolution on = l1roc_online(f.model, sys.A(), sys.rhs);
      worst = std::max(worst, simd::norm2(sys.A().residual(sys.rhs, on.solution)) / simd::norm2(sys.rhs));
    }
    CHECK(worst <= kTrainingReproduction);
  }

  TEST_CASE("L1ROC online paths agree") {
    const auto& f = fixture();
    const ParamPoint mu{0.9, 0.35};
    const AssembledSystem sys = f.p.problem->assemble(mu);
    const OnlineSolution full = l1roc_online(f.model, sys.A(), sys.rhs);
    const OnlineSolution rows = l1roc_online(f.model, f.p.problem->assemble_rows(mu, f.model.collocation_points()));
    CHECK(rel_diff(full.solution, rows.solution) <= 1e-12);
    CHECK(full.indicator == doctest::Approx(l1_indicator(std::vector<double>(
                                full.snapshot_coefficients.data(),
                                full.snapshot_coefficients.data() + full.snapshot_coefficients.size()))));
  }

  TEST_CASE("L1ROC prefixes are nested models") {
    const auto& f = fixture();
    const L1rocModel t = f.model.truncated(3);
    CHECK(t.dimension() == 3);
    CHECK(t.collocation_points().size() == 5);
    CHECK(t.basis == f.model.basis.leftCols(3));
    CHECK(t.snapshot_transform == f.model.snapshot_transform.topLeftCorner(3, 3));
    CHECK_THROWS_AS(f.model.truncated(9), DomainError);
  }

  TEST_CASE("warm-start payoff grows with the model size on training data") {
    const auto& f = fixture();
    std::vector<double> avg;
    for (int n = 1; n <= f.model.dimension(); ++n) {
      const L1rocModel m = f.model.truncated(n);
      double sum = 0.0;
      for (const auto& mu : f.train) {
        const AssembledSystem sys = f.p.problem->assemble(mu);
        sum += initial_residual(sys.A(), sys.rhs, l1roc_online(m, sys.A(), sys.rhs).solution);
      }
      avg.push_back(sum / static_cast<double>(f.train.size()));
    }
    for (std::size_t i = 2; i < avg.size(); ++i) CHECK(avg[i] <= avg[i - 1] * (1.0 + 1e-12));
  }

  TEST_CASE("L1ROC greedy is deterministic and validates its inputs") {
    const auto& f = fixture();
    const L1rocModel again = l1roc_offline(*f.p.problem, f.train, L1rocOptions{8, 5}, f.hf);
    CHECK(again.basis == f.model.basis);
    CHECK(again.solution_points == f.model.solution_points);
    CHECK(again.residual_points == f.model.residual_points);
    CHECK_THROWS_AS(l1roc_offline(*f.p.problem, f.train, L1rocOptions{31, 5}, f.hf), DomainError);
    CHECK_THROWS_AS(l1roc_offline(*f.p.problem, std::vector<ParamPoint>{}, L1rocOptions{1, 5}, f.hf), DomainError);
  }

  TEST_CASE("rank-deficient collocation systems are rejected") {
    L1rocModel m;
    m.basis = Eigen::MatrixXd::Zero(6, 2);
    m.basis.col(0) << 1, 0.5, 0.5, 0, 0, 0;
    m.basis.col(1) = m.basis.col(0);
    m.snapshot_transform = Eigen::MatrixXd::Identity(2, 2);
    m.solution_points = {0, 1};
    m.residual_points = {2};
    const CsrMatrix a = laplacian_1d(6);
    CHECK_THROWS_AS(l1roc_online(m, a, Vector(6, 1.0)), IllConditionedModelError);
  }

  TEST_CASE("repeated training parameters saturate the greedy") {
    auto p = make_problem("example-1", 2, 2);
    const std::vector<ParamPoint> train(4, ParamPoint{1.0, 0.5});
    const MgcgSolver hf(p.mesh, SolveOptions{1e-13, 100});
    const L1rocModel m = l1roc_offline(*p.problem, train, L1rocOptions{3, 0}, hf);
    CHECK(m.saturated);
    CHECK(m.dimension() == 1);
  }
}
