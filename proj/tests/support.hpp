#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>

#include "rbws/experiment.hpp"
#include "rbws/model_io.hpp"
#include "rbws/multigrid.hpp"

namespace rbws::testing {

inline Vector random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Vector v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline Eigen::VectorXd as_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vector as_vector(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

// Dense SPD matrix with a controlled spectrum, stored as CSR.
inline CsrMatrix random_spd(Index n, std::uint64_t seed, double cond = 100.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd ev(n);
  for (Index i = 0; i < n; ++i) ev(i) = std::pow(cond, n > 1 ? static_cast<double>(i) / (n - 1) : 0.0);
  Eigen::MatrixXd a = q * ev.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose());
  return CsrMatrix::from_dense(a);
}

// 1-D Laplacian tridiag(-1, 2, -1).
inline CsrMatrix laplacian_1d(Index n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < n) a(i, i + 1) = -1.0;
  }
  return CsrMatrix::from_dense(a);
}

inline Vector dense_solve(const CsrMatrix& a, std::span<const double> b) {
  return as_vector(a.to_dense().ldlt().solve(as_eigen(b)));
}

struct SmallProblem {
  ProblemSpec spec;
  std::shared_ptr<const MeshHierarchy> mesh;
  std::shared_ptr<const FemProblem> problem;
};

inline SmallProblem make_problem(const std::string& name, int levels, Index base) {
  ProblemSpec spec = ProblemSpec::from_name(name);
  auto mesh = std::make_shared<const MeshHierarchy>(build_hierarchy(levels, base, spec.boundary()));
  auto problem = std::make_shared<const FemProblem>(spec, mesh);
  return {std::move(spec), std::move(mesh), std::move(problem)};
}

inline ParamPoint laplace_mu(const ProblemSpec& spec) {
  ParamPoint mu;
  mu.values = spec.box().lower;
  return mu;
}

}  // namespace rbws::testing
