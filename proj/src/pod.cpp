#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "rbws/reduced_basis.hpp"

namespace rbws {
namespace {

// Relative eigenvalue below which a POD mode is treated as numerically zero.
constexpr double kRankTolerance = 1e-13;

Eigen::MatrixXd correlation(std::span<const Vector> snapshots) {
  const auto ns = static_cast<Eigen::Index>(snapshots.size());
  Eigen::MatrixXd c(ns, ns);
  for (Eigen::Index i = 0; i < ns; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      c(i, j) = c(j, i) = simd::dot(snapshots[i], snapshots[j]);
    }
  }
  return c;
}

void check_snapshots(std::span<const Vector> snapshots) {
  if (snapshots.empty()) throw DomainError("pod: empty snapshot list");
  for (const Vector& s : snapshots) require_size(s.size(), snapshots.front().size(), "pod: snapshot");
}

}  // namespace

PodBasis PodBasis::truncated(int n) const {
  if (n < 0 || n > dimension()) throw DomainError("PodBasis::truncated: bad dimension");
  PodBasis out = *this;
  out.basis = basis.leftCols(n);
  return out;
}

std::vector<double> correlation_spectrum(std::span<const Vector> snapshots) {
  check_snapshots(snapshots);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation(snapshots), Eigen::EigenvaluesOnly);
  std::vector<double> values(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  std::reverse(values.begin(), values.end());
  for (double& v : values) v = std::max(v, 0.0);
  return values;
}

PodBasis pod_build(std::span<const Vector> snapshots, int n) {
  check_snapshots(snapshots);
  if (n < 0) throw DomainError("pod: negative dimension");
  const auto ns = static_cast<Eigen::Index>(snapshots.size());
  const auto rows = static_cast<Eigen::Index>(snapshots.front().size());

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation(snapshots));
  if (eig.info() != Eigen::Success) throw OperatorError("pod: eigen-decomposition failed");

  PodBasis pod;
  pod.snapshot_count = static_cast<int>(ns);
  pod.eigenvalues.resize(static_cast<std::size_t>(ns));
  for (Eigen::Index i = 0; i < ns; ++i) pod.eigenvalues[i] = std::max(eig.eigenvalues()(ns - 1 - i), 0.0);

  const double lambda_max = pod.eigenvalues.front();
  int rank = 0;
  while (rank < ns && lambda_max > 0.0 && pod.eigenvalues[rank] > kRankTolerance * lambda_max) ++rank;
  const int keep = std::min(n, rank);

  // w_i = S v_i / sqrt(lambda_i), then re-orthonormalised.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(rows, keep);
  for (int m = 0; m < keep; ++m) {
    const Eigen::VectorXd v = eig.eigenvectors().col(ns - 1 - m);
    for (Eigen::Index s = 0; s < ns; ++s) {
      w.col(m) += v(s) * Eigen::Map<const Eigen::VectorXd>(snapshots[s].data(), rows);
    }
    w.col(m) /= std::sqrt(pod.eigenvalues[m]);
  }
  if (keep > 0) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, keep);
    for (int m = 0; m < keep; ++m) {
      if (q.col(m).dot(w.col(m)) < 0.0) q.col(m) = -q.col(m);
    }
    w = std::move(q);
  }
  pod.basis = std::move(w);
  return pod;
}

RbGalerkinSolver::RbGalerkinSolver(const CsrMatrix& a, const Eigen::MatrixXd& basis) : basis_(&basis) {
  require_size(static_cast<std::size_t>(basis.rows()), static_cast<std::size_t>(a.rows()), "rb solve: basis");
  const Eigen::Index n = basis.cols();
  if (n == 0) return;
  Eigen::MatrixXd aw(basis.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a.multiply(std::span<const double>(basis.col(j).data(), static_cast<std::size_t>(basis.rows())),
               std::span<double>(aw.col(j).data(), static_cast<std::size_t>(aw.rows())));
  }
  Eigen::MatrixXd reduced = basis.transpose() * aw;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  factor_.compute(reduced);
  if (factor_.info() != Eigen::Success || !(factor_.rcond() > 1e-14)) {
    throw DegenerateBasisError("rb solve: reduced operator W^T A W is singular");
  }
}

void RbGalerkinSolver::solve_add(std::span<const double> b, std::span<double> out) const {
  const Eigen::MatrixXd& w = *basis_;
  require_size(b.size(), static_cast<std::size_t>(w.rows()), "rb solve: rhs");
  require_size(out.size(), static_cast<std::size_t>(w.rows()), "rb solve: output");
  if (w.cols() == 0) return;
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), w.rows());
  const Eigen::VectorXd coeffs = factor_.solve(w.transpose() * bv);
  Eigen::Map<Eigen::VectorXd>(out.data(), w.rows()) += w * coeffs;
}

Vector RbGalerkinSolver::solve(std::span<const double> b) const {
  Vector out(b.size(), 0.0);
  solve_add(b, out);
  return out;
}

Vector rbm_pod_solve(const CsrMatrix& a, std::span<const double> b, const Eigen::MatrixXd& basis) {
  return RbGalerkinSolver(a, basis).solve(b);
}

}  // namespace rbws
