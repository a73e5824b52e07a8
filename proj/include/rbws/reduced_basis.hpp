#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "rbws/grid_fem.hpp"
#include "rbws/krylov.hpp"

namespace rbws {

struct PodBasis {
  Eigen::MatrixXd basis;            // orthonormal columns
  std::vector<double> eigenvalues;  // correlation eigenvalues, descending, >= 0
  int snapshot_count = 0;

  int dimension() const noexcept { return static_cast<int>(basis.cols()); }
  PodBasis truncated(int n) const;
};

// Method of snapshots. n larger than the numerical rank is truncated to it.
PodBasis pod_build(std::span<const Vector> snapshots, int n);

// Eigenvalues of the snapshot correlation matrix, descending, clamped at 0.
std::vector<double> correlation_spectrum(std::span<const Vector> snapshots);

// Galerkin projection onto span(W): W (W^T A W)^{-1} W^T b. The reduced
// operator is factored once at construction.
class RbGalerkinSolver {
 public:
  RbGalerkinSolver(const CsrMatrix& a, const Eigen::MatrixXd& basis);
  Vector solve(std::span<const double> b) const;
  // out += W (W^T A W)^{-1} W^T b
  void solve_add(std::span<const double> b, std::span<double> out) const;
  int dimension() const noexcept { return static_cast<int>(basis_->cols()); }

 private:
  const Eigen::MatrixXd* basis_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

// Throws DegenerateBasisError when W^T A W is singular.
Vector rbm_pod_solve(const CsrMatrix& a, std::span<const double> b, const Eigen::MatrixXd& basis);

struct DeimStep {
  Vector column;                  // rho / rho[index]
  Index index = -1;               // new interpolation point
  double pivot = 0.0;             // rho[index] before normalisation
  Eigen::VectorXd coefficients;   // c with (P W) c = P v
};

// Extends (W, X) by one vector. `excluded` indices are never chosen as the
// new point. Throws DependentSnapshotError when v is interpolated exactly.
DeimStep deim_extend(const Eigen::MatrixXd& basis, std::span<const Index> points, std::span<const double> v,
                     std::span<const Index> excluded = {});

double l1_indicator(std::span<const double> coefficients);

struct L1rocModel {
  Eigen::MatrixXd basis;               // W_N, columns normalised to 1 at their point
  Eigen::MatrixXd snapshot_transform;  // upper triangular T with W_N = U_N T
  std::vector<Index> solution_points;  // X_s, N entries
  std::vector<Index> residual_points;  // X_r, N-1 entries
  std::vector<ParamPoint> parameters;  // greedy picks, in order
  std::vector<double> indicator_history;  // max indicator before each pick n >= 2
  bool saturated = false;  // greedy re-selected a parameter and stopped early

  int dimension() const noexcept { return static_cast<int>(basis.cols()); }
  Index full_size() const noexcept { return static_cast<Index>(basis.rows()); }
  // X_s followed by X_r; 2N-1 distinct DoFs.
  std::vector<Index> collocation_points() const;
  // Nested prefix with n columns and 2n-1 points.
  L1rocModel truncated(int n) const;
};

struct OnlineSolution {
  Vector solution;                        // W_N u_N
  Eigen::VectorXd reduced;                // u_N
  Eigen::VectorXd snapshot_coefficients;  // c_N = T u_N
  double indicator = 0.0;                 // ||c_N||_1
};

// Least-squares solve of the collocated system at the model's points.
OnlineSolution l1roc_online(const L1rocModel& model, const CsrMatrix& a, std::span<const double> b);
// Same, from rows already sampled at collocation_points() (in that order).
OnlineSolution l1roc_online(const L1rocModel& model, const SampledRows& rows);

struct L1rocOptions {
  int dimension = 10;
  std::uint64_t seed = 0;
};

L1rocModel l1roc_offline(const DiscreteProblem& problem, std::span<const ParamPoint> train,
                         const L1rocOptions& options, const LinearSolver& hf_solver);

}  // namespace rbws
