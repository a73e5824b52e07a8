#pragma once

#include <memory>
#include <vector>

#include "rbws/krylov.hpp"
#include "rbws/reduced_basis.hpp"

namespace rbws {

// Iteration-indexed reduced spaces for the multispace RB preconditioner.
struct MsrbHierarchy {
  PodBasis initial;                               // warm-start space from solution snapshots
  std::vector<Eigen::MatrixXd> iteration_bases;   // space used at CG iteration k (k < K_max)
  // Relative correlation spectra of the error-equation right-hand sides at
  // each k over the training set.
  std::vector<std::vector<double>> residual_spectra;
  int rb_dimension = 0;
  SmootherKind smoother = SmootherKind::gauss_seidel_symmetric;
  double max_error_equation_residual = 0.0;

  int max_spaces() const noexcept { return static_cast<int>(iteration_bases.size()); }
  // Space for iteration k; the last one is reused past K_max. nullptr if none.
  const Eigen::MatrixXd* basis_for(int k) const noexcept;
};

// Right-hand side of the per-iteration error equations used for training.
enum class ErrorSnapshotSource {
  iteration_residual,  // A e = r^(k), the CG residual entering the preconditioner
  half_step_residual,  // A e = r^(k) - A S(0, A, r^(k), 1), what the RB correction actually sees
};

struct MsrbTrainOptions {
  int rb_dimension = 10;
  int max_spaces = 8;  // K_max
  // Required relative true residual of every training solve.
  double solve_tolerance = 1e-9;
  SmootherKind smoother = SmootherKind::gauss_seidel_symmetric;
  ErrorSnapshotSource source = ErrorSnapshotSource::iteration_residual;
  // A training run stops once its relative residual reaches this level.
  double stop_tolerance = 1e-16;
};

// Simulates RBI-MSRBCG over the training set and builds one POD space per
// iteration from error-equation solutions.
MsrbHierarchy msrb_train(const DiscreteProblem& problem, std::span<const ParamPoint> train,
                         const MsrbTrainOptions& options, const LinearSolver& hf_solver);

// S(0, A, b, 1) + W (W^T A W)^{-1} W^T (b - A S(0, A, b, 1)).
Vector msrb_apply(std::span<const double> b, const CsrMatrix& a, const Eigen::MatrixXd& basis,
                  SmootherKind smoother = SmootherKind::gauss_seidel_symmetric);

class MsrbPreconditioner final : public Preconditioner {
 public:
  MsrbPreconditioner(std::shared_ptr<const CsrMatrix> a, std::shared_ptr<const MsrbHierarchy> hierarchy);
  void apply(std::span<const double> r, std::span<double> s, int iteration) const override;
  std::string label() const override { return "msrb"; }

 private:
  std::shared_ptr<const CsrMatrix> a_;
  std::shared_ptr<const MsrbHierarchy> hierarchy_;
  std::vector<RbGalerkinSolver> solvers_;
};

SolveResult msrbcg_solve(std::shared_ptr<const CsrMatrix> a, std::span<const double> f,
                         std::span<const double> x0, std::shared_ptr<const MsrbHierarchy> hierarchy,
                         const SolveOptions& options);

struct RichardsonResult {
  Vector x;
  SolveReport report;
  std::vector<Vector> half_step_residuals;  // r^(k-1/2), k = 1..iterations
};

// u0 = RB_POD(f); u^(k-1/2) = u^(k-1) + S(0, A, r^(k-1), 1);
// u^(k) = u^(k-1/2) + RB_POD(r^(k-1/2)) using the space of iteration k-1.
RichardsonResult msrb_richardson(const CsrMatrix& a, std::span<const double> f, const MsrbHierarchy& hierarchy,
                                 const SolveOptions& options);

}  // namespace rbws
