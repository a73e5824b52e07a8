#pragma once

#include <Eigen/Cholesky>
#include <memory>
#include <vector>

#include "rbws/grid_fem.hpp"
#include "rbws/krylov.hpp"

namespace rbws {

struct MgOptions {
  int smoothing_steps = 2;  // nu, pre and post
  SmootherKind pre_smoother = SmootherKind::gauss_seidel_forward;
  SmootherKind post_smoother = SmootherKind::gauss_seidel_backward;
};

// Galerkin operator hierarchy for one parameter value, with the coarsest level
// factored once. Immutable after construction.
class MgContext {
 public:
  static MgContext build(std::shared_ptr<const CsrMatrix> a_fine, std::shared_ptr<const MeshHierarchy> mesh,
                         const MgOptions& options = {});
  // One-level context whose cycle is the dense direct solve.
  static MgContext direct(std::shared_ptr<const CsrMatrix> a);

  int levels() const noexcept { return static_cast<int>(operators_.size()); }
  int finest_level() const noexcept { return levels() - 1; }
  const CsrMatrix& op(int level) const { return *operators_.at(static_cast<std::size_t>(level)); }
  const MgOptions& options() const noexcept { return options_; }

  // One V-cycle for A^level u = b starting from u = 0.
  void vcycle(std::span<const double> b, std::span<double> u, int level) const;
  Vector vcycle(std::span<const double> b) const;

 private:
  MgContext() = default;
  void coarse_solve(std::span<const double> b, std::span<double> u) const;

  std::vector<std::shared_ptr<const CsrMatrix>> operators_;  // coarsest first
  std::shared_ptr<const MeshHierarchy> mesh_;
  Eigen::LLT<Eigen::MatrixXd> coarse_factor_;
  MgOptions options_;
};

// One V-cycle at the finest level, ignoring the iteration index.
class MgPreconditioner final : public Preconditioner {
 public:
  explicit MgPreconditioner(std::shared_ptr<const MgContext> ctx) : ctx_(std::move(ctx)) {}
  void apply(std::span<const double> r, std::span<double> s, int) const override;
  bool is_symmetric() const override;
  std::string label() const override { return "mg"; }

 private:
  std::shared_ptr<const MgContext> ctx_;
};

SolveResult mgcg_solve(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                       std::shared_ptr<const MgContext> ctx, const SolveOptions& options);

// Stationary iteration u <- u + MG(f - A u); returns the residual history.
SolveResult mg_stationary(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                          const MgContext& ctx, const SolveOptions& options);

// MGCG from a zero guess to a relative tolerance; builds a fresh context per call.
class MgcgSolver final : public LinearSolver {
 public:
  MgcgSolver(std::shared_ptr<const MeshHierarchy> mesh, SolveOptions options, MgOptions mg = {})
      : mesh_(std::move(mesh)), options_(options), mg_(mg) {}
  Vector solve(const AssembledSystem& system, std::span<const double> rhs) const override;
  const SolveOptions& options() const noexcept { return options_; }

 private:
  std::shared_ptr<const MeshHierarchy> mesh_;
  SolveOptions options_;
  MgOptions mg_;
};

}  // namespace rbws
