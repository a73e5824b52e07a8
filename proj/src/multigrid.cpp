#include "rbws/multigrid.hpp"

#include <algorithm>
#include <chrono>

namespace rbws {

MgContext MgContext::build(std::shared_ptr<const CsrMatrix> a_fine, std::shared_ptr<const MeshHierarchy> mesh,
                           const MgOptions& options) {
  if (!a_fine || !mesh) throw DomainError("mg_build: null operator or mesh");
  if (mesh->level_count() < 2) throw DomainError("mg_build: need at least 2 levels");
  if (a_fine->rows() != mesh->finest().dofs() || a_fine->cols() != a_fine->rows()) {
    throw DomainError("mg_build: operator size does not match the finest level");
  }
  if (options.smoothing_steps < 0) throw DomainError("mg_build: negative smoothing count");
  MgContext ctx;
  ctx.options_ = options;
  ctx.mesh_ = std::move(mesh);
  const std::size_t levels = ctx.mesh_->level_count();
  ctx.operators_.resize(levels);
  ctx.operators_[levels - 1] = std::move(a_fine);
  for (std::size_t i = levels - 1; i-- > 0;) {
    ctx.operators_[i] = std::make_shared<const CsrMatrix>(
        galerkin_coarsen(*ctx.operators_[i + 1], ctx.mesh_->prolongations[i]));
  }
  ctx.coarse_factor_.compute(ctx.operators_.front()->to_dense());
  if (ctx.coarse_factor_.info() != Eigen::Success) {
    throw OperatorError("mg_build: coarsest operator is not SPD");
  }
  return ctx;
}

MgContext MgContext::direct(std::shared_ptr<const CsrMatrix> a) {
  if (!a || a->rows() != a->cols()) throw DomainError("MgContext::direct: need a square operator");
  MgContext ctx;
  ctx.operators_.push_back(std::move(a));
  ctx.coarse_factor_.compute(ctx.operators_.front()->to_dense());
  if (ctx.coarse_factor_.info() != Eigen::Success) throw OperatorError("MgContext::direct: operator is not SPD");
  return ctx;
}

void MgContext::coarse_solve(std::span<const double> b, std::span<double> u) const {
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size())) = coarse_factor_.solve(rhs);
}

void MgContext::vcycle(std::span<const double> b, std::span<double> u, int level) const {
  if (level < 0 || level >= levels()) throw DomainError("vcycle: level out of range");
  const CsrMatrix& a = op(level);
  require_size(b.size(), static_cast<std::size_t>(a.rows()), "vcycle: rhs");
  require_size(u.size(), static_cast<std::size_t>(a.rows()), "vcycle: output");
  if (level == 0) {
    coarse_solve(b, u);
    return;
  }
  std::fill(u.begin(), u.end(), 0.0);
  smooth(u, a, b, options_.smoothing_steps, options_.pre_smoother);

  const CsrMatrix& prolong = mesh_->prolongations[static_cast<std::size_t>(level - 1)];
  const CsrMatrix& restrict_op = mesh_->restrictions[static_cast<std::size_t>(level - 1)];
  const Vector r = a.residual(b, u);
  Vector coarse_r(static_cast<std::size_t>(restrict_op.rows()));
  restrict_op.multiply(r, coarse_r);
  Vector coarse_e(coarse_r.size());
  vcycle(coarse_r, coarse_e, level - 1);
  Vector correction(u.size());
  prolong.multiply(coarse_e, correction);
  simd::axpy(1.0, correction, u);

  smooth(u, a, b, options_.smoothing_steps, options_.post_smoother);
}

Vector MgContext::vcycle(std::span<const double> b) const {
  Vector u(b.size());
  vcycle(b, u, finest_level());
  return u;
}

void MgPreconditioner::apply(std::span<const double> r, std::span<double> s, int) const {
  ctx_->vcycle(r, s, ctx_->finest_level());
}

bool MgPreconditioner::is_symmetric() const {
  const MgOptions& o = ctx_->options();
  const bool adjoint_pair = (o.pre_smoother == SmootherKind::gauss_seidel_forward &&
                             o.post_smoother == SmootherKind::gauss_seidel_backward) ||
                            (o.pre_smoother == SmootherKind::gauss_seidel_backward &&
                             o.post_smoother == SmootherKind::gauss_seidel_forward);
  const bool self_adjoint = o.pre_smoother == o.post_smoother &&
                            (o.pre_smoother == SmootherKind::jacobi ||
                             o.pre_smoother == SmootherKind::gauss_seidel_symmetric);
  return ctx_->levels() == 1 || adjoint_pair || self_adjoint;
}

SolveResult mgcg_solve(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                       std::shared_ptr<const MgContext> ctx, const SolveOptions& options) {
  if (ctx->op(ctx->finest_level()).rows() != a.rows()) throw DomainError("mgcg: context does not match operator");
  const MgPreconditioner precond(std::move(ctx));
  SolveResult result = pcg_solve(a, f, x0, precond, options);
  result.report.method = "mgcg";
  return result;
}

SolveResult mg_stationary(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                          const MgContext& ctx, const SolveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveResult result;
  result.report.method = "mg";
  const double scale = residual_scale(f, &result.report.absolute_residual);
  result.x.assign(x0.begin(), x0.end());
  Vector r = a.residual(f, result.x);
  Vector e(r.size());
  result.report.history.push_back(simd::norm2(r) / scale);
  for (int k = 0; result.report.history.back() > options.tolerance && k < options.max_iterations; ++k) {
    ctx.vcycle(r, e, ctx.finest_level());
    simd::axpy(1.0, e, result.x);
    a.residual(f, result.x, r);
    result.report.history.push_back(simd::norm2(r) / scale);
  }
  result.report.iterations = static_cast<int>(result.report.history.size()) - 1;
  result.report.true_residual = result.report.history.back();
  result.report.converged = result.report.true_residual <= options.tolerance;
  result.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

Vector MgcgSolver::solve(const AssembledSystem& system, std::span<const double> rhs) const {
  auto ctx = std::make_shared<const MgContext>(MgContext::build(system.matrix, mesh_, mg_));
  const Vector zero(rhs.size(), 0.0);
  return mgcg_solve(system.A(), rhs, zero, std::move(ctx), options_).x;
}

}  // namespace rbws
