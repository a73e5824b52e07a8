#include "rbws/warmstart.hpp"

#include <chrono>

namespace rbws {

std::string to_string(MethodId id) {
  switch (id) {
    case MethodId::mgcg:
      return "mgcg";
    case MethodId::rbi_mgcg:
      return "rbi-mgcg";
    case MethodId::rbi_msrbcg:
      return "rbi-msrbcg";
  }
  return "?";
}

MethodId method_from_string(std::string_view name) {
  if (name == "mgcg") return MethodId::mgcg;
  if (name == "rbi-mgcg") return MethodId::rbi_mgcg;
  if (name == "rbi-msrbcg") return MethodId::rbi_msrbcg;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

MethodConfig MethodConfig::standard(MethodId id, int rb_dimension, double tolerance, int max_iterations) {
  MethodConfig cfg;
  cfg.id = id;
  cfg.tolerance = tolerance;
  cfg.max_iterations = max_iterations;
  cfg.rb_dimension = id == MethodId::mgcg ? 0 : rb_dimension;
  switch (id) {
    case MethodId::mgcg:
      break;
    case MethodId::rbi_mgcg:
      cfg.initializer = InitializerKind::l1roc;
      break;
    case MethodId::rbi_msrbcg:
      cfg.initializer = InitializerKind::pod;
      cfg.preconditioner = PreconditionerKind::msrb;
      break;
  }
  return cfg;
}

std::string MethodConfig::label() const {
  return id == MethodId::mgcg ? to_string(id) : to_string(id) + "(N=" + std::to_string(rb_dimension) + ")";
}

void validate(const MethodConfig& cfg, const TrainedModels& models, Index system_size) {
  if (!(cfg.tolerance > 0.0 && cfg.tolerance <= 1.0)) throw ConfigError("method: tolerance must lie in (0, 1]");
  if (cfg.max_iterations < 0) throw ConfigError("method: negative iteration cap");
  if (cfg.initializer == InitializerKind::l1roc) {
    if (!models.l1roc) throw ConfigError(cfg.label() + ": no L1ROC model");
    if (cfg.rb_dimension < 1 || cfg.rb_dimension > models.l1roc->dimension()) {
      throw ConfigError(cfg.label() + ": L1ROC model has dimension " + std::to_string(models.l1roc->dimension()));
    }
    if (models.l1roc->full_size() != system_size) throw ConfigError(cfg.label() + ": L1ROC model size mismatch");
  }
  if (cfg.initializer == InitializerKind::pod || cfg.preconditioner == PreconditionerKind::msrb) {
    if (!models.msrb) throw ConfigError(cfg.label() + ": no POD/MSRB hierarchy");
    // A POD space smaller than N means the snapshots had lower numerical rank; it is used as is.
    if (models.msrb->initial.basis.rows() != system_size && models.msrb->initial.dimension() > 0) {
      throw ConfigError(cfg.label() + ": POD model size mismatch");
    }
  }
  if (cfg.preconditioner == PreconditionerKind::multigrid && !models.mesh) {
    throw ConfigError(cfg.label() + ": no mesh hierarchy for the multigrid preconditioner");
  }
}

double initial_residual(const CsrMatrix& a, std::span<const double> f, std::span<const double> u0, bool* absolute) {
  const Vector r = a.residual(f, u0);
  return simd::norm2(r) / residual_scale(f, absolute);
}

Vector initial_guess(const AssembledSystem& system, const MethodConfig& cfg, const TrainedModels& models) {
  switch (cfg.initializer) {
    case InitializerKind::zero:
      return Vector(system.rhs.size(), 0.0);
    case InitializerKind::l1roc: {
      const L1rocModel model = cfg.rb_dimension == models.l1roc->dimension()
                                   ? *models.l1roc
                                   : models.l1roc->truncated(cfg.rb_dimension);
      return l1roc_online(model, system.A(), system.rhs).solution;
    }
    case InitializerKind::pod: {
      const PodBasis pod = models.msrb->initial.truncated(std::min(cfg.rb_dimension, models.msrb->initial.dimension()));
      if (pod.dimension() == 0) return Vector(system.rhs.size(), 0.0);
      return rbm_pod_solve(system.A(), system.rhs, pod.basis);
    }
  }
  return {};
}

SolveResult rbi_pcg_solve(const AssembledSystem& system, const MethodConfig& cfg, const TrainedModels& models) {
  validate(cfg, models, system.size());
  const auto start = std::chrono::steady_clock::now();
  const Vector x0 = initial_guess(system, cfg, models);
  const SolveOptions options{cfg.tolerance, cfg.max_iterations};
  SolveResult result;
  if (cfg.preconditioner == PreconditionerKind::multigrid) {
    auto ctx = std::make_shared<const MgContext>(MgContext::build(system.matrix, models.mesh, models.mg));
    result = pcg_solve(system.A(), system.rhs, x0, MgPreconditioner(std::move(ctx)), options);
  } else {
    result = pcg_solve(system.A(), system.rhs, x0, MsrbPreconditioner(system.matrix, models.msrb), options);
  }
  result.report.method = cfg.label();
  result.report.mu = system.mu;
  result.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace rbws
