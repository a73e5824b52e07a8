#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "rbws/krylov.hpp"
#include "rbws/msrb.hpp"
#include "rbws/multigrid.hpp"
#include "rbws/reduced_basis.hpp"

namespace rbws {

enum class MethodId { mgcg, rbi_mgcg, rbi_msrbcg };
enum class InitializerKind { zero, l1roc, pod };
enum class PreconditionerKind { multigrid, msrb };

std::string to_string(MethodId id);
MethodId method_from_string(std::string_view name);

struct MethodConfig {
  MethodId id = MethodId::mgcg;
  InitializerKind initializer = InitializerKind::zero;
  PreconditionerKind preconditioner = PreconditionerKind::multigrid;
  double tolerance = 1e-16;
  int max_iterations = 40;
  int rb_dimension = 0;

  // Standard pairings: mgcg = zero + MG, rbi-mgcg = L1ROC + MG,
  // rbi-msrbcg = POD + MSRB.
  static MethodConfig standard(MethodId id, int rb_dimension, double tolerance = 1e-16, int max_iterations = 40);
  std::string label() const;
};

struct TrainedModels {
  std::shared_ptr<const MeshHierarchy> mesh;
  MgOptions mg;
  std::shared_ptr<const L1rocModel> l1roc;
  std::shared_ptr<const MsrbHierarchy> msrb;
};

// Throws ConfigError when the models needed by cfg are missing or too small.
void validate(const MethodConfig& cfg, const TrainedModels& models, Index system_size);

// The initial guess cfg prescribes.
Vector initial_guess(const AssembledSystem& system, const MethodConfig& cfg, const TrainedModels& models);

// ||f - A u0|| / ||f||; absolute norm (flagged) when f == 0.
double initial_residual(const CsrMatrix& a, std::span<const double> f, std::span<const double> u0,
                        bool* absolute = nullptr);

// RB initial guess followed by one continuous PCG run with the configured
// preconditioner. Report timing covers initializer, preconditioner setup and
// iterations; assembly is excluded.
SolveResult rbi_pcg_solve(const AssembledSystem& system, const MethodConfig& cfg, const TrainedModels& models);

}  // namespace rbws
