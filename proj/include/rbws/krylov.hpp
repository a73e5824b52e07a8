#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "rbws/common.hpp"
#include "rbws/grid_fem.hpp"
#include "rbws/sparse.hpp"

namespace rbws {

// s = P(r, k). Implementations must be linear in r for fixed k and safe for
// concurrent const application.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> s, int iteration) const = 0;
  virtual bool is_symmetric() const { return false; }
  virtual std::string label() const = 0;

  Vector apply(std::span<const double> r, int iteration = 0) const {
    Vector s(r.size());
    apply(r, s, iteration);
    return s;
  }
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::span<const double> r, std::span<double> s, int) const override;
  bool is_symmetric() const override { return true; }
  std::string label() const override { return "identity"; }
};

class FunctionPreconditioner final : public Preconditioner {
 public:
  using Fn = std::function<void(std::span<const double>, std::span<double>, int)>;
  FunctionPreconditioner(Fn fn, std::string label, bool symmetric = false)
      : fn_(std::move(fn)), label_(std::move(label)), symmetric_(symmetric) {}
  void apply(std::span<const double> r, std::span<double> s, int k) const override { fn_(r, s, k); }
  bool is_symmetric() const override { return symmetric_; }
  std::string label() const override { return label_; }

 private:
  Fn fn_;
  std::string label_;
  bool symmetric_;
};

struct SolveOptions {
  double tolerance = 1e-16;  // relative residual target
  int max_iterations = 40;
};

struct SolveReport {
  int iterations = 0;
  // Relative residual norms ||r^(k)|| / ||f||, k = 0..iterations. Entry 0 is
  // computed from the initial guess; later entries follow the CG recurrence.
  std::vector<double> history;
  bool converged = false;
  // ||f - A x|| / ||f|| recomputed from the returned iterate.
  double true_residual = 0.0;
  // ||f|| == 0: history holds absolute norms instead.
  bool absolute_residual = false;
  double seconds = 0.0;
  std::string method;
  ParamPoint mu;
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

// Preconditioned conjugate gradients with an iteration-indexed preconditioner.
// Throws OperatorError when p^T A p <= 0 for a nonzero direction.
SolveResult pcg_solve(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                      const Preconditioner& precond, const SolveOptions& options);

// Unpreconditioned CG in its textbook r^T r form.
SolveResult cg_solve(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                     const SolveOptions& options);

enum class SmootherKind { jacobi, gauss_seidel_forward, gauss_seidel_backward, gauss_seidel_symmetric };

// Applies `sweeps` stationary sweeps of the chosen smoother to u in place.
// Throws OperatorError on a zero or missing diagonal entry.
void smooth(std::span<double> u, const CsrMatrix& a, std::span<const double> b, int sweeps,
            SmootherKind kind);

// Norm of f for residual normalisation; returns 1 (and sets *absolute) when f == 0.
double residual_scale(std::span<const double> f, bool* absolute = nullptr);

// Solves A x = b to a relative tolerance; used for training snapshots.
class LinearSolver {
 public:
  virtual ~LinearSolver() = default;
  virtual Vector solve(const AssembledSystem& system, std::span<const double> rhs) const = 0;
};

}  // namespace rbws
