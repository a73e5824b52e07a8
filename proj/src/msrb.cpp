#include "rbws/msrb.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <sstream>

namespace rbws {

const Eigen::MatrixXd* MsrbHierarchy::basis_for(int k) const noexcept {
  if (iteration_bases.empty()) return nullptr;
  const auto idx = static_cast<std::size_t>(std::clamp(k, 0, max_spaces() - 1));
  return &iteration_bases[idx];
}

Vector msrb_apply(std::span<const double> b, const CsrMatrix& a, const Eigen::MatrixXd& basis,
                  SmootherKind smoother) {
  Vector u(b.size(), 0.0);
  smooth(u, a, b, 1, smoother);
  if (basis.cols() == 0) return u;
  const Vector r = a.residual(b, u);
  RbGalerkinSolver(a, basis).solve_add(r, u);
  return u;
}

MsrbPreconditioner::MsrbPreconditioner(std::shared_ptr<const CsrMatrix> a,
                                       std::shared_ptr<const MsrbHierarchy> hierarchy)
    : a_(std::move(a)), hierarchy_(std::move(hierarchy)) {
  solvers_.reserve(hierarchy_->iteration_bases.size());
  for (const Eigen::MatrixXd& w : hierarchy_->iteration_bases) solvers_.emplace_back(*a_, w);
}

void MsrbPreconditioner::apply(std::span<const double> r, std::span<double> s, int iteration) const {
  std::fill(s.begin(), s.end(), 0.0);
  smooth(s, *a_, r, 1, hierarchy_->smoother);
  if (solvers_.empty()) return;
  const auto k = static_cast<std::size_t>(std::clamp(iteration, 0, static_cast<int>(solvers_.size()) - 1));
  if (solvers_[k].dimension() == 0) return;
  const Vector half = a_->residual(r, s);
  solvers_[k].solve_add(half, s);
}

SolveResult msrbcg_solve(std::shared_ptr<const CsrMatrix> a, std::span<const double> f,
                         std::span<const double> x0, std::shared_ptr<const MsrbHierarchy> hierarchy,
                         const SolveOptions& options) {
  const CsrMatrix& op = *a;
  const MsrbPreconditioner precond(std::move(a), std::move(hierarchy));
  SolveResult result = pcg_solve(op, f, x0, precond, options);
  result.report.method = "msrbcg";
  return result;
}

RichardsonResult msrb_richardson(const CsrMatrix& a, std::span<const double> f, const MsrbHierarchy& hierarchy,
                                 const SolveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RichardsonResult out;
  out.report.method = "msrb-richardson";
  const double scale = residual_scale(f, &out.report.absolute_residual);

  std::vector<RbGalerkinSolver> solvers;
  for (const Eigen::MatrixXd& w : hierarchy.iteration_bases) solvers.emplace_back(a, w);

  out.x = hierarchy.initial.dimension() > 0 ? rbm_pod_solve(a, f, hierarchy.initial.basis) : Vector(f.size(), 0.0);
  Vector r = a.residual(f, out.x);
  out.report.history.push_back(simd::norm2(r) / scale);
  Vector correction(f.size());
  for (int k = 1; out.report.history.back() > options.tolerance && k <= options.max_iterations; ++k) {
    std::fill(correction.begin(), correction.end(), 0.0);
    smooth(correction, a, r, 1, hierarchy.smoother);
    simd::axpy(1.0, correction, out.x);
    Vector half = a.residual(f, out.x);
    if (!solvers.empty()) {
      const auto idx = static_cast<std::size_t>(std::min(k - 1, static_cast<int>(solvers.size()) - 1));
      solvers[idx].solve_add(half, out.x);
    }
    out.half_step_residuals.push_back(std::move(half));
    a.residual(f, out.x, r);
    out.report.history.push_back(simd::norm2(r) / scale);
  }
  out.report.iterations = static_cast<int>(out.report.history.size()) - 1;
  out.report.true_residual = out.report.history.back();
  out.report.converged = out.report.true_residual <= options.tolerance;
  out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Per-parameter CG state of the simulated RBI-MSRBCG run.
struct CgState {
  Vector x, r, p;
  double rs = 0.0;
  double scale = 1.0;
  bool done = false;
};

std::string describe(const ParamPoint& mu) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < mu.size(); ++i) os << (i ? ", " : "") << mu[i];
  os << ')';
  return os.str();
}

// Keeps assembled systems in memory when they fit a modest budget.
class SystemSource {
 public:
  SystemSource(const DiscreteProblem& problem, std::span<const ParamPoint> train)
      : problem_(problem), train_(train) {
    constexpr double kBudgetBytes = 256.0 * 1024 * 1024;
    const double per_system = static_cast<double>(problem.size()) * 27.0 * 12.0;
    if (per_system * static_cast<double>(train.size()) <= kBudgetBytes) cache_.resize(train.size());
  }

  AssembledSystem get(std::size_t i) {
    if (cache_.empty()) return problem_.assemble(train_[i]);
    if (!cache_[i]) cache_[i] = problem_.assemble(train_[i]);
    return *cache_[i];
  }

 private:
  const DiscreteProblem& problem_;
  std::span<const ParamPoint> train_;
  std::vector<std::optional<AssembledSystem>> cache_;
};

}  // namespace

MsrbHierarchy msrb_train(const DiscreteProblem& problem, std::span<const ParamPoint> train,
                         const MsrbTrainOptions& options, const LinearSolver& hf_solver) {
  if (train.empty()) throw DomainError("msrb_train: empty training set");
  if (options.max_spaces < 0 || options.rb_dimension < 0) throw DomainError("msrb_train: negative size");
  MsrbHierarchy hier;
  hier.rb_dimension = options.rb_dimension;
  hier.smoother = options.smoother;
  SystemSource systems(problem, train);

  auto checked_solve = [&](const AssembledSystem& sys, std::span<const double> rhs, int k) {
    Vector sol = hf_solver.solve(sys, rhs);
    const double rel = simd::norm2(sys.A().residual(rhs, sol)) / residual_scale(rhs);
    if (!(rel <= options.solve_tolerance)) {
      throw OperatorError("msrb_train: training solve failed at mu = " + describe(sys.mu) + ", k = " +
                          std::to_string(k) + " (relative residual " + std::to_string(rel) + ")");
    }
    if (k >= 0) hier.max_error_equation_residual = std::max(hier.max_error_equation_residual, rel);
    return sol;
  };

  std::vector<Vector> snapshots;
  snapshots.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const AssembledSystem sys = systems.get(i);
    snapshots.push_back(checked_solve(sys, sys.rhs, -1));
  }
  hier.initial = pod_build(snapshots, options.rb_dimension);
  snapshots.clear();

  std::vector<CgState> states(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const AssembledSystem sys = systems.get(i);
    CgState& st = states[i];
    st.scale = residual_scale(sys.rhs);
    st.x = hier.initial.dimension() > 0 ? rbm_pod_solve(sys.A(), sys.rhs, hier.initial.basis)
                                         : Vector(sys.rhs.size(), 0.0);
    st.r = sys.A().residual(sys.rhs, st.x);
    st.p.assign(st.r.size(), 0.0);
  }

  for (int k = 0; k < options.max_spaces; ++k) {
    std::vector<Vector> errors, rhss;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < train.size(); ++i) {
      CgState& st = states[i];
      if (st.done) continue;
      const double rnorm = simd::norm2(st.r);
      if (rnorm == 0.0 || rnorm / st.scale <= options.stop_tolerance) {
        st.done = true;
        continue;
      }
      const AssembledSystem sys = systems.get(i);
      Vector rhs = st.r;
      if (options.source == ErrorSnapshotSource::half_step_residual) {
        Vector smoothed(st.r.size(), 0.0);
        smooth(smoothed, sys.A(), st.r, 1, options.smoother);
        rhs = sys.A().residual(st.r, smoothed);
      }
      errors.push_back(checked_solve(sys, rhs, k));
      rhss.push_back(std::move(rhs));
      active.push_back(i);
    }
    if (active.empty()) break;
    hier.iteration_bases.push_back(pod_build(errors, options.rb_dimension).basis);
    std::vector<double> spectrum = correlation_spectrum(rhss);
    const double top = spectrum.front();
    for (double& v : spectrum) v = top > 0.0 ? v / top : 0.0;
    if (top == 0.0) spectrum.front() = 1.0;
    hier.residual_spectra.push_back(std::move(spectrum));
    errors.clear();
    rhss.clear();

    // Advance every active CG run by one step with the new space, mirroring pcg_solve.
    const Eigen::MatrixXd& w = hier.iteration_bases.back();
    for (std::size_t i : active) {
      CgState& st = states[i];
      const AssembledSystem sys = systems.get(i);
      const CsrMatrix& a = sys.A();
      Vector s(st.r.size(), 0.0);
      smooth(s, a, st.r, 1, options.smoother);
      if (w.cols() > 0) RbGalerkinSolver(a, w).solve_add(a.residual(st.r, s), s);
      const double rs_next = simd::dot(st.r, s);
      if (k == 0) {
        st.p = s;
      } else {
        simd::xpby(s, rs_next / st.rs, st.p);
      }
      st.rs = rs_next;
      const Vector ap = a.multiply(st.p);
      const double pap = simd::dot(st.p, ap);
      if (!(pap > 0.0)) {
        st.done = true;
        continue;
      }
      const double alpha = st.rs / pap;
      simd::axpy(alpha, st.p, st.x);
      simd::axpy(-alpha, ap, st.r);
    }
  }
  return hier;
}

}  // namespace rbws
