#include "rbws/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace rbws {

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> s, int) const {
  std::copy(r.begin(), r.end(), s.begin());
}

double residual_scale(std::span<const double> f, bool* absolute) {
  const double norm = simd::norm2(f);
  if (absolute) *absolute = norm == 0.0;
  return norm == 0.0 ? 1.0 : norm;
}

namespace {

using Clock = std::chrono::steady_clock;

void check_system(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                  const SolveOptions& options) {
  if (a.rows() != a.cols()) throw DomainError("solve: matrix not square");
  require_size(f.size(), static_cast<std::size_t>(a.rows()), "solve: rhs");
  require_size(x0.size(), static_cast<std::size_t>(a.rows()), "solve: initial guess");
  if (!(options.tolerance > 0.0)) throw DomainError("solve: tolerance must be positive");
  if (options.max_iterations < 0) throw DomainError("solve: negative iteration cap");
}

void finish(const CsrMatrix& a, std::span<const double> f, const Vector& x, double scale,
            double tolerance, SolveReport& report, Clock::time_point start) {
  const Vector r = a.residual(f, x);
  report.true_residual = simd::norm2(r) / scale;
  report.iterations = static_cast<int>(report.history.size()) - 1;
  report.converged = report.history.back() <= tolerance;
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SolveResult pcg_solve(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                      const Preconditioner& precond, const SolveOptions& options) {
  check_system(a, f, x0, options);
  const auto start = Clock::now();
  const std::size_t n = f.size();
  SolveResult result;
  SolveReport& report = result.report;
  report.method = "pcg/" + precond.label();
  const double scale = residual_scale(f, &report.absolute_residual);

  Vector& x = result.x;
  x.assign(x0.begin(), x0.end());
  Vector r = a.residual(f, x);
  Vector s(n), p(n), ap(n);
  double rel = simd::norm2(r) / scale;
  report.history.push_back(rel);

  if (rel > options.tolerance && options.max_iterations > 0) {
    precond.apply(r, s, 0);
    p = s;
    double rs = simd::dot(r, s);
    for (int k = 0; rel > options.tolerance && k < options.max_iterations; ++k) {
      a.multiply(p, ap);
      const double pap = simd::dot(p, ap);
      if (!(pap > 0.0)) {
        throw OperatorError("pcg: breakdown, p^T A p = " + std::to_string(pap) +
                            " (operator or preconditioner not SPD)");
      }
      const double alpha = rs / pap;
      simd::axpy(alpha, p, x);
      simd::axpy(-alpha, ap, r);
      rel = simd::norm2(r) / scale;
      report.history.push_back(rel);
      if (rel <= options.tolerance || k + 1 == options.max_iterations) break;
      precond.apply(r, s, k + 1);
      const double rs_next = simd::dot(r, s);
      const double beta = rs_next / rs;
      if (!std::isfinite(beta)) throw OperatorError("pcg: breakdown, r^T P(r) vanished");
      rs = rs_next;
      simd::xpby(s, beta, p);
    }
  }
  finish(a, f, x, scale, options.tolerance, report, start);
  return result;
}

SolveResult cg_solve(const CsrMatrix& a, std::span<const double> f, std::span<const double> x0,
                     const SolveOptions& options) {
  check_system(a, f, x0, options);
  const auto start = Clock::now();
  const std::size_t n = f.size();
  SolveResult result;
  SolveReport& report = result.report;
  report.method = "cg";
  const double scale = residual_scale(f, &report.absolute_residual);

  Vector& x = result.x;
  x.assign(x0.begin(), x0.end());
  Vector r = a.residual(f, x);
  Vector p = r, ap(n);
  double rr = simd::dot(r, r);
  report.history.push_back(std::sqrt(rr) / scale);
  for (int k = 0; report.history.back() > options.tolerance && k < options.max_iterations; ++k) {
    a.multiply(p, ap);
    const double pap = simd::dot(p, ap);
    if (!(pap > 0.0)) throw OperatorError("cg: breakdown, operator not SPD");
    const double alpha = rr / pap;
    simd::axpy(alpha, p, x);
    simd::axpy(-alpha, ap, r);
    const double rr_next = simd::dot(r, r);
    report.history.push_back(std::sqrt(rr_next) / scale);
    simd::xpby(r, rr_next / rr, p);
    rr = rr_next;
  }
  finish(a, f, x, scale, options.tolerance, report, start);
  return result;
}

namespace {

double diagonal(const CsrMatrix& a, Index i) {
  const std::int64_t pos = a.diag_pos(i);
  const double d = pos >= 0 ? a.values()[pos] : 0.0;
  if (d == 0.0) throw OperatorError("smoother: zero diagonal entry in row " + std::to_string(i));
  return d;
}

void gauss_seidel_row(const CsrMatrix& a, std::span<double> u, std::span<const double> b, Index i) {
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_idx();
  const auto& val = a.values();
  double sum = b[i];
  for (std::int64_t p = ptr[i]; p < ptr[i + 1]; ++p) {
    if (col[p] != i) sum -= val[p] * u[col[p]];
  }
  u[i] = sum / diagonal(a, i);
}

}  // namespace

void smooth(std::span<double> u, const CsrMatrix& a, std::span<const double> b, int sweeps,
            SmootherKind kind) {
  if (sweeps < 0) throw DomainError("smooth: negative sweep count");
  require_size(u.size(), static_cast<std::size_t>(a.rows()), "smooth: u");
  require_size(b.size(), static_cast<std::size_t>(a.rows()), "smooth: b");
  const Index n = a.rows();
  Vector scratch;
  for (int s = 0; s < sweeps; ++s) {
    switch (kind) {
      case SmootherKind::jacobi: {
        scratch = a.residual(b, u);
        for (Index i = 0; i < n; ++i) u[i] += scratch[i] / diagonal(a, i);
        break;
      }
      case SmootherKind::gauss_seidel_forward:
        for (Index i = 0; i < n; ++i) gauss_seidel_row(a, u, b, i);
        break;
      case SmootherKind::gauss_seidel_backward:
        for (Index i = n - 1; i >= 0; --i) gauss_seidel_row(a, u, b, i);
        break;
      case SmootherKind::gauss_seidel_symmetric:
        for (Index i = 0; i < n; ++i) gauss_seidel_row(a, u, b, i);
        for (Index i = n - 1; i >= 0; --i) gauss_seidel_row(a, u, b, i);
        break;
    }
  }
}

}  // namespace rbws
