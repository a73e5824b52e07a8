#include <Eigen/QR>
#include <algorithm>
#include <random>

#include "rbws/reduced_basis.hpp"

namespace rbws {

std::vector<Index> L1rocModel::collocation_points() const {
  std::vector<Index> points = solution_points;
  points.insert(points.end(), residual_points.begin(), residual_points.end());
  return points;
}

L1rocModel L1rocModel::truncated(int n) const {
  if (n < 1 || n > dimension()) throw DomainError("L1rocModel::truncated: bad dimension");
  L1rocModel out;
  out.basis = basis.leftCols(n);
  out.snapshot_transform = snapshot_transform.topLeftCorner(n, n);
  out.solution_points.assign(solution_points.begin(), solution_points.begin() + n);
  out.residual_points.assign(residual_points.begin(), residual_points.begin() + (n - 1));
  out.parameters.assign(parameters.begin(), parameters.begin() + n);
  out.indicator_history.assign(indicator_history.begin(),
                               indicator_history.begin() + std::min<std::size_t>(indicator_history.size(), n - 1));
  out.saturated = saturated && n == dimension();
  return out;
}

namespace {

OnlineSolution solve_collocated(const L1rocModel& model, const CsrMatrix& rows, std::span<const double> rhs) {
  const int n = model.dimension();
  if (n == 0) throw DomainError("l1roc_online: empty model");
  const auto m = static_cast<Eigen::Index>(rows.rows());
  require_size(static_cast<std::size_t>(m), static_cast<std::size_t>(2 * n - 1), "l1roc_online: sampled rows");
  require_size(static_cast<std::size_t>(rows.cols()), static_cast<std::size_t>(model.full_size()),
               "l1roc_online: operator width");

  // (P A W) is M x N.
  Eigen::MatrixXd sampled = Eigen::MatrixXd::Zero(m, n);
  const auto& ptr = rows.row_ptr();
  const auto& col = rows.col_idx();
  const auto& val = rows.values();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::int64_t p = ptr[i]; p < ptr[i + 1]; ++p) sampled.row(i) += val[p] * model.basis.row(col[p]);
  }
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), m);

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sampled);
  if (qr.rank() < n) {
    throw IllConditionedModelError("l1roc_online: collocated least-squares matrix is rank deficient");
  }
  OnlineSolution out;
  out.reduced = qr.solve(b);
  out.snapshot_coefficients = model.snapshot_transform * out.reduced;
  out.indicator = out.snapshot_coefficients.cwiseAbs().sum();
  const Eigen::VectorXd full = model.basis * out.reduced;
  out.solution.assign(full.data(), full.data() + full.size());
  return out;
}

}  // namespace

OnlineSolution l1roc_online(const L1rocModel& model, const CsrMatrix& a, std::span<const double> b) {
  require_size(b.size(), static_cast<std::size_t>(a.rows()), "l1roc_online: rhs");
  const std::vector<Index> points = model.collocation_points();
  Vector sampled_rhs;
  sampled_rhs.reserve(points.size());
  for (Index p : points) sampled_rhs.push_back(b[static_cast<std::size_t>(p)]);
  return solve_collocated(model, a.select_rows(points), sampled_rhs);
}

OnlineSolution l1roc_online(const L1rocModel& model, const SampledRows& rows) {
  return solve_collocated(model, rows.rows, rows.rhs);
}

namespace {

void append_column(Eigen::MatrixXd& m, const Vector& column) {
  const Eigen::Index rows = static_cast<Eigen::Index>(column.size());
  if (m.cols() == 0) m.resize(rows, 0);
  m.conservativeResize(rows, m.cols() + 1);
  m.col(m.cols() - 1) = Eigen::Map<const Eigen::VectorXd>(column.data(), rows);
}

// T_n = [T_{n-1}, (e_n - [T_{n-1} c; 0]) / pivot], with pivot = rho[index] before scaling.
void extend_transform(Eigen::MatrixXd& t, const Eigen::VectorXd& coefficients, double pivot) {
  const Eigen::Index n = t.cols();
  Eigen::VectorXd column = Eigen::VectorXd::Zero(n + 1);
  column(n) = 1.0;
  if (n > 0) column.head(n) -= t * coefficients;
  column /= pivot;
  t.conservativeResize(n + 1, n + 1);
  t.row(n).setZero();
  t.col(n) = column;
}

}  // namespace

L1rocModel l1roc_offline(const DiscreteProblem& problem, std::span<const ParamPoint> train,
                         const L1rocOptions& options, const LinearSolver& hf_solver) {
  if (train.empty()) throw DomainError("l1roc_offline: empty training set");
  if (options.dimension < 1 || static_cast<std::size_t>(options.dimension) > train.size()) {
    throw DomainError("l1roc_offline: need 1 <= N <= #training parameters");
  }

  L1rocModel model;
  model.snapshot_transform.resize(0, 0);
  Eigen::MatrixXd residual_basis;
  std::vector<Index> used_points;
  std::vector<std::size_t> chosen;

  // Adds a solution snapshot; returns the assembled system at its parameter.
  auto add_snapshot = [&](std::size_t which) {
    const ParamPoint& mu = train[which];
    AssembledSystem sys = problem.assemble(mu);
    const Vector snapshot = hf_solver.solve(sys, sys.rhs);
    const DeimStep step = deim_extend(model.basis, model.solution_points, snapshot, used_points);
    extend_transform(model.snapshot_transform, step.coefficients, step.pivot);
    append_column(model.basis, step.column);
    model.solution_points.push_back(step.index);
    used_points.push_back(step.index);
    model.parameters.push_back(mu);
    chosen.push_back(which);
    return sys;
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> first(0, train.size() - 1);
  add_snapshot(first(rng));

  for (int n = 2; n <= options.dimension; ++n) {
    const std::vector<Index> points = model.collocation_points();
    double best = -1.0;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const OnlineSolution online = l1roc_online(model, problem.assemble_rows(train[i], points));
      if (online.indicator > best) {
        best = online.indicator;
        best_index = i;
      }
    }
    model.indicator_history.push_back(best);
    if (std::find(chosen.begin(), chosen.end(), best_index) != chosen.end()) {
      model.saturated = true;
      break;
    }

    // Residual of the current (n-1)-dimensional model at the new parameter;
    // computed before the basis grows.
    const L1rocModel previous = model;
    const AssembledSystem sys = add_snapshot(best_index);
    const OnlineSolution prev_online = l1roc_online(previous, sys.A(), sys.rhs);
    const Vector residual = sys.A().residual(sys.rhs, prev_online.solution);

    std::vector<Index> residual_points = model.residual_points;
    const DeimStep rstep = deim_extend(residual_basis, residual_points, residual, used_points);
    append_column(residual_basis, rstep.column);
    model.residual_points.push_back(rstep.index);
    used_points.push_back(rstep.index);
  }
  return model;
}

}  // namespace rbws
