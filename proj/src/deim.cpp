#include <algorithm>
#include <cmath>

#include "rbws/reduced_basis.hpp"

namespace rbws {

DeimStep deim_extend(const Eigen::MatrixXd& basis, std::span<const Index> points, std::span<const double> v,
                     std::span<const Index> excluded) {
  const auto n = static_cast<Eigen::Index>(v.size());
  const Eigen::Index m = basis.cols();
  if (m > 0) require_size(static_cast<std::size_t>(basis.rows()), v.size(), "deim: basis rows");
  require_size(points.size(), static_cast<std::size_t>(m), "deim: interpolation points");

  DeimStep step;
  Eigen::Map<const Eigen::VectorXd> vv(v.data(), n);
  Eigen::VectorXd rho = vv;
  step.coefficients = Eigen::VectorXd::Zero(m);
  if (m > 0) {
    Eigen::MatrixXd pw(m, m);
    Eigen::VectorXd pv(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      pw.row(i) = basis.row(points[i]);
      pv(i) = vv(points[i]);
    }
    step.coefficients = pw.partialPivLu().solve(pv);
    rho -= basis * step.coefficients;
  }

  std::vector<char> blocked(static_cast<std::size_t>(n), 0);
  for (Index e : excluded) {
    if (e >= 0 && e < n) blocked[e] = 1;
  }
  double best = -1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!blocked[i] && std::abs(rho(i)) > best) {
      best = std::abs(rho(i));
      step.index = static_cast<Index>(i);
    }
  }
  const double vmax = vv.cwiseAbs().maxCoeff();
  if (step.index < 0 || !(best > 1e-14 * vmax)) {
    throw DependentSnapshotError("deim: vector is (numerically) interpolated by the current basis");
  }
  step.pivot = rho(step.index);
  rho /= step.pivot;
  step.column.assign(rho.data(), rho.data() + n);
  return step;
}

double l1_indicator(std::span<const double> coefficients) {
  double sum = 0.0;
  for (double c : coefficients) sum += std::abs(c);
  return sum;
}

}  // namespace rbws
