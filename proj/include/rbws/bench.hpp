#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rbws/grid_fem.hpp"
#include "rbws/krylov.hpp"
#include "rbws/reduced_basis.hpp"

namespace rbws {

// Latin hypercube design: per axis, each of the n strata holds one sample.
std::vector<ParamPoint> lhs_sample(int p, int n, const ParamBox& bounds, std::uint64_t seed);

// Mean over reports of history[k], with converged histories carried forward.
double average_residual(std::span<const SolveReport> reports, int k);
// r_ave^(k) for k = 0..max history length - 1.
std::vector<double> average_residual_curve(std::span<const SolveReport> reports);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// t_off / (t_on_base - t_on_rbws); infinity when the saving is not positive.
double break_even(double t_off, double t_on_base, double t_on_rbws);

struct AccuracyPoint {
  int n = 0;
  double r = 1.0;
};

// r_N = max over params of ||f - A W_N u_N|| / ||f|| with the N-prefix of the
// model. N = 0 gives r_0 = 1.
std::vector<AccuracyPoint> rb_accuracy_curve(const L1rocModel& model, const DiscreteProblem& problem,
                                             std::span<const ParamPoint> params, std::span<const int> dims);

struct Spectrum {
  std::vector<double> values;  // lambda_n / lambda_max, descending
  bool trivial = false;        // all snapshots were zero
};

Spectrum residual_spectrum(std::span<const Vector> snapshots);
int count_above(std::span<const double> values, double threshold);

// Shortest decimal that parses back to the same double; "inf" for infinity.
std::string format_double(double v);
double parse_double(const std::string& text);

}  // namespace rbws
