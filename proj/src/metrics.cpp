#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "rbws/bench.hpp"
#include "rbws/simd.hpp"

namespace rbws {

namespace {

double history_at(const SolveReport& report, std::size_t k) {
  if (report.history.empty()) throw DomainError("average_residual: empty history");
  return report.history[std::min(k, report.history.size() - 1)];
}

}  // namespace

double average_residual(std::span<const SolveReport> reports, int k) {
  if (reports.empty()) throw DomainError("average_residual: no reports");
  if (k < 0) throw DomainError("average_residual: negative iteration");
  double sum = 0.0;
  for (const auto& r : reports) sum += history_at(r, static_cast<std::size_t>(k));
  return sum / static_cast<double>(reports.size());
}

std::vector<double> average_residual_curve(std::span<const SolveReport> reports) {
  if (reports.empty()) throw DomainError("average_residual: no reports");
  std::size_t len = 0;
  for (const auto& r : reports) len = std::max(len, r.history.size());
  std::vector<double> curve(len);
  for (std::size_t k = 0; k < len; ++k) curve[k] = average_residual(reports, static_cast<int>(k));
  return curve;
}

double break_even(double t_off, double t_on_base, double t_on_rbws) {
  if (t_off < 0.0 || t_on_base < 0.0 || t_on_rbws < 0.0) throw DomainError("break_even: negative time");
  const double saving = t_on_base - t_on_rbws;
  return saving > 0.0 ? t_off / saving : kInfinity;
}

std::vector<AccuracyPoint> rb_accuracy_curve(const L1rocModel& model, const DiscreteProblem& problem,
                                             std::span<const ParamPoint> params, std::span<const int> dims) {
  if (params.empty()) throw DomainError("rb_accuracy_curve: no parameters");
  for (int n : dims) {
    if (n < 0 || n > model.dimension()) {
      throw DomainError("rb_accuracy_curve: N = " + std::to_string(n) + " exceeds trained dimension " +
                        std::to_string(model.dimension()));
    }
  }
  std::vector<L1rocModel> prefixes;
  prefixes.reserve(dims.size());
  for (int n : dims) prefixes.push_back(n > 0 ? model.truncated(n) : L1rocModel{});

  std::vector<AccuracyPoint> out(dims.size());
  for (std::size_t j = 0; j < dims.size(); ++j) out[j] = {dims[j], dims[j] == 0 ? 1.0 : 0.0};
  for (const auto& mu : params) {
    const AssembledSystem sys = problem.assemble(mu);
    const double scale = residual_scale(sys.rhs);
    for (std::size_t j = 0; j < dims.size(); ++j) {
      if (dims[j] == 0) continue;
      const OnlineSolution online = l1roc_online(prefixes[j], sys.A(), sys.rhs);
      const double r = simd::norm2(sys.A().residual(sys.rhs, online.solution)) / scale;
      out[j].r = std::max(out[j].r, r);
    }
  }
  return out;
}

Spectrum residual_spectrum(std::span<const Vector> snapshots) {
  if (snapshots.empty()) throw DomainError("residual_spectrum: no snapshots");
  Spectrum s;
  s.values = correlation_spectrum(snapshots);
  const double top = s.values.empty() ? 0.0 : s.values.front();
  if (!(top > 0.0)) {
    s.values.assign(1, 1.0);
    s.trivial = true;
    return s;
  }
  for (double& v : s.values) v /= top;
  s.values.front() = 1.0;
  return s;
}

int count_above(std::span<const double> values, double threshold) {
  return static_cast<int>(std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; }));
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "inf") return kInfinity;
  if (text == "-inf") return -kInfinity;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw ConfigError("not a number: '" + text + "'");
  return v;
}

}  // namespace rbws
