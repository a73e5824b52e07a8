#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rbws/bench.hpp"

namespace rbws {

std::vector<ParamPoint> lhs_sample(int p, int n, const ParamBox& bounds, std::uint64_t seed) {
  if (n < 1) throw DomainError("lhs_sample: need n >= 1");
  if (p < 1 || static_cast<std::size_t>(p) != bounds.lower.size()) {
    throw DomainError("lhs_sample: dimension does not match the bounds");
  }
  bounds.validate();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ParamPoint> out(static_cast<std::size_t>(n));
  for (auto& pt : out) pt.values.resize(static_cast<std::size_t>(p));

  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int d = 0; d < p; ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const double lo = bounds.lower[static_cast<std::size_t>(d)];
    const double width = (bounds.upper[static_cast<std::size_t>(d)] - lo) / n;
    for (int i = 0; i < n; ++i) {
      const int stratum = perm[static_cast<std::size_t>(i)];
      const double left = lo + stratum * width;
      const double right = std::nextafter(lo + (stratum + 1) * width, left);
      out[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(d)] =
          std::clamp(left + unit(rng) * width, left, right);
    }
  }
  return out;
}

}  // namespace rbws
