#include "rbfv/sampling.hpp"

#include <cmath>

namespace rbfv {

std::vector<ParameterPoint> sample_parameters(int count,
                                              const std::array<double, 2>& kappa1_range,
                                              const std::array<double, 2>& kappa2_range,
                                              std::uint64_t seed) {
  if (count < 1) throw ConfigError("parameter sample count must be >= 1");
  for (auto& r : {kappa1_range, kappa2_range})
    if (!(r[0] > 0.0) || !(r[1] >= r[0]))
      throw ConfigError("permeability ranges must be positive and ordered");
  Rng rng(seed);
  std::vector<ParameterPoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    ParameterPoint xi;
    xi.kappa1 = rng.log_uniform(kappa1_range[0], kappa1_range[1]);
    xi.kappa2 = rng.log_uniform(kappa2_range[0], kappa2_range[1]);
    out.push_back(xi);
  }
  return out;
}

double log_distance(const ParameterPoint& a, const ParameterPoint& b) {
  const double d1 = std::log10(a.kappa1) - std::log10(b.kappa1);
  const double d2 = std::log10(a.kappa2) - std::log10(b.kappa2);
  return std::sqrt(d1 * d1 + d2 * d2);
}

}  // namespace rbfv
