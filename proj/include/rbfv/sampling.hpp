#pragma once

#include "rbfv/mpfa.hpp"

#include <cstdint>
#include <random>

namespace rbfv {

/// Deterministic 64-bit PRNG: std::mt19937_64 (bit-exact across platforms)
/// with an explicit 53-bit mantissa mapping, avoiding the
/// implementation-defined standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Log-uniform over [a, b], a, b > 0.
  double log_uniform(double a, double b) {
    return std::exp(std::log(a) + (std::log(b) - std::log(a)) * uniform01());
  }

 private:
  std::mt19937_64 engine_;
};

/// Log-uniform parameter sample over the two permeability ranges.
std::vector<ParameterPoint> sample_parameters(int count,
                                              const std::array<double, 2>& kappa1_range,
                                              const std::array<double, 2>& kappa2_range,
                                              std::uint64_t seed);

/// Euclidean distance in (log10 kappa1, log10 kappa2).
double log_distance(const ParameterPoint& a, const ParameterPoint& b);

}  // namespace rbfv
