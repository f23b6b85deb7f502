#pragma once

#include <cstdint>
#include <random>

namespace coopeq::detail {

// Uniform doubles built directly from the top 53 bits of mt19937_64 output.
// std::uniform_real_distribution is implementation-defined, which would break
// byte-identical reruns across standard libraries.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// Inclusive bounds. Modulo bias is negligible for the tiny ranges used here
// and keeps the draw count per call fixed, which determinism relies on.
inline int uniform_int(std::mt19937_64& g, int lo, int hi) {
  return lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace coopeq::detail
