#pragma once

// Deterministic generator for data/synthetic_decisions.csv. The committed file
// was produced by exactly this code with seed 20260823; a test regenerates the
// bytes and compares them against the checkout so the fixture cannot drift
// from its recipe.

#include <cstdint>
#include <random>
#include <string>

namespace coopeq::testing {

inline constexpr std::uint64_t kFixtureSeed = 20260823;

inline double fixture_uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw from an integer-valued distribution given cumulative
// weights; avoids std::discrete_distribution, whose output is unspecified
// across standard-library implementations.
template <std::size_t K>
int fixture_draw(std::mt19937_64& g, const double (&cumulative)[K]) {
  const double u = fixture_uniform01(g) * cumulative[K - 1];
  for (std::size_t i = 0; i < K; ++i)
    if (u < cumulative[i]) return static_cast<int>(i);
  return static_cast<int>(K - 1);
}

// Two public-goods conditions ("small", "large") of 30 subjects each on a
// ten-token endowment. The large-group weights tilt toward higher
// contributions so the file exercises a clear cross-condition contrast.
inline std::string synthetic_decisions_csv() {
  std::mt19937_64 g(kFixtureSeed);

  // P(contribution = k), k = 0..10, scaled by 100 and accumulated.
  const double small_cum[11] = {38, 44, 52, 58, 64, 78, 82, 86, 90, 92, 100};
  const double large_cum[11] = {14, 18, 24, 30, 38, 56, 64, 72, 82, 88, 100};

  std::string out = "condition,variant,decision\n";
  for (int i = 0; i < 30; ++i)
    out += "small,pgg," + std::to_string(fixture_draw(g, small_cum)) + "\n";
  for (int i = 0; i < 30; ++i)
    out += "large,pgg," + std::to_string(fixture_draw(g, large_cum)) + "\n";
  return out;
}

}  // namespace coopeq::testing
