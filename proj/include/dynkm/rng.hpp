#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dynkm {

// 64-bit mix, used to derive independent seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// uniform double in [0,1), one engine draw per call
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF sample over non-negative masses. cum holds partial sums of the
// masses, total == cum.back(). Entries with zero mass are never selected.
inline std::size_t sample_cdf(std::span<const double> cum, double total,
                              std::mt19937_64& rng) {
  const double target = uniform01(rng) * total;
  std::size_t lo = 0, hi = cum.size();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (cum[mid] > target)
      hi = mid;
    else
      lo = mid + 1;
  }
  if (lo >= cum.size()) {
    // can only happen through rounding at the top end; back off to the last
    // index that carries mass
    lo = cum.size() - 1;
    while (lo > 0 && cum[lo] == cum[lo - 1]) --lo;
  }
  return lo;
}

inline std::vector<double> prefix_sums(std::span<const double> masses) {
  std::vector<double> cum(masses.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    acc += masses[i];
    cum[i] = acc;
  }
  return cum;
}

}  // namespace dynkm
