#pragma once

#include <random>
#include <span>

#include "dynkm/core.hpp"

namespace dynkm {

struct SeedingConfig {
  std::size_t k_prime = 1;
  std::uint64_t rng_seed = 0;
  bool lloyd_step = true;
};

// Weighted k-means++ seeding. The first center is sampled proportionally to
// point weight, each further center proportionally to w(x) * dist2(x, S).
// Sampling stops early once the residual weighted cost hits zero, so the
// result has min(k_prime, #distinct points) centers. With lloyd_step enabled
// a single Lloyd refinement round follows the seeding.
Solution kmeanspp(std::span<const WeightedPoint> xs, const SeedingConfig& cfg);
Solution kmeanspp(std::span<const WeightedPoint> xs, std::size_t k_prime,
                  bool lloyd, std::mt19937_64& rng);

// One Lloyd round: assign each point to its nearest center, then replace each
// center by the weighted centroid of its cluster. Empty clusters keep their
// center. Never increases the cost.
Solution lloyd_step(const Solution& s, std::span<const WeightedPoint> xs);

// Bicriteria solver used by the coreset builder: k-means++ with 2k centers.
Solution bicriteria(std::span<const WeightedPoint> xs, std::size_t k,
                    std::uint64_t rng_seed);
Solution bicriteria(std::span<const WeightedPoint> xs, std::size_t k,
                    std::mt19937_64& rng);

}  // namespace dynkm
