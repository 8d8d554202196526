#pragma once

#include <random>
#include <span>

#include "dynkm/core.hpp"

namespace dynkm {

struct CoresetConfig {
  std::size_t k = 10;
  std::size_t s = 50;     // sample size; must exceed k
  double eps_w = 0.0;     // slack factor on the appended center weights
  std::uint64_t rng_seed = 0;
};

// Synthetic ids mark coreset points that are not input points (the appended
// bicriteria centers). Instance ids must stay below the flag bit.
inline constexpr PointId kSyntheticIdBit = PointId(1) << 63;
inline PointId make_synthetic_id(std::size_t i) { return kSyntheticIdBit | PointId(i); }
inline bool is_synthetic_id(PointId id) { return (id & kSyntheticIdBit) != 0; }

// Per-cluster build diagnostics: input weight of the bicriteria cluster, total
// sampled weight that landed in it, and the center weight before clamping.
struct ClusterAudit {
  double cluster_weight = 0.0;
  double sampled_weight = 0.0;
  double center_weight = 0.0;
};

struct Coreset {
  std::vector<WeightedPoint> points;
  double clamped_mass = 0.0;  // total negative center weight clamped away
  std::vector<ClusterAudit> audits;  // empty for pass-through and merge results

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  double total_weight() const { return dynkm::total_weight(points); }
};

// Sensitivity-sampling coreset construction. Instances of at most s points
// pass through verbatim (ids, weights and order preserved). Otherwise a
// 2k-center bicriteria solution is computed, s points are sampled with
// replacement proportionally to their sensitivity
//   sens(x) = w(x) * dist2(x, S) / cost_w(X, S) + 1 / w(cluster(x)),
// each sampled point receiving weight sum(sens) / ((s - k) * sens(x)), and the
// bicriteria centers are appended with weight
//   (1 + eps_w) * w(cluster) - sampled_weight(cluster),
// clamped at zero (the clamped mass is accumulated in clamped_mass). If the
// bicriteria solution already has zero cost, the distinct points of X with
// aggregated weights form an exact representation and are returned instead.
Coreset build_coreset(std::span<const WeightedPoint> xs, const CoresetConfig& cfg);
Coreset build_coreset(std::span<const WeightedPoint> xs, const CoresetConfig& cfg,
                      std::mt19937_64& rng);

// Multiset union: concatenated points (weights unchanged), clamped_mass summed.
Coreset merge(const Coreset& a, const Coreset& b);

}  // namespace dynkm
