#pragma once

#include <span>

#include "dynkm/coreset.hpp"
#include "dynkm/kmeanspp.hpp"

namespace dynkm {

// Empirical coreset distortion: the worst multiplicative gap between the cost
// of a candidate solution on the full data and on the coreset, minus one.
// A pair of zero costs counts as a perfect ratio; a one-sided zero yields
// +infinity.
double distortion(std::span<const WeightedPoint> coreset,
                  std::span<const WeightedPoint> full,
                  std::span<const Solution> solutions);

struct EvalReport {
  double distortion = 0.0;
  double quality = 1.0;       // cost(S_X, X) / cost(S_C, X)
  double cost_full = 0.0;     // cost of the direct solution on X
  double cost_coreset = 0.0;  // cost of the coreset solution on X
};

// Solve k-means on the coreset and on the full data (k-means++ followed by a
// Lloyd step, sharing one generator seeded with `seed`), then report the
// distortion over those two solutions and the solution quality ratio.
EvalReport evaluate(const Coreset& c, std::span<const WeightedPoint> full,
                    std::size_t k, std::uint64_t seed);

// Same report but for an already-extracted coreset solution; only the full
// solution is derived from `seed`.
EvalReport evaluate_with(const Solution& coreset_solution,
                         std::span<const WeightedPoint> coreset,
                         std::span<const WeightedPoint> full, std::size_t k,
                         std::uint64_t seed);

}  // namespace dynkm
