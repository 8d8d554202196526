#include "dynkm/metrics.hpp"

#include <limits>
#include <stdexcept>

namespace dynkm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cost_ratio(double a, double b) {
  if (a == 0.0 && b == 0.0) return 1.0;
  if (a == 0.0 || b == 0.0) return kInf;
  return a > b ? a / b : b / a;
}

EvalReport finish(const Solution& s_c, const Solution& s_x,
                  std::span<const WeightedPoint> coreset,
                  std::span<const WeightedPoint> full) {
  const Solution sols[2] = {s_c, s_x};
  EvalReport r;
  r.distortion = distortion(coreset, full, sols);
  r.cost_full = cost(s_x, full);
  r.cost_coreset = cost(s_c, full);
  if (r.cost_coreset == 0.0)
    r.quality = (r.cost_full == 0.0) ? 1.0 : kInf;
  else
    r.quality = r.cost_full / r.cost_coreset;
  return r;
}

}  // namespace

double distortion(std::span<const WeightedPoint> coreset,
                  std::span<const WeightedPoint> full,
                  std::span<const Solution> solutions) {
  if (solutions.empty())
    throw std::invalid_argument("distortion: need at least one solution");
  double worst = 1.0;
  for (const Solution& s : solutions) {
    const double on_full = cost(s, full);
    const double on_coreset = cost(s, coreset);
    worst = std::max(worst, cost_ratio(on_full, on_coreset));
  }
  return worst - 1.0;
}

EvalReport evaluate(const Coreset& c, std::span<const WeightedPoint> full,
                    std::size_t k, std::uint64_t seed) {
  if (c.empty() || full.empty()) {
    EvalReport r;
    if (c.empty() != full.empty()) {
      r.distortion = kInf;
      r.quality = kInf;
    }
    return r;
  }
  std::mt19937_64 rng(seed);
  const Solution s_c = kmeanspp(c.points, k, true, rng);
  const Solution s_x = kmeanspp(full, k, true, rng);
  return finish(s_c, s_x, c.points, full);
}

EvalReport evaluate_with(const Solution& coreset_solution,
                         std::span<const WeightedPoint> coreset,
                         std::span<const WeightedPoint> full, std::size_t k,
                         std::uint64_t seed) {
  if (coreset.empty() || full.empty() || coreset_solution.empty()) {
    EvalReport r;
    if (coreset.empty() != full.empty()) {
      r.distortion = kInf;
      r.quality = kInf;
    }
    return r;
  }
  std::mt19937_64 rng(seed);
  const Solution s_x = kmeanspp(full, k, true, rng);
  return finish(coreset_solution, s_x, coreset, full);
}

}  // namespace dynkm
