#include "dynkm/kmeanspp.hpp"

#include <limits>
#include <stdexcept>

#include "dynkm/rng.hpp"

namespace dynkm {

Solution lloyd_step(const Solution& s, std::span<const WeightedPoint> xs) {
  const auto a = assign(s, xs);
  const std::size_t k = s.centers.size();
  const std::size_t d = s.centers.front().dim();
  std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
  std::vector<double> wsum(k, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::uint32_t j = a[i];
    wsum[j] += xs[i].weight;
    for (std::size_t c = 0; c < d; ++c)
      sums[j][c] += xs[i].weight * xs[i].point.coords[c];
  }
  Solution out = s;
  for (std::size_t j = 0; j < k; ++j) {
    if (wsum[j] <= 0.0) continue;  // empty cluster keeps its center
    for (std::size_t c = 0; c < d; ++c) out.centers[j].coords[c] = sums[j][c] / wsum[j];
  }
  return out;
}

Solution kmeanspp(std::span<const WeightedPoint> xs, std::size_t k_prime,
                  bool lloyd, std::mt19937_64& rng) {
  if (xs.empty()) throw std::invalid_argument("kmeanspp: empty instance");
  if (k_prime == 0) throw std::invalid_argument("kmeanspp: k_prime must be positive");
  const std::size_t d = xs.front().point.dim();
  for (const WeightedPoint& x : xs)
    if (x.point.dim() != d) throw std::invalid_argument("kmeanspp: ragged instance");

  const std::size_t n = xs.size();
  std::vector<double> mind(n, std::numeric_limits<double>::infinity());
  std::vector<double> mass(n);
  std::vector<std::size_t> chosen;
  chosen.reserve(k_prime);

  auto add_center = [&](std::size_t idx) {
    chosen.push_back(idx);
    for (std::size_t i = 0; i < n; ++i) {
      const double dd = dist2_unchecked(xs[i].point, xs[idx].point);
      if (dd < mind[i]) mind[i] = dd;
    }
  };

  for (std::size_t i = 0; i < n; ++i) mass[i] = xs[i].weight;
  {
    auto cum = prefix_sums(mass);
    add_center(sample_cdf(cum, cum.back(), rng));
  }

  while (chosen.size() < k_prime) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mass[i] = xs[i].weight * mind[i];
      total += mass[i];
    }
    if (total <= 0.0) break;  // every remaining point coincides with a center
    auto cum = prefix_sums(mass);
    add_center(sample_cdf(cum, cum.back(), rng));
  }

  Solution out;
  out.centers.reserve(chosen.size());
  for (std::size_t idx : chosen) out.centers.push_back(xs[idx].point);
  if (lloyd) out = lloyd_step(out, xs);
  return out;
}

Solution kmeanspp(std::span<const WeightedPoint> xs, const SeedingConfig& cfg) {
  std::mt19937_64 rng(cfg.rng_seed);
  return kmeanspp(xs, cfg.k_prime, cfg.lloyd_step, rng);
}

Solution bicriteria(std::span<const WeightedPoint> xs, std::size_t k,
                    std::mt19937_64& rng) {
  if (k == 0) throw std::invalid_argument("bicriteria: k must be positive");
  return kmeanspp(xs, 2 * k, true, rng);
}

Solution bicriteria(std::span<const WeightedPoint> xs, std::size_t k,
                    std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return bicriteria(xs, k, rng);
}

}  // namespace dynkm
