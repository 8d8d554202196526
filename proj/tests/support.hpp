#pragma once

#include <random>
#include <vector>

#include "dynkm/core.hpp"
#include "dynkm/rng.hpp"

namespace testsup {

using dynkm::Point;
using dynkm::PointId;
using dynkm::Solution;
using dynkm::WeightedPoint;

inline std::vector<WeightedPoint> random_points(std::size_t n, std::size_t dim,
                                                std::mt19937_64& rng, double lo = 0.0,
                                                double hi = 100.0,
                                                bool unit_weights = false,
                                                PointId first_id = 0) {
  std::vector<WeightedPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    WeightedPoint p;
    p.id = first_id + i;
    p.point.coords.resize(dim);
    for (std::size_t j = 0; j < dim; ++j)
      p.point.coords[j] = lo + (hi - lo) * dynkm::uniform01(rng);
    p.weight = unit_weights ? 1.0 : 0.5 + 2.0 * dynkm::uniform01(rng);
    out.push_back(std::move(p));
  }
  return out;
}

// `centers` tight Gaussian-ish blobs on a coarse grid, ids 0..n-1
inline std::vector<WeightedPoint> clustered_points(std::size_t n, std::size_t centers,
                                                   std::size_t dim,
                                                   std::mt19937_64& rng,
                                                   double spread = 1.0) {
  std::vector<std::vector<double>> mus(centers, std::vector<double>(dim));
  for (auto& mu : mus)
    for (double& c : mu) c = 1000.0 * dynkm::uniform01(rng);
  std::vector<WeightedPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& mu = mus[i % centers];
    WeightedPoint p;
    p.id = i;
    p.point.coords.resize(dim);
    for (std::size_t j = 0; j < dim; ++j)
      p.point.coords[j] = mu[j] + spread * (dynkm::uniform01(rng) - 0.5);
    p.weight = 1.0;
    out.push_back(std::move(p));
  }
  return out;
}

// independent oracles, written against the definitions rather than the library
inline double naive_dist2(const Point& a, const Point& b) {
  double acc = 0.0;
  for (std::size_t j = a.dim(); j-- > 0;) {
    const double d = a.coords[j] - b.coords[j];
    acc += d * d;
  }
  return acc;
}

inline double naive_min_dist2(const Point& p, const Solution& s) {
  double best = naive_dist2(p, s.centers[0]);
  for (std::size_t c = 1; c < s.size(); ++c)
    best = std::min(best, naive_dist2(p, s.centers[c]));
  return best;
}

inline double naive_cost(const Solution& s, const std::vector<WeightedPoint>& xs) {
  double acc = 0.0;
  for (const WeightedPoint& x : xs) acc += x.weight * naive_min_dist2(x.point, s);
  return acc;
}

inline double naive_total_weight(const std::vector<WeightedPoint>& xs) {
  double acc = 0.0;
  for (const WeightedPoint& x : xs) acc += x.weight;
  return acc;
}

inline Point make_point(std::initializer_list<double> cs) {
  Point p;
  p.coords.assign(cs);
  return p;
}

inline WeightedPoint wp(PointId id, std::initializer_list<double> cs, double w = 1.0) {
  return {id, make_point(cs), w};
}

}  // namespace testsup
