#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dynkm {

using PointId = std::uint64_t;

struct Point {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
};

// A point record of a weighted instance. Ids are stable identifiers assigned
// by whoever produces the instance (dataset ingestion, stream generators).
struct WeightedPoint {
  PointId id = 0;
  Point point;
  double weight = 1.0;
};

// A k-means solution: a non-empty set of centers.
struct Solution {
  std::vector<Point> centers;

  std::size_t size() const { return centers.size(); }
  bool empty() const { return centers.empty(); }
};

// no dimension check; callers validate once per instance
inline double dist2_unchecked(const Point& a, const Point& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    const double diff = a.coords[i] - b.coords[i];
    acc += diff * diff;
  }
  return acc;
}

// Squared Euclidean distance. Throws std::invalid_argument on dimension
// mismatch.
double dist2(const Point& a, const Point& b);

// Distance to the nearest center.
double min_dist2(const Point& p, const Solution& s);

// Weighted k-means cost of solution s on instance xs: sum of
// w(x) * min_c dist2(x, c). Empty instance costs 0; an empty solution is a
// usage error.
double cost(const Solution& s, std::span<const WeightedPoint> xs);

// Nearest-center index per point, ties resolved to the lowest center index.
std::vector<std::uint32_t> assign(const Solution& s,
                                  std::span<const WeightedPoint> xs);

double total_weight(std::span<const WeightedPoint> xs);

// throws if weight or any coordinate is non-finite, or weight <= 0
void validate_point(const WeightedPoint& p);

}  // namespace dynkm
