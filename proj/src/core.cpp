#include "dynkm/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dynkm {

double dist2(const Point& a, const Point& b) {
  if (a.coords.size() != b.coords.size())
    throw std::invalid_argument("dist2: dimension mismatch");
  return dist2_unchecked(a, b);
}

double min_dist2(const Point& p, const Solution& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& c : s.centers) {
    const double d = dist2_unchecked(p, c);
    if (d < best) best = d;
  }
  return best;
}

static void check_instance(const Solution& s, std::span<const WeightedPoint> xs) {
  if (s.centers.empty()) throw std::invalid_argument("cost: empty solution");
  const std::size_t d = s.centers.front().dim();
  for (const Point& c : s.centers)
    if (c.dim() != d) throw std::invalid_argument("cost: ragged solution");
  for (const WeightedPoint& x : xs)
    if (x.point.dim() != d)
      throw std::invalid_argument("cost: point/solution dimension mismatch");
}

double cost(const Solution& s, std::span<const WeightedPoint> xs) {
  check_instance(s, xs);
  double acc = 0.0;
  for (const WeightedPoint& x : xs) acc += x.weight * min_dist2(x.point, s);
  return acc;
}

std::vector<std::uint32_t> assign(const Solution& s,
                                  std::span<const WeightedPoint> xs) {
  check_instance(s, xs);
  std::vector<std::uint32_t> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = 0;
    for (std::uint32_t j = 0; j < s.centers.size(); ++j) {
      const double d = dist2_unchecked(xs[i].point, s.centers[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    out[i] = arg;
  }
  return out;
}

double total_weight(std::span<const WeightedPoint> xs) {
  double acc = 0.0;
  for (const WeightedPoint& x : xs) acc += x.weight;
  return acc;
}

void validate_point(const WeightedPoint& p) {
  if (!std::isfinite(p.weight) || p.weight <= 0.0)
    throw std::invalid_argument("point weight must be finite and positive");
  for (double c : p.point.coords)
    if (!std::isfinite(c))
      throw std::invalid_argument("point coordinates must be finite");
}

}  // namespace dynkm
