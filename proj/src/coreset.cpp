#include "dynkm/coreset.hpp"

#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "dynkm/kmeanspp.hpp"
#include "dynkm/rng.hpp"

namespace dynkm {

static void check_config(const CoresetConfig& cfg) {
  if (cfg.k == 0) throw std::invalid_argument("coreset: k must be positive");
  if (cfg.s <= cfg.k) throw std::invalid_argument("coreset: s must exceed k");
  if (cfg.eps_w < 0.0) throw std::invalid_argument("coreset: eps_w must be non-negative");
}

// exact representation for instances fully covered by the bicriteria centers:
// aggregate weights over coordinate-identical points, keep first ids
static Coreset distinct_points(std::span<const WeightedPoint> xs) {
  Coreset out;
  std::unordered_map<std::string, std::size_t> seen;
  for (const WeightedPoint& x : xs) {
    std::string key(reinterpret_cast<const char*>(x.point.coords.data()),
                    x.point.coords.size() * sizeof(double));
    auto [it, fresh] = seen.emplace(std::move(key), out.points.size());
    if (fresh)
      out.points.push_back(x);
    else
      out.points[it->second].weight += x.weight;
  }
  return out;
}

Coreset build_coreset(std::span<const WeightedPoint> xs, const CoresetConfig& cfg,
                      std::mt19937_64& rng) {
  check_config(cfg);
  if (xs.empty()) throw std::invalid_argument("coreset: empty instance");

  Coreset out;
  if (xs.size() <= cfg.s) {  // pass-through, no sampling and no rng use
    out.points.assign(xs.begin(), xs.end());
    return out;
  }

  const Solution sol = bicriteria(xs, cfg.k, rng);
  const auto a = assign(sol, xs);
  const std::size_t m = sol.centers.size();
  const std::size_t n = xs.size();

  std::vector<double> cluster_w(m, 0.0);
  std::vector<double> mind(n);
  double total_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cluster_w[a[i]] += xs[i].weight;
    mind[i] = dist2_unchecked(xs[i].point, sol.centers[a[i]]);
    total_cost += xs[i].weight * mind[i];
  }

  if (total_cost <= 0.0) return distinct_points(xs);

  std::vector<double> sens(n);
  double sens_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sens[i] = xs[i].weight * mind[i] / total_cost + 1.0 / cluster_w[a[i]];
    sens_total += sens[i];
  }

  std::vector<double> sampled_w(m, 0.0);
  const double denom = static_cast<double>(cfg.s - cfg.k);
  auto cum = prefix_sums(sens);
  out.points.reserve(cfg.s + m);
  for (std::size_t t = 0; t < cfg.s; ++t) {
    const std::size_t idx = sample_cdf(cum, cum.back(), rng);
    const double w = sens_total / (denom * sens[idx]);
    out.points.push_back({xs[idx].id, xs[idx].point, w});
    sampled_w[a[idx]] += w;
  }

  out.audits.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double center_w = (1.0 + cfg.eps_w) * cluster_w[j] - sampled_w[j];
    out.audits[j] = {cluster_w[j], sampled_w[j], center_w};
    double w = center_w;
    if (w < 0.0) {
      out.clamped_mass += -w;
      w = 0.0;
    }
    out.points.push_back({make_synthetic_id(j), sol.centers[j], w});
  }
  return out;
}

Coreset build_coreset(std::span<const WeightedPoint> xs, const CoresetConfig& cfg) {
  std::mt19937_64 rng(cfg.rng_seed);
  return build_coreset(xs, cfg, rng);
}

Coreset merge(const Coreset& a, const Coreset& b) {
  if (!a.points.empty() && !b.points.empty() &&
      a.points.front().point.dim() != b.points.front().point.dim())
    throw std::invalid_argument("merge: dimension mismatch");
  Coreset out;
  out.points.reserve(a.points.size() + b.points.size());
  out.points.insert(out.points.end(), a.points.begin(), a.points.end());
  out.points.insert(out.points.end(), b.points.begin(), b.points.end());
  out.clamped_mass = a.clamped_mass + b.clamped_mass;
  return out;
}

}  // namespace dynkm
