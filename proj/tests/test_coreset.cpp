#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <ostream>
#include <cmath>
#include <unordered_map>

#include "dynkm/coreset.hpp"
#include "dynkm/kmeanspp.hpp"
#include "dynkm/metrics.hpp"
#include "support.hpp"

using namespace dynkm;
using namespace testsup;

namespace {

double fwd_d2(const Point& a, const Point& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    const double d = a.coords[j] - b.coords[j];
    acc += d * d;
  }
  return acc;
}

// cost ratio of a solution between two weighted sets, as used for distortion
double ratio(const Solution& s, const std::vector<WeightedPoint>& a,
             const std::vector<WeightedPoint>& b) {
  const double ca = naive_cost(s, a);
  const double cb = naive_cost(s, b);
  if (ca == 0.0 && cb == 0.0) return 1.0;
  if (ca == 0.0 || cb == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(ca / cb, cb / ca);
}

std::vector<Solution> probe_solutions(const std::vector<WeightedPoint>& xs,
                                      std::size_t k, std::uint64_t seed) {
  std::vector<Solution> sols;
  std::mt19937_64 rng(seed);
  sols.push_back(kmeanspp(xs, k, true, rng));
  for (int i = 0; i < 3; ++i) {
    Solution s;
    for (const auto& c : random_points(k, xs.front().point.dim(), rng, 0.0, 1000.0))
      s.centers.push_back(c.point);
    sols.push_back(std::move(s));
  }
  return sols;
}

}  // namespace

TEST_SUITE("coreset") {

TEST_CASE("small instances pass through untouched and draw no randomness") {
  std::mt19937_64 rng(41);
  const auto xs = random_points(30, 3, rng);
  CoresetConfig cfg{5, 30, 0.0, 0};
  std::mt19937_64 build_rng(77);
  const std::mt19937_64 before = build_rng;
  const Coreset c = build_coreset(xs, cfg, build_rng);
  CHECK(build_rng == before);
  REQUIRE(c.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(c.points[i].id == xs[i].id);
    CHECK(c.points[i].weight == xs[i].weight);
    CHECK(c.points[i].point.coords == xs[i].point.coords);
  }
  CHECK(c.clamped_mass == 0.0);
  CHECK(c.audits.empty());
}

TEST_CASE("sampling arithmetic is reproduced from the output itself") {
  std::mt19937_64 data_rng(42);
  for (int it = 0; it < 10; ++it) {
    const auto xs = clustered_points(300, 8, 2, data_rng, 4.0);
    const CoresetConfig cfg{6, 40, it % 2 ? 0.25 : 0.0, std::uint64_t(900 + it)};
    const Coreset c = build_coreset(xs, cfg);
    const std::size_t m = c.audits.size();
    REQUIRE(m > 0);
    REQUIRE(c.size() == cfg.s + m);

    // synthetic tail records carry the bicriteria centers
    Solution centers;
    for (std::size_t j = 0; j < m; ++j) {
      const WeightedPoint& rec = c.points[cfg.s + j];
      REQUIRE(rec.id == make_synthetic_id(j));
      centers.centers.push_back(rec.point);
    }

    // independent re-derivation of assignments, sensitivities and weights
    const std::size_t n = xs.size();
    std::vector<std::size_t> a(n);
    std::vector<double> mind(n);
    std::vector<double> cluster_w(m, 0.0);
    double total_cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        const double d = fwd_d2(xs[i].point, centers.centers[j]);
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      a[i] = arg;
      mind[i] = best;
      cluster_w[arg] += xs[i].weight;
      total_cost += xs[i].weight * best;
    }
    REQUIRE(total_cost > 0.0);
    std::vector<double> sens(n);
    double sens_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sens[i] = xs[i].weight * mind[i] / total_cost + 1.0 / cluster_w[a[i]];
      sens_total += sens[i];
    }

    std::unordered_map<PointId, std::size_t> by_id;
    for (std::size_t i = 0; i < n; ++i) by_id[xs[i].id] = i;
    std::vector<double> sampled_w(m, 0.0);
    const double denom = static_cast<double>(cfg.s - cfg.k);
    for (std::size_t t = 0; t < cfg.s; ++t) {
      const WeightedPoint& rec = c.points[t];
      REQUIRE(!is_synthetic_id(rec.id));
      const std::size_t src = by_id.at(rec.id);
      CHECK(rec.point.coords == xs[src].point.coords);
      CHECK(rec.weight ==
            doctest::Approx(sens_total / (denom * sens[src])).epsilon(1e-12));
      sampled_w[a[src]] += rec.weight;
    }

    double clamped = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      CHECK(c.audits[j].cluster_weight == doctest::Approx(cluster_w[j]).epsilon(1e-9));
      CHECK(c.audits[j].sampled_weight == doctest::Approx(sampled_w[j]).epsilon(1e-9));
      const double want_center =
          (1.0 + cfg.eps_w) * c.audits[j].cluster_weight - c.audits[j].sampled_weight;
      CHECK(c.audits[j].center_weight == doctest::Approx(want_center).epsilon(1e-9));
      const double clamped_w = std::max(0.0, c.audits[j].center_weight);
      CHECK(c.points[cfg.s + j].weight == doctest::Approx(clamped_w));
      clamped += std::max(0.0, -c.audits[j].center_weight);
    }
    CHECK(c.clamped_mass == doctest::Approx(clamped).epsilon(1e-9));
  }
}

TEST_CASE("total weight is conserved up to the clamped mass") {
  std::mt19937_64 rng(43);
  for (int it = 0; it < 20; ++it) {
    const auto xs = random_points(400, 2, rng);
    const double w = naive_total_weight(xs);
    const double eps_w = (it % 3) * 0.1;
    const Coreset c = build_coreset(xs, {4, 50, eps_w, std::uint64_t(50 + it)});
    CHECK(c.total_weight() ==
          doctest::Approx((1.0 + eps_w) * w + c.clamped_mass).epsilon(1e-9));
  }
}

TEST_CASE("instances covered by the bicriteria centers come back exactly") {
  std::vector<WeightedPoint> xs;
  for (int i = 0; i < 60; ++i) {
    const int loc = i % 3;
    xs.push_back(wp(i, {10.0 * loc, -5.0 * loc}, 1.0 + 0.25 * (i % 4)));
  }
  const Coreset c = build_coreset(xs, {3, 5, 0.0, 7});
  REQUIRE(c.size() == 3);
  CHECK(c.audits.empty());
  CHECK(c.clamped_mass == 0.0);
  double want_w[3] = {0.0, 0.0, 0.0};
  for (const auto& x : xs) want_w[x.id % 3] += x.weight;
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(c.points[j].id == j);  // first id at each location
    CHECK_FALSE(is_synthetic_id(c.points[j].id));
    CHECK(c.points[j].weight == doctest::Approx(want_w[j]).epsilon(1e-12));
  }
}

TEST_CASE("builds are deterministic in the seed") {
  std::mt19937_64 rng(44);
  const auto xs = random_points(500, 3, rng);
  const Coreset a = build_coreset(xs, {5, 60, 0.0, 123});
  const Coreset b = build_coreset(xs, {5, 60, 0.0, 123});
  const Coreset c = build_coreset(xs, {5, 60, 0.0, 124});
  REQUIRE(a.size() == b.size());
  bool same_as_c = a.size() == c.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.points[i].id == b.points[i].id);
    CHECK(a.points[i].weight == b.points[i].weight);
    if (same_as_c)
      same_as_c = a.points[i].id == c.points[i].id &&
                  a.points[i].weight == c.points[i].weight;
  }
  CHECK_FALSE(same_as_c);
}

TEST_CASE("coreset of a coreset composes multiplicatively per solution") {
  std::mt19937_64 rng(45);
  for (int it = 0; it < 20; ++it) {
    const auto xs = clustered_points(600, 10, 2, rng, 3.0);
    const Coreset c1 = build_coreset(xs, {5, 120, 0.0, std::uint64_t(10 + it)});
    const Coreset c2 = build_coreset(c1.points, {5, 40, 0.0, std::uint64_t(60 + it)});
    const auto sols = probe_solutions(xs, 5, 777 + it);
    for (const Solution& s : sols) {
      const double r_x_c1 = ratio(s, xs, c1.points);
      const double r_c1_c2 = ratio(s, c1.points, c2.points);
      const double r_x_c2 = ratio(s, xs, c2.points);
      CHECK(r_x_c2 <= r_x_c1 * r_c1_c2 * (1.0 + 1e-12));
    }
    // aggregated form: 1 + D(X,C2) <= (1 + D(X,C1)) * (1 + D(C1,C2))
    const double d_x_c1 = distortion(c1.points, xs, sols);
    const double d_c1_c2 = distortion(c2.points, c1.points, sols);
    const double d_x_c2 = distortion(c2.points, xs, sols);
    CHECK(1.0 + d_x_c2 <= (1.0 + d_x_c1) * (1.0 + d_c1_c2) * (1.0 + 1e-12));
  }
}

TEST_CASE("a union of coresets is no worse than its worst part") {
  std::mt19937_64 rng(46);
  for (int it = 0; it < 10; ++it) {
    const auto xa = clustered_points(400, 6, 2, rng, 2.0);
    auto xb = clustered_points(400, 6, 2, rng, 2.0);
    for (auto& p : xb) p.id += 1000;
    const Coreset ca = build_coreset(xa, {4, 60, 0.0, std::uint64_t(30 + it)});
    const Coreset cb = build_coreset(xb, {4, 60, 0.0, std::uint64_t(90 + it)});
    const Coreset u = merge(ca, cb);
    std::vector<WeightedPoint> xu = xa;
    xu.insert(xu.end(), xb.begin(), xb.end());
    const auto sols = probe_solutions(xu, 4, 555 + it);
    for (const Solution& s : sols) {
      // additivity of the union
      CHECK(naive_cost(s, u.points) ==
            doctest::Approx(naive_cost(s, ca.points) + naive_cost(s, cb.points))
                .epsilon(1e-12));
      CHECK(ratio(s, xu, u.points) <=
            std::max(ratio(s, xa, ca.points), ratio(s, xb, cb.points)) * (1.0 + 1e-12));
    }
    CHECK(u.clamped_mass == ca.clamped_mass + cb.clamped_mass);
  }
}

TEST_CASE("merge rejects mismatched dimensions") {
  Coreset a, b;
  a.points.push_back(wp(0, {1.0, 2.0}));
  b.points.push_back(wp(1, {1.0, 2.0, 3.0}));
  CHECK_THROWS_AS(merge(a, b), std::invalid_argument);
  CHECK(merge(a, Coreset{}).size() == 1);
}

TEST_CASE("configs are validated") {
  std::mt19937_64 rng(47);
  const auto xs = random_points(10, 2, rng);
  CHECK_THROWS_AS(build_coreset(xs, {0, 10, 0.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(build_coreset(xs, {5, 5, 0.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(build_coreset(xs, {5, 10, -0.1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(build_coreset({}, {5, 10, 0.0, 0}), std::invalid_argument);
}

TEST_CASE("a sampled coreset keeps the clustering cost close on mixtures") {
  std::mt19937_64 rng(48);
  const auto xs = clustered_points(4000, 10, 2, rng, 2.0);
  const Coreset c = build_coreset(xs, {10, 400, 0.0, 2024});
  const auto sols = probe_solutions(xs, 10, 4242);
  CHECK(distortion(c.points, xs, sols) < 0.5);
}

}  // TEST_SUITE
