#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dynkm/streams.hpp"
#include "support.hpp"

using namespace dynkm;
using namespace testsup;

namespace {

std::vector<WeightedPoint> numbered_points(std::size_t n, std::size_t dim,
                                           std::mt19937_64& rng) {
  return random_points(n, dim, rng);
}

struct TempPath {
  std::string path;
  explicit TempPath(const char* name)
      : path(std::string("stream_test_") + name + ".txt") {}
  ~TempPath() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("streams") {

TEST_CASE("insert only emits the data once in order") {
  std::mt19937_64 rng(1);
  const auto data = numbered_points(50, 2, rng);
  StreamSpec spec;
  spec.kind = StreamKind::insert_only;
  const auto events = gen_all(data, spec);
  REQUIRE(events.size() == 50);
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].kind == EventKind::insert);
    CHECK(events[i].point.id == data[i].id);
    CHECK(events[i].point.point.coords == data[i].point.coords);
  }
  CHECK(validate_stream(events).valid);
}

TEST_CASE("sliding window alternates delete-oldest with insert") {
  std::mt19937_64 rng(2);
  const std::size_t n = 500, t = 120;
  const auto data = numbered_points(n, 2, rng);
  StreamSpec spec;
  spec.kind = StreamKind::sliding_window;
  spec.window = t;
  const auto events = gen_all(data, spec);

  REQUIRE(events.size() == 2 * n - t);
  for (std::size_t i = 0; i < t; ++i) CHECK(events[i].kind == EventKind::insert);
  // after the warm-up, deletions of the oldest point alternate with inserts
  std::size_t expect_old = 0;
  for (std::size_t i = t; i < events.size(); i += 2) {
    REQUIRE(events[i].kind == EventKind::remove);
    CHECK(events[i].point.id == data[expect_old++].id);
    if (i + 1 < events.size()) {
      CHECK(events[i + 1].kind == EventKind::insert);
    }
  }

  const ReplayCheck rc = validate_stream(events);
  CHECK(rc.valid);
  CHECK(rc.inserts == n);
  CHECK(rc.removes == n - t);
  CHECK(rc.max_live == t);
  CHECK(rc.final_live == t);
}

TEST_CASE("sliding window validates its width") {
  std::mt19937_64 rng(3);
  const auto data = numbered_points(10, 2, rng);
  StreamSpec spec;
  spec.kind = StreamKind::sliding_window;
  spec.window = 0;
  CHECK_THROWS_AS(StreamGen(data, spec), std::invalid_argument);
  spec.window = 11;
  CHECK_THROWS_AS(StreamGen(data, spec), std::invalid_argument);
  spec.window = 10;
  CHECK_NOTHROW(StreamGen(data, spec));
}

TEST_CASE("random window stays near its equilibrium") {
  // with insert probability pi the live count performs a biased walk whose
  // mean after m steps is about (2 pi - 1) m; check a 3 sigma band around it
  const double pi = 0.7;
  const std::size_t m = 1000;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed + 100);
    const auto data = numbered_points(2000, 2, rng);
    StreamSpec spec;
    spec.kind = StreamKind::random_window;
    spec.pi = pi;
    spec.rng_seed = seed;
    StreamGen gen(data, spec);
    std::vector<UpdateEvent> events;
    for (std::size_t i = 0; i < m; ++i) {
      auto ev = gen.next();
      REQUIRE(ev.has_value());
      events.push_back(*ev);
    }
    CHECK(events.front().kind == EventKind::insert);  // forced while empty
    CHECK(validate_stream(events).valid);
    total += double(gen.live_size());
  }
  const double mean_live = total / 50.0;
  // sd of one endpoint is sqrt(4 pi (1-pi) m) ~ 29, the 50-seed mean
  // fluctuates by 29/sqrt(50) ~ 4.1; allow 3 sigma
  CHECK(std::abs(mean_live - (2.0 * pi - 1.0) * double(m)) <= 12.3);
}

TEST_CASE("snake window oscillates between the peak and the trough") {
  std::mt19937_64 rng(7);
  const auto data = numbered_points(4000, 2, rng);
  StreamSpec spec;
  spec.kind = StreamKind::snake_window;
  spec.window = 100;
  spec.low_frac = 0.25;
  spec.pi_hi = 0.95;
  spec.pi_lo = 0.05;
  spec.rng_seed = 11;

  StreamGen gen(data, spec);
  std::size_t live = 0, max_live = 0, troughs = 0;
  bool shrinking = false;
  std::vector<UpdateEvent> events;
  while (auto ev = gen.next()) {
    live += (ev->kind == EventKind::insert) ? 1 : std::size_t(-1);
    max_live = std::max(max_live, live);
    if (live == spec.window) shrinking = true;
    if (shrinking && live <= std::size_t(std::ceil(0.25 * 100))) {
      ++troughs;
      shrinking = false;
    }
    events.push_back(*ev);
  }
  CHECK(max_live <= spec.window);
  CHECK(max_live == spec.window);  // the peak is actually reached
  CHECK(troughs >= 2);             // and left again, several times
  CHECK(validate_stream(events).valid);
}

TEST_CASE("snake cycle cap ends the stream early") {
  std::mt19937_64 rng(13);
  const auto data = numbered_points(100000, 2, rng);
  StreamSpec spec;
  spec.kind = StreamKind::snake_window;
  spec.window = 200;
  spec.low_frac = 0.2;
  spec.cycles = 2;
  spec.rng_seed = 3;

  const auto events = gen_all(data, spec);
  CHECK(!events.empty());
  CHECK(events.size() < 100000);  // far from exhausting the data

  // replaying the live count shows exactly two full grow+shrink sweeps
  std::size_t live = 0, peaks = 0, troughs = 0;
  bool at_peak = false;
  for (const auto& ev : events) {
    live += (ev.kind == EventKind::insert) ? 1 : std::size_t(-1);
    if (live == spec.window && !at_peak) {
      ++peaks;
      at_peak = true;
    }
    if (at_peak && live == std::size_t(std::ceil(0.2 * 200))) {
      ++troughs;
      at_peak = false;
    }
  }
  CHECK(peaks == 2);
  CHECK(troughs == 2);

  // the generator is deterministic in its seed
  const auto replay = gen_all(data, spec);
  REQUIRE(replay.size() == events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(replay[i].kind == events[i].kind);
    CHECK(replay[i].point.id == events[i].point.id);
  }
}

TEST_CASE("stream spec validation") {
  std::mt19937_64 rng(17);
  const auto data = numbered_points(10, 2, rng);

  StreamSpec spec;
  spec.kind = StreamKind::random_window;
  spec.pi = 0.0;
  CHECK_THROWS_AS(StreamGen(data, spec), std::invalid_argument);
  spec.pi = 1.5;
  CHECK_THROWS_AS(StreamGen(data, spec), std::invalid_argument);

  spec = StreamSpec{};
  spec.kind = StreamKind::snake_window;
  spec.window = 0;
  CHECK_THROWS_AS(StreamGen(data, spec), std::invalid_argument);
  spec.window = 5;
  spec.low_frac = 1.0;
  CHECK_THROWS_AS(StreamGen(data, spec), std::invalid_argument);
  spec.low_frac = -0.1;
  CHECK_THROWS_AS(StreamGen(data, spec), std::invalid_argument);
}

TEST_CASE("stream kind names round-trip") {
  for (StreamKind k : {StreamKind::insert_only, StreamKind::sliding_window,
                       StreamKind::random_window, StreamKind::snake_window}) {
    const auto parsed = parse_stream_kind(stream_kind_name(k));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == k);
  }
  CHECK(parse_stream_kind("sliding") == StreamKind::sliding_window);
  CHECK(parse_stream_kind("insert") == StreamKind::insert_only);
  CHECK(parse_stream_kind("random") == StreamKind::random_window);
  CHECK(parse_stream_kind("snake") == StreamKind::snake_window);
  CHECK_FALSE(parse_stream_kind("zigzag").has_value());
}

TEST_CASE("birch-like generator labels and groups its clusters") {
  std::vector<int> labels;
  const std::size_t n = 1003, c = 10, dim = 3;
  const auto pts = gen_birch_like(n, c, dim, 5, &labels);
  REQUIRE(pts.size() == n);
  REQUIRE(labels.size() == n);

  std::vector<std::size_t> counts(c, 0);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(pts[i].id == PointId(i));  // consecutive ids
    CHECK(pts[i].weight == 1.0);
    CHECK(pts[i].point.dim() == dim);
    REQUIRE(labels[i] >= 0);
    REQUIRE(labels[i] < int(c));
    ++counts[labels[i]];
    if (i > 0) CHECK(labels[i] >= labels[i - 1]);  // grouped by cluster
  }
  // n % c leftovers land one each on the first clusters
  for (std::size_t j = 0; j < c; ++j)
    CHECK(counts[j] == n / c + (j < n % c ? 1 : 0));

  // clustered structure: mean within-cluster spread far below the global one
  std::vector<Point> centroids(c, Point{std::vector<double>(dim, 0.0)});
  Point global{std::vector<double>(dim, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) {
      centroids[labels[i]].coords[d] += pts[i].point.coords[d] / double(counts[labels[i]]);
      global.coords[d] += pts[i].point.coords[d] / double(n);
    }
  double within = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    within += naive_dist2(pts[i].point, centroids[labels[i]]);
    total += naive_dist2(pts[i].point, global);
  }
  CHECK(within < 0.5 * total);

  // same seed, same data
  const auto again = gen_birch_like(n, c, dim, 5);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(again[i].point.coords == pts[i].point.coords);
}

TEST_CASE("replay files round-trip exactly") {
  std::mt19937_64 rng(23);
  const auto data = numbered_points(300, 3, rng);
  StreamSpec spec;
  spec.kind = StreamKind::sliding_window;
  spec.window = 50;
  spec.rng_seed = 9;
  const auto events = gen_all(data, spec);

  TempPath tmp("roundtrip");
  write_stream(tmp.path, events);
  const auto back = read_stream(tmp.path);
  REQUIRE(back.size() == events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(back[i].kind == events[i].kind);
    CHECK(back[i].point.id == events[i].point.id);
    if (events[i].kind == EventKind::insert) {
      CHECK(back[i].point.weight == events[i].point.weight);
      CHECK(back[i].point.point.coords == events[i].point.point.coords);
    }
  }
}

TEST_CASE("read_stream reports malformed lines") {
  TempPath tmp("malformed");
  {
    FILE* f = std::fopen(tmp.path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("I,0,1.0,3.5,4.5\nX,1\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(read_stream(tmp.path),
                       doctest::Contains("line 2"), std::runtime_error);

  {
    FILE* f = std::fopen(tmp.path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("I,0,notaweight,3.5\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_stream(tmp.path), std::runtime_error);
}

TEST_CASE("validate_stream flags broken histories") {
  auto ins = [](PointId id, std::initializer_list<double> cs) {
    UpdateEvent e;
    e.kind = EventKind::insert;
    e.point = wp(id, cs);
    return e;
  };
  auto del = [](PointId id) {
    UpdateEvent e;
    e.kind = EventKind::remove;
    e.point.id = id;
    return e;
  };

  SUBCASE("duplicate live insert") {
    const auto rc = validate_stream({ins(1, {0.0, 0.0}), ins(1, {1.0, 1.0})});
    CHECK_FALSE(rc.valid);
    CHECK(!rc.error.empty());
  }
  SUBCASE("removal of an unknown id") {
    const auto rc = validate_stream({ins(1, {0.0, 0.0}), del(2)});
    CHECK_FALSE(rc.valid);
  }
  SUBCASE("dimension mismatch") {
    const auto rc = validate_stream({ins(1, {0.0, 0.0}), ins(2, {1.0})});
    CHECK_FALSE(rc.valid);
  }
  SUBCASE("non-finite coordinate") {
    auto e = ins(1, {0.0});
    e.point.point.coords[0] = std::nan("");
    CHECK_FALSE(validate_stream({e}).valid);
  }
  SUBCASE("bad weight") {
    auto e = ins(1, {0.0});
    e.point.weight = -2.0;
    CHECK_FALSE(validate_stream({e}).valid);
  }
  SUBCASE("delete after remove is fine again after reinsert") {
    const auto rc = validate_stream(
        {ins(1, {0.0}), del(1), ins(1, {2.0}), del(1)});
    CHECK(rc.valid);
    CHECK(rc.inserts == 2);
    CHECK(rc.removes == 2);
    CHECK(rc.max_live == 1);
    CHECK(rc.final_live == 0);
  }
}

}  // TEST_SUITE
