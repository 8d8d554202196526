#include "dynkm/streams.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "dynkm/rng.hpp"

namespace dynkm {

std::string stream_kind_name(StreamKind k) {
  switch (k) {
    case StreamKind::insert_only: return "insert_only";
    case StreamKind::sliding_window: return "sliding_window";
    case StreamKind::random_window: return "random_window";
    case StreamKind::snake_window: return "snake_window";
  }
  return "unknown";
}

std::optional<StreamKind> parse_stream_kind(std::string_view name) {
  if (name == "insert_only" || name == "insert") return StreamKind::insert_only;
  if (name == "sliding_window" || name == "sliding") return StreamKind::sliding_window;
  if (name == "random_window" || name == "random") return StreamKind::random_window;
  if (name == "snake_window" || name == "snake") return StreamKind::snake_window;
  return std::nullopt;
}

StreamGen::StreamGen(std::vector<WeightedPoint> data, const StreamSpec& spec)
    : data_(std::move(data)), spec_(spec), rng_(spec.rng_seed) {
  switch (spec_.kind) {
    case StreamKind::insert_only:
      break;
    case StreamKind::sliding_window:
      if (spec_.window == 0 || spec_.window > data_.size())
        throw std::invalid_argument("stream: sliding window must fit the data");
      break;
    case StreamKind::random_window:
      if (spec_.pi <= 0.0 || spec_.pi > 1.0)
        throw std::invalid_argument("stream: pi must lie in (0, 1]");
      break;
    case StreamKind::snake_window:
      if (spec_.window == 0)
        throw std::invalid_argument("stream: snake needs a window");
      if (spec_.low_frac < 0.0 || spec_.low_frac >= 1.0)
        throw std::invalid_argument("stream: low_frac must lie in [0, 1)");
      low_bound_ = static_cast<std::size_t>(
          std::ceil(spec_.low_frac * static_cast<double>(spec_.window)));
      break;
  }
}

UpdateEvent StreamGen::insert_next() {
  const WeightedPoint& p = data_[next_idx_++];
  pos_[p.id] = live_ids_.size();
  live_ids_.push_back(p.id);
  ++emitted_;
  return {EventKind::insert, p};
}

UpdateEvent StreamGen::remove_uniform() {
  auto idx = static_cast<std::size_t>(
      uniform01(rng_) * static_cast<double>(live_ids_.size()));
  if (idx >= live_ids_.size()) idx = live_ids_.size() - 1;
  const PointId id = live_ids_[idx];
  live_ids_[idx] = live_ids_.back();
  pos_[live_ids_[idx]] = idx;
  live_ids_.pop_back();
  pos_.erase(id);
  ++emitted_;
  UpdateEvent ev;
  ev.kind = EventKind::remove;
  ev.point.id = id;
  return ev;
}

std::optional<UpdateEvent> StreamGen::next() {
  switch (spec_.kind) {
    case StreamKind::insert_only: {
      if (!data_left()) return std::nullopt;
      return insert_next();
    }
    case StreamKind::sliding_window: {
      if (!data_left()) return std::nullopt;
      if (next_idx_ < spec_.window) return insert_next();
      if (delete_turn_) {
        delete_turn_ = false;
        const PointId id = data_[oldest_++].id;
        const std::size_t idx = pos_.at(id);
        live_ids_[idx] = live_ids_.back();
        pos_[live_ids_[idx]] = idx;
        live_ids_.pop_back();
        pos_.erase(id);
        ++emitted_;
        UpdateEvent ev;
        ev.kind = EventKind::remove;
        ev.point.id = id;
        return ev;
      }
      delete_turn_ = true;
      return insert_next();
    }
    case StreamKind::random_window: {
      if (!data_left()) return std::nullopt;
      if (live_ids_.empty() || uniform01(rng_) < spec_.pi) return insert_next();
      return remove_uniform();
    }
    case StreamKind::snake_window: {
      if (spec_.cycles && cycles_done_ >= spec_.cycles) return std::nullopt;
      const double pi = (phase_ == Phase::grow) ? spec_.pi_hi : spec_.pi_lo;
      // the window is a hard peak: force a removal at the cap the same way
      // an insertion is forced on an empty window
      const bool at_cap = live_ids_.size() >= spec_.window;
      UpdateEvent ev;
      if (live_ids_.empty() || (!at_cap && uniform01(rng_) < pi)) {
        if (!data_left()) return std::nullopt;
        ev = insert_next();
      } else {
        ev = remove_uniform();
      }
      if (phase_ == Phase::grow && live_ids_.size() >= spec_.window) {
        phase_ = Phase::shrink;
      } else if (phase_ == Phase::shrink && live_ids_.size() <= low_bound_) {
        phase_ = Phase::grow;
        ++cycles_done_;
      }
      return ev;
    }
  }
  return std::nullopt;
}

std::vector<UpdateEvent> gen_all(std::vector<WeightedPoint> data, const StreamSpec& spec) {
  StreamGen gen(std::move(data), spec);
  std::vector<UpdateEvent> out;
  while (auto ev = gen.next()) out.push_back(std::move(*ev));
  return out;
}

std::vector<WeightedPoint> gen_birch_like(std::size_t n, std::size_t clusters,
                                          std::size_t dim, std::uint64_t seed,
                                          std::vector<int>* labels) {
  if (n == 0 || clusters == 0 || dim == 0)
    throw std::invalid_argument("gen_birch_like: n, clusters and dim must be positive");
  if (clusters > n) clusters = n;
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> centers(clusters, std::vector<double>(dim));
  std::vector<double> sigma(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    for (std::size_t j = 0; j < dim; ++j) centers[c][j] = 1000.0 * uniform01(rng);
    sigma[c] = 5.0 + 15.0 * uniform01(rng);
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<WeightedPoint> out;
  out.reserve(n);
  if (labels) {
    labels->clear();
    labels->reserve(n);
  }
  PointId id = 0;
  for (std::size_t c = 0; c < clusters; ++c) {
    std::size_t count = n / clusters + (c < n % clusters ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i, ++id) {
      Point p;
      p.coords.resize(dim);
      for (std::size_t j = 0; j < dim; ++j)
        p.coords[j] = centers[c][j] + sigma[c] * gauss(rng);
      out.push_back({id, std::move(p), 1.0});
      if (labels) labels->push_back(static_cast<int>(c));
    }
  }
  return out;
}

namespace {

void append_double(std::string& line, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("stream: failed to format number");
  line.append(buf, end);
}

double parse_double(std::string_view field, std::size_t lineno) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw std::runtime_error("stream: bad number at line " + std::to_string(lineno));
  return v;
}

std::uint64_t parse_id(std::string_view field, std::size_t lineno) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw std::runtime_error("stream: bad id at line " + std::to_string(lineno));
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

void write_stream(const std::string& path, const std::vector<UpdateEvent>& events) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("stream: cannot open " + path + " for writing");
  std::string line;
  for (const UpdateEvent& ev : events) {
    line.clear();
    if (ev.kind == EventKind::remove) {
      line = "D," + std::to_string(ev.point.id);
    } else {
      line = "I," + std::to_string(ev.point.id) + ",";
      append_double(line, ev.point.weight);
      for (double c : ev.point.point.coords) {
        line.push_back(',');
        append_double(line, c);
      }
    }
    line.push_back('\n');
    f << line;
  }
  if (!f) throw std::runtime_error("stream: write to " + path + " failed");
}

std::vector<UpdateEvent> read_stream(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("stream: cannot open " + path);
  std::vector<UpdateEvent> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    UpdateEvent ev;
    if (fields[0] == "D") {
      if (fields.size() != 2)
        throw std::runtime_error("stream: malformed removal at line " +
                                 std::to_string(lineno));
      ev.kind = EventKind::remove;
      ev.point.id = parse_id(fields[1], lineno);
    } else if (fields[0] == "I") {
      if (fields.size() < 4)
        throw std::runtime_error("stream: malformed insertion at line " +
                                 std::to_string(lineno));
      ev.kind = EventKind::insert;
      ev.point.id = parse_id(fields[1], lineno);
      ev.point.weight = parse_double(fields[2], lineno);
      ev.point.point.coords.reserve(fields.size() - 3);
      for (std::size_t i = 3; i < fields.size(); ++i)
        ev.point.point.coords.push_back(parse_double(fields[i], lineno));
    } else {
      throw std::runtime_error("stream: unknown record at line " + std::to_string(lineno));
    }
    out.push_back(std::move(ev));
  }
  return out;
}

ReplayCheck validate_stream(const std::vector<UpdateEvent>& events) {
  ReplayCheck rc;
  std::unordered_set<PointId> live;
  std::size_t dim = 0;
  auto fail = [&rc](std::size_t i, const std::string& what) {
    rc.valid = false;
    rc.error = "event " + std::to_string(i) + ": " + what;
  };
  for (std::size_t i = 0; i < events.size(); ++i) {
    const UpdateEvent& ev = events[i];
    if (ev.kind == EventKind::insert) {
      const WeightedPoint& p = ev.point;
      if (p.point.dim() == 0) return fail(i, "empty point"), rc;
      if (dim == 0) dim = p.point.dim();
      if (p.point.dim() != dim) return fail(i, "dimension mismatch"), rc;
      for (double c : p.point.coords)
        if (!std::isfinite(c)) return fail(i, "non-finite coordinate"), rc;
      if (!std::isfinite(p.weight) || p.weight <= 0.0)
        return fail(i, "bad weight"), rc;
      if (!live.insert(p.id).second) return fail(i, "id already live"), rc;
      ++rc.inserts;
    } else {
      if (!live.erase(ev.point.id)) return fail(i, "removal of non-live id"), rc;
      ++rc.removes;
    }
    rc.max_live = std::max(rc.max_live, live.size());
    rc.final_live = live.size();
  }
  return rc;
}

}  // namespace dynkm
