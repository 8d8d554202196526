#include "dynkm/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dynkm {

namespace {

void append_double(std::string& line, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("report: failed to format number");
  line.append(buf, end);
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

double parse_opt_double(std::string_view field, std::size_t lineno) {
  if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw std::runtime_error("report: bad number at line " + std::to_string(lineno));
  return v;
}

std::size_t parse_size(std::string_view field, std::size_t lineno) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw std::runtime_error("report: bad integer at line " + std::to_string(lineno));
  return v;
}

nlohmann::json stats_json(const TreeStats& s) {
  return {{"node_recomputes", s.node_recomputes},
          {"epoch_starts", s.epoch_starts},
          {"phase_rebuilds", s.phase_rebuilds},
          {"flush_events", s.flush_events},
          {"threshold_flushes", s.threshold_flushes},
          {"coreset_hit_flushes", s.coreset_hit_flushes},
          {"marked_purged", s.marked_purged},
          {"leaf_splits", s.leaf_splits},
          {"leaf_dissolves", s.leaf_dissolves}};
}

}  // namespace

void write_buckets_csv(const std::string& path, const RunRecord& rec) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("report: cannot open " + path + " for writing");
  f << "repeat,op_index,live_size,mean_op_ns,distortion,quality\n";
  std::string line;
  for (const RepeatResult& rr : rec.repeats) {
    for (const Bucket& b : rr.buckets) {
      const Checkpoint* cp = nullptr;
      for (const Checkpoint& c : rr.checkpoints) {
        if (c.op_index > b.last_op) break;
        cp = &c;
      }
      line = std::to_string(rr.repeat) + "," + std::to_string(b.last_op) + "," +
             std::to_string(static_cast<std::size_t>(std::llround(b.mean_live))) + ",";
      append_double(line, b.mean_op_ns);
      line.push_back(',');
      if (cp) append_double(line, cp->distortion);
      line.push_back(',');
      if (cp) append_double(line, cp->quality);
      line.push_back('\n');
      f << line;
    }
  }
  if (!f) throw std::runtime_error("report: write to " + path + " failed");
}

std::vector<BucketRow> read_buckets_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("report: cannot open " + path);
  std::vector<BucketRow> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("repeat,", 0) == 0) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 6)
      throw std::runtime_error("report: expected 6 columns at line " +
                               std::to_string(lineno));
    BucketRow row;
    row.repeat = parse_size(fields[0], lineno);
    row.op_index = parse_size(fields[1], lineno);
    row.live_size = parse_size(fields[2], lineno);
    row.mean_op_ns = parse_opt_double(fields[3], lineno);
    row.distortion = parse_opt_double(fields[4], lineno);
    row.quality = parse_opt_double(fields[5], lineno);
    out.push_back(row);
  }
  return out;
}

nlohmann::json summary_json(const RunRecord& rec) {
  const RunConfig& cfg = rec.cfg;
  nlohmann::json j;
  j["algo"] = algo_name(cfg.algo);
  j["k"] = cfg.k;
  j["s"] = cfg.s;
  j["delta"] = cfg.delta;
  j["seed"] = cfg.seed;
  j["repeats"] = cfg.repeats;
  j["stream"] = {{"kind", stream_kind_name(cfg.stream.kind)},
                 {"window", cfg.stream.window},
                 {"pi", cfg.stream.pi},
                 {"low_frac", cfg.stream.low_frac},
                 {"pi_hi", cfg.stream.pi_hi},
                 {"pi_lo", cfg.stream.pi_lo},
                 {"cycles", cfg.stream.cycles}};
  j["measure"] = {{"start", cfg.measure_start}, {"count", cfg.measure_count}};
  j["mean_op_ns"] = rec.mean_op_ns;
  j["median_quality"] = rec.median_quality;
  j["median_distortion"] = rec.median_distortion;
  j["stats"] = stats_json(rec.total_stats);
  nlohmann::json reps = nlohmann::json::array();
  for (const RepeatResult& rr : rec.repeats) {
    nlohmann::json r;
    r["repeat"] = rr.repeat;
    r["ops"] = rr.ops;
    r["total_ns"] = rr.total_ns;
    r["final_live"] = rr.final_live;
    r["median_quality"] = rr.median_quality;
    r["median_distortion"] = rr.median_distortion;
    r["stats"] = stats_json(rr.stats);
    nlohmann::json buckets = nlohmann::json::array();
    for (const Bucket& b : rr.buckets)
      buckets.push_back({{"first_op", b.first_op},
                         {"last_op", b.last_op},
                         {"ops", b.ops},
                         {"mean_op_ns", b.mean_op_ns},
                         {"mean_live", b.mean_live}});
    r["buckets"] = std::move(buckets);
    nlohmann::json cps = nlohmann::json::array();
    for (const Checkpoint& cp : rr.checkpoints)
      cps.push_back({{"op_index", cp.op_index},
                     {"live_size", cp.live_size},
                     {"coreset_size", cp.coreset_size},
                     {"distortion", cp.distortion},
                     {"quality", cp.quality},
                     {"cost_full", cp.cost_full},
                     {"cost_coreset", cp.cost_coreset}});
    r["checkpoints"] = std::move(cps);
    reps.push_back(std::move(r));
  }
  j["repeats_detail"] = std::move(reps);
  return j;
}

void write_summary_json(const std::string& path, const RunRecord& rec) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("report: cannot open " + path + " for writing");
  f << summary_json(rec).dump(2) << "\n";
  if (!f) throw std::runtime_error("report: write to " + path + " failed");
}

double speedup(double ref_mean_op_ns, double alg_mean_op_ns) {
  if (alg_mean_op_ns <= 0.0) return std::numeric_limits<double>::infinity();
  return ref_mean_op_ns / alg_mean_op_ns;
}

}  // namespace dynkm
