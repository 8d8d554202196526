#pragma once

#include <optional>
#include <string>

#include "dynkm/coreset.hpp"
#include "dynkm/stats.hpp"
#include "dynkm/streams.hpp"

namespace dynkm {

enum class Algo {
  dynamic,            // merge-and-reduce tree, no optimizations
  optimized_dynamic,  // insertion epochs + lazy deletions
  shallow,            // fixed-height hashed tree
  static_coreset,     // rebuild a coreset from scratch every operation
  random_sample,      // s uniform samples, total weight preserved
  kmeans_only,        // k-means++ directly on the live set
};

std::string algo_name(Algo a);
std::optional<Algo> parse_algo(std::string_view name);

struct RunConfig {
  Algo algo = Algo::dynamic;
  std::size_t k = 10;
  std::size_t s = 0;        // 0 resolves to 5k
  double delta = -1.0;      // <0 resolves to 2s/window (sliding) or 0.03
  StreamSpec stream;        // rng_seed is re-derived per repeat
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 100;  // quality probes, in measured ops
  std::size_t buckets = 20;            // timing aggregation chunks
  std::size_t measure_start = 0;       // raw event index where timing begins
  std::size_t measure_count = 0;       // 0 measures to the end of the stream
  std::size_t shallow_height = 1;
  std::size_t shallow_arity = 0;       // 0 derives it from n_hint
  std::size_t n_hint = 0;              // 0 resolves to window or data size
};

// Fills the size-dependent defaults in place: s, delta and n_hint.
void resolve_run_defaults(RunConfig& cfg, std::size_t data_size);

struct Checkpoint {
  std::size_t op_index = 0;  // raw event index of the probed operation
  std::size_t live_size = 0;
  std::size_t coreset_size = 0;
  double distortion = 0.0;
  double quality = 0.0;
  double cost_full = 0.0;
  double cost_coreset = 0.0;
};

struct Bucket {
  std::size_t first_op = 0;  // raw event indices, inclusive
  std::size_t last_op = 0;
  std::size_t ops = 0;
  double mean_op_ns = 0.0;
  double mean_live = 0.0;
};

struct RepeatResult {
  std::size_t repeat = 0;
  std::vector<Bucket> buckets;
  std::vector<Checkpoint> checkpoints;
  TreeStats stats;
  double total_ns = 0.0;  // timed work across the measured window
  std::size_t ops = 0;    // measured operations
  std::size_t final_live = 0;
  double median_quality = 0.0;
  double median_distortion = 0.0;
};

struct RunRecord {
  RunConfig cfg;
  std::vector<RepeatResult> repeats;
  double mean_op_ns = 0.0;        // pooled over repeats
  double median_quality = 0.0;    // pooled over all checkpoints
  double median_distortion = 0.0;
  TreeStats total_stats;          // counters summed over repeats
};

// Replays the configured stream over the dataset once per repeat. The timed
// section of an operation is the structure update plus coreset extraction
// plus solving k-means++ on the coreset; checkpoints and the live-set mirror
// are maintained outside it. The dataset is shared by all repeats; stream and
// structure seeds are derived from cfg.seed and the repeat index.
RunRecord run(const RunConfig& cfg, const std::vector<WeightedPoint>& data);

// Replays a pre-materialized event sequence instead of generating one.
RunRecord run_events(const RunConfig& cfg, const std::vector<UpdateEvent>& events);

// Median of a sample; averages the middle pair for even sizes.
double median(std::vector<double> v);

}  // namespace dynkm
