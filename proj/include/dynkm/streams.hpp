#pragma once

#include <optional>
#include <random>
#include <string>
#include <unordered_map>

#include "dynkm/core.hpp"

namespace dynkm {

enum class EventKind { insert, remove };

struct UpdateEvent {
  EventKind kind = EventKind::insert;
  WeightedPoint point;  // removals only use point.id
};

enum class StreamKind { insert_only, sliding_window, random_window, snake_window };

std::string stream_kind_name(StreamKind k);
std::optional<StreamKind> parse_stream_kind(std::string_view name);

struct StreamSpec {
  StreamKind kind = StreamKind::insert_only;
  std::size_t window = 0;   // t: sliding width, snake peak
  double pi = 0.5;          // random_window insert probability
  double low_frac = 0.2;    // snake trough as a fraction of the peak
  double pi_hi = 0.9;       // snake grow-phase insert probability
  double pi_lo = 0.1;       // snake shrink-phase insert probability
  std::size_t cycles = 0;   // snake grow+shrink pairs; 0 runs until data ends
  std::uint64_t rng_seed = 0;
};

// Lazily turns a dataset into a sequence of insertions and deletions.
//
//   insert_only     each data point once, in order
//   sliding_window  t warm-up inserts, then delete-oldest / insert-next pairs
//   random_window   insert with probability pi, else delete a uniform live
//                   point; inserts are forced while nothing is live
//   snake_window    alternate grow phases (pi_hi) up to t live points and
//                   shrink phases (pi_lo) down to ceil(low_frac * t)
//
// Every stream ends when the data is exhausted; a snake additionally ends
// after `cycles` full grow+shrink pairs when that cap is set.
class StreamGen {
 public:
  StreamGen(std::vector<WeightedPoint> data, const StreamSpec& spec);

  std::optional<UpdateEvent> next();
  std::size_t live_size() const { return live_ids_.size(); }
  std::size_t emitted() const { return emitted_; }

 private:
  UpdateEvent insert_next();
  UpdateEvent remove_uniform();
  bool data_left() const { return next_idx_ < data_.size(); }

  std::vector<WeightedPoint> data_;
  StreamSpec spec_;
  std::mt19937_64 rng_;
  std::size_t next_idx_ = 0;
  std::size_t oldest_ = 0;  // sliding eviction cursor into data_
  bool delete_turn_ = true;
  std::vector<PointId> live_ids_;
  std::unordered_map<PointId, std::size_t> pos_;
  enum class Phase { grow, shrink } phase_ = Phase::grow;
  std::size_t low_bound_ = 0;
  std::size_t cycles_done_ = 0;
  std::size_t emitted_ = 0;
};

// Convenience: run a generator to completion.
std::vector<UpdateEvent> gen_all(std::vector<WeightedPoint> data, const StreamSpec& spec);

// Synthetic mixture in the style of the classic Birch benchmarks: `clusters`
// isotropic Gaussians with centers uniform in [0, 1000]^dim and per-cluster
// sigma uniform in [5, 20]. Ids run 0..n-1 grouped by cluster, weights are 1.
// When `labels` is given it receives the cluster index of each point.
std::vector<WeightedPoint> gen_birch_like(std::size_t n = 100000,
                                          std::size_t clusters = 100,
                                          std::size_t dim = 2,
                                          std::uint64_t seed = 0,
                                          std::vector<int>* labels = nullptr);

// Plain-text replay files, one event per line:
//   I,<id>,<weight>,<coord>,...
//   D,<id>
void write_stream(const std::string& path, const std::vector<UpdateEvent>& events);
std::vector<UpdateEvent> read_stream(const std::string& path);

struct ReplayCheck {
  bool valid = true;
  std::string error;  // first violation, empty when valid
  std::size_t inserts = 0;
  std::size_t removes = 0;
  std::size_t max_live = 0;
  std::size_t final_live = 0;
};

// Checks that a stream is replayable: inserts carry finite coordinates of a
// consistent dimension and positive weight, no id is inserted while live, and
// removals only target live ids.
ReplayCheck validate_stream(const std::vector<UpdateEvent>& events);

}  // namespace dynkm
