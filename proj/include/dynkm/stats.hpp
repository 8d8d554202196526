#pragma once

#include <cstdint>

namespace dynkm {

// Maintenance counters shared by the coreset structures. Fields that do not
// apply to a structure stay zero (the shallow tree never starts epochs, the
// plain tree never marks points, ...).
struct TreeStats {
  std::uint64_t node_recomputes = 0;   // single-node coreset rebuilds
  std::uint64_t epoch_starts = 0;      // insertion-count epoch triggers
  std::uint64_t phase_rebuilds = 0;    // full structure rebuilds
  std::uint64_t flush_events = 0;      // deletions that ran the eager path
  std::uint64_t threshold_flushes = 0; // flushes due to the marked-count cap
  std::uint64_t coreset_hit_flushes = 0;  // flushes due to a root-coreset hit
  std::uint64_t marked_purged = 0;     // marked points physically removed
  std::uint64_t leaf_splits = 0;
  std::uint64_t leaf_dissolves = 0;

  bool operator==(const TreeStats&) const = default;
};

}  // namespace dynkm
