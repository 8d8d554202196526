#pragma once

#include <functional>
#include <memory>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "dynkm/coreset.hpp"
#include "dynkm/stats.hpp"

namespace dynkm {

struct DynTreeConfig {
  std::size_t k = 10;
  std::size_t s = 50;   // leaf capacity and per-node coreset size; s > k
  double delta = 0.0;   // lazy-deletion cut-off as a fraction of live points
  bool insertion_epochs = false;
  bool lazy_deletes = false;
  std::uint64_t rng_seed = 0;
};

// Fully dynamic coreset over a balanced merge-and-reduce tree. Leaves store
// between s/2 and s raw points (one special leaf absorbs insertions and may
// hold fewer); every inner node maintains a coreset of its children built
// with build_coreset. Phases bound the imbalance: the whole tree is rebuilt
// when the live count drifts 50% away from the phase start.
//
// With insertion_epochs, inserted points accumulate in per-node buffers and a
// node is only recomputed once s insertions reached it (an epoch ending at a
// node also ends at all its ancestors). With lazy_deletes and delta > 0, a
// deleted point that is absent from the root coreset is only marked until
// ceil(delta * n) points are marked; marked points are filtered from the
// reported coreset and physically purged on the next insertion-driven
// recomputation, flush, or rebuild.
class DynTree {
 public:
  explicit DynTree(const DynTreeConfig& cfg);
  ~DynTree();
  DynTree(DynTree&&) noexcept;
  DynTree& operator=(DynTree&&) noexcept;
  DynTree(const DynTree&) = delete;
  DynTree& operator=(const DynTree&) = delete;

  void insert(const WeightedPoint& p);
  void remove(PointId id);  // marked ids are a no-op, unknown ids throw

  // Current root coreset with marked points filtered out.
  Coreset root_coreset() const;

  const TreeStats& stats() const { return stats_; }
  const DynTreeConfig& config() const { return cfg_; }
  std::size_t live_size() const { return live_.size(); }  // includes marked
  std::size_t marked_size() const { return marked_.size(); }
  bool contains(PointId id) const { return live_.count(id) != 0; }
  bool is_marked(PointId id) const { return marked_.count(id) != 0; }
  std::vector<PointId> marked_ids() const;  // sorted
  double live_weight() const;               // total weight, marked excluded

  // introspection for audits
  struct NodeView {
    int depth = 0;
    bool leaf = false;
    bool special = false;
    std::size_t stored_points = 0;     // leaf payload size
    std::size_t buffer_size = 0;
    std::size_t epoch_inserts = 0;
    std::size_t maintained_size = 0;   // current node coreset size
    double maintained_weight = 0.0;
    double cum_clamped = 0.0;          // clamped mass accumulated below
    double represented_weight = 0.0;   // raw weight stored in the subtree
  };
  std::vector<NodeView> audit_nodes() const;

 private:
  struct Node;

  Node* leftmost_lowest_leaf() const;
  Node* rightmost_deepest_leaf() const;
  void split_for_special();
  void swap_positions(Node* a, Node* b);
  void maintained_into(const Node* v, std::vector<WeightedPoint>& out) const;
  double maintained_clamped(const Node* v) const;
  void recompute_node(Node* v);
  void recompute_path(Node* v);
  void recompute_all(Node* v);
  bool root_contains(PointId id) const;
  Node* lowest_trigger(Node* leaf) const;
  void mark_dirty(Node* v, std::vector<Node*>& dirty);
  void flush_recompute(std::vector<Node*>& dirty);
  void dissolve_leaf(Node* leaf, std::vector<Node*>& dirty);
  void remove_leaf_position(Node* leaf, std::vector<Node*>& dirty);
  void flush_ids(const std::vector<PointId>& ids);
  void purge_all_marked();
  void maybe_start_phase();
  void rebuild_phase();
  void collect_inorder(const Node* v, std::vector<WeightedPoint>& out) const;

  struct LiveEntry {
    Node* leaf = nullptr;
    double weight = 0.0;
  };

  DynTreeConfig cfg_;
  CoresetConfig coreset_cfg_;
  std::mt19937_64 rng_;
  std::unique_ptr<Node> root_;
  Node* special_ = nullptr;
  std::unordered_map<PointId, LiveEntry> live_;
  std::unordered_set<PointId> marked_;
  std::size_t phase_start_size_ = 0;
  std::size_t dim_ = 0;  // fixed at first insert
  TreeStats stats_;
};

}  // namespace dynkm
