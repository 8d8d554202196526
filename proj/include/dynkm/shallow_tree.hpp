#pragma once

#include <random>
#include <unordered_map>

#include "dynkm/coreset.hpp"
#include "dynkm/stats.hpp"

namespace dynkm {

// Arity minimizing total per-update work for a complete tree of the given
// height over n points with per-node coresets of size s: (n/s)^(1/(h+1)),
// rounded to the nearest integer and at least 1.
std::size_t optimal_g(std::size_t n, std::size_t s, std::size_t h);

struct ShallowConfig {
  std::size_t k = 10;
  std::size_t s = 50;
  std::size_t height = 1;   // h >= 1 inner levels above the leaves
  std::size_t arity = 0;    // g; 0 derives it from n_hint via optimal_g
  std::size_t n_hint = 0;   // expected live size; only used when arity == 0
  std::uint64_t rng_seed = 0;
};

// Coreset over a complete g-ary tree of fixed height h. Points are routed to
// one of the g^h leaf buckets by hashing their id, so an update touches one
// leaf and its h ancestors: exactly h+1 node recomputations, independent of
// the live count. There are no epochs, lazy deletions or phases; instead
// needs_rebuild() reports when the live count drifted a factor 1.5 away from
// the hint the arity was derived from, and the caller decides when to call
// rebuild() with a fresh hint.
class ShallowTree {
 public:
  explicit ShallowTree(const ShallowConfig& cfg);

  void insert(const WeightedPoint& p);
  void remove(PointId id);  // unknown ids throw

  Coreset root_coreset() const { return levels_[0][0]; }

  const TreeStats& stats() const { return stats_; }
  const ShallowConfig& config() const { return cfg_; }
  std::size_t live_size() const { return live_.size(); }
  std::size_t arity() const { return g_; }
  std::size_t leaf_count() const { return leaves_.size(); }
  bool contains(PointId id) const { return live_.count(id) != 0; }
  double live_weight() const;

  bool needs_rebuild() const;
  void rebuild(std::size_t n_hint);  // re-derives the arity and re-routes

 private:
  std::size_t route(PointId id) const;
  void recompute_node(std::size_t level, std::size_t idx);
  void recompute_path(std::size_t leaf_idx);
  void reshape(std::size_t g);  // allocate empty levels for arity g

  ShallowConfig cfg_;
  CoresetConfig coreset_cfg_;
  std::mt19937_64 rng_;
  std::size_t g_ = 2;
  std::size_t n_hint_ = 1;
  std::vector<std::vector<WeightedPoint>> leaves_;  // g^h buckets
  std::vector<std::vector<Coreset>> levels_;        // levels_[l] has g^l nodes
  std::unordered_map<PointId, double> live_;
  std::size_t dim_ = 0;
  TreeStats stats_;
};

}  // namespace dynkm
