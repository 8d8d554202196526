#include "dynkm/dyn_tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace dynkm {

struct DynTree::Node {
  Node* parent = nullptr;
  std::unique_ptr<Node> left, right;
  bool is_leaf = true;
  std::vector<WeightedPoint> points;   // leaf payload
  Coreset base;                        // inner: coreset at epoch start
  std::vector<WeightedPoint> buffer;   // inner: inserts since epoch start
  std::size_t epoch_inserts = 0;
  bool dirty = false;

  int depth() const {
    int d = 0;
    for (const Node* p = parent; p; p = p->parent) ++d;
    return d;
  }
};

DynTree::DynTree(const DynTreeConfig& cfg) : cfg_(cfg), rng_(cfg.rng_seed) {
  if (cfg_.s < 2) throw std::invalid_argument("dyn_tree: s must be at least 2");
  if (cfg_.s <= cfg_.k) throw std::invalid_argument("dyn_tree: s must exceed k");
  if (cfg_.delta < 0.0 || cfg_.delta > 1.0)
    throw std::invalid_argument("dyn_tree: delta must lie in [0, 1]");
  coreset_cfg_ = {cfg_.k, cfg_.s, 0.0, 0};
}

DynTree::~DynTree() = default;
DynTree::DynTree(DynTree&&) noexcept = default;
DynTree& DynTree::operator=(DynTree&&) noexcept = default;

// ---- structure helpers ----

DynTree::Node* DynTree::leftmost_lowest_leaf() const {
  Node* best = nullptr;
  int best_depth = 0;
  // in-order walk; first leaf at the minimum depth wins
  std::function<void(Node*, int)> walk = [&](Node* v, int d) {
    if (v->is_leaf) {
      if (!best || d < best_depth) {
        best = v;
        best_depth = d;
      }
      return;
    }
    walk(v->left.get(), d + 1);
    walk(v->right.get(), d + 1);
  };
  walk(root_.get(), 0);
  return best;
}

DynTree::Node* DynTree::rightmost_deepest_leaf() const {
  Node* best = nullptr;
  int best_depth = -1;
  std::function<void(Node*, int)> walk = [&](Node* v, int d) {
    if (v->is_leaf) {
      if (d >= best_depth) {  // >= keeps the rightmost on ties
        best = v;
        best_depth = d;
      }
      return;
    }
    walk(v->left.get(), d + 1);
    walk(v->right.get(), d + 1);
  };
  walk(root_.get(), 0);
  return best;
}

// The leftmost lowest leaf becomes an inner node: its payload moves into a new
// left child and a fresh right child becomes the special leaf. Subtree
// contents are unchanged, so no coreset is recomputed here.
void DynTree::split_for_special() {
  ++stats_.leaf_splits;
  Node* l = leftmost_lowest_leaf();
  auto a = std::make_unique<Node>();
  auto b = std::make_unique<Node>();
  a->parent = b->parent = l;
  a->points = std::move(l->points);
  a->epoch_inserts = l->epoch_inserts;
  for (const WeightedPoint& p : a->points) live_[p.id].leaf = a.get();
  l->is_leaf = false;
  l->points.clear();
  l->base = Coreset{};
  l->base.points = a->points;
  l->buffer.clear();
  special_ = b.get();
  l->left = std::move(a);
  l->right = std::move(b);
}

void DynTree::swap_positions(Node* a, Node* b) {
  Node* pa = a->parent;
  Node* pb = b->parent;
  auto& slot_a = (pa->left.get() == a) ? pa->left : pa->right;
  auto& slot_b = (pb->left.get() == b) ? pb->left : pb->right;
  slot_a.swap(slot_b);
  a->parent = pb;
  b->parent = pa;
}

void DynTree::maintained_into(const Node* v, std::vector<WeightedPoint>& out) const {
  if (v->is_leaf) {
    out.insert(out.end(), v->points.begin(), v->points.end());
  } else {
    out.insert(out.end(), v->base.points.begin(), v->base.points.end());
    out.insert(out.end(), v->buffer.begin(), v->buffer.end());
  }
}

double DynTree::maintained_clamped(const Node* v) const {
  return v->is_leaf ? 0.0 : v->base.clamped_mass;
}

void DynTree::recompute_node(Node* v) {
  ++stats_.node_recomputes;
  v->epoch_inserts = 0;
  if (v->is_leaf) return;  // a leaf coreset is its payload
  std::vector<WeightedPoint> init;
  maintained_into(v->left.get(), init);
  maintained_into(v->right.get(), init);
  const double inherited =
      maintained_clamped(v->left.get()) + maintained_clamped(v->right.get());
  if (init.empty()) {
    v->base = Coreset{};
  } else {
    v->base = build_coreset(init, coreset_cfg_, rng_);
  }
  v->base.clamped_mass += inherited;
  v->buffer.clear();
}

void DynTree::recompute_path(Node* v) {
  for (; v; v = v->parent) recompute_node(v);
}

void DynTree::recompute_all(Node* v) {
  if (!v) return;
  if (!v->is_leaf) {
    recompute_all(v->left.get());
    recompute_all(v->right.get());
  }
  recompute_node(v);
}

bool DynTree::root_contains(PointId id) const {
  if (!root_) return false;
  const Node* r = root_.get();
  if (r->is_leaf) {
    for (const WeightedPoint& p : r->points)
      if (p.id == id) return true;
    return false;
  }
  for (const WeightedPoint& p : r->base.points)
    if (p.id == id) return true;
  for (const WeightedPoint& p : r->buffer)
    if (p.id == id) return true;
  return false;
}

DynTree::Node* DynTree::lowest_trigger(Node* leaf) const {
  for (Node* v = leaf; v; v = v->parent)
    if (v->epoch_inserts >= cfg_.s) return v;
  return nullptr;
}

// ---- batched recomputation ----

void DynTree::mark_dirty(Node* v, std::vector<Node*>& dirty) {
  if (v && !v->dirty) {
    v->dirty = true;
    dirty.push_back(v);
  }
}

// Recompute dirty nodes bottom-up, each node once, parents queued as their
// children are processed. Depths are taken after surgery settled.
void DynTree::flush_recompute(std::vector<Node*>& dirty) {
  std::map<int, std::vector<Node*>, std::greater<int>> levels;
  for (Node* v : dirty) levels[v->depth()].push_back(v);
  while (!levels.empty()) {
    auto it = levels.begin();
    const int d = it->first;
    std::vector<Node*> batch = std::move(it->second);
    levels.erase(it);
    for (Node* v : batch) {
      if (!v->dirty) continue;
      v->dirty = false;
      recompute_node(v);
      Node* p = v->parent;
      if (p && !p->dirty) {
        p->dirty = true;
        levels[d - 1].push_back(p);
      }
    }
  }
  dirty.clear();
}

// ---- deletion machinery ----

// An underfull leaf dissolves into the special leaf. If the special leaf would
// reach capacity it is promoted to a normal leaf and the shrunken leaf itself
// becomes the new special leaf; otherwise the emptied position is removed.
void DynTree::dissolve_leaf(Node* leaf, std::vector<Node*>& dirty) {
  ++stats_.leaf_dissolves;
  if (!special_) {
    special_ = leaf;
    mark_dirty(leaf, dirty);
    return;
  }
  if (special_->points.size() + leaf->points.size() < cfg_.s) {
    for (WeightedPoint& p : leaf->points) {
      live_[p.id].leaf = special_;
      special_->points.push_back(std::move(p));
    }
    leaf->points.clear();
    mark_dirty(special_, dirty);
    remove_leaf_position(leaf, dirty);
  } else {
    const std::size_t take = cfg_.s - special_->points.size();
    for (std::size_t i = 0; i < take; ++i) {
      live_[leaf->points[i].id].leaf = special_;
      special_->points.push_back(std::move(leaf->points[i]));
    }
    leaf->points.erase(leaf->points.begin(), leaf->points.begin() + take);
    mark_dirty(special_, dirty);
    special_ = leaf;  // promoted-at-capacity; remainder is the new special
    mark_dirty(leaf, dirty);
  }
}

void DynTree::remove_leaf_position(Node* leaf, std::vector<Node*>& dirty) {
  Node* donor = rightmost_deepest_leaf();
  if (donor != leaf) {
    swap_positions(leaf, donor);
    mark_dirty(donor, dirty);
  }
  Node* p = leaf->parent;
  auto drop = [&dirty](Node* n) {
    dirty.erase(std::remove(dirty.begin(), dirty.end(), n), dirty.end());
  };
  drop(leaf);  // both destroyed nodes may have been queued earlier
  if (!p) {
    if (special_ == leaf) special_ = nullptr;
    root_.reset();
    return;
  }
  drop(p);
  auto& leaf_slot = (p->left.get() == leaf) ? p->left : p->right;
  auto& sib_slot = (p->left.get() == leaf) ? p->right : p->left;
  std::unique_ptr<Node> sib = std::move(sib_slot);
  Node* g = p->parent;
  sib->parent = g;
  leaf_slot.reset();  // destroys the dissolved leaf
  if (!g) {
    root_ = std::move(sib);  // destroys p
  } else {
    auto& p_slot = (g->left.get() == p) ? g->left : g->right;
    p_slot = std::move(sib);
    mark_dirty(g, dirty);
  }
}

// Physically remove the given ids (sorted by the callers for determinism),
// run leaf surgery where leaves fell to s/2 or below, then recompute all
// affected paths bottom-up, each node once.
void DynTree::flush_ids(const std::vector<PointId>& ids) {
  std::vector<Node*> touched;
  std::unordered_set<Node*> touched_set;
  for (PointId id : ids) {
    auto it = live_.find(id);
    if (it == live_.end()) continue;
    Node* leaf = it->second.leaf;
    auto& pts = leaf->points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].id == id) {
        pts.erase(pts.begin() + i);
        break;
      }
    }
    if (marked_.erase(id)) ++stats_.marked_purged;
    live_.erase(it);
    if (touched_set.insert(leaf).second) touched.push_back(leaf);
  }
  std::vector<Node*> dirty;
  for (Node* leaf : touched) {
    if (leaf != special_ && 2 * leaf->points.size() <= cfg_.s)
      dissolve_leaf(leaf, dirty);
    else
      mark_dirty(leaf, dirty);
  }
  flush_recompute(dirty);
}

void DynTree::purge_all_marked() {
  if (marked_.empty()) return;
  flush_ids(marked_ids());
}

// ---- public operations ----

void DynTree::insert(const WeightedPoint& p) {
  validate_point(p);
  if (is_synthetic_id(p.id))
    throw std::invalid_argument("insert: id collides with synthetic id range");
  if (marked_.count(p.id)) flush_ids({p.id});  // evict the stale deleted copy
  if (live_.count(p.id)) throw std::invalid_argument("insert: duplicate id");
  if (dim_ == 0) dim_ = p.point.dim();
  if (p.point.dim() != dim_ || dim_ == 0)
    throw std::invalid_argument("insert: dimension mismatch");

  if (!root_) {
    root_ = std::make_unique<Node>();
    special_ = root_.get();
  } else if (!special_) {
    split_for_special();
  }
  Node* ins_leaf = special_;
  ins_leaf->points.push_back(p);
  live_[p.id] = {ins_leaf, p.weight};

  if (cfg_.insertion_epochs) {
    for (Node* v = ins_leaf; v; v = v->parent) {
      ++v->epoch_inserts;
      if (!v->is_leaf) v->buffer.push_back(p);
    }
    if (lowest_trigger(ins_leaf)) {
      ++stats_.epoch_starts;
      // an insertion-driven recomputation also purges marked points
      if (cfg_.lazy_deletes && !marked_.empty()) purge_all_marked();
      if (Node* vt = lowest_trigger(ins_leaf)) recompute_path(vt);
    }
  } else {
    if (cfg_.lazy_deletes && !marked_.empty()) purge_all_marked();
    if (ins_leaf->parent) recompute_path(ins_leaf->parent);
  }

  if (special_ == ins_leaf && ins_leaf->points.size() >= cfg_.s)
    special_ = nullptr;  // full; the next insert opens a fresh special leaf
  maybe_start_phase();
}

void DynTree::remove(PointId id) {
  auto it = live_.find(id);
  if (it == live_.end()) throw std::invalid_argument("remove: unknown id");
  if (marked_.count(id)) return;

  const bool lazy = cfg_.lazy_deletes && cfg_.delta > 0.0;
  if (lazy) {
    const bool hit = root_contains(id);
    const auto threshold = static_cast<std::size_t>(
        std::ceil(cfg_.delta * static_cast<double>(live_.size())));
    if (!hit && marked_.size() < threshold) {
      marked_.insert(id);
      return;
    }
    ++stats_.flush_events;
    if (hit)
      ++stats_.coreset_hit_flushes;
    else
      ++stats_.threshold_flushes;
    std::vector<PointId> ids = marked_ids();
    ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    flush_ids(ids);
  } else {
    ++stats_.flush_events;
    flush_ids({id});
  }
  maybe_start_phase();
}

Coreset DynTree::root_coreset() const {
  Coreset out;
  if (!root_) return out;
  std::vector<WeightedPoint> maintained;
  maintained_into(root_.get(), maintained);
  out.points.reserve(maintained.size());
  for (WeightedPoint& p : maintained)
    if (!marked_.count(p.id)) out.points.push_back(std::move(p));
  out.clamped_mass = maintained_clamped(root_.get());
  return out;
}

std::vector<PointId> DynTree::marked_ids() const {
  std::vector<PointId> ids(marked_.begin(), marked_.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

double DynTree::live_weight() const {
  double acc = 0.0;
  for (const auto& [id, entry] : live_)
    if (!marked_.count(id)) acc += entry.weight;
  return acc;
}

// ---- phases ----

void DynTree::maybe_start_phase() {
  const std::size_t n = live_.size();
  if (n == phase_start_size_) return;
  if (2 * n >= 3 * phase_start_size_ || 3 * n <= 2 * phase_start_size_)
    rebuild_phase();
}

void DynTree::collect_inorder(const Node* v, std::vector<WeightedPoint>& out) const {
  if (!v) return;
  if (v->is_leaf) {
    for (const WeightedPoint& p : v->points)
      if (live_.count(p.id)) out.push_back(p);
    return;
  }
  collect_inorder(v->left.get(), out);
  collect_inorder(v->right.get(), out);
}

void DynTree::rebuild_phase() {
  ++stats_.phase_rebuilds;
  for (PointId id : marked_ids()) {
    live_.erase(id);
    ++stats_.marked_purged;
  }
  marked_.clear();

  std::vector<WeightedPoint> pts;
  pts.reserve(live_.size());
  collect_inorder(root_.get(), pts);
  root_.reset();
  special_ = nullptr;
  phase_start_size_ = live_.size();
  if (pts.empty()) return;

  // chunk into full leaves of s points; a remainder becomes the special leaf
  const std::size_t s = cfg_.s;
  const std::size_t full = pts.size() / s;
  const std::size_t rem = pts.size() % s;
  const std::size_t leaves = full + (rem ? 1 : 0);

  std::function<std::unique_ptr<Node>(std::size_t, std::size_t)> build =
      [&](std::size_t first, std::size_t count) -> std::unique_ptr<Node> {
    auto v = std::make_unique<Node>();
    if (count == 1) {
      const std::size_t begin = first * s;
      const std::size_t end = std::min(begin + s, pts.size());
      v->points.assign(pts.begin() + begin, pts.begin() + end);
      for (const WeightedPoint& p : v->points) live_[p.id].leaf = v.get();
      if (rem && first == leaves - 1) special_ = v.get();
      return v;
    }
    v->is_leaf = false;
    const std::size_t half = (count + 1) / 2;
    v->left = build(first, half);
    v->right = build(first + half, count - half);
    v->left->parent = v.get();
    v->right->parent = v.get();
    return v;
  };
  root_ = build(0, leaves);
  recompute_all(root_.get());
}

// ---- introspection ----

std::vector<DynTree::NodeView> DynTree::audit_nodes() const {
  std::vector<NodeView> out;
  std::function<double(const Node*, int)> walk = [&](const Node* v, int d) -> double {
    NodeView view;
    view.depth = d;
    view.leaf = v->is_leaf;
    view.special = (v == special_);
    double rep = 0.0;
    if (v->is_leaf) {
      view.stored_points = v->points.size();
      view.epoch_inserts = v->epoch_inserts;
      view.maintained_size = v->points.size();
      for (const WeightedPoint& p : v->points) {
        view.maintained_weight += p.weight;
        rep += p.weight;
      }
    } else {
      const std::size_t slot = out.size();
      out.push_back({});  // reserve ordering: parent row before children
      rep = walk(v->left.get(), d + 1) + walk(v->right.get(), d + 1);
      view.buffer_size = v->buffer.size();
      view.epoch_inserts = v->epoch_inserts;
      view.maintained_size = v->base.points.size() + v->buffer.size();
      for (const WeightedPoint& p : v->base.points) view.maintained_weight += p.weight;
      for (const WeightedPoint& p : v->buffer) view.maintained_weight += p.weight;
      view.cum_clamped = v->base.clamped_mass;
      view.represented_weight = rep;
      out[slot] = view;
      return rep;
    }
    view.represented_weight = rep;
    out.push_back(view);
    return rep;
  };
  if (root_) walk(root_.get(), 0);
  return out;
}

}  // namespace dynkm
