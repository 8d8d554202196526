#include "dynkm/shallow_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynkm/rng.hpp"

namespace dynkm {

std::size_t optimal_g(std::size_t n, std::size_t s, std::size_t h) {
  if (s == 0) throw std::invalid_argument("optimal_g: s must be positive");
  const double ratio = static_cast<double>(n) / static_cast<double>(s);
  const double g = std::pow(ratio, 1.0 / static_cast<double>(h + 1));
  const long long r = std::llround(g);
  return r < 1 ? 1 : static_cast<std::size_t>(r);
}

namespace {

// g^h with an explicit cap so a misconfigured tree fails fast instead of
// exhausting memory on leaf buckets
std::size_t checked_pow(std::size_t g, std::size_t h) {
  constexpr std::size_t kMaxLeaves = std::size_t{1} << 24;
  std::size_t r = 1;
  for (std::size_t i = 0; i < h; ++i) {
    if (r > kMaxLeaves / g)
      throw std::invalid_argument("shallow_tree: arity^height too large");
    r *= g;
  }
  return r;
}

}  // namespace

ShallowTree::ShallowTree(const ShallowConfig& cfg) : cfg_(cfg), rng_(cfg.rng_seed) {
  if (cfg_.height < 1)
    throw std::invalid_argument("shallow_tree: height must be at least 1");
  if (cfg_.s <= cfg_.k)
    throw std::invalid_argument("shallow_tree: s must exceed k");
  if (cfg_.arity == 1) throw std::invalid_argument("shallow_tree: arity must be >= 2");
  coreset_cfg_ = {cfg_.k, cfg_.s, 0.0, 0};
  n_hint_ = std::max<std::size_t>(1, cfg_.n_hint);
  const std::size_t g =
      cfg_.arity ? cfg_.arity
                 : std::max<std::size_t>(2, optimal_g(n_hint_, cfg_.s, cfg_.height));
  reshape(g);
}

void ShallowTree::reshape(std::size_t g) {
  g_ = g;
  leaves_.assign(checked_pow(g_, cfg_.height), {});
  levels_.clear();
  std::size_t width = 1;
  for (std::size_t lvl = 0; lvl < cfg_.height; ++lvl) {
    levels_.emplace_back(width);
    width *= g_;
  }
}

std::size_t ShallowTree::route(PointId id) const {
  return static_cast<std::size_t>(splitmix64(id) % leaves_.size());
}

void ShallowTree::recompute_node(std::size_t level, std::size_t idx) {
  ++stats_.node_recomputes;
  std::vector<WeightedPoint> init;
  double inherited = 0.0;
  const std::size_t first = idx * g_;
  for (std::size_t c = first; c < first + g_; ++c) {
    if (level + 1 == cfg_.height) {
      init.insert(init.end(), leaves_[c].begin(), leaves_[c].end());
    } else {
      const Coreset& child = levels_[level + 1][c];
      init.insert(init.end(), child.points.begin(), child.points.end());
      inherited += child.clamped_mass;
    }
  }
  Coreset& out = levels_[level][idx];
  if (init.empty()) {
    out = Coreset{};
  } else {
    out = build_coreset(init, coreset_cfg_, rng_);
  }
  out.clamped_mass += inherited;
}

void ShallowTree::recompute_path(std::size_t leaf_idx) {
  ++stats_.node_recomputes;  // the leaf bucket itself
  std::size_t idx = leaf_idx;
  for (std::size_t lvl = cfg_.height; lvl-- > 0;) {
    idx /= g_;
    recompute_node(lvl, idx);
  }
}

void ShallowTree::insert(const WeightedPoint& p) {
  validate_point(p);
  if (is_synthetic_id(p.id))
    throw std::invalid_argument("insert: id collides with synthetic id range");
  if (live_.count(p.id)) throw std::invalid_argument("insert: duplicate id");
  if (dim_ == 0) dim_ = p.point.dim();
  if (p.point.dim() != dim_ || dim_ == 0)
    throw std::invalid_argument("insert: dimension mismatch");
  const std::size_t b = route(p.id);
  leaves_[b].push_back(p);
  live_[p.id] = p.weight;
  recompute_path(b);
}

void ShallowTree::remove(PointId id) {
  if (!live_.erase(id)) throw std::invalid_argument("remove: unknown id");
  const std::size_t b = route(id);
  auto& pts = leaves_[b];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].id == id) {
      pts.erase(pts.begin() + i);
      break;
    }
  }
  recompute_path(b);
}

double ShallowTree::live_weight() const {
  double acc = 0.0;
  for (const auto& [id, w] : live_) acc += w;
  return acc;
}

bool ShallowTree::needs_rebuild() const {
  const std::size_t n = live_.size();
  return 2 * n >= 3 * n_hint_ || 3 * n <= 2 * n_hint_;
}

void ShallowTree::rebuild(std::size_t n_hint) {
  ++stats_.phase_rebuilds;
  n_hint_ = std::max<std::size_t>(1, n_hint);
  std::vector<WeightedPoint> pts;
  for (const auto& bucket : leaves_)
    pts.insert(pts.end(), bucket.begin(), bucket.end());
  const std::size_t g =
      cfg_.arity ? cfg_.arity
                 : std::max<std::size_t>(2, optimal_g(n_hint_, cfg_.s, cfg_.height));
  reshape(g);
  for (WeightedPoint& p : pts) {
    const std::size_t b = route(p.id);
    leaves_[b].push_back(std::move(p));
  }
  stats_.node_recomputes += leaves_.size();
  for (std::size_t lvl = cfg_.height; lvl-- > 0;)
    for (std::size_t idx = 0; idx < levels_[lvl].size(); ++idx)
      recompute_node(lvl, idx);
}

}  // namespace dynkm
