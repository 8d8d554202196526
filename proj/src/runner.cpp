#include "dynkm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <unordered_map>

#include "dynkm/dyn_tree.hpp"
#include "dynkm/kmeanspp.hpp"
#include "dynkm/metrics.hpp"
#include "dynkm/rng.hpp"
#include "dynkm/shallow_tree.hpp"

namespace dynkm {

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::dynamic: return "dynamic";
    case Algo::optimized_dynamic: return "optimized_dynamic";
    case Algo::shallow: return "shallow";
    case Algo::static_coreset: return "static";
    case Algo::random_sample: return "random";
    case Algo::kmeans_only: return "kmeans_only";
  }
  return "unknown";
}

std::optional<Algo> parse_algo(std::string_view name) {
  if (name == "dynamic") return Algo::dynamic;
  if (name == "optimized_dynamic" || name == "optimized") return Algo::optimized_dynamic;
  if (name == "shallow") return Algo::shallow;
  if (name == "static" || name == "static_coreset") return Algo::static_coreset;
  if (name == "random" || name == "random_sample") return Algo::random_sample;
  if (name == "kmeans_only" || name == "kmeans") return Algo::kmeans_only;
  return std::nullopt;
}

void resolve_run_defaults(RunConfig& cfg, std::size_t data_size) {
  if (cfg.s == 0) cfg.s = 5 * cfg.k;
  if (cfg.delta < 0.0) {
    if (cfg.stream.kind == StreamKind::sliding_window && cfg.stream.window > 0)
      cfg.delta = std::min(1.0, 2.0 * static_cast<double>(cfg.s) /
                                    static_cast<double>(cfg.stream.window));
    else
      cfg.delta = 0.03;
  }
  if (cfg.n_hint == 0)
    cfg.n_hint = cfg.stream.window ? cfg.stream.window : std::max<std::size_t>(1, data_size);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  if (v.size() % 2) return v[m];
  return 0.5 * (v[m - 1] + v[m]);
}

namespace {

bool log_enabled() {
  const char* e = std::getenv("DYNKM_LOG");
  return e && *e && std::string_view(e) != "0";
}

struct LiveSet {
  std::vector<WeightedPoint> pts;
  std::unordered_map<PointId, std::size_t> pos;
  double total_weight = 0.0;

  void insert(const WeightedPoint& p) {
    pos[p.id] = pts.size();
    pts.push_back(p);
    total_weight += p.weight;
  }
  void remove(PointId id) {
    const auto it = pos.find(id);
    if (it == pos.end()) throw std::invalid_argument("runner: removal of non-live id");
    const std::size_t idx = it->second;
    total_weight -= pts[idx].weight;
    pts[idx] = std::move(pts.back());
    pos[pts[idx].id] = idx;
    pts.pop_back();
    pos.erase(it);
  }
};

RepeatResult run_repeat(const RunConfig& cfg, const std::vector<UpdateEvent>& events,
                        std::size_t rep) {
  using clock = std::chrono::steady_clock;
  const bool verbose = log_enabled();
  const std::uint64_t algo_seed = splitmix64(cfg.seed + 0xa16f00d + rep);
  const std::uint64_t solver_seed = splitmix64(cfg.seed + 0x50111e5 + rep);

  std::optional<DynTree> dyn;
  std::optional<ShallowTree> shal;
  std::mt19937_64 base_rng(algo_seed);      // static and random baselines
  std::mt19937_64 solver_rng(solver_seed);  // per-op solution extraction
  const CoresetConfig static_cfg{cfg.k, cfg.s, 0.0, 0};

  switch (cfg.algo) {
    case Algo::dynamic:
      dyn.emplace(DynTreeConfig{cfg.k, cfg.s, 0.0, false, false, algo_seed});
      break;
    case Algo::optimized_dynamic:
      dyn.emplace(DynTreeConfig{cfg.k, cfg.s, cfg.delta, true, true, algo_seed});
      break;
    case Algo::shallow:
      shal.emplace(ShallowConfig{cfg.k, cfg.s, cfg.shallow_height, cfg.shallow_arity,
                                 cfg.n_hint, algo_seed});
      break;
    default:
      break;
  }

  LiveSet live;
  RepeatResult out;
  out.repeat = rep;

  const std::size_t measure_end =
      cfg.measure_count ? cfg.measure_start + cfg.measure_count : events.size();
  std::vector<double> op_ns;
  std::vector<std::size_t> op_live;
  std::vector<std::size_t> op_idx;
  std::vector<double> cp_quality, cp_distortion;

  Coreset cs;
  Solution sol;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const UpdateEvent& ev = events[i];
    if (ev.kind == EventKind::insert)
      live.insert(ev.point);
    else
      live.remove(ev.point.id);

    // outside the measured window only state-bearing work runs: the trees
    // must absorb every event, but extraction and solving leave no trace and
    // are skipped so a narrow window stays cheap on the scratch baselines
    const bool measured = i >= cfg.measure_start && i < measure_end;
    const auto t0 = clock::now();
    switch (cfg.algo) {
      case Algo::dynamic:
      case Algo::optimized_dynamic:
        if (ev.kind == EventKind::insert)
          dyn->insert(ev.point);
        else
          dyn->remove(ev.point.id);
        if (measured) cs = dyn->root_coreset();
        break;
      case Algo::shallow:
        if (ev.kind == EventKind::insert)
          shal->insert(ev.point);
        else
          shal->remove(ev.point.id);
        if (shal->needs_rebuild()) shal->rebuild(shal->live_size());
        if (measured) cs = shal->root_coreset();
        break;
      case Algo::static_coreset:
        if (measured)
          cs = live.pts.empty() ? Coreset{} : build_coreset(live.pts, static_cfg, base_rng);
        break;
      case Algo::random_sample: {
        if (!measured) break;
        cs = Coreset{};
        if (!live.pts.empty()) {
          const double w = live.total_weight / static_cast<double>(cfg.s);
          cs.points.reserve(cfg.s);
          for (std::size_t j = 0; j < cfg.s; ++j) {
            auto idx = static_cast<std::size_t>(
                uniform01(base_rng) * static_cast<double>(live.pts.size()));
            if (idx >= live.pts.size()) idx = live.pts.size() - 1;
            WeightedPoint p = live.pts[idx];
            p.weight = w;
            cs.points.push_back(std::move(p));
          }
        }
        break;
      }
      case Algo::kmeans_only:
        cs = Coreset{};
        break;
    }
    if (measured) {
      if (cfg.algo == Algo::kmeans_only)
        sol = live.pts.empty() ? Solution{} : kmeanspp(live.pts, cfg.k, true, solver_rng);
      else
        sol = cs.empty() ? Solution{} : kmeanspp(cs.points, cfg.k, true, solver_rng);
    }
    const auto t1 = clock::now();

    if (measured) {
      const double ns =
          std::chrono::duration_cast<std::chrono::duration<double, std::nano>>(t1 - t0)
              .count();
      op_ns.push_back(ns);
      op_live.push_back(live.pts.size());
      op_idx.push_back(i);

      const std::size_t pos_in_window = i - cfg.measure_start + 1;
      if (pos_in_window % cfg.checkpoint_every == 0 && !live.pts.empty() &&
          !sol.empty()) {
        const std::uint64_t eval_seed =
            splitmix64(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)) + rep);
        const EvalReport er =
            (cfg.algo == Algo::kmeans_only)
                ? evaluate_with(sol, live.pts, live.pts, cfg.k, eval_seed)
                : evaluate_with(sol, cs.points, live.pts, cfg.k, eval_seed);
        Checkpoint cp;
        cp.op_index = i;
        cp.live_size = live.pts.size();
        cp.coreset_size =
            (cfg.algo == Algo::kmeans_only) ? live.pts.size() : cs.points.size();
        cp.distortion = er.distortion;
        cp.quality = er.quality;
        cp.cost_full = er.cost_full;
        cp.cost_coreset = er.cost_coreset;
        out.checkpoints.push_back(cp);
        cp_quality.push_back(er.quality);
        cp_distortion.push_back(er.distortion);
      }
    }
    if (verbose && (i + 1) % 10000 == 0)
      std::cerr << "[dynkm] repeat " << rep << " op " << (i + 1) << "/"
                << events.size() << " live " << live.pts.size() << "\n";
  }

  out.ops = op_ns.size();
  for (double ns : op_ns) out.total_ns += ns;
  out.final_live = live.pts.size();
  if (dyn) out.stats = dyn->stats();
  if (shal) out.stats = shal->stats();
  out.median_quality = median(cp_quality);
  out.median_distortion = median(cp_distortion);

  const std::size_t nb = std::min(cfg.buckets, out.ops);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = out.ops * b / nb;
    const std::size_t hi = out.ops * (b + 1) / nb;
    Bucket bk;
    bk.first_op = op_idx[lo];
    bk.last_op = op_idx[hi - 1];
    bk.ops = hi - lo;
    double ns = 0.0, lv = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      ns += op_ns[j];
      lv += static_cast<double>(op_live[j]);
    }
    bk.mean_op_ns = ns / static_cast<double>(bk.ops);
    bk.mean_live = lv / static_cast<double>(bk.ops);
    out.buckets.push_back(bk);
  }
  return out;
}

void add_stats(TreeStats& acc, const TreeStats& s) {
  acc.node_recomputes += s.node_recomputes;
  acc.epoch_starts += s.epoch_starts;
  acc.phase_rebuilds += s.phase_rebuilds;
  acc.flush_events += s.flush_events;
  acc.threshold_flushes += s.threshold_flushes;
  acc.coreset_hit_flushes += s.coreset_hit_flushes;
  acc.marked_purged += s.marked_purged;
  acc.leaf_splits += s.leaf_splits;
  acc.leaf_dissolves += s.leaf_dissolves;
}

RunRecord finish_record(RunConfig cfg, std::vector<RepeatResult> reps) {
  RunRecord rec;
  rec.cfg = std::move(cfg);
  double ns = 0.0;
  std::size_t ops = 0;
  std::vector<double> q, d;
  for (const RepeatResult& r : reps) {
    ns += r.total_ns;
    ops += r.ops;
    for (const Checkpoint& cp : r.checkpoints) {
      q.push_back(cp.quality);
      d.push_back(cp.distortion);
    }
    add_stats(rec.total_stats, r.stats);
  }
  rec.mean_op_ns = ops ? ns / static_cast<double>(ops) : 0.0;
  rec.median_quality = median(std::move(q));
  rec.median_distortion = median(std::move(d));
  rec.repeats = std::move(reps);
  return rec;
}

void check_run_config(const RunConfig& cfg) {
  if (cfg.k == 0) throw std::invalid_argument("runner: k must be positive");
  if (cfg.s <= cfg.k) throw std::invalid_argument("runner: s must exceed k");
  if (cfg.repeats == 0) throw std::invalid_argument("runner: repeats must be positive");
  if (cfg.checkpoint_every == 0)
    throw std::invalid_argument("runner: checkpoint_every must be positive");
  if (cfg.buckets == 0) throw std::invalid_argument("runner: buckets must be positive");
}

}  // namespace

RunRecord run(const RunConfig& cfg_in, const std::vector<WeightedPoint>& data) {
  RunConfig cfg = cfg_in;
  resolve_run_defaults(cfg, data.size());
  check_run_config(cfg);
  std::vector<RepeatResult> reps;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    StreamSpec sp = cfg.stream;
    sp.rng_seed = splitmix64(cfg.seed + 0x57ee8 + r);
    const std::vector<UpdateEvent> events = gen_all(data, sp);
    reps.push_back(run_repeat(cfg, events, r));
  }
  return finish_record(std::move(cfg), std::move(reps));
}

RunRecord run_events(const RunConfig& cfg_in, const std::vector<UpdateEvent>& events) {
  RunConfig cfg = cfg_in;
  std::size_t inserts = 0;
  for (const UpdateEvent& ev : events)
    if (ev.kind == EventKind::insert) ++inserts;
  resolve_run_defaults(cfg, inserts);
  check_run_config(cfg);
  std::vector<RepeatResult> reps;
  for (std::size_t r = 0; r < cfg.repeats; ++r) reps.push_back(run_repeat(cfg, events, r));
  return finish_record(std::move(cfg), std::move(reps));
}

}  // namespace dynkm
