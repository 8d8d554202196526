#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynkm/dataset.hpp"
#include "dynkm/report.hpp"
#include "dynkm/runner.hpp"
#include "dynkm/streams.hpp"

namespace {

struct DataOpts {
  std::string input;
  std::string synthetic;  // "n,clusters,dim"
  bool with_id = false;
  bool with_weight = false;
  bool dedupe = false;
  bool shuffle = false;
  std::uint64_t seed = 0;
};

void add_data_flags(CLI::App* cmd, DataOpts& d) {
  cmd->add_option("--input", d.input, "CSV dataset to load");
  cmd->add_option("--synthetic", d.synthetic,
                  "generate a Gaussian mixture instead: n,clusters,dim");
  cmd->add_flag("--with-id", d.with_id, "CSV has an id column first");
  cmd->add_flag("--with-weight", d.with_weight, "CSV has a weight column last");
  cmd->add_flag("--dedupe", d.dedupe, "drop rows with duplicate coordinates");
  cmd->add_flag("--shuffle", d.shuffle, "shuffle rows after loading");
}

std::vector<dynkm::WeightedPoint> load_data(const DataOpts& d) {
  if (!d.input.empty() && !d.synthetic.empty())
    throw std::runtime_error("pass either --input or --synthetic, not both");
  if (!d.input.empty()) {
    dynkm::CsvOptions opt;
    opt.with_id = d.with_id;
    opt.with_weight = d.with_weight;
    opt.dedupe = d.dedupe;
    opt.shuffle = d.shuffle;
    opt.seed = d.seed;
    return dynkm::load_csv(d.input, opt).points;
  }
  if (!d.synthetic.empty()) {
    std::size_t n = 0, clusters = 0, dim = 0;
    if (std::sscanf(d.synthetic.c_str(), "%zu,%zu,%zu", &n, &clusters, &dim) != 3)
      throw std::runtime_error("--synthetic expects n,clusters,dim");
    return dynkm::gen_birch_like(n, clusters, dim, d.seed);
  }
  throw std::runtime_error("no dataset: pass --input or --synthetic");
}

void add_stream_flags(CLI::App* cmd, std::string& kind, dynkm::StreamSpec& sp) {
  cmd->add_option("--stream", kind,
                  "insert_only | sliding_window | random_window | snake_window");
  cmd->add_option("--window", sp.window, "sliding width / snake peak");
  cmd->add_option("--pi", sp.pi, "random_window insert probability");
  cmd->add_option("--low-frac", sp.low_frac, "snake trough fraction");
  cmd->add_option("--pi-hi", sp.pi_hi, "snake grow insert probability");
  cmd->add_option("--pi-lo", sp.pi_lo, "snake shrink insert probability");
  cmd->add_option("--cycles", sp.cycles, "snake cycle cap, 0 = until data ends");
}

dynkm::StreamKind parse_kind_or_throw(const std::string& name) {
  const auto k = dynkm::parse_stream_kind(name);
  if (!k) throw std::runtime_error("unknown stream kind: " + name);
  return *k;
}

int cmd_generate(const DataOpts& data_opts, const std::string& out,
                 const std::string& emit_stream, const std::string& stream_kind,
                 dynkm::StreamSpec spec) {
  auto points = load_data(data_opts);
  if (!out.empty()) {
    dynkm::Dataset ds;
    ds.dim = points.empty() ? 0 : points.front().point.dim();
    ds.points = points;
    dynkm::write_csv(out, ds);
    std::cout << "wrote " << ds.points.size() << " points to " << out << "\n";
  }
  if (!emit_stream.empty()) {
    spec.kind = parse_kind_or_throw(stream_kind);
    spec.rng_seed = data_opts.seed;
    const auto events = dynkm::gen_all(std::move(points), spec);
    const auto check = dynkm::validate_stream(events);
    if (!check.valid) throw std::runtime_error("generated stream invalid: " + check.error);
    dynkm::write_stream(emit_stream, events);
    std::cout << "wrote " << events.size() << " events (" << check.inserts
              << " inserts, " << check.removes << " removes, max live "
              << check.max_live << ") to " << emit_stream << "\n";
  }
  if (out.empty() && emit_stream.empty())
    throw std::runtime_error("generate: pass --out and/or --emit-stream");
  return 0;
}

int cmd_run(const DataOpts& data_opts, dynkm::RunConfig cfg, const std::string& algo,
            const std::string& stream_kind, const std::string& stream_file,
            const std::string& out, const std::string& format) {
  const auto a = dynkm::parse_algo(algo);
  if (!a) throw std::runtime_error("unknown algorithm: " + algo);
  cfg.algo = *a;
  cfg.seed = data_opts.seed;

  dynkm::RunRecord rec;
  if (!stream_file.empty()) {
    const auto events = dynkm::read_stream(stream_file);
    const auto check = dynkm::validate_stream(events);
    if (!check.valid) throw std::runtime_error("stream file invalid: " + check.error);
    rec = dynkm::run_events(cfg, events);
  } else {
    cfg.stream.kind = parse_kind_or_throw(stream_kind);
    rec = dynkm::run(cfg, load_data(data_opts));
  }

  std::cout << "algo=" << dynkm::algo_name(rec.cfg.algo) << " k=" << rec.cfg.k
            << " s=" << rec.cfg.s << " repeats=" << rec.cfg.repeats
            << " mean_op_ns=" << rec.mean_op_ns
            << " median_quality=" << rec.median_quality
            << " median_distortion=" << rec.median_distortion << "\n";
  if (!out.empty()) {
    if (format == "json" || format == "both")
      dynkm::write_summary_json(out + ".json", rec);
    if (format == "csv" || format == "both") dynkm::write_buckets_csv(out + ".csv", rec);
  }
  return 0;
}

int cmd_compare(const std::string& ref_path, const std::vector<std::string>& others,
                const std::string& out) {
  auto load = [](const std::string& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("compare: cannot open " + p);
    return nlohmann::json::parse(f);
  };
  const auto ref = load(ref_path);
  const double ref_ns = ref.at("mean_op_ns").get<double>();
  nlohmann::json table = nlohmann::json::array();
  auto row = [&](const nlohmann::json& j) {
    const double ns = j.at("mean_op_ns").get<double>();
    nlohmann::json r = {{"algo", j.at("algo")},
                        {"mean_op_ns", ns},
                        {"speedup_vs_ref", dynkm::speedup(ref_ns, ns)},
                        {"median_quality", j.at("median_quality")},
                        {"median_distortion", j.at("median_distortion")}};
    table.push_back(r);
    std::cout << j.at("algo").get<std::string>() << " mean_op_ns=" << ns
              << " speedup=" << dynkm::speedup(ref_ns, ns)
              << " median_quality=" << j.at("median_quality").dump() << "\n";
  };
  std::cout << "reference: ";
  row(ref);
  for (const auto& p : others) row(load(p));
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("compare: cannot open " + out + " for writing");
    f << table.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic k-means coreset benchmark"};
  app.require_subcommand(1);

  DataOpts data_opts;
  dynkm::StreamSpec gen_spec;
  std::string gen_out, gen_emit, gen_kind = "insert_only";
  auto* gen = app.add_subcommand("generate", "write a dataset CSV or a stream replay file");
  add_data_flags(gen, data_opts);
  gen->add_option("--seed", data_opts.seed, "seed for synthesis, shuffle and stream");
  add_stream_flags(gen, gen_kind, gen_spec);
  gen->add_option("--out", gen_out, "dataset CSV to write");
  gen->add_option("--emit-stream", gen_emit, "stream replay file to write");

  dynkm::RunConfig cfg;
  std::string run_algo = "dynamic", run_kind = "insert_only", run_stream_file;
  std::string run_out, run_format = "both";
  auto* run = app.add_subcommand("run", "replay a stream and benchmark one algorithm");
  add_data_flags(run, data_opts);
  run->add_option("--seed", data_opts.seed, "master seed");
  add_stream_flags(run, run_kind, cfg.stream);
  run->add_option("--algo", run_algo,
                  "dynamic | optimized_dynamic | shallow | static | random | kmeans_only");
  run->add_option("--k", cfg.k, "number of centers");
  run->add_option("--s", cfg.s, "coreset size, 0 = 5k");
  run->add_option("--delta", cfg.delta, "lazy-deletion cut-off, <0 = default policy");
  run->add_option("--repeats", cfg.repeats, "independent repetitions");
  run->add_option("--checkpoint-every", cfg.checkpoint_every,
                  "measured ops between quality probes");
  run->add_option("--bucket", cfg.buckets, "timing aggregation buckets");
  run->add_option("--measure-start", cfg.measure_start, "first timed event index");
  run->add_option("--measure-count", cfg.measure_count, "timed events, 0 = rest");
  run->add_option("--height", cfg.shallow_height, "shallow tree height");
  run->add_option("--arity", cfg.shallow_arity, "shallow tree arity, 0 = derived");
  run->add_option("--n-hint", cfg.n_hint, "expected live size, 0 = window or |data|");
  run->add_option("--stream-file", run_stream_file, "replay events from a file");
  run->add_option("--out", run_out, "output prefix for <prefix>.json / <prefix>.csv");
  run->add_option("--format", run_format, "json | csv | both");

  std::string cmp_ref, cmp_out;
  std::vector<std::string> cmp_others;
  auto* cmp = app.add_subcommand("compare", "compare run summaries against a reference");
  cmp->add_option("--ref", cmp_ref, "reference summary JSON")->required();
  cmp->add_option("summaries", cmp_others, "other summary JSON files");
  cmp->add_option("--out", cmp_out, "comparison JSON to write");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(data_opts, gen_out, gen_emit, gen_kind, gen_spec);
    if (run->parsed())
      return cmd_run(data_opts, cfg, run_algo, run_kind, run_stream_file, run_out,
                     run_format);
    if (cmp->parsed()) return cmd_compare(cmp_ref, cmp_others, cmp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
