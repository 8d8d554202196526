#pragma once

#include <string>

#include <json.hpp>

#include "dynkm/runner.hpp"

namespace dynkm {

// One row per timing bucket, annotated with the newest checkpoint of the same
// repeat at or before the bucket end; the two quality fields stay empty when
// no checkpoint happened yet. Header:
//   repeat,op_index,live_size,mean_op_ns,distortion,quality
void write_buckets_csv(const std::string& path, const RunRecord& rec);

struct BucketRow {
  std::size_t repeat = 0;
  std::size_t op_index = 0;
  std::size_t live_size = 0;
  double mean_op_ns = 0.0;
  double distortion = 0.0;  // NaN when the field was empty
  double quality = 0.0;
};
std::vector<BucketRow> read_buckets_csv(const std::string& path);

nlohmann::json summary_json(const RunRecord& rec);
void write_summary_json(const std::string& path, const RunRecord& rec);

// How many times faster the alternative is than the reference, per operation.
double speedup(double ref_mean_op_ns, double alg_mean_op_ns);

}  // namespace dynkm
