#pragma once

#include <string>

#include "dynkm/core.hpp"

namespace dynkm {

struct Dataset {
  std::vector<WeightedPoint> points;
  std::size_t dim = 0;
};

struct CsvOptions {
  bool with_id = false;      // first column is an integer id
  bool with_weight = false;  // last column is a weight
  bool dedupe = false;       // drop later rows with identical coordinates
  bool shuffle = false;
  std::uint64_t seed = 0;
};

// Numeric CSV loader. A non-numeric first line is treated as a header and
// skipped. Rows are validated (finite values, positive weights, consistent
// dimension) with line numbers in error messages. Dedupe and shuffle run
// after parsing; without an id column, ids 0..n-1 are assigned to the final
// order.
Dataset load_csv(const std::string& path, const CsvOptions& opt = {});

// Writes `id,<coords...>,weight` rows under a matching header.
void write_csv(const std::string& path, const Dataset& ds);

}  // namespace dynkm
