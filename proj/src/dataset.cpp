#include "dynkm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace dynkm {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool try_parse(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size();
}

[[noreturn]] void bad_row(std::size_t lineno, const std::string& what) {
  throw std::runtime_error("csv line " + std::to_string(lineno) + ": " + what);
}

std::string coord_key(const Point& p) {
  std::string key(p.coords.size() * sizeof(double), '\0');
  std::memcpy(key.data(), p.coords.data(), key.size());
  return key;
}

void append_double(std::string& line, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("csv: failed to format number");
  line.append(buf, end);
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& opt) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("csv: cannot open " + path);
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  bool first_data_line = true;
  PointId next_id = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (first_data_line) {
      double probe;
      bool numeric = true;
      for (const auto& fd : fields)
        if (!try_parse(fd, probe)) {
          numeric = false;
          break;
        }
      first_data_line = false;
      if (!numeric) continue;  // header
    }
    const std::size_t lead = opt.with_id ? 1 : 0;
    const std::size_t tail = opt.with_weight ? 1 : 0;
    if (fields.size() < lead + tail + 1) bad_row(lineno, "too few columns");
    WeightedPoint wp;
    if (opt.with_id) {
      const auto fd = trim(fields[0]);
      auto [ptr, ec] = std::from_chars(fd.data(), fd.data() + fd.size(), wp.id);
      if (ec != std::errc{} || ptr != fd.data() + fd.size())
        bad_row(lineno, "bad id");
    } else {
      wp.id = next_id++;
    }
    if (opt.with_weight) {
      if (!try_parse(fields.back(), wp.weight)) bad_row(lineno, "bad weight");
      if (!std::isfinite(wp.weight) || wp.weight <= 0.0)
        bad_row(lineno, "weight must be finite and positive");
    }
    wp.point.coords.reserve(fields.size() - lead - tail);
    for (std::size_t i = lead; i < fields.size() - tail; ++i) {
      double v;
      if (!try_parse(fields[i], v)) bad_row(lineno, "bad coordinate");
      if (!std::isfinite(v)) bad_row(lineno, "non-finite coordinate");
      wp.point.coords.push_back(v);
    }
    if (ds.dim == 0) ds.dim = wp.point.dim();
    if (wp.point.dim() != ds.dim) bad_row(lineno, "dimension mismatch");
    ds.points.push_back(std::move(wp));
  }
  if (opt.dedupe) {
    std::unordered_set<std::string> seen;
    std::vector<WeightedPoint> kept;
    kept.reserve(ds.points.size());
    for (WeightedPoint& p : ds.points)
      if (seen.insert(coord_key(p.point)).second) kept.push_back(std::move(p));
    ds.points = std::move(kept);
  }
  if (opt.shuffle) {
    std::mt19937_64 rng(opt.seed);
    std::shuffle(ds.points.begin(), ds.points.end(), rng);
  }
  if (!opt.with_id) {
    PointId id = 0;
    for (WeightedPoint& p : ds.points) p.id = id++;
  }
  return ds;
}

void write_csv(const std::string& path, const Dataset& ds) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("csv: cannot open " + path + " for writing");
  std::string line = "id";
  for (std::size_t j = 0; j < ds.dim; ++j) line += ",x" + std::to_string(j);
  line += ",weight\n";
  f << line;
  for (const WeightedPoint& p : ds.points) {
    line = std::to_string(p.id);
    for (double c : p.point.coords) {
      line.push_back(',');
      append_double(line, c);
    }
    line.push_back(',');
    append_double(line, p.weight);
    line.push_back('\n');
    f << line;
  }
  if (!f) throw std::runtime_error("csv: write to " + path + " failed");
}

}  // namespace dynkm
