/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cbrkit/rng.hpp"

namespace cbrkit {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string row_label(std::size_t row, std::size_t line) {
  return "row " + std::to_string(row) + " (line " + std::to_string(line) + ")";
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

Dataset parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line()) throw Error(ErrorCode::Parse, source + ": missing header line");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  const auto header = split_fields(line);

  // Column position of each schema feature, then CBR.
  std::array<std::size_t, kNumFeatures + 1> position;
  position.fill(SIZE_MAX);
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::size_t slot = SIZE_MAX;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (header[c] == kFeatureNames[f]) slot = f;
    }
    if (header[c] == kTargetName) slot = kNumFeatures;
    if (slot == SIZE_MAX) {
      throw Error(ErrorCode::Parse, source + ": unexpected column '" + header[c] +
                                        "' (expected G,S,FC,LL,PI,MDD,OMC[,CBR])");
    }
    if (position[slot] != SIZE_MAX) {
      throw Error(ErrorCode::Parse, source + ": duplicate column '" + header[c] + "'");
    }
    position[slot] = c;
  }
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    if (position[f] == SIZE_MAX) {
      throw Error(ErrorCode::Parse,
                  source + ": missing column '" + std::string(kFeatureNames[f]) + "'");
    }
  }
  const bool has_target = position[kNumFeatures] != SIZE_MAX;

  std::vector<SoilSample> samples;
  std::size_t row = 0;
  while (next_line()) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::Parse, source + ": " + row_label(row, line_no) + ": expected " +
                                        std::to_string(header.size()) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    std::array<double, kNumFeatures + 1> values{};
    for (std::size_t slot = 0; slot < kNumFeatures + (has_target ? 1 : 0); ++slot) {
      const auto& cell = fields[position[slot]];
      double v = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::Parse, source + ": " + row_label(row, line_no) +
                                          ": cannot parse " + header[position[slot]] +
                                          " value '" + cell + "'");
      }
      values[slot] = v;
    }
    SoilSample s = SoilSample::from_features(std::span(values).first(kNumFeatures));
    if (has_target) s.cbr = values[kNumFeatures];
    if (auto rule = check_sample(s)) {
      throw Error(ErrorCode::Validation,
                  source + ": " + row_label(row, line_no) + ": violates " + *rule);
    }
    samples.push_back(s);
  }
  return Dataset(std::move(samples), has_target);
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return parse_csv(in, path);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t f = 0; f < kNumFeatures; ++f) out << (f ? "," : "") << kFeatureNames[f];
  if (data.has_target()) out << ',' << kTargetName;
  out << '\n';
  for (const auto& s : data.samples()) {
    const auto f = s.features();
    for (std::size_t i = 0; i < kNumFeatures; ++i) out << (i ? "," : "") << format_number(f[i]);
    if (s.cbr) out << ',' << format_number(*s.cbr);
    out << '\n';
  }
}

void save_csv(const std::string& path, const Dataset& data, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw Error(ErrorCode::Exists, "'" + path + "' exists (use --force to overwrite)");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  write_csv(out, data);
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::size_t test_count(std::size_t n, double train_fraction) {
  // Fractional test sizes round up, so 382 rows at 0.8 give 77 test rows.
  const double raw = static_cast<double>(n) * (1.0 - train_fraction);
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0 && spec.train_fraction < 1)) {
    throw Error(ErrorCode::InvalidArgument, "train_fraction must lie in (0, 1)");
  }
  if (!data.has_target()) {
    throw Error(ErrorCode::InvalidArgument, "cannot split a dataset without CBR targets");
  }
  const std::size_t n = data.size();
  const std::size_t n_test = test_count(n, spec.train_fraction);
  if (n_test < 1 || n_test >= n) {
    throw Error(ErrorCode::InvalidArgument, "dataset of " + std::to_string(n) +
                                                " rows is too small to split at fraction " +
                                                format_number(spec.train_fraction));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  shuffle(std::span(order), rng);
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::ranges::sort(test);
  std::ranges::sort(train);
  return {data.subset(train), data.subset(test)};
}

}  // namespace cbrkit
