/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <array>
#include <cstdio>

#include "cbrkit/selection.hpp"

namespace cbrkit {
namespace {

constexpr std::array<const char*, 11> kColumns = {
    "family", "best_params", "train_r2", "train_mae", "train_rmse", "val_r2",
    "val_mae", "val_rmse",   "test_r2",  "test_mae",  "test_rmse"};

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  // No "-0.000" for values that round to zero.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string params_cell(const ReportRow& row) {
  if (row.failure) return "failed: " + *row.failure;
  return format_params(row.best_params);
}

std::vector<std::string> cells(const ReportRow& row, int decimals) {
  std::vector<std::string> out{std::string(family_name(row.family)), params_cell(row)};
  for (const Metrics* m : {&row.train, &row.validation, &row.test}) {
    if (row.failure) {
      out.insert(out.end(), {"nan", "nan", "nan"});
    } else {
      out.insert(out.end(), {fixed(m->r2, decimals), fixed(m->mae, decimals), fixed(m->rmse, decimals)});
    }
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_csv(const EvalReport& report) {
  std::string out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) out += (i ? "," : "") + std::string(kColumns[i]);
  out += '\n';
  for (const auto& row : report.rows) {
    const auto c = cells(row, 6);
    for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + csv_quote(c[i]);
    out += '\n';
  }
  return out;
}

std::string report_text(const EvalReport& report) {
  std::vector<std::vector<std::string>> table;
  table.emplace_back(kColumns.begin(), kColumns.end());
  for (const auto& row : report.rows) table.push_back(cells(row, 3));
  std::vector<std::size_t> width(kColumns.size(), 0);
  for (const auto& r : table) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : table) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += "  ";
      const std::size_t pad = width[i] - r[i].size();
      // Text columns left-aligned, numbers right-aligned.
      line += i < 2 ? r[i] + std::string(pad, ' ') : std::string(pad, ' ') + r[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

}  // namespace cbrkit
