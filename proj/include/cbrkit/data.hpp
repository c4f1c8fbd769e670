/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "cbrkit/core.hpp"

namespace cbrkit {

/// Parses CSV text with header `G,S,FC,LL,PI,MDD,OMC[,CBR]` (columns may
/// appear in any order). Every row is validated; errors name the row and the
/// violated rule. `source` is used in messages only.
Dataset parse_csv(std::istream& in, const std::string& source = "<input>");
Dataset load_csv(const std::string& path);

/// Writes the schema header and one line per sample using shortest
/// round-trip number formatting.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::string& path, const Dataset& data, bool force);

/// Shortest decimal text that parses back to the identical double.
std::string format_number(double value);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  /// When set, benchmark seeds leave the split alone and only drive model
  /// randomness; split() itself always uses `seed`.
  bool fixed_split = false;
};

/// Test size for n rows: ceil(n * (1 - train_fraction)), so 382 rows at 0.8
/// give 77 test rows.
std::size_t test_count(std::size_t n, double train_fraction);

/// Seeded random partition. Both parts keep ascending original row order.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

struct GeneratorConfig {
  std::size_t n_samples = 382;
  std::uint64_t seed = 1;
  double noise_sd = 4.0;
};

/// Synthetic soil records calibrated to the published training-set summary
/// statistics. See README "Synthetic data" for the construction.
Dataset generate_synthetic(const GeneratorConfig& cfg);

/// Noise-free surrogate CBR for the given record, clipped to [1, 100].
double surrogate_cbr(const SoilSample& sample);

}  // namespace cbrkit
