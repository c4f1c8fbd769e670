/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cbrkit {

/// The twelve model families, in the order they are listed in reports.
enum class Family {
  RandomForest,
  Bagging,
  ExtraTrees,
  Voting,
  XGBoost,
  SVR,
  AdaBoost,
  KNeighbors,
  MLPRegressor,
  GradientBoosting,
  DecisionTree,
  Stacking,
};

std::span<const Family> all_families();
std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view name);
/// Comma-separated list of every family name.
std::string family_list();

/// None, integer, real, string, or an integer tuple (layer sizes).
using ParamValue =
    std::variant<std::monostate, std::int64_t, double, std::string, std::vector<std::int64_t>>;
using ParamSet = std::map<std::string, ParamValue>;

/// Python-dict style rendering, e.g. {'max_depth': 10, 'max_features': 'sqrt'}.
std::string format_param_value(const ParamValue& value);
std::string format_params(const ParamSet& params);

nlohmann::json param_to_json(const ParamValue& value);
ParamValue param_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ParamSet& params);
ParamSet params_from_json(const nlohmann::json& j);

/// Typed, consuming reader over a ParamSet. Unknown keys left over after a
/// family has read its parameters are reported by finish().
class ParamReader {
 public:
  ParamReader(std::string_view family, const ParamSet& params);

  std::optional<std::int64_t> optional_int(const std::string& key, std::optional<std::int64_t> fallback);
  std::int64_t integer(const std::string& key, std::int64_t fallback);
  double real(const std::string& key, double fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<std::int64_t> int_list(const std::string& key, std::vector<std::int64_t> fallback);
  /// Raw access for keys whose type depends on the value (e.g. max_features).
  std::optional<ParamValue> raw(const std::string& key);

  void finish() const;

 private:
  [[noreturn]] void type_error(const std::string& key, std::string_view expected) const;

  std::string family_;
  ParamSet params_;
};

}  // namespace cbrkit
