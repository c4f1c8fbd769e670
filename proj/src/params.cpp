/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/params.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "cbrkit/core.hpp"

namespace cbrkit {
namespace {

constexpr std::array kFamilies{
    Family::RandomForest, Family::Bagging,      Family::ExtraTrees,       Family::Voting,
    Family::XGBoost,      Family::SVR,          Family::AdaBoost,         Family::KNeighbors,
    Family::MLPRegressor, Family::GradientBoosting, Family::DecisionTree, Family::Stacking,
};

constexpr std::array<std::string_view, 12> kFamilyNames{
    "RandomForest", "Bagging",      "ExtraTrees",       "Voting",       "XGBoost", "SVR",
    "AdaBoost",     "KNeighbors",   "MLPRegressor",    "GradientBoosting", "DecisionTree",
    "Stacking",
};

// Python float repr: positional between 1e-4 and 1e16, always with a '.'.
std::string python_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const double mag = std::abs(v);
  const bool positional = v == 0 || (mag >= 1e-4 && mag < 1e16);
  auto res = std::to_chars(buf, buf + sizeof buf, v,
                           positional ? std::chars_format::fixed : std::chars_format::scientific);
  std::string out(buf, res.ptr);
  if (positional && out.find('.') == std::string::npos) out += ".0";
  return out;
}

}  // namespace

std::span<const Family> all_families() { return kFamilies; }

std::string_view family_name(Family family) {
  return kFamilyNames[static_cast<std::size_t>(family)];
}

std::optional<Family> parse_family(std::string_view name) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
    if (kFamilyNames[i] == name) return kFamilies[i];
  }
  return std::nullopt;
}

std::string family_list() {
  std::string out;
  for (auto name : kFamilyNames) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

std::string format_param_value(const ParamValue& value) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "None"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return python_float(v); }
    std::string operator()(const std::string& v) const { return "'" + v + "'"; }
    std::string operator()(const std::vector<std::int64_t>& v) const {
      std::string out = "(";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
      }
      if (v.size() == 1) out += ",";
      return out + ")";
    }
  };
  return std::visit(Visitor{}, value);
}

std::string format_params(const ParamSet& params) {
  if (params.empty()) return "N/A (No tuning parameters)";
  std::string out = "{";
  bool first = true;
  for (const auto& [key, value] : params) {
    if (!first) out += ", ";
    first = false;
    out += "'" + key + "': " + format_param_value(value);
  }
  return out + "}";
}

nlohmann::json param_to_json(const ParamValue& value) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(std::int64_t v) const { return v; }
    nlohmann::json operator()(double v) const { return v; }
    nlohmann::json operator()(const std::string& v) const { return v; }
    nlohmann::json operator()(const std::vector<std::int64_t>& v) const { return v; }
  };
  return std::visit(Visitor{}, value);
}

ParamValue param_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    std::vector<std::int64_t> out;
    for (const auto& e : j) {
      if (!e.is_number_integer()) {
        throw Error(ErrorCode::Parse, "parameter lists may only hold integers: " + j.dump());
      }
      out.push_back(e.get<std::int64_t>());
    }
    return out;
  }
  throw Error(ErrorCode::Parse, "unsupported parameter value: " + j.dump());
}

nlohmann::json params_to_json(const ParamSet& params) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, value] : params) out[key] = param_to_json(value);
  return out;
}

ParamSet params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "parameters must be a JSON object");
  ParamSet out;
  for (const auto& [key, value] : j.items()) out[key] = param_from_json(value);
  return out;
}

ParamReader::ParamReader(std::string_view family, const ParamSet& params)
    : family_(family), params_(params) {}

void ParamReader::type_error(const std::string& key, std::string_view expected) const {
  throw Error(ErrorCode::InvalidArgument,
              family_ + ": parameter '" + key + "' must be " + std::string(expected));
}

std::optional<ParamValue> ParamReader::raw(const std::string& key) {
  auto it = params_.find(key);
  if (it == params_.end()) return std::nullopt;
  ParamValue v = std::move(it->second);
  params_.erase(it);
  return v;
}

std::optional<std::int64_t> ParamReader::optional_int(const std::string& key,
                                                       std::optional<std::int64_t> fallback) {
  auto v = raw(key);
  if (!v) return fallback;
  if (std::holds_alternative<std::monostate>(*v)) return std::nullopt;
  if (auto* i = std::get_if<std::int64_t>(&*v)) return *i;
  type_error(key, "an integer or None");
}

std::int64_t ParamReader::integer(const std::string& key, std::int64_t fallback) {
  auto v = raw(key);
  if (!v) return fallback;
  if (auto* i = std::get_if<std::int64_t>(&*v)) return *i;
  type_error(key, "an integer");
}

double ParamReader::real(const std::string& key, double fallback) {
  auto v = raw(key);
  if (!v) return fallback;
  if (auto* d = std::get_if<double>(&*v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&*v)) return static_cast<double>(*i);
  type_error(key, "a number");
}

std::string ParamReader::text(const std::string& key, const std::string& fallback) {
  auto v = raw(key);
  if (!v) return fallback;
  if (auto* s = std::get_if<std::string>(&*v)) return *s;
  type_error(key, "a string");
}

std::vector<std::int64_t> ParamReader::int_list(const std::string& key,
                                                std::vector<std::int64_t> fallback) {
  auto v = raw(key);
  if (!v) return fallback;
  if (auto* l = std::get_if<std::vector<std::int64_t>>(&*v)) return *l;
  if (auto* i = std::get_if<std::int64_t>(&*v)) return {*i};
  type_error(key, "a list of integers");
}

void ParamReader::finish() const {
  if (params_.empty()) return;
  std::string keys;
  for (const auto& [key, _] : params_) {
    if (!keys.empty()) keys += ", ";
    keys += "'" + key + "'";
  }
  throw Error(ErrorCode::InvalidArgument, family_ + ": unknown parameter(s) " + keys);
}

}  // namespace cbrkit
