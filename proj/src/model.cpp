/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/model.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cbrkit/cart.hpp"
#include "cbrkit/ensembles.hpp"
#include "cbrkit/kernel.hpp"
#include "cbrkit/neural.hpp"

namespace cbrkit {
namespace {

using Factory = std::shared_ptr<const Regressor> (*)(const nlohmann::json&);

const std::map<std::string, Factory, std::less<>>& regressor_kinds() {
  static const std::map<std::string, Factory, std::less<>> kinds = {
      {"tree", &cart::TreeRegressor::from_json},
      {"forest", &ensembles::ForestRegressor::from_json},
      {"boost", &ensembles::BoostRegressor::from_json},
      {"adaboost", &ensembles::AdaBoostRegressor::from_json},
      {"voting", &ensembles::VotingRegressor::from_json},
      {"stacking", &ensembles::StackingRegressor::from_json},
      {"svr", &kernel::SvrRegressor::from_json},
      {"knn", &kernel::KnnRegressor::from_json},
      {"mlp", &neural::MlpRegressor::from_json},
  };
  return kinds;
}

bool uses_scaler(Family family) {
  return family == Family::SVR || family == Family::KNeighbors || family == Family::MLPRegressor;
}

int checked_int(std::int64_t v, const std::string& what, std::int64_t lo) {
  if (v < lo || v > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::InvalidArgument, what + " must be >= " + std::to_string(lo));
  }
  return static_cast<int>(v);
}

std::optional<int> depth_param(ParamReader& r, std::optional<std::int64_t> fallback) {
  auto v = r.optional_int("max_depth", fallback);
  if (!v) return std::nullopt;
  return checked_int(*v, "max_depth", 1);
}

// 'sqrt' | None (all) | integer count | fraction of the columns.
std::size_t max_features_param(ParamReader& r, std::size_t d, const ParamValue& fallback) {
  const ParamValue v = r.raw("max_features").value_or(fallback);
  if (std::holds_alternative<std::monostate>(v)) return 0;
  if (auto* s = std::get_if<std::string>(&v)) {
    if (*s == "sqrt") return cart::sqrt_features(d);
    throw Error(ErrorCode::InvalidArgument, "max_features: unknown rule '" + *s + "'");
  }
  if (auto* i = std::get_if<std::int64_t>(&v)) {
    if (*i < 1 || static_cast<std::size_t>(*i) > d) {
      throw Error(ErrorCode::InvalidArgument, "max_features must be in [1, n_features]");
    }
    return static_cast<std::size_t>(*i);
  }
  if (auto* f = std::get_if<double>(&v)) {
    if (!(*f > 0 && *f <= 1)) throw Error(ErrorCode::InvalidArgument, "max_features fraction must be in (0, 1]");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(*f * static_cast<double>(d))));
  }
  throw Error(ErrorCode::InvalidArgument, "max_features has an unsupported type");
}

cart::TreeParams tree_params(ParamReader& r, std::size_t d, std::optional<std::int64_t> depth,
                             const ParamValue& max_features) {
  cart::TreeParams tp;
  tp.max_depth = depth_param(r, depth);
  tp.min_samples_split = checked_int(r.integer("min_samples_split", 2), "min_samples_split", 2);
  tp.min_samples_leaf = checked_int(r.integer("min_samples_leaf", 1), "min_samples_leaf", 1);
  tp.max_features = max_features_param(r, d, max_features);
  return tp;
}

std::shared_ptr<const Regressor> fit_family(Family family, const ParamSet& params, const Matrix& x,
                                            std::span<const double> y, std::uint64_t seed) {
  ParamReader r(family_name(family), params);
  const std::size_t d = x.cols();
  std::shared_ptr<const Regressor> out;
  switch (family) {
    case Family::DecisionTree: {
      auto tp = tree_params(r, d, std::nullopt, std::monostate{});
      tp.seed = seed;
      r.finish();
      out = std::make_shared<cart::TreeRegressor>(cart::fit_tree(x, y, tp));
      break;
    }
    case Family::RandomForest:
    case Family::ExtraTrees: {
      ensembles::ForestParams fp;
      fp.n_estimators = checked_int(r.integer("n_estimators", 100), "n_estimators", 1);
      fp.tree = family == Family::RandomForest ? tree_params(r, d, std::nullopt, std::string("sqrt"))
                                               : tree_params(r, d, std::nullopt, std::monostate{});
      fp.seed = seed;
      r.finish();
      out = family == Family::RandomForest ? ensembles::fit_random_forest(x, y, fp)
                                           : ensembles::fit_extra_trees(x, y, fp);
      break;
    }
    case Family::Bagging: {
      ensembles::BaggingParams bp;
      bp.n_estimators = checked_int(r.integer("n_estimators", 10), "n_estimators", 1);
      bp.max_samples = r.real("max_samples", 1.0);
      bp.max_features = r.real("max_features", 1.0);
      bp.seed = seed;
      r.finish();
      out = ensembles::fit_bagging(x, y, bp);
      break;
    }
    case Family::GradientBoosting: {
      ensembles::BoostParams bp;
      bp.n_estimators = checked_int(r.integer("n_estimators", 100), "n_estimators", 0);
      bp.learning_rate = r.real("learning_rate", 0.1);
      bp.max_depth = checked_int(r.integer("max_depth", 3), "max_depth", 1);
      bp.subsample = r.real("subsample", 1.0);
      bp.seed = seed;
      r.finish();
      out = ensembles::fit_gradient_boosting(x, y, bp);
      break;
    }
    case Family::XGBoost: {
      ensembles::RegBoostParams rp;
      rp.boost.n_estimators = checked_int(r.integer("n_estimators", 100), "n_estimators", 0);
      rp.boost.learning_rate = r.real("learning_rate", 0.3);
      rp.boost.max_depth = checked_int(r.integer("max_depth", 6), "max_depth", 1);
      rp.boost.subsample = r.real("subsample", 1.0);
      rp.boost.seed = seed;
      rp.gamma = r.real("gamma", 0.0);
      rp.colsample_bytree = r.real("colsample_bytree", 1.0);
      rp.lambda = r.real("reg_lambda", 1.0);
      r.finish();
      out = ensembles::fit_regularized_boosting(x, y, rp);
      break;
    }
    case Family::AdaBoost: {
      ensembles::AdaParams ap;
      ap.n_estimators = checked_int(r.integer("n_estimators", 50), "n_estimators", 1);
      ap.learning_rate = r.real("learning_rate", 1.0);
      const auto loss = r.text("loss", "linear");
      if (loss == "linear") {
        ap.loss = ensembles::AdaLoss::Linear;
      } else if (loss == "square") {
        ap.loss = ensembles::AdaLoss::Square;
      } else if (loss == "exponential") {
        ap.loss = ensembles::AdaLoss::Exponential;
      } else {
        throw Error(ErrorCode::InvalidArgument, "AdaBoost: unknown loss '" + loss + "'");
      }
      ap.max_depth = checked_int(r.integer("max_depth", 3), "max_depth", 1);
      ap.seed = seed;
      r.finish();
      out = ensembles::fit_adaboost_r2(x, y, ap);
      break;
    }
    case Family::Voting:
    case Family::Stacking: {
      auto spec = family == Family::Voting ? ensembles::default_voting_spec()
                                           : ensembles::default_stacking_spec();
      if (family == Family::Stacking) spec.stacking_folds = checked_int(r.integer("cv", 5), "cv", 2);
      spec.seed = seed;
      r.finish();
      if (family == Family::Voting) {
        out = ensembles::fit_voting(x, y, spec);
      } else {
        out = ensembles::fit_stacking(x, y, spec);
      }
      break;
    }
    case Family::SVR: {
      kernel::SvrParams sp;
      sp.c = r.real("C", 1.0);
      sp.epsilon = r.real("epsilon", 0.1);
      if (const auto k = r.text("kernel", "rbf"); k != "rbf") {
        throw Error(ErrorCode::InvalidArgument, "SVR: only the 'rbf' kernel is supported, got '" + k + "'");
      }
      if (auto g = r.raw("gamma")) {
        if (auto* s = std::get_if<std::string>(&*g); s && *s == "scale") {
          sp.gamma = 0;
        } else if (auto* f = std::get_if<double>(&*g); f && *f > 0) {
          sp.gamma = *f;
        } else {
          throw Error(ErrorCode::InvalidArgument, "SVR: gamma must be 'scale' or a positive number");
        }
      }
      sp.tolerance = r.real("tol", 1e-3);
      r.finish();
      out = kernel::fit_svr(x, y, sp);
      break;
    }
    case Family::KNeighbors: {
      kernel::KnnParams kp;
      kp.k = checked_int(r.integer("n_neighbors", 5), "n_neighbors", 1);
      const auto metric = r.text("metric", "euclidean");
      if (metric == "euclidean") {
        kp.metric = kernel::Metric::Euclidean;
      } else if (metric == "manhattan") {
        kp.metric = kernel::Metric::Manhattan;
      } else {
        throw Error(ErrorCode::InvalidArgument, "KNeighbors: unknown metric '" + metric + "'");
      }
      const auto weights = r.text("weights", "uniform");
      if (weights == "uniform") {
        kp.weights = kernel::Weights::Uniform;
      } else if (weights == "distance") {
        kp.weights = kernel::Weights::Distance;
      } else {
        throw Error(ErrorCode::InvalidArgument, "KNeighbors: unknown weights '" + weights + "'");
      }
      r.finish();
      out = kernel::fit_knn(x, y, kp);
      break;
    }
    case Family::MLPRegressor: {
      neural::MlpParams mp;
      mp.hidden.clear();
      for (auto h : r.int_list("hidden_layer_sizes", {100})) {
        mp.hidden.push_back(checked_int(h, "hidden_layer_sizes", 1));
      }
      const auto act = r.text("activation", "relu");
      if (act == "relu") {
        mp.activation = neural::Activation::Relu;
      } else if (act == "tanh") {
        mp.activation = neural::Activation::Tanh;
      } else {
        throw Error(ErrorCode::InvalidArgument, "MLPRegressor: unknown activation '" + act + "'");
      }
      mp.alpha = r.real("alpha", 0.001);
      if (const auto s = r.text("solver", "adam"); s != "adam") {
        throw Error(ErrorCode::InvalidArgument, "MLPRegressor: only the 'adam' solver is supported");
      }
      if (const auto s = r.text("learning_rate", "constant"); s != "constant") {
        throw Error(ErrorCode::InvalidArgument, "MLPRegressor: only the 'constant' schedule is supported");
      }
      mp.learning_rate = r.real("learning_rate_init", 0.001);
      mp.batch_size = checked_int(r.integer("batch_size", 200), "batch_size", 1);
      mp.max_epochs = checked_int(r.integer("max_iter", 1000), "max_iter", 1);
      mp.tolerance = r.real("tol", 1e-4);
      mp.patience = checked_int(r.integer("n_iter_no_change", 10), "n_iter_no_change", 1);
      mp.seed = seed;
      r.finish();
      out = neural::fit_mlp(x, y, mp);
      break;
    }
  }
  return out;
}

}  // namespace

std::shared_ptr<const Regressor> regressor_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(ErrorCode::Parse, "regressor record lacks 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  const auto& kinds = regressor_kinds();
  auto it = kinds.find(kind);
  if (it == kinds.end()) throw Error(ErrorCode::Parse, "unknown regressor kind '" + kind + "'");
  return it->second(j);
}

FittedModel::FittedModel(Family family, std::size_t n_features, std::optional<Standardizer> scaler,
                         std::shared_ptr<const Regressor> regressor)
    : family_(family), n_features_(n_features), scaler_(std::move(scaler)),
      regressor_(std::move(regressor)) {
  if (!regressor_) throw Error(ErrorCode::InvalidArgument, "model has no regressor");
  if (scaler_ && scaler_->size() != n_features_) {
    throw Error(ErrorCode::InvalidArgument, "standardizer width does not match the schema");
  }
}

double FittedModel::predict_row(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(n_features_) +
                                                " features, got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite feature value");
  }
  if (!scaler_) return regressor_->predict_row(x);
  std::vector<double> z(n_features_);
  scaler_->transform_row(x, z);
  return regressor_->predict_row(z);
}

std::vector<double> FittedModel::predict(const Matrix& x) const {
  if (x.rows() > 0 && x.cols() != n_features_) {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(n_features_) +
                                                " feature columns, got " + std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_row(x.row(i));
  return out;
}

std::vector<double> FittedModel::predict(const Dataset& data) const {
  return predict(data.features());
}

nlohmann::json FittedModel::to_json() const {
  nlohmann::json j = {{"format", kModelFormatName},
                      {"version", kModelFormatVersion},
                      {"family", family_name(family_)},
                      {"schema", std::vector<std::string>(kFeatureNames.begin(),
                                                          kFeatureNames.begin() + n_features_)}};
  j["standardizer"] = scaler_ ? scaler_->to_json() : nlohmann::json(nullptr);
  j["regressor"] = regressor_->to_json();
  return j;
}

FittedModel FittedModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormatName) {
      throw Error(ErrorCode::Parse, "not a cbrkit model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::Parse, "unsupported model format version " + std::to_string(version));
    }
    const auto name = j.at("family").get<std::string>();
    const auto family = parse_family(name);
    if (!family) throw Error(ErrorCode::Parse, "unknown model family '" + name + "'");
    const auto schema = j.at("schema").get<std::vector<std::string>>();
    if (schema.size() != kNumFeatures) throw Error(ErrorCode::Parse, "model schema width mismatch");
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (schema[i] != kFeatureNames[i]) throw Error(ErrorCode::Parse, "model schema does not match");
    }
    std::optional<Standardizer> scaler;
    if (const auto& s = j.at("standardizer"); !s.is_null()) scaler = Standardizer::from_json(s);
    return FittedModel(*family, schema.size(), std::move(scaler), regressor_from_json(j.at("regressor")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed model: ") + e.what());
  }
}

std::string FittedModel::serialize() const { return to_json().dump(1) + "\n"; }

FittedModel FittedModel::deserialize(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("model text is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

void FittedModel::save(const std::string& path, bool force) const {
  if (!force && std::filesystem::exists(path)) {
    throw Error(ErrorCode::Exists, "refusing to overwrite '" + path + "' (use --force)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << serialize();
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

FittedModel FittedModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

FittedModel fit_model(Family family, const ParamSet& params, const Matrix& x,
                      std::span<const double> y, std::uint64_t seed) {
  if (x.rows() == 0) throw Error(ErrorCode::InvalidArgument, "cannot fit on an empty training set");
  if (y.size() != x.rows()) throw Error(ErrorCode::InvalidArgument, "feature rows and targets differ in length");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite feature value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite target value");
  }
  if (!uses_scaler(family)) {
    return FittedModel(family, x.cols(), std::nullopt, fit_family(family, params, x, y, seed));
  }
  auto scaler = Standardizer::fit(x);
  auto z = scaler.transform(x);
  auto reg = fit_family(family, params, z, y, seed);
  return FittedModel(family, x.cols(), std::move(scaler), std::move(reg));
}

FittedModel fit_model(Family family, const ParamSet& params, const Dataset& train,
                      std::uint64_t seed) {
  if (!train.has_target()) throw Error(ErrorCode::InvalidArgument, "training data has no CBR column");
  return fit_model(family, params, train.features(), train.targets(), seed);
}

ParamSet anchor_params(Family family) {
  using I = std::int64_t;
  switch (family) {
    case Family::RandomForest:
      return {{"max_depth", I{10}}, {"max_features", std::string("sqrt")}, {"min_samples_leaf", I{1}},
              {"min_samples_split", I{5}}, {"n_estimators", I{100}}};
    case Family::Bagging:
      return {{"max_features", 0.7}, {"max_samples", 0.9}, {"n_estimators", I{200}}};
    case Family::ExtraTrees:
      return {{"max_depth", I{10}}, {"min_samples_split", I{2}}, {"n_estimators", I{300}}};
    case Family::XGBoost:
      return {{"colsample_bytree", 0.7}, {"gamma", 0.1}, {"learning_rate", 0.01},
              {"max_depth", I{3}}, {"n_estimators", I{300}}, {"subsample", 0.7}};
    case Family::SVR:
      return {{"C", I{1000}}, {"epsilon", 0.5}, {"kernel", std::string("rbf")}};
    case Family::AdaBoost:
      return {{"learning_rate", 0.01}, {"loss", std::string("exponential")}, {"n_estimators", I{200}}};
    case Family::KNeighbors:
      return {{"metric", std::string("manhattan")}, {"n_neighbors", I{3}},
              {"weights", std::string("distance")}};
    case Family::MLPRegressor:
      return {{"activation", std::string("relu")}, {"alpha", 0.001},
              {"hidden_layer_sizes", std::vector<I>{100}}, {"learning_rate", std::string("constant")},
              {"solver", std::string("adam")}};
    case Family::GradientBoosting:
      return {{"learning_rate", 0.2}, {"max_depth", I{5}}, {"n_estimators", I{300}}, {"subsample", 0.7}};
    case Family::DecisionTree:
      return {{"max_depth", I{5}}, {"min_samples_leaf", I{2}}, {"min_samples_split", I{10}}};
    case Family::Voting:
    case Family::Stacking:
      return {};
  }
  return {};
}

}  // namespace cbrkit
