/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cbrkit/rng.hpp"

namespace cbrkit {
namespace {

// Training-set summary statistics the generator is calibrated to.
constexpr std::array<double, 3> kCompositionMean{15.03, 30.74, 54.23};
constexpr double kCompositionConcentration = 2.3;
constexpr double kLlMean = 38.02, kLlSd = 18.27, kLlMax = 94.0;
constexpr double kPiMax = 58.0;
constexpr double kPiRatioLow = 0.2, kPiRatioHigh = 0.75;
constexpr double kMddMean = 17.12, kMddSd = 2.69, kMddMin = 10.0, kMddMax = 22.52;
constexpr double kOmcIntercept = 46.0, kOmcSlope = -1.75, kOmcSd = 3.0;
constexpr double kOmcMin = 1.7, kOmcMax = 37.0;
// Composition bounds in hundredths of a percent.
constexpr long kGravelMax = 8200, kSandMin = 100, kSandMax = 7930, kFinesMin = 300,
               kFinesMax = 9900;

double round2(double v) { return std::round(v * 100.0) / 100.0; }

/// Latin-hypercube uniforms: one draw inside each of n equal strata, in
/// random order.
std::vector<double> stratified_uniforms(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  shuffle(std::span(perm), rng);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (static_cast<double>(perm[i]) + uniform_open01(rng)) / static_cast<double>(n);
  }
  return u;
}

/// Inverse-CDF draw from normal(mean, sd) truncated to [lo, hi].
double truncated_normal(double u, double mean, double sd, double lo, double hi) {
  static const boost::math::normal_distribution<double> unit;
  const double plo = boost::math::cdf(unit, (lo - mean) / sd);
  const double phi = boost::math::cdf(unit, (hi - mean) / sd);
  double p = plo + u * (phi - plo);
  p = std::clamp(p, 1e-300, 1.0 - 1e-16);
  return std::clamp(mean + sd * boost::math::quantile(unit, p), lo, hi);
}

struct Composition {
  long gravel, sand, fines;  // hundredths, summing to 10000
};

std::optional<Composition> make_composition(const std::array<double, 3>& u) {
  std::array<double, 3> draw{};
  double total = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double shape = kCompositionConcentration * kCompositionMean[j] / 100.0;
    draw[j] = boost::math::gamma_p_inv(shape, u[j]);
    total += draw[j];
  }
  if (!(total > 0)) return std::nullopt;
  const long g = std::lround(10000.0 * draw[0] / total);
  const long s = std::lround(10000.0 * draw[1] / total);
  const long f = 10000 - g - s;
  if (g > kGravelMax || s < kSandMin || s > kSandMax || f < kFinesMin || f > kFinesMax) {
    return std::nullopt;
  }
  return Composition{g, s, f};
}

}  // namespace

double surrogate_cbr(const SoilSample& s) {
  const double clean = 2.0 + 0.55 * s.g + 0.18 * s.s + 3.0 * std::max(s.mdd - 15.0, 0.0) -
                       0.45 * s.omc - 0.12 * s.pi;
  return std::clamp(clean, 1.0, 100.0);
}

Dataset generate_synthetic(const GeneratorConfig& cfg) {
  if (cfg.n_samples < 10) {
    throw Error(ErrorCode::InvalidArgument, "generator needs n_samples >= 10, got " +
                                                std::to_string(cfg.n_samples));
  }
  if (!(cfg.noise_sd >= 0) || !std::isfinite(cfg.noise_sd)) {
    throw Error(ErrorCode::InvalidArgument, "noise_sd must be finite and >= 0");
  }
  const std::size_t n = cfg.n_samples;
  Rng rng(cfg.seed);

  std::array<std::vector<double>, 3> u_comp;
  for (auto& u : u_comp) u = stratified_uniforms(n, rng);
  const auto u_ll = stratified_uniforms(n, rng);
  const auto u_pi = stratified_uniforms(n, rng);
  const auto u_mdd = stratified_uniforms(n, rng);
  const auto u_omc = stratified_uniforms(n, rng);
  const auto u_noise = stratified_uniforms(n, rng);

  static const boost::math::normal_distribution<double> unit;
  std::vector<SoilSample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto comp = make_composition({u_comp[0][i], u_comp[1][i], u_comp[2][i]});
    while (!comp) {
      comp = make_composition({uniform_open01(rng), uniform_open01(rng), uniform_open01(rng)});
    }

    SoilSample s;
    s.g = static_cast<double>(comp->gravel) / 100.0;
    s.s = static_cast<double>(comp->sand) / 100.0;
    s.fc = static_cast<double>(comp->fines) / 100.0;
    s.ll = round2(truncated_normal(u_ll[i], kLlMean, kLlSd, 0.0, kLlMax));
    if (s.ll > 0) {
      const double ratio = kPiRatioLow + u_pi[i] * (kPiRatioHigh - kPiRatioLow);
      s.pi = std::min(round2(std::min(s.ll * ratio, kPiMax)), s.ll);
    }
    s.mdd = round2(truncated_normal(u_mdd[i], kMddMean, kMddSd, kMddMin, kMddMax));
    const double omc_mean = kOmcIntercept + kOmcSlope * s.mdd;
    s.omc = round2(truncated_normal(u_omc[i], omc_mean, kOmcSd, kOmcMin, kOmcMax));

    const double noise = cfg.noise_sd * boost::math::quantile(unit, u_noise[i]);
    s.cbr = round2(std::clamp(surrogate_cbr(s) + noise, 0.5, 100.0));
    samples.push_back(s);
  }
  return Dataset(std::move(samples), true);
}

}  // namespace cbrkit
