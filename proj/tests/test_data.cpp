/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"

#include "cbrkit/data.hpp"
#include "cbrkit/standardizer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cbrkit;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "mem.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

// Training-set summary statistics the generator is calibrated against.
struct FeatureStats {
  double mean, min, max;
};
constexpr FeatureStats kTrainStats[kNumFeatures] = {
    {15.03, 0, 82}, {30.74, 1, 79.3}, {54.23, 3, 99}, {38.02, 0, 94},
    {18.54, 0, 58}, {17.12, 10, 22.52}, {16.61, 1.7, 37}};

}  // namespace

TEST_SUITE("data") {

TEST_CASE("well-formed csv") {
  auto d = parse("G,S,FC,LL,PI,MDD,OMC,CBR\n"
                 "15,30,55,40,20,17,15,20\n"
                 "10,40,50,30,10,18,12,35.5\n"
                 "0,20,80,50,25,16,20,4\n");
  CHECK(d.size() == 3);
  CHECK(d.has_target());
  CHECK(d.targets()[1] == 35.5);
  CHECK(d[2].fc == 80);
}

TEST_CASE("columns may be reordered and CBR may be absent") {
  auto d = parse("OMC,MDD,PI,LL,FC,S,G\n15,17,20,40,55,30,15\n");
  CHECK_FALSE(d.has_target());
  CHECK(d[0].g == 15);
  CHECK(d[0].omc == 15);
  auto empty = parse("G,S,FC,LL,PI,MDD,OMC\n");
  CHECK(empty.empty());
  CHECK_FALSE(empty.has_target());
  CHECK(parse("G,S,FC,LL,PI,MDD,OMC,CBR\r\n").has_target());
}

TEST_CASE("validation errors name the row and the rule") {
  const std::string header = "G,S,FC,LL,PI,MDD,OMC,CBR\n";
  auto msg = error_of(header + "15,30,55,40,20,17,15,20\n15,30,55,50,60,17,15,20\n");
  CHECK(msg.find("row 2") != std::string::npos);
  CHECK(msg.find("PI <= LL") != std::string::npos);
  msg = error_of(header + "15,30,40,40,20,17,15,20\n");
  CHECK(msg.find("G+S+FC") != std::string::npos);
  msg = error_of(header + "15,30,55,40,abc,17,15,20\n");
  CHECK(msg.find("row 1") != std::string::npos);
  CHECK(msg.find("PI") != std::string::npos);
  msg = error_of(header + "15,30,55,40,20,17\n");
  CHECK(msg.find("fields") != std::string::npos);
  CHECK(error_of("G,S,FC,LL,PI,MDD\n").find("missing column 'OMC'") != std::string::npos);
  CHECK(error_of("G,S,FC,LL,PI,MDD,OMC,CBR,X\n").find("unexpected column 'X'") != std::string::npos);
  CHECK(error_of("G,S,FC,LL,PI,MDD,OMC,G\n").find("duplicate") != std::string::npos);
  CHECK(error_of("").find("header") != std::string::npos);
}

TEST_CASE("split sizes and partition") {
  CHECK(test_count(382, 0.8) == 77);
  CHECK(test_count(10, 0.8) == 2);
  CHECK(test_count(100, 0.8) == 20);
  auto data = generate_synthetic({382, 1, 4.0});
  auto [train, test] = split(data, {0.8, 1, false});
  CHECK(train.size() == 305);
  CHECK(test.size() == 77);

  auto small = generate_synthetic({10, 2, 4.0});
  auto [a, b] = split(small, {0.8, 9, false});
  CHECK(a.size() == 8);
  CHECK(b.size() == 2);
}

TEST_CASE("split is a seeded partition") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> ns(10, 400);
  const auto pool = generate_synthetic({400, 3, 4.0});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = ns(rng);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto data = pool.subset(idx);
    const std::uint64_t seed = rng();
    auto [train, test] = split(data, {0.8, seed, false});
    CHECK(train.size() + test.size() == n);
    // Rows are distinct records, so a feature tuple identifies a row.
    std::set<std::array<double, kNumFeatures>> seen;
    for (const auto& s : train.samples()) seen.insert(s.features());
    for (const auto& s : test.samples()) CHECK(seen.insert(s.features()).second);
    CHECK(seen.size() == n);
    auto [train2, test2] = split(data, {0.8, seed, false});
    CHECK(train2.features() == train.features());
    CHECK(test2.features() == test.features());
  }
}

TEST_CASE("split rejects degenerate requests") {
  auto d = generate_synthetic({10, 1, 4.0});
  CHECK_THROWS_AS(split(d, {0.0, 1, false}), Error);
  CHECK_THROWS_AS(split(d, {1.0, 1, false}), Error);
  CHECK_THROWS_AS(split(d, {0.01, 1, false}), Error);  // no training rows left
  std::vector<std::size_t> one{0};
  CHECK_THROWS_AS(split(d.subset(one), {0.8, 1, false}), Error);
}

TEST_CASE("generator matches the calibration targets") {
  const auto d = generate_synthetic({305, 1, 4.0});
  REQUIRE(d.size() == 305);
  const auto& x = d.features();
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    const auto col = x.column(f);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    const auto& t = kTrainStats[f];
    INFO("feature " << kFeatureNames[f] << " mean " << mean);
    CHECK((std::fabs(mean - t.mean) <= 0.15 * t.mean || std::fabs(mean - t.mean) <= 2.0));
    CHECK(*lo >= t.min);
    CHECK(*hi <= t.max);
  }
  const auto g = x.column(0);
  const double mean_g = std::accumulate(g.begin(), g.end(), 0.0) / 305.0;
  CHECK(mean_g >= 12.8);
  CHECK(mean_g <= 17.3);
  for (const auto& s : d.samples()) {
    // Exact in the recorded hundredths; the double sum differs only by rounding.
    CHECK(std::lround(s.g * 100) + std::lround(s.s * 100) + std::lround(s.fc * 100) == 10000);
    CHECK(std::fabs(s.g + s.s + s.fc - 100.0) <= 1e-12);
    CHECK(s.pi <= s.ll);
    CHECK(*s.cbr > 0);
    CHECK_FALSE(check_sample(s));
  }
}

TEST_CASE("generator is deterministic and round-trips through csv") {
  const auto a = generate_synthetic({120, 5, 4.0});
  const auto b = generate_synthetic({120, 5, 4.0});
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  CHECK(sa.str() == sb.str());
  std::istringstream in(sa.str());
  const auto back = parse_csv(in);
  CHECK(back.features() == a.features());
  CHECK(std::equal(back.targets().begin(), back.targets().end(), a.targets().begin()));
  CHECK(sa.str() != [] {
    std::ostringstream s;
    write_csv(s, generate_synthetic({120, 6, 4.0}));
    return s.str();
  }());
}

TEST_CASE("generator rejects bad configurations") {
  CHECK_THROWS_AS(generate_synthetic({5, 1, 4.0}), Error);
  CHECK_THROWS_AS(generate_synthetic({100, 1, -1.0}), Error);
  CHECK_NOTHROW(generate_synthetic({10, 1, 0.0}));
}

TEST_CASE("surrogate target follows the documented formula") {
  SoilSample s{20, 30, 50, 40, 10, 18, 12, std::nullopt};
  CHECK(surrogate_cbr(s) == doctest::Approx(2 + 0.55 * 20 + 0.18 * 30 + 3.0 * 3 - 0.45 * 12 - 0.12 * 10));
  SoilSample weak{0, 5, 95, 90, 55, 12, 35, std::nullopt};
  CHECK(surrogate_cbr(weak) == 1.0);
}

TEST_CASE("save refuses to overwrite without force") {
  test_util::TempDir dir;
  const auto path = (dir.path / "d.csv").string();
  const auto d = generate_synthetic({20, 1, 4.0});
  save_csv(path, d, false);
  CHECK_THROWS_AS(save_csv(path, d, false), Error);
  CHECK_NOTHROW(save_csv(path, d, true));
  CHECK(load_csv(path).size() == 20);
  CHECK_THROWS_AS(load_csv((dir.path / "missing.csv").string()), Error);
}

TEST_CASE("standardizer examples") {
  Matrix constant(3, 1, 1.0);
  auto s = Standardizer::fit(constant);
  auto z = s.transform(constant);
  for (double v : z.data()) CHECK(v == 0.0);

  Matrix two(2, 1, std::vector<double>{0, 2});
  auto t = Standardizer::fit(two).transform(two);
  CHECK(t(0, 0) == -1.0);
  CHECK(t(1, 0) == 1.0);
}

TEST_CASE("standardizer moments and inverse") {
  std::mt19937_64 rng(4);
  auto x = oracle::random_matrix(rng, 50, 7, 30.0, 5.0);
  auto s = Standardizer::fit(x);
  auto z = s.transform(x);
  for (std::size_t c = 0; c < 7; ++c) {
    const auto col = z.column(c);
    double m = 0, v = 0;
    for (double e : col) m += e;
    m /= 50;
    for (double e : col) v += (e - m) * (e - m);
    CHECK(std::fabs(m) < 1e-9);
    CHECK(std::sqrt(v / 50) == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto back = s.inverse_transform(z);
  for (std::size_t i = 0; i < back.data().size(); ++i) CHECK(std::fabs(back.data()[i] - x.data()[i]) < 1e-9);
  CHECK(Standardizer::from_json(s.to_json()) == s);
}

}  // TEST_SUITE
