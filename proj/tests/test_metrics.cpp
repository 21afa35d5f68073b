#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "afdmil/metrics/export.hpp"
#include "afdmil/metrics/metrics.hpp"
#include "afdmil/numerics/byte_io.hpp"
#include "afdmil/numerics/errors.hpp"
#include "oracle/roc.hpp"
#include "support.hpp"

using namespace afdmil;
using doctest::Approx;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    out.push_back(l);
  }
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("classify_metrics") {
  SUBCASE("perfect") {
    const auto r = classify_metrics(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}, 0.5);
    CHECK(r.acc == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.precision == 1.0);
    CHECK(*r.auc == 1.0);
  }
  SUBCASE("one false positive") {
    const auto r = classify_metrics(std::vector<double>{0.9, 0.9}, std::vector<int>{1, 0});
    CHECK(r.acc == 0.5);
    CHECK(r.precision == 0.5);
    CHECK(r.recall == 1.0);
    CHECK(r.fp == 1);
  }
  SUBCASE("no positives") {
    const auto r = classify_metrics(std::vector<double>{0.2, 0.7}, std::vector<int>{0, 0});
    CHECK(r.recall == 0.0);
    CHECK(r.recall_degenerate);
    CHECK_FALSE(r.auc.has_value());
  }
  SUBCASE("threshold is inclusive") {
    const auto r = classify_metrics(std::vector<double>{0.5}, std::vector<int>{1});
    CHECK(r.tp == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS(classify_metrics(std::vector<double>{}, std::vector<int>{}));
    CHECK_THROWS_AS(classify_metrics(std::vector<double>{0.1}, std::vector<int>{1, 0}), DimensionError);
    CHECK_THROWS_AS(classify_metrics(std::vector<double>{0.1}, std::vector<int>{1}, 1.0), ConfigError);
  }
  SUBCASE("counts always sum to the input length") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + gen() % 40;
      std::vector<double> p(n);
      std::vector<int> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = u(gen);
        y[i] = static_cast<int>(gen() % 2);
      }
      const auto r = classify_metrics(p, y, 0.05 + 0.9 * u(gen));
      REQUIRE(r.total() == n);
      REQUIRE(r.acc == Approx(static_cast<double>(r.tp + r.tn) / static_cast<double>(n)));
    }
  }
}

TEST_CASE("auc") {
  CHECK(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}) == 1.0);
  CHECK(auc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<int>{0, 1, 1}) == 0.5);
  CHECK(auc(std::vector<double>{0.9, 0.8, 0.7, 0.1}, std::vector<int>{1, 0, 1, 0}) == 0.75);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), ConfigError);

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 49;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid on odd trials to force ties
      s[i] = trial % 2 == 1 ? std::floor(u(gen) * 5) / 5 : u(gen);
      y[i] = static_cast<int>(i % 2 == 0 ? 1 : gen() % 2);
    }
    y[1] = 0;
    const double a = auc(s, y);
    REQUIRE(std::abs(a - oracle::trapezoid_auc(s, y)) < 1e-12);

    std::vector<double> mono(n), neg(n);
    for (std::size_t i = 0; i < n; ++i) {
      mono[i] = std::exp(3 * s[i]) - 7;
      neg[i] = -s[i];
    }
    REQUIRE(auc(mono, y) == a);
    if (trial % 2 == 0) {
      REQUIRE(std::abs(auc(neg, y) - (1 - a)) < 1e-12);
    }
  }
}

TEST_CASE("distillation precision") {
  const std::vector<int> latent{0, 0, 1, 0, 0, 1};
  CHECK(selection_precision(std::vector<Index>{1, 2}, latent) == 0.5);
  CHECK(selection_precision(std::vector<Index>{5, 2}, latent) == 1.0);
  CHECK_THROWS(selection_precision(std::vector<Index>{}, latent));

  std::vector<BagSelection> bags{
      {{1, 2}, latent, 1},
      {{2, 5}, latent, 1},
      {{0, 1}, latent, 0},  // negative bags do not count
  };
  CHECK(*distill_precision_at_k(bags) == 0.75);
  std::vector<BagSelection> real{{{0}, std::nullopt, 1}};
  CHECK_FALSE(distill_precision_at_k(real).has_value());

  SUBCASE("precision is bounded by w/k_eff") {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t k = 5 + gen() % 20;
      std::vector<int> lat(k, 0);
      const std::size_t w = 1 + gen() % 3;
      for (std::size_t i = 0; i < w; ++i) {
        lat[gen() % k] = 1;
      }
      const auto wit = static_cast<double>(std::count(lat.begin(), lat.end(), 1));
      const std::size_t keff = std::min<std::size_t>(8, k);
      std::vector<Index> sel(keff);
      std::iota(sel.begin(), sel.end(), Index{0});
      std::shuffle(sel.begin(), sel.end(), gen);
      REQUIRE(selection_precision(sel, lat) <= wit / static_cast<double>(keff) + 1e-15);
    }
  }
}

TEST_CASE("export_instance_scores") {
  const auto dir = testing::scratch_dir("export");
  Bag bag{"b0", 1, Matrix::Zero(2, 3), std::vector<std::array<double, 2>>{{0, 0}, {1, 0}}, {}};
  ForwardTrace t;
  t.instance_probs = {1.0, 0.25};
  t.attention_weights = {0.4, 0.6};
  t.channel1_indices = {0};
  t.channel2_indices = {1};

  SUBCASE("table rows and flags match the trace") {
    const auto r = export_instance_scores(t, bag, dir / "s.csv", dir / "s.pgm");
    CHECK(r.rows == 2);
    const auto ls = lines(bytes::read_file(dir / "s.csv"));
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == kScoreHeader);
    const auto r0 = cells(ls[1]);
    const auto r1 = cells(ls[2]);
    CHECK(r0[5] == "1");
    CHECK(r0[6] == "0");
    CHECK(r1[5] == "0");
    CHECK(r1[6] == "1");
    CHECK(std::stod(r1[3]) == 0.25);
    CHECK(std::stod(r1[4]) == 0.6);
    CHECK(r1[1] == "1");

    REQUIRE(r.raster_written);
    const std::string pgm = bytes::read_file(dir / "s.pgm");
    const std::string head = "P5\n2 1\n255\n";
    REQUIRE(pgm.size() == head.size() + 2);
    CHECK(pgm.substr(0, head.size()) == head);
    CHECK(static_cast<unsigned char>(pgm[head.size()]) == 255);
    CHECK(static_cast<unsigned char>(pgm[head.size() + 1]) == 64);
  }
  SUBCASE("non-integer coordinates skip the raster but keep the table") {
    bag.coords = std::vector<std::array<double, 2>>{{0.5, 0}, {1, 0}};
    const auto r = export_instance_scores(t, bag, dir / "s.csv", dir / "bad.pgm");
    CHECK_FALSE(r.raster_written);
    CHECK_FALSE(r.warning.empty());
    CHECK_FALSE(std::filesystem::exists(dir / "bad.pgm"));
    CHECK(lines(bytes::read_file(dir / "s.csv")).size() == 3);
  }
  SUBCASE("no coordinates leave blanks") {
    bag.coords.reset();
    const auto ls = lines(format_instance_scores(t, bag));
    CHECK(cells(ls[1])[1].empty());
    CHECK(cells(ls[1])[2].empty());
  }
  SUBCASE("trace from another bag") {
    t.channel2_indices = {5};
    CHECK_THROWS_AS(format_instance_scores(t, bag), DimensionError);
  }
}
