#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "uqod/random.hpp"
#include "uqod/robustness.hpp"

using namespace uqod::robustness;

TEST_CASE("avg and diff examples") {
  auto r = avg_and_diff({0.9, std::vector<double>(10, 0.9)});
  CHECK(r.avg == doctest::Approx(0.9));
  CHECK(r.diff == 0.0);
  r = avg_and_diff({1.0, std::vector<double>(10, 0.0)});
  CHECK(r.avg == doctest::Approx(1.0 / 11.0));
  CHECK(r.diff == 1.0);
  r = avg_and_diff({0.8, {0.6, 1.0}});
  CHECK(r.avg == doctest::Approx(0.8));
  CHECK(r.diff == doctest::Approx(0.2));
  CHECK_THROWS_AS(avg_and_diff({0.5, {}}), std::invalid_argument);
}

TEST_CASE("RS_mAP examples") {
  CHECK(rs_map({0.7, std::vector<double>(10, 0.7)}) == doctest::Approx(0.7));
  CHECK(rs_map({1.0, std::vector<double>(10, 0.0)}) == doctest::Approx(1.0 / 11.0 - 1.0));
  CHECK(rs_map({0.8, {0.6, 1.0}}) == doctest::Approx(0.6));
}

TEST_CASE("RS_v examples") {
  CHECK(rs_uqm({0.0, std::vector<double>(10, 0.0)}) == 1.0);
  const double ln3 = std::log(3.0);
  CHECK(rs_uqm({ln3, std::vector<double>(10, ln3)}) == doctest::Approx(1.0 - ln3));
  CHECK(rs_uqm({0.0, std::vector<double>(10, 2.0)}) == doctest::Approx(1.0 - (20.0 / 11.0 + 2.0)));
}

TEST_CASE("RS_uq examples") {
  CHECK(rs_uq({1.0, 1.0, 1.0, 1.0, 1.0}) == 1.0);
  CHECK(rs_uq({1.0, 1.0, 1.0, 0.0, 0.0}) == doctest::Approx(0.6));
  UqmScores missing{1.0, std::nullopt, 1.0, std::nullopt, 1.0};
  CHECK_THROWS_WITH_AS(rs_uq(missing), "missing robustness scores: SE, TV", std::invalid_argument);
}

TEST_CASE("identical adversarial values") {
  uqod::Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const double v = rng.uniform(0, 5);
    const PairedMetrics p{v, std::vector<double>(1 + rng.below(12), v)};
    CHECK(rs_map(p) == doctest::Approx(v).epsilon(1e-14));
    CHECK(rs_uqm(p) == doctest::Approx(1.0 - v).epsilon(1e-14));
  }
}

TEST_CASE("RS_mAP weakly decreases as one adversarial value moves away") {
  uqod::Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> adv;
    for (int i = 0; i < 10; ++i) adv.push_back(rng.uniform(0, 0.5));
    const double original = 0.9;
    double last = rs_map({original, adv});
    for (int step = 0; step < 10; ++step) {
      adv[0] = std::max(0.0, adv[0] - 0.05);
      const double now = rs_map({original, adv});
      REQUIRE(now <= last + 1e-15);
      last = now;
    }
  }
}

TEST_CASE("RS_uq is invariant to metric order") {
  uqod::Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    UqmScores s;
    for (auto& v : s) v = rng.uniform(-2, 1);
    const double a = rs_uq(s);
    std::reverse(s.begin(), s.end());
    CHECK(rs_uq(s) == doctest::Approx(a).epsilon(1e-14));
  }
}

TEST_CASE("min-max normalization") {
  const std::vector<double> v{2.0, 4.0, 3.0};
  const auto n = minmax_normalize(v);
  CHECK(n == std::vector<double>{0.0, 1.0, 0.5});
  CHECK(minmax_normalize(std::vector<double>{7, 7}) == std::vector<double>{0, 0});
  CHECK(minmax_normalize(std::vector<double>{}).empty());
}

TEST_CASE("mean of defined values") {
  const std::vector<std::optional<double>> v{1.0, std::nullopt, 3.0};
  CHECK(*mean_of_defined(v) == 2.0);
  CHECK_FALSE(mean_of_defined(std::vector<std::optional<double>>{std::nullopt}).has_value());
}

TEST_CASE("metric names") {
  CHECK(std::string(kUqmNames[0]) == "VR");
  CHECK(std::string(kUqmNames[4]) == "PS");
}
