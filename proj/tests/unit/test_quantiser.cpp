#include <doctest.h>

#include <cmath>
#include <limits>

#include "ana/errors.hpp"
#include "ana/quantiser.hpp"
#include "ana/rng.hpp"
#include "support/oracles.hpp"

using namespace ana;

TEST_CASE("heaviside is right-inclusive") {
  CHECK(heaviside(0.0, 0.0) == 1);
  CHECK(heaviside(0.0, -0.1) == 0);
  CHECK(heaviside(2.5, 2.5) == 1);
  CHECK_THROWS_AS(heaviside(0.0, std::nan("")), DomainError);
  CHECK_THROWS_AS(heaviside(std::numeric_limits<double>::infinity(), 0.0), DomainError);
}

TEST_CASE("quantise and bin_index on the ternary quantiser") {
  const auto q = Quantiser::ternary();
  CHECK(quantise(q, 0.2) == 0.0);
  CHECK(quantise(q, 0.5) == 1.0);
  CHECK(quantise(Quantiser::heaviside(), -3.0) == 0.0);
  CHECK(bin_index(q, -0.5) == 1);
  CHECK(bin_index(q, -0.7) == 0);
  CHECK(bin_index(q, 0.9) == 2);
  CHECK_THROWS_AS(quantise(q, std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("quantiser construction is validated") {
  CHECK_THROWS_AS(Quantiser({0.0}, {}), ConfigError);
  CHECK_THROWS_AS(Quantiser({0.0, 1.0}, {}), ConfigError);
  CHECK_THROWS_AS(Quantiser({1.0, 0.0}, {0.0}), ConfigError);
  CHECK_THROWS_AS(Quantiser({0.0, 1.0, 2.0}, {1.0, 0.5}), ConfigError);
  CHECK_THROWS_AS(Quantiser({0.0, std::nan("")}, {0.0}), ConfigError);
  CHECK_NOTHROW(Quantiser({-3.0, 1.0, 7.0}, {-1.0, 4.0}));
}

TEST_CASE("linear quantiser examples") {
  CHECK(linear_quantise({0, 0.25, 2}, 0.6) == 0.5);
  CHECK(linear_quantise({-2, 1.0, 2}, 10.0) == 1.0);
  CHECK(linear_quantise({0, 1.0, 1}, -5.0) == 0.0);
  CHECK(linear_quantise({-2, 1.0, 2}, -0.5) == -1.0);  // floor toward −∞
  CHECK_THROWS_AS(linear_quantise({0, 0.0, 2}, 1.0), ConfigError);
  CHECK_THROWS_AS(linear_quantise({0, -1.0, 2}, 1.0), ConfigError);
  CHECK_THROWS_AS(LinearQuantiserSpec({0, 1.0, 0}).validate(), ConfigError);
}

TEST_CASE("induced quantiser has 2^B levels (z+k)ε") {
  const LinearQuantiserSpec spec{-3, 0.5, 3};
  const auto q = spec.induced();
  REQUIRE(q.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) CHECK(q.levels()[k] == (-3.0 + static_cast<double>(k)) * 0.5);
  for (std::size_t k = 1; k < 8; ++k) CHECK(q.thresholds()[k - 1] == (-3.0 + static_cast<double>(k)) * 0.5);
}

TEST_CASE("property: linear quantiser equals its induced quantiser on a dense grid") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const LinearQuantiserSpec spec{static_cast<std::int64_t>(uniform_index(rng, 9)) - 4,
                                   0.05 + 2.0 * uniform01(rng), 1 + static_cast<int>(uniform_index(rng, 4))};
    const auto q = spec.induced();
    const double lo = q.lowest() - 3.0 * spec.quantum;
    const double hi = q.highest() + 3.0 * spec.quantum;
    for (int i = 0; i <= 2000; ++i) {
      const double x = lo + (hi - lo) * i / 2000.0;
      REQUIRE(linear_quantise(spec, x) == quantise(q, x));
    }
    // Exactly on every threshold as well.
    for (double t : q.thresholds()) REQUIRE(linear_quantise(spec, t) == quantise(q, t));
  }
}

TEST_CASE("property: quantise is monotone, hits every level, agrees with bin_index and the stair sum") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + uniform_index(rng, 6);
    std::vector<double> levels(k), thresholds(k - 1);
    double v = -5.0 * uniform01(rng);
    for (auto& l : levels) l = (v += 0.1 + uniform01(rng));
    v = -3.0 * uniform01(rng);
    for (auto& t : thresholds) t = (v += 0.05 + uniform01(rng));
    const Quantiser q(levels, thresholds);
    const double lo = thresholds.front() - 1.0, hi = thresholds.back() + 1.0;
    double prev = -std::numeric_limits<double>::infinity();
    std::vector<bool> seen(k, false);
    for (int i = 0; i <= 5000; ++i) {
      const double x = lo + (hi - lo) * i / 5000.0;
      const double y = quantise(q, x);
      REQUIRE(y >= prev);
      prev = y;
      const auto b = bin_index(q, x);
      REQUIRE(y == levels[b]);
      REQUIRE(y == doctest::Approx(oracle::stair(q, x)).epsilon(1e-12));
      seen[b] = true;
    }
    for (bool s : seen) CHECK(s);
  }
}
