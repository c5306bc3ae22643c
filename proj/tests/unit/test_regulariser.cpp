#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ana/errors.hpp"
#include "ana/regulariser.hpp"
#include "support/oracles.hpp"

using namespace ana;

namespace {

constexpr NoiseFamily kFamilies[] = {NoiseFamily::uniform, NoiseFamily::triangular, NoiseFamily::normal,
                                     NoiseFamily::logistic};

const double kHalfUnit = 1.0 / (2.0 * std::sqrt(3.0));  // uniform on [−1/2, 1/2]

RegularisedActivation make(Quantiser q, NoiseFamily f, double a, double b) {
  return {std::move(q), f, {a, b}, ForwardStrategy::expectation};
}

Quantiser random_quantiser(Rng& rng) {
  if (uniform01(rng) < 0.5) return uniform01(rng) < 0.5 ? Quantiser::ternary(0.5 + uniform01(rng)) : Quantiser::binary_sign(0.5 + uniform01(rng));
  return Quantiser::heaviside(uniform01(rng) - 0.5);
}

}  // namespace

TEST_CASE("strategy names round-trip") {
  for (auto s : {ForwardStrategy::expectation, ForwardStrategy::mode, ForwardStrategy::random})
    CHECK(parse_forward_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_forward_strategy("median"), ConfigError);
}

TEST_CASE("expectation recovers the clipped ReLU and hard sigmoid") {
  const auto relu = make(Quantiser::heaviside(), NoiseFamily::uniform, 0.5, kHalfUnit);
  const auto sigmoid = make(Quantiser::heaviside(), NoiseFamily::uniform, 0.0, kHalfUnit);
  for (int i = -2000; i <= 2000; ++i) {
    const double x = i * 1e-3;
    REQUIRE(std::abs(expectation_forward(relu, x) - std::clamp(x, 0.0, 1.0)) <= 1e-12);
    REQUIRE(std::abs(expectation_forward(sigmoid, x) - std::clamp(x + 0.5, 0.0, 1.0)) <= 1e-12);
  }
}

TEST_CASE("Dirac noise reproduces the quantiser bit for bit") {
  Rng rng(1);
  for (auto f : kFamilies)
    for (int i = 0; i < 1000; ++i) {
      const auto q = random_quantiser(rng);
      const double alpha = uniform01(rng) - 0.5;
      const double x = 4.0 * uniform01(rng) - 2.0;
      const auto a = make(q, f, alpha, 0.0);
      REQUIRE(expectation_forward(a, x) == quantise(q, x - alpha));
      REQUIRE(mode_forward(a, x) == quantise(q, x - alpha));
      REQUIRE(random_forward(a, x, rng) == quantise(q, x - alpha));
      REQUIRE(backward(a, x) == 0.0);
    }
  // Exactly at a threshold the step side follows the quantiser.
  CHECK(expectation_forward(make(Quantiser::ternary(), NoiseFamily::normal, 0.0, 0.0), 0.5) == 1.0);
}

TEST_CASE("backward examples") {
  SUBCASE("Heaviside under uniform noise has the boxcar density as derivative") {
    const auto a = make(Quantiser::heaviside(), NoiseFamily::uniform, 0.5, kHalfUnit);
    for (double x : {-0.5, 0.1, 0.5, 0.9, 1.5}) CHECK(backward(a, x) == pdf(NoiseFamily::uniform, a.params, x));
  }
  SUBCASE("ternary logistic matches a central difference") {
    const auto a = make(Quantiser::ternary(), NoiseFamily::logistic, 0.0, 0.3);
    const double fd = oracle::central_difference([&](double x) { return expectation_forward(a, x); }, 0.1, 1e-5);
    CHECK(std::abs(backward(a, 0.1) - fd) <= 1e-6);
  }
}

TEST_CASE("property: backward is the derivative of expectation_forward") {
  Rng rng(2);
  for (auto f : kFamilies)
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = make(random_quantiser(rng), f, 4.0 * uniform01(rng) - 2.0, 0.05 + 1.95 * uniform01(rng));
      for (int i = 0; i < 100; ++i) {
        const double x = a.params.mean + (6.0 * uniform01(rng) - 3.0) * a.params.stddev;
        // Compact families have density jumps at t ± half-width; skip those.
        bool near_kink = false;
        if (has_compact_support(f))
          for (double t : a.quantiser.thresholds()) {
            const double u = x - t - a.params.mean;
            const double h = support_half_width(f, a.params);
            near_kink |= std::abs(std::abs(u) - h) < 1e-4 || (f == NoiseFamily::triangular && std::abs(u) < 1e-4);
          }
        if (near_kink) continue;
        const double fd = oracle::central_difference([&](double y) { return expectation_forward(a, y); }, x, 1e-6);
        const double g = backward(a, x);
        REQUIRE(std::abs(g - fd) <= 1e-5 * std::max(1.0, std::abs(g)));
      }
    }
}

TEST_CASE("property: expectation equals the Monte-Carlo mean") {
  Rng rng(3);
  for (auto f : kFamilies)
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = make(random_quantiser(rng), f, uniform01(rng) - 0.5, 0.1 + uniform01(rng));
      const double x = 2.0 * uniform01(rng) - 1.0;
      const int n = 100000;
      double sum = 0.0, sq = 0.0;
      for (int i = 0; i < n; ++i) {
        const double y = oracle::stair(a.quantiser, x - sample(f, a.params, rng));
        sum += y;
        sq += y * y;
      }
      const double mean = sum / n;
      const double se = std::sqrt(std::max(sq / n - mean * mean, 1e-300) / n);
      // Mass below ~10/n can go unseen entirely in n draws.
      const auto levels = a.quantiser.levels();
      const double unseen = 10.0 / n * (levels.back() - levels.front());
      CHECK(std::abs(expectation_forward(a, x) - mean) <= 4.0 * se + unseen);
    }
}

TEST_CASE("property: pointwise convergence as the noise vanishes") {
  for (auto f : kFamilies) {
    const auto q = Quantiser::ternary();
    for (double x : {-1.3, -0.6, -0.2, 0.0, 0.3, 0.55, 0.9}) {
      double prev = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= 30; ++k) {
        const double lambda = std::pow(0.7, k);
        const auto a = make(q, f, 0.02 * lambda, 0.5 * lambda);
        const double err = std::abs(expectation_forward(a, x) - quantise(q, x));
        REQUIRE(err <= prev + 1e-15);
        prev = err;
      }
      CHECK(prev < 1e-12);
    }
  }
}

TEST_CASE("property: backward is bounded by the level span times the peak density") {
  Rng rng(4);
  for (auto f : kFamilies)
    for (int i = 0; i < 2000; ++i) {
      const auto a = make(random_quantiser(rng), f, uniform01(rng) - 0.5, 0.05 + uniform01(rng));
      const double x = 4.0 * uniform01(rng) - 2.0;
      const double bound = (a.quantiser.highest() - a.quantiser.lowest()) * max_pdf(f, a.params);
      REQUIRE(backward(a, x) <= bound * (1.0 + 1e-12));
      REQUIRE(backward(a, x) >= 0.0);
    }
}

TEST_CASE("level probabilities") {
  SUBCASE("symmetric noise at a binary threshold splits evenly") {
    for (auto f : kFamilies) {
      const auto p = level_probabilities(make(Quantiser::binary_sign(), f, 0.0, 0.4), 0.0);
      CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));
    }
  }
  SUBCASE("Dirac") {
    const auto p = level_probabilities(make(Quantiser::ternary(), NoiseFamily::normal, 0.0, 0.0), 0.2);
    CHECK(p == std::vector<double>{0.0, 1.0, 0.0});
  }
  SUBCASE("closed form against Monte-Carlo frequencies") {
    const auto a = make(Quantiser::ternary(), NoiseFamily::uniform, 0.0, kHalfUnit);
    const auto p = level_probabilities(a, 0.4);
    Rng rng(5);
    std::vector<double> freq(3, 0.0);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) freq[bin_index(a.quantiser, 0.4 - sample(a.family, a.params, rng))] += 1.0 / n;
    for (int k = 0; k < 3; ++k) CHECK(std::abs(p[k] - freq[k]) < 0.002);
  }
  SUBCASE("probabilities are non-negative and sum to one") {
    Rng rng(6);
    for (auto f : kFamilies)
      for (int i = 0; i < 1000; ++i) {
        const auto a = make(random_quantiser(rng), f, uniform01(rng) - 0.5, 0.01 + 3.0 * uniform01(rng));
        const auto p = level_probabilities(a, 6.0 * uniform01(rng) - 3.0);
        double s = 0.0;
        for (double v : p) {
          REQUIRE(v >= 0.0);
          s += v;
        }
        REQUIRE(std::abs(s - 1.0) <= 1e-12);
      }
  }
}

TEST_CASE("mode forward") {
  SUBCASE("equals the quantiser when the noise is narrow relative to the bins") {
    Rng rng(7);
    for (auto f : kFamilies)
      for (int i = 0; i < 2000; ++i) {
        const auto q = Quantiser::ternary();
        const auto a = make(q, f, 0.0, 0.01 + 0.09 * uniform01(rng));
        const double x = 4.0 * uniform01(rng) - 2.0;
        REQUIRE(mode_forward(a, x) == quantise(q, x));
      }
  }
  SUBCASE("wide normal noise around zero picks an outer level") {
    // p ≈ (0.478, 0.040, 0.482): the unbounded outer bins carry more mass
    // than the unit-width middle bin.
    const auto a = make(Quantiser::ternary(), NoiseFamily::normal, 0.0, 10.0);
    const auto p = level_probabilities(a, 0.05);
    CHECK(p[0] == doctest::Approx(oracle::normal_cdf(-0.055)).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(oracle::normal_cdf(-0.045)).epsilon(1e-12));
    CHECK(p[1] < p[0]);
    CHECK(p[0] < p[2]);
    CHECK(mode_forward(a, 0.05) == 1.0);
  }
  SUBCASE("ties go to the lower level") {
    CHECK(mode_forward(make(Quantiser::binary_sign(), NoiseFamily::logistic, 0.0, 0.3), 0.0) == -1.0);
  }
}

TEST_CASE("random forward") {
  Rng rng(8);
  SUBCASE("binary at threshold draws each level half the time") {
    const auto a = make(Quantiser::heaviside(), NoiseFamily::normal, 0.0, 0.5);
    int ones = 0;
    for (int i = 0; i < 100000; ++i) ones += random_forward(a, 0.0, rng) == 1.0;
    CHECK(std::abs(ones / 1e5 - 0.5) < 0.01);
  }
  SUBCASE("ternary uniform frequencies match the closed form") {
    const auto a = make(Quantiser::ternary(), NoiseFamily::uniform, 0.0, 0.5);
    const auto p = level_probabilities(a, 0.3);
    std::vector<double> freq(3, 0.0);
    for (int i = 0; i < 100000; ++i) freq[bin_index(a.quantiser, random_forward(a, 0.3, rng))] += 1e-5;
    for (int k = 0; k < 3; ++k) CHECK(std::abs(freq[k] - p[k]) < 0.01);
  }
  SUBCASE("dispatch requires a generator only for random") {
    auto a = make(Quantiser::ternary(), NoiseFamily::uniform, 0.0, 0.5);
    CHECK(forward(a, 0.3, nullptr) == expectation_forward(a, 0.3));
    a.strategy = ForwardStrategy::mode;
    CHECK(forward(a, 0.3, nullptr) == mode_forward(a, 0.3));
    a.strategy = ForwardStrategy::random;
    CHECK_THROWS_AS(forward(a, 0.3, nullptr), StateError);
  }
}
