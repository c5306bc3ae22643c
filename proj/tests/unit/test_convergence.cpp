#include <doctest.h>

#include <cmath>
#include <vector>

#include "ana/commands.hpp"
#include "ana/config.hpp"
#include "ana/convergence.hpp"
#include "ana/errors.hpp"
#include "support/oracles.hpp"

using namespace ana;

namespace {

RegularisedActivation heaviside_with(NoiseFamily f, double alpha, double beta) {
  return {Quantiser::heaviside(), f, {alpha, beta}};
}

std::vector<RegulariserLaw> drifting_logistic(std::size_t layers) {
  RegulariserLaw law;
  law.family = NoiseFamily::logistic;
  law.c_alpha = -1.0;
  law.alpha_power = 0.5;
  law.c_beta = 1.0;
  law.beta_power = 1.0;
  return std::vector<RegulariserLaw>(layers, law);
}

Network single_heaviside(double pre_activation) {
  Layer h = Layer::dense(1, 1);
  h.activation = ActivationSpec{Quantiser::heaviside(), NoiseFamily::logistic};
  h.bias(0) = pre_activation;
  Layer out = Layer::dense(1, 1);
  out.weight(0, 0) = 1.0;
  return Network({h, out});
}

}  // namespace

TEST_CASE("lambda laws and rates") {
  CHECK(LambdaLaw{}.at(0.25) == 0.25);
  CHECK(LambdaLaw{0.5, 1.0}.at(0.75) == 1.0);
  CHECK(LambdaLaw{0.5, 1.0}.at(0.25) == 0.5);
  CHECK(LambdaLaw{1.0, 0.5}.at(0.25) == doctest::Approx(0.5));
  const auto laws = drifting_logistic(2);
  const ConvergenceRate r{{2.0, 0.5}};
  CHECK(r.at(laws[0], 0, 0.5) == 0.25);
  CHECK(r.at(laws[1], 1, 0.25) == doctest::Approx(0.5));
  const auto p = laws[0].params_at(0.25);
  CHECK(p.mean == doctest::Approx(-0.5));
  CHECK(p.stddev == 0.25);
}

TEST_CASE("dyadic grid") {
  const auto g = dyadic_grid(1, 4);
  CHECK(g == std::vector<double>{0.5, 0.25, 0.125, 0.0625});
  CHECK(dyadic_grid().size() == 20);
}

TEST_CASE("invert_regulariser examples") {
  CHECK(std::abs(invert_regulariser(heaviside_with(NoiseFamily::logistic, 0.0, 1.0), 0.5)) < 1e-11);
  // σ(x) = Φ(x) for zero-mean unit normal noise on H⁺_0.
  CHECK(invert_regulariser(heaviside_with(NoiseFamily::normal, 0.0, 1.0), oracle::normal_cdf(1.0)) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(invert_regulariser(heaviside_with(NoiseFamily::normal, 0.0, 1.0), 0.8413) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(invert_regulariser(heaviside_with(NoiseFamily::uniform, 0.0, 1.0), 0.5), UnsupportedFamilyError);
  CHECK_THROWS_AS(invert_regulariser(heaviside_with(NoiseFamily::triangular, 0.0, 1.0), 0.5), UnsupportedFamilyError);
  CHECK_THROWS_AS(invert_regulariser(heaviside_with(NoiseFamily::logistic, 0.0, 1.0), 1.0), DomainError);
  CHECK_THROWS_AS(invert_regulariser(heaviside_with(NoiseFamily::logistic, 0.0, 1.0), 0.0), DomainError);
}

TEST_CASE("property: inversion round-trips") {
  Rng rng(1);
  for (auto f : {NoiseFamily::normal, NoiseFamily::logistic})
    for (int i = 0; i < 500; ++i) {
      const auto a = heaviside_with(f, uniform01(rng) - 0.5, 0.05 + uniform01(rng));
      const double y = 0.01 + 0.98 * uniform01(rng);
      const double x = invert_regulariser(a, y);
      REQUIRE(expectation_forward(a, x) == doctest::Approx(y).epsilon(1e-9));
      const double x2 = a.params.mean + (2.0 * uniform01(rng) - 1.0) * 3.0 * a.params.stddev;
      const double y2 = expectation_forward(a, x2);
      if (y2 <= 1e-12 || y2 >= 1.0 - 1e-12) continue;
      REQUIRE(invert_regulariser(a, y2) == doctest::Approx(x2).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("trend_vanishes") {
  CHECK(trend_vanishes(std::vector<double>{1.0, 0.5, 0.1, 0.005}, 1e-2));
  CHECK_FALSE(trend_vanishes(std::vector<double>{1.0, 0.5, 0.1, 0.05}, 1e-2));
  CHECK_FALSE(trend_vanishes(std::vector<double>{0.001, 0.002, 0.001, 0.005}, 1e-2));
  CHECK_FALSE(trend_vanishes(std::vector<double>{}, 1e-2));
}

TEST_CASE("check_hypotheses") {
  const auto grid = dyadic_grid();
  SUBCASE("zero-mean noise fails H_iii") {
    auto laws = drifting_logistic(3);
    for (auto& l : laws) l.c_alpha = 0.0;
    for (double p : {0.25, 0.5, 1.0, 2.0}) {
      const auto report = check_hypotheses(laws, ConvergenceRate{{p, p, p}}, grid);
      CHECK_FALSE(report.passed(Condition::h_iii));
      const auto* t = report.find(0, Condition::h_iii);
      REQUIRE(t != nullptr);
      CHECK(t->values.front() == doctest::Approx(0.5 / std::pow(0.5, p)));
    }
    CHECK_FALSE(search_rates(laws, grid).has_value());
  }
  SUBCASE("a drifting-mean logistic triple passes") {
    const auto laws = drifting_logistic(3);
    const auto rates = search_rates(laws, grid);
    REQUIRE(rates.has_value());
    const auto report = check_hypotheses(laws, *rates, grid);
    CHECK(report.passed());
    for (auto c : {Condition::h_i, Condition::h_ii, Condition::h_iii, Condition::h_iv})
      CHECK(report.passed(c));
    CHECK(report.find(0, Condition::h_iv) == nullptr);
    CHECK(report.find(1, Condition::h_iv) != nullptr);
  }
  SUBCASE("a layer held at λ = 1 breaks H_iv for the next layer") {
    auto laws = drifting_logistic(2);
    laws[0].lambda_law = {1e-9, 1.0};
    const auto report = check_hypotheses(laws, ConvergenceRate{{1.0, 1.0}}, grid);
    const auto* t = report.find(1, Condition::h_iv);
    REQUIRE(t != nullptr);
    CHECK_FALSE(t->pass);
    CHECK(t->values.back() > 1.0);
    CHECK_FALSE(report.passed());
  }
  SUBCASE("compact families are ineligible") {
    auto laws = drifting_logistic(2);
    laws[1].family = NoiseFamily::uniform;
    const auto report = check_hypotheses(laws, ConvergenceRate{{1.0, 1.0}}, grid);
    const auto* t = report.find(1, Condition::h_i);
    REQUIRE(t != nullptr);
    CHECK_FALSE(t->eligible);
    CHECK_FALSE(t->note.empty());
    CHECK_FALSE(report.passed());
  }
  SUBCASE("errors") {
    const auto laws = drifting_logistic(2);
    CHECK_THROWS_AS(check_hypotheses(laws, ConvergenceRate{{1.0, 1.0}}, std::vector<double>{}), ConfigError);
    CHECK_THROWS_AS(check_hypotheses(laws, ConvergenceRate{{1.0, 1.0}}, std::vector<double>{0.5, 0.5}), ConfigError);
    CHECK_THROWS_AS(check_hypotheses(laws, ConvergenceRate{{1.0, 1.0}}, std::vector<double>{0.25, 0.5}), ConfigError);
    CHECK_THROWS_AS(check_hypotheses(laws, ConvergenceRate{{1.0}}, grid), ShapeError);
  }
}

TEST_CASE("measure_ratio") {
  const auto grid = dyadic_grid();
  SUBCASE("Dirac noise at zero gives no error") {
    Network net = check_network(CheckConfig{}, 3);
    auto laws = drifting_logistic(net.quantised_layers().size());
    for (auto& l : laws) l.c_alpha = l.c_beta = 0.0;
    const auto m = measure_ratio(net, Vector::Random(2), laws, ConvergenceRate{std::vector<double>(laws.size(), 1.0)}, grid);
    for (const auto& row : m.ratios)
      for (double r : row) CHECK(r == 0.0);
  }
  SUBCASE("single layer base case") {
    const auto laws = drifting_logistic(1);
    const ConvergenceRate rate{{1.0}};
    for (double s : {-0.5, 0.5}) {
      const auto m = measure_ratio(single_heaviside(s), Vector::Zero(1), laws, rate, grid);
      std::vector<double> ratios;
      for (const auto& row : m.ratios) ratios.push_back(row[0]);
      CHECK(trend_vanishes(ratios, 1e-2));
      // x_1 = 0 is approached from above, x_1 = 1 from below.
      const double smooth = expectation_forward(laws[0].activation_at(grid[0]), s);
      CHECK((s < 0 ? smooth > 0.0 : smooth < 1.0));
    }
  }
  SUBCASE("shape errors") {
    Network net = check_network(CheckConfig{}, 3);
    const auto laws = drifting_logistic(2);
    CHECK_THROWS_AS(measure_ratio(net, Vector::Zero(2), laws, ConvergenceRate{{1.0, 1.0}}, grid), ShapeError);
  }
}
