#include <doctest.h>

#include <algorithm>
#include <string>

#include "ana/config.hpp"
#include "ana/errors.hpp"

using namespace ana;

namespace {

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& list, const std::string& needle) {
  return std::any_of(list.begin(), list.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("an empty config takes the documented defaults") {
  const auto c = parse_config_text("");
  CHECK(c.seed == 0);
  CHECK(c.network.hidden == std::vector<std::size_t>{16, 16, 16});
  CHECK(c.network.feature.kind == QuantiserKind::ternary);
  REQUIRE(c.network.weight.has_value());
  CHECK(c.noise.families == std::vector<NoiseFamily>{NoiseFamily::uniform});
  CHECK(c.noise.c_beta == 1.0);
  CHECK(c.noise.static_mean);
  CHECK_FALSE(c.noise.static_variance);
  CHECK(c.schedule.strategy.decay_interval == DecayInterval::partition);
  CHECK(c.schedule.anneal_fraction == 0.7);
  CHECK(c.training.epochs == 200);
  CHECK(c.training.batch_size == 32);
  CHECK(c.training.learning_rate == 3e-3);
  CHECK(c.training.optimiser.kind == OptimiserKind::adam);
  CHECK(c.training.strategy == ForwardStrategy::mode);
  CHECK(c.dataset.generator == DatasetGenerator::two_moons);
  CHECK(c.dataset.size == 1000);
  CHECK(c.output == "out");
  CHECK(c.sweep.decay_intervals.size() == 4);
  CHECK(c.warnings.empty());
}

TEST_CASE("values are read from every section") {
  const auto c = parse_config_text(R"(
; comment
[experiment]
seed = 42
[network]
hidden = 8, 4
feature = binary
feature_quantum = 0.5
weight = none
[noise]
family = normal, logistic
c_beta = 0.25
[schedule]
decay_interval = same_end
decay_power_law = progressive
anneal_fraction = 0.5
[training]
epochs = 3
strategy = random
optimiser = sgd
lr_drop_epoch = 2
lr_drop_factor = 0.5
[dataset]
generator = xor_grid
size = 64
[output]
directory = results/x
[sweep]
strategies = mode, random
seeds = 2
)");
  CHECK(c.seed == 42);
  CHECK(c.dataset.seed == 42);
  CHECK(c.network.hidden == std::vector<std::size_t>{8, 4});
  const auto levels = c.network.feature.build().levels();
  CHECK(std::vector<double>(levels.begin(), levels.end()) == std::vector<double>{-0.5, 0.5});
  CHECK_FALSE(c.network.weight.has_value());
  CHECK(c.noise.family_for(0) == NoiseFamily::normal);
  CHECK(c.noise.family_for(1) == NoiseFamily::logistic);
  CHECK(c.schedule.strategy == ScheduleStrategy{DecayInterval::same_end, DecayPowerLaw::progressive});
  CHECK(c.training.epochs == 3);
  CHECK(c.training.strategy == ForwardStrategy::random);
  CHECK(c.training.optimiser.kind == OptimiserKind::sgd);
  REQUIRE(c.training.lr_drop.has_value());
  CHECK(c.training.lr_drop->epoch == 2);
  CHECK(c.dataset.generator == DatasetGenerator::xor_grid);
  CHECK(c.output == "results/x");
  CHECK(c.sweep.strategies.size() == 2);
  CHECK(c.sweep.seeds == 2);
}

TEST_CASE("every violation is reported together") {
  const auto v = violations_of(R"(
[network]
hidden = 4, 4
colour = red
[noise]
c_beta = -1
[training]
epochs = many
batch_size = 0
[bogus]
x = 1
)");
  CHECK(mentions(v, "network.colour"));
  CHECK(mentions(v, "[bogus]"));
  CHECK(mentions(v, "noise.c_beta"));
  CHECK(mentions(v, "training.epochs"));
  CHECK(mentions(v, "batch_size"));
  CHECK(v.size() >= 5);
}

TEST_CASE("static variance with the expectation strategy is rejected") {
  const auto v = violations_of("[noise]\nstatic_variance = true\n[training]\nstrategy = expectation\n");
  CHECK(mentions(v, "expectation"));
  CHECK(violations_of("[noise]\nstatic_variance = true\n[training]\nstrategy = mode\n").empty());
}

TEST_CASE("schedule keys under fully static noise are accepted with a warning") {
  const auto c = parse_config_text("[noise]\nstatic_variance = true\n[schedule]\ndecay_interval = same_end\n");
  REQUIRE(c.warnings.size() == 1);
  CHECK(c.warnings[0].find("not relevant") != std::string::npos);
  CHECK(parse_config_text("[schedule]\ndecay_interval = same_end\n").warnings.empty());
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_config_text("[network\nhidden = 3\n"), ConfigError);
  CHECK(mentions(violations_of("[noise]\nfamily = cauchy\n"), "noise.family"));
  CHECK(mentions(violations_of("[noise]\nequivalent_to = uniform\nfamily = triangular\n"), "equivalent_to"));
  CHECK(mentions(violations_of("[noise]\nstatic_mean = false\nc_alpha = -1\n"), "c_alpha"));
  CHECK(mentions(violations_of("[check]\nlayers = 2\nrates = 1\n"), "check.rates"));
  CHECK_THROWS_AS(parse_config("/nonexistent/path.ini"), ConfigError);
}

TEST_CASE("seed override") {
  auto c = parse_config_text("[experiment]\nseed = 3\n");
  c.override_seed(9);
  CHECK(c.seed == 9);
  CHECK(c.dataset.seed == 9);
  auto pinned = parse_config_text("[experiment]\nseed = 3\n[dataset]\nseed = 5\n");
  pinned.override_seed(9);
  CHECK(pinned.seed == 9);
  CHECK(pinned.dataset.seed == 5);
}

TEST_CASE("derived objects") {
  const auto c = parse_config_text("[network]\nhidden = 4, 4, 4\n[noise]\nfamily = normal, logistic, uniform\n");
  const Network net = build_network(c, 2, 2);
  CHECK(net.depth() == 4);
  CHECK(net.layer(1).activation->family == NoiseFamily::logistic);
  CHECK(net.layer(2).weight_quantiser->family == NoiseFamily::uniform);
  CHECK_FALSE(net.layer(3).weight_quantiser.has_value());

  const auto s = build_training_schedule(c, {DecayInterval::partition, DecayPowerLaw::homogeneous}, 1000);
  REQUIRE(s.size() == 3);
  CHECK(s.back().range.end == 700);
  CHECK(s.front().range.start == 0);

  const auto st = parse_config_text("[noise]\nstatic_variance = true\n");
  const auto ss = build_training_schedule(st, {}, 100);
  CHECK(ss.front().is_static());

  const auto eq = parse_config_text("[noise]\nfamily = logistic\nequivalent_to = uniform\nc_beta = 0.5\n");
  const auto es = build_training_schedule(eq, {}, 100);
  CHECK(es.front().c_beta != 0.5);
  CHECK(es.front().c_beta > 0.0);
}

TEST_CASE("regcurve presets") {
  const auto c = parse_config_text("[regcurve]\npreset = clipped_relu\n");
  const auto a = c.regcurve.activation();
  CHECK(a.params.mean == 0.5);
  CHECK(a.family == NoiseFamily::uniform);
  const auto g = c.regcurve.grid();
  CHECK(g.size() == 401);
  CHECK(g.front() == -2.0);
  CHECK(g.back() == doctest::Approx(2.0));
  CHECK(parse_config_text("[regcurve]\npreset = hard_sigmoid\nbeta = 3\n").warnings.size() == 1);
}
