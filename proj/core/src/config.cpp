#include "ana/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ana/errors.hpp"

namespace ana {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

// Reads typed values from the tree, remembering which keys were consumed and
// collecting every problem instead of stopping at the first.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::vector<std::string>& errors() { return errors_; }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = tree_.get_child_optional(section);
    return s && s->get_child_optional(pt::ptree::path_type(key, '\0'));
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    known_[section].insert(key);
    const auto s = tree_.get_child_optional(section);
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  template <typename T, typename Parse>
  bool read(const std::string& section, const std::string& key, T& out, Parse parse) {
    const auto text = raw(section, key);
    if (!text) return false;
    try {
      out = parse(*text);
      return true;
    } catch (const std::exception& e) {
      errors_.push_back(section + "." + key + ": " + e.what());
      return false;
    }
  }

  bool real(const std::string& section, const std::string& key, double& out) {
    return read(section, key, out, parse_real);
  }
  template <typename Int>
  bool integer(const std::string& section, const std::string& key, Int& out) {
    return read(section, key, out, parse_integer<Int>);
  }
  bool boolean(const std::string& section, const std::string& key, bool& out) {
    return read(section, key, out, parse_bool);
  }

  void report_unknown() {
    for (const auto& [section, body] : tree_) {
      const auto known = known_.find(section);
      if (known == known_.end()) {
        errors_.push_back("unknown section [" + section + "]");
        continue;
      }
      if (!body.data().empty()) errors_.push_back("value outside of a section: " + section);
      for (const auto& entry : body)
        if (!known->second.contains(entry.first)) errors_.push_back(section + "." + entry.first + ": unknown key");
    }
  }

  static double parse_real(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("expected a number, got '" + s + "'");
    if (!std::isfinite(v)) throw ConfigError("expected a finite number, got '" + s + "'");
    return v;
  }

  template <typename Int>
  static Int parse_integer(const std::string& s) {
    Int v{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + s + "'");
    return v;
  }

  static bool parse_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ConfigError("expected true or false, got '" + s + "'");
  }

 private:
  const pt::ptree& tree_;
  std::map<std::string, std::set<std::string>> known_;
  std::vector<std::string> errors_;
};

QuantiserKind parse_quantiser_kind(std::string_view s) {
  if (s == "heaviside") return QuantiserKind::heaviside;
  if (s == "binary") return QuantiserKind::binary;
  if (s == "ternary") return QuantiserKind::ternary;
  if (s == "linear") return QuantiserKind::linear;
  throw ConfigError("unknown quantiser '" + std::string(s) + "'");
}

RegcurvePreset parse_preset(std::string_view s) {
  if (s == "none") return RegcurvePreset::none;
  if (s == "clipped_relu") return RegcurvePreset::clipped_relu;
  if (s == "hard_sigmoid") return RegcurvePreset::hard_sigmoid;
  throw ConfigError("unknown preset '" + std::string(s) + "'");
}

LambdaLawKind parse_law(std::string_view s) {
  if (s == "synchronized") return LambdaLawKind::synchronized;
  if (s == "input_first") return LambdaLawKind::input_first;
  if (s == "same_end") return LambdaLawKind::same_end;
  throw ConfigError("unknown lambda law '" + std::string(s) + "'");
}

OptimiserKind parse_optimiser(std::string_view s) {
  if (s == "sgd") return OptimiserKind::sgd;
  if (s == "adam") return OptimiserKind::adam;
  throw ConfigError("unknown optimiser '" + std::string(s) + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& s, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) out.push_back(parse(item));
  if (out.empty()) throw ConfigError("expected a non-empty list");
  return out;
}

void read_quantiser(Reader& r, const std::string& section, const std::string& prefix, QuantiserConfig& q) {
  r.read(section, prefix, q.kind, parse_quantiser_kind);
  r.real(section, prefix + "_quantum", q.quantum);
  r.integer(section, prefix + "_offset", q.offset);
  r.integer(section, prefix + "_bits", q.bits);
}

void check_quantiser(const QuantiserConfig& q, const std::string& key, std::vector<std::string>& errors) {
  if (!(q.quantum > 0.0)) errors.push_back(key + "_quantum must be positive");
  if (q.kind == QuantiserKind::linear && (q.bits < 1 || q.bits > 24))
    errors.push_back(key + "_bits must be in [1, 24]");
}

}  // namespace

Quantiser QuantiserConfig::build() const {
  switch (kind) {
    case QuantiserKind::heaviside: return Quantiser::heaviside(static_cast<double>(offset) * quantum);
    case QuantiserKind::binary: return Quantiser::binary_sign(quantum);
    case QuantiserKind::ternary: return Quantiser::ternary(quantum);
    case QuantiserKind::linear: {
      const LinearQuantiserSpec spec{offset, quantum, bits};
      spec.validate();
      return spec.induced();
    }
  }
  throw ConfigError("unknown quantiser kind");
}

NoiseFamily NoiseConfig::family_for(std::size_t layer) const {
  return families.size() == 1 ? families.front() : families.at(layer);
}

RegularisedActivation RegcurveConfig::activation() const {
  RegularisedActivation a;
  a.strategy = ForwardStrategy::expectation;
  switch (preset) {
    case RegcurvePreset::clipped_relu:
      a.quantiser = Quantiser::heaviside();
      a.family = NoiseFamily::uniform;
      a.params = {0.5, 1.0 / (2.0 * std::sqrt(3.0))};
      return a;
    case RegcurvePreset::hard_sigmoid:
      a.quantiser = Quantiser::heaviside();
      a.family = NoiseFamily::uniform;
      a.params = {0.0, 1.0 / (2.0 * std::sqrt(3.0))};
      return a;
    case RegcurvePreset::none: break;
  }
  a.quantiser = quantiser.build();
  a.family = family;
  a.params = {alpha, beta};
  return a;
}

std::vector<double> RegcurveConfig::grid() const {
  const auto n = static_cast<std::size_t>(std::floor((x_max - x_min) / step + 0.5)) + 1;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x_min + static_cast<double>(i) * step;
  return xs;
}

std::vector<RegulariserLaw> CheckConfig::laws() const {
  std::vector<RegulariserLaw> out(layers);
  const double n = static_cast<double>(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    auto& r = out[l];
    r.family = family;
    r.c_alpha = c_alpha;
    r.alpha_power = alpha_power;
    r.c_beta = c_beta;
    r.beta_power = beta_power;
    const double i = static_cast<double>(l);
    switch (law) {
      case LambdaLawKind::synchronized: break;
      case LambdaLawKind::input_first: r.lambda_law.exponent = (n - i) / n; break;
      case LambdaLawKind::same_end:
        // The input layer starts last: start_ℓ = λ_min^{(n−ℓ)/(n−1)}.
        r.lambda_law.start = layers == 1 ? 1.0 : std::pow(lambda_min, (n - 1.0 - i) / (n - 1.0));
        break;
    }
  }
  return out;
}

void ExperimentConfig::override_seed(std::uint64_t value) {
  seed = value;
  if (!dataset_seed_explicit_) dataset.seed = value;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;

  if (network.hidden.empty()) errors.emplace_back("network.hidden must list at least one layer");
  for (auto h : network.hidden)
    if (h == 0) errors.emplace_back("network.hidden sizes must be >= 1");
  check_quantiser(network.feature, "network.feature", errors);
  if (network.weight) check_quantiser(*network.weight, "network.weight", errors);

  const auto layers = network.hidden.size();
  if (noise.families.size() != 1 && noise.families.size() != layers)
    errors.push_back("noise.family lists " + std::to_string(noise.families.size()) +
                     " families for " + std::to_string(layers) + " quantised layers");
  if (!(noise.c_beta > 0.0)) errors.emplace_back("noise.c_beta must be positive");
  if (noise.c_alpha < 0.0) errors.emplace_back("noise.c_alpha must be non-negative");
  if (noise.static_mean && noise.c_alpha != 0.0)
    errors.emplace_back("noise.c_alpha must be 0 when static_mean is true");
  if (noise.equivalent_to) {
    if (!has_compact_support(*noise.equivalent_to))
      errors.emplace_back("noise.equivalent_to must be a compact family (uniform or triangular)");
    for (auto f : noise.families)
      if (has_compact_support(f))
        errors.emplace_back("noise.family must be normal or logistic when equivalent_to is set");
  }

  const bool is_static = noise.static_mean && noise.static_variance;
  if (!(schedule.anneal_fraction > 0.0 && schedule.anneal_fraction <= 1.0))
    errors.emplace_back("schedule.anneal_fraction must be in (0, 1]");
  if (schedule.d_alpha < 1) errors.emplace_back("schedule.d_alpha must be >= 1");
  if (schedule.d_beta < 1) errors.emplace_back("schedule.d_beta must be >= 1");
  if (!is_static && layers < 2) errors.emplace_back("network.hidden needs >= 2 layers for an annealing schedule");

  try {
    training.validate();
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations()) errors.push_back("training: " + v);
  }
  if (noise.static_variance && training.strategy == ForwardStrategy::expectation)
    errors.emplace_back(
        "training.strategy: expectation cannot be combined with noise.static_variance = true, since the noise "
        "removed at deployment would change the learnt function");

  try {
    dataset.validate();
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations()) errors.push_back(v);
  }

  if (!(regcurve.step > 0.0)) errors.emplace_back("regcurve.step must be positive");
  if (!(regcurve.x_max >= regcurve.x_min)) errors.emplace_back("regcurve.x_max must be >= x_min");
  else if (regcurve.step > 0.0 && (regcurve.x_max - regcurve.x_min) / regcurve.step > 1e7)
    errors.emplace_back("regcurve grid exceeds 10^7 points");
  if (regcurve.beta < 0.0) errors.emplace_back("regcurve.beta must be >= 0");
  if (regcurve.preset == RegcurvePreset::none) check_quantiser(regcurve.quantiser, "regcurve.quantiser", errors);

  if (check.layers < 1) errors.emplace_back("check.layers must be >= 1");
  if (!(check.c_beta > 0.0)) errors.emplace_back("check.c_beta must be positive");
  if (!(check.alpha_power > 0.0)) errors.emplace_back("check.alpha_power must be positive");
  if (!(check.beta_power > 0.0)) errors.emplace_back("check.beta_power must be positive");
  if (!(check.lambda_min > 0.0 && check.lambda_min < 1.0)) errors.emplace_back("check.lambda_min must be in (0, 1)");
  if (!(check.epsilon > 0.0)) errors.emplace_back("check.epsilon must be positive");
  if (!(check.tolerance > 0.0)) errors.emplace_back("check.tolerance must be positive");
  if (check.grid_from < 0 || check.grid_to <= check.grid_from || check.grid_to > 60)
    errors.emplace_back("check.grid_from and grid_to need 0 <= from < to <= 60");
  if (!check.rates.empty() && check.rates.size() != check.layers)
    errors.emplace_back("check.rates must list one exponent per layer");
  for (double r : check.rates)
    if (!(r > 0.0)) errors.emplace_back("check.rates must be positive");
  if (check.width < 1 || check.inputs < 1) errors.emplace_back("check.width and check.inputs must be >= 1");

  if (sweep.seeds < 1) errors.emplace_back("sweep.seeds must be >= 1");

  if (!errors.empty()) throw ConfigError(std::move(errors));
}

ExperimentConfig parse_config_text(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("malformed config: " + std::string(e.what()));
  }

  ExperimentConfig c;
  Reader r(tree);
  auto families = [](const std::string& s) { return parse_list<NoiseFamily>(s, parse_noise_family); };

  r.integer("experiment", "seed", c.seed);
  c.dataset.seed = c.seed;

  r.read("network", "hidden", c.network.hidden,
         [](const std::string& s) { return parse_list<std::size_t>(s, Reader::parse_integer<std::size_t>); });
  read_quantiser(r, "network", "feature", c.network.feature);
  if (const auto w = r.raw("network", "weight"); w && *w == "none") {
    c.network.weight.reset();
  } else {
    read_quantiser(r, "network", "weight", *c.network.weight);
  }

  r.read("noise", "family", c.noise.families, families);
  r.read("noise", "equivalent_to", c.noise.equivalent_to,
         [](const std::string& s) { return std::optional<NoiseFamily>(parse_noise_family(s)); });
  r.real("noise", "c_alpha", c.noise.c_alpha);
  r.real("noise", "c_beta", c.noise.c_beta);
  r.boolean("noise", "static_mean", c.noise.static_mean);
  r.boolean("noise", "static_variance", c.noise.static_variance);

  const bool interval_set =
      r.read("schedule", "decay_interval", c.schedule.strategy.decay_interval, parse_decay_interval);
  const bool law_set =
      r.read("schedule", "decay_power_law", c.schedule.strategy.decay_power_law, parse_decay_power_law);
  r.real("schedule", "anneal_fraction", c.schedule.anneal_fraction);
  r.integer("schedule", "d_alpha", c.schedule.d_alpha);
  r.integer("schedule", "d_beta", c.schedule.d_beta);
  if (c.noise.static_mean && c.noise.static_variance) {
    if (interval_set)
      c.warnings.emplace_back("schedule.decay_interval is not relevant when both mean and variance are static");
    if (law_set)
      c.warnings.emplace_back("schedule.decay_power_law is not relevant when both mean and variance are static");
  }

  auto& t = c.training;
  t.epochs = 200;
  t.batch_size = 32;
  t.learning_rate = 3e-3;
  r.integer("training", "epochs", t.epochs);
  r.integer("training", "batch_size", t.batch_size);
  r.real("training", "learning_rate", t.learning_rate);
  r.read("training", "optimiser", t.optimiser.kind, parse_optimiser);
  r.real("training", "adam_beta1", t.optimiser.beta1);
  r.real("training", "adam_beta2", t.optimiser.beta2);
  r.real("training", "adam_epsilon", t.optimiser.epsilon);
  LearningRateDrop drop;
  const bool drop_epoch = r.integer("training", "lr_drop_epoch", drop.epoch);
  const bool drop_factor = r.real("training", "lr_drop_factor", drop.factor);
  if (drop_epoch) t.lr_drop = drop;
  else if (drop_factor) r.errors().emplace_back("training.lr_drop_factor: requires lr_drop_epoch");
  r.read("training", "strategy", t.strategy, parse_forward_strategy);
  r.boolean("training", "stop_backward_at_annealed", t.stop_backward_at_annealed);

  auto& d = c.dataset;
  r.read("dataset", "generator", d.generator, parse_dataset_generator);
  r.integer("dataset", "size", d.size);
  r.real("dataset", "noise", d.noise);
  r.real("dataset", "validation_fraction", d.validation_fraction);
  c.dataset_seed_explicit_ = r.integer("dataset", "seed", d.seed);
  r.integer("dataset", "classes", d.classes);
  r.integer("dataset", "dims", d.dims);
  r.integer("dataset", "cells", d.cells);
  r.read("dataset", "path", d.path, [](const std::string& s) { return std::filesystem::path(s); });

  r.read("output", "directory", c.output, [](const std::string& s) { return std::filesystem::path(s); });

  auto& g = c.regcurve;
  r.read("regcurve", "preset", g.preset, parse_preset);
  read_quantiser(r, "regcurve", "quantiser", g.quantiser);
  r.read("regcurve", "family", g.family, parse_noise_family);
  r.real("regcurve", "alpha", g.alpha);
  r.real("regcurve", "beta", g.beta);
  r.real("regcurve", "x_min", g.x_min);
  r.real("regcurve", "x_max", g.x_max);
  r.real("regcurve", "step", g.step);
  if (g.preset != RegcurvePreset::none) {
    for (const char* key : {"quantiser", "family", "alpha", "beta"})
      if (r.has("regcurve", key))
        c.warnings.push_back(std::string("regcurve.") + key + " is ignored when a preset is selected");
  }

  auto& k = c.check;
  r.read("check", "family", k.family, parse_noise_family);
  r.integer("check", "layers", k.layers);
  r.real("check", "c_alpha", k.c_alpha);
  r.real("check", "alpha_power", k.alpha_power);
  r.real("check", "c_beta", k.c_beta);
  r.real("check", "beta_power", k.beta_power);
  r.read("check", "law", k.law, parse_law);
  r.real("check", "lambda_min", k.lambda_min);
  r.real("check", "epsilon", k.epsilon);
  r.real("check", "tolerance", k.tolerance);
  r.integer("check", "grid_from", k.grid_from);
  r.integer("check", "grid_to", k.grid_to);
  r.read("check", "rates", k.rates, [](const std::string& s) {
    if (s == "auto") return std::vector<double>{};
    return parse_list<double>(s, Reader::parse_real);
  });
  r.integer("check", "width", k.width);
  r.integer("check", "inputs", k.inputs);

  auto& w = c.sweep;
  r.read("sweep", "decay_intervals", w.decay_intervals,
         [](const std::string& s) { return parse_list<DecayInterval>(s, parse_decay_interval); });
  r.read("sweep", "decay_power_laws", w.decay_power_laws,
         [](const std::string& s) { return parse_list<DecayPowerLaw>(s, parse_decay_power_law); });
  r.read("sweep", "strategies", w.strategies,
         [](const std::string& s) { return parse_list<ForwardStrategy>(s, parse_forward_strategy); });
  r.integer("sweep", "seeds", w.seeds);
  r.boolean("sweep", "include_static_baseline", w.include_static_baseline);

  r.report_unknown();
  auto errors = std::move(r.errors());
  try {
    c.validate();
  } catch (const ConfigError& e) {
    errors.insert(errors.end(), e.violations().begin(), e.violations().end());
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

LayerScheduleSpec schedule_template(const ExperimentConfig& config) {
  LayerScheduleSpec spec;
  spec.c_alpha = config.noise.c_alpha;
  spec.c_beta = config.noise.c_beta;
  spec.d_alpha = config.schedule.d_alpha;
  spec.d_beta = config.schedule.d_beta;
  spec.static_mean = config.noise.static_mean;
  spec.static_variance = config.noise.static_variance;
  return spec;
}

Network build_network(const ExperimentConfig& config, std::size_t inputs, std::size_t outputs) {
  MlpSpec spec;
  spec.inputs = inputs;
  spec.hidden = config.network.hidden;
  spec.outputs = outputs;
  spec.feature = {config.network.feature.build(), config.noise.family_for(0)};
  if (config.network.weight) spec.weights = ActivationSpec{config.network.weight->build(), config.noise.family_for(0)};
  Network net = make_mlp(spec);
  const auto quantised = net.quantised_layers();
  for (std::size_t i = 0; i < quantised.size(); ++i) {
    auto& layer = net.layer(quantised[i]);
    const auto family = config.noise.family_for(i);
    layer.activation->family = family;
    if (layer.weight_quantiser) layer.weight_quantiser->family = family;
  }
  return net;
}

Schedule build_training_schedule(const ExperimentConfig& config, const ScheduleStrategy& strategy,
                                 std::int64_t total_iterations) {
  const auto layers = config.network.hidden.size();
  const LayerScheduleSpec base = schedule_template(config);
  Schedule schedule;
  if (base.is_static()) {
    schedule.assign(layers, base);
    for (auto& s : schedule) s.range = {0, std::max<std::int64_t>(1, total_iterations)};
  } else {
    const auto t_anneal = std::max<std::int64_t>(
        static_cast<std::int64_t>(layers),
        static_cast<std::int64_t>(std::floor(config.schedule.anneal_fraction * static_cast<double>(total_iterations))));
    schedule = build_schedule(strategy, layers, t_anneal, base);
  }
  if (config.noise.equivalent_to) {
    for (std::size_t i = 0; i < layers; ++i) {
      const auto p = equivalent_params(config.noise.family_for(i), *config.noise.equivalent_to,
                                       {schedule[i].c_alpha, schedule[i].c_beta});
      schedule[i].c_beta = p.stddev;
    }
  }
  return schedule;
}

}  // namespace ana
