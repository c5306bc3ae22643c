#include "ana/commands.hpp"

#include <cmath>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ana/csv.hpp"
#include "ana/errors.hpp"

namespace ana {

namespace {

constexpr std::uint64_t kCheckWeightStream = 0;
constexpr std::uint64_t kCheckInputStream = 1;

std::vector<std::string> train_log_header(std::size_t layers) {
  std::vector<std::string> h{"epoch", "train_loss", "train_acc", "val_acc_regularised", "val_acc_quantised"};
  for (std::size_t l = 1; l <= layers; ++l) {
    h.push_back(fmt::format("alpha_{}", l));
    h.push_back(fmt::format("beta_{}", l));
  }
  return h;
}

std::string verdict(const ConditionTrend& t) {
  if (!t.eligible) return "ineligible";
  return t.pass ? "pass" : "fail";
}

}  // namespace

void write_train_log(const std::filesystem::path& path, const TrainLog& log, std::size_t quantised_layers) {
  CsvWriter csv(path, train_log_header(quantised_layers));
  for (const auto& e : log.epochs) {
    csv << e.epoch << e.train_loss << e.train_accuracy << e.val_accuracy_regularised << e.val_accuracy_quantised;
    for (std::size_t l = 0; l < quantised_layers; ++l) {
      const NoiseParams p = l < e.noise.size() ? e.noise[l] : NoiseParams{};
      csv << p.mean << p.stddev;
    }
    csv.end_row();
  }
}

void write_schedule(const std::filesystem::path& path, const Schedule& schedule) {
  CsvWriter csv(path, {"layer", "start", "end", "c_alpha", "c_beta", "d_alpha", "d_beta", "static_mean",
                       "static_variance"});
  for (std::size_t l = 0; l < schedule.size(); ++l) {
    const auto& s = schedule[l];
    csv << l + 1 << s.range.start << s.range.end << s.c_alpha << s.c_beta << s.d_alpha << s.d_beta << s.static_mean
        << s.static_variance;
    csv.end_row();
  }
}

TrainOutcome train_experiment(const ExperimentConfig& config, const DatasetSplit& data,
                              const ScheduleStrategy& strategy, std::uint64_t seed, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  TrainConfig tc = config.training;
  tc.seed = seed;
  Network net = build_network(config, data.train.dims(), data.train.classes);
  const Schedule schedule = build_training_schedule(config, strategy, tc.total_iterations(data.train.size()));
  validate_training_setup(net, schedule, tc);
  const auto layers = schedule.size();
  write_schedule(out / "schedule.csv", schedule);

  TrainOutcome outcome{{net, {}}, false, {}};
  try {
    outcome.result = train(std::move(net), schedule, data.train, data.validation, tc);
  } catch (const TrainingAborted& e) {
    outcome.aborted = true;
    outcome.message = e.what();
    outcome.result.log = e.partial_log();
  }
  write_train_log(out / "train_log.csv", outcome.result.log, layers);
  if (!outcome.aborted) save_params(outcome.result.network, out / "params.bin");
  return outcome;
}

const SweepCell& SweepResult::cell(const std::string& name) const {
  for (const auto& c : cells)
    if (c.cell == name) return c;
  throw Error("sweep has no cell named " + name);
}

SweepResult run_sweep(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log) {
  struct Plan {
    std::string cell;
    std::string interval;
    std::string law;
    ForwardStrategy strategy;
    ExperimentConfig config;
    ScheduleStrategy schedule;
  };
  std::vector<Plan> plans;
  for (auto interval : config.sweep.decay_intervals)
    for (auto law : config.sweep.decay_power_laws)
      for (auto strategy : config.sweep.strategies) {
        ExperimentConfig c = config;
        c.training.strategy = strategy;
        const std::string name = fmt::format("{}-{}-{}", to_string(interval), to_string(law), to_string(strategy));
        plans.push_back({name, std::string(to_string(interval)), std::string(to_string(law)), strategy, c,
                         {interval, law}});
      }
  if (config.sweep.include_static_baseline) {
    for (auto strategy : config.sweep.strategies) {
      if (strategy == ForwardStrategy::expectation) {
        fmt::print(log, "warning: no static baseline for the expectation strategy\n");
        continue;
      }
      ExperimentConfig c = config;
      c.training.strategy = strategy;
      c.noise.static_mean = true;
      c.noise.static_variance = true;
      c.noise.c_alpha = 0.0;
      plans.push_back({fmt::format("static-{}", to_string(strategy)), "static", "static", strategy, c, {}});
    }
  }
  for (const auto& p : plans) p.config.validate();

  const DatasetSplit data = generate_dataset(config.dataset);
  std::filesystem::create_directories(out);
  SweepResult result;
  for (const auto& p : plans) {
    SweepCell cell{p.cell, p.interval, p.law, p.strategy};
    std::vector<double> quantised;
    double regularised = 0.0;
    for (std::size_t i = 0; i < config.sweep.seeds; ++i) {
      const std::uint64_t seed = config.seed + i;
      const auto outcome =
          train_experiment(p.config, data, p.schedule, seed, out / p.cell / fmt::format("seed_{}", seed));
      SweepRun run{p.cell, p.interval, p.law, p.strategy, seed, outcome.aborted};
      if (!outcome.result.log.epochs.empty()) {
        const auto& last = outcome.result.log.epochs.back();
        run.final_train_loss = last.train_loss;
        run.final_val_acc_regularised = last.val_accuracy_regularised;
        run.final_val_acc_quantised = last.val_accuracy_quantised;
      }
      if (outcome.aborted) {
        ++cell.aborted;
        fmt::print(log, "{} seed {}: aborted ({})\n", p.cell, seed, outcome.message);
      }
      quantised.push_back(run.final_val_acc_quantised);
      regularised += run.final_val_acc_regularised;
      result.runs.push_back(run);
    }
    const double n = static_cast<double>(quantised.size());
    double mean = 0.0;
    for (double q : quantised) mean += q;
    mean /= n;
    double var = 0.0;
    for (double q : quantised) var += (q - mean) * (q - mean);
    cell.runs = quantised.size();
    cell.mean_val_acc_quantised = mean;
    cell.std_val_acc_quantised = quantised.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    cell.mean_val_acc_regularised = regularised / n;
    fmt::print(log, "{:<40} val_acc_quantised {:.4f} +- {:.4f}\n", cell.cell, cell.mean_val_acc_quantised,
               cell.std_val_acc_quantised);
    result.cells.push_back(cell);
  }

  {
    CsvWriter csv(out / "runs.csv", {"cell", "decay_interval", "decay_power_law", "strategy", "seed", "status",
                                     "final_train_loss", "final_val_acc_regularised", "final_val_acc_quantised"});
    for (const auto& r : result.runs) {
      csv << r.cell << r.decay_interval << r.decay_power_law << to_string(r.strategy) << r.seed
          << (r.aborted ? "aborted" : "ok") << r.final_train_loss << r.final_val_acc_regularised
          << r.final_val_acc_quantised;
      csv.end_row();
    }
  }
  CsvWriter csv(out / "summary.csv", {"cell", "decay_interval", "decay_power_law", "strategy", "runs", "aborted",
                                      "mean_val_acc_quantised", "std_val_acc_quantised", "mean_val_acc_regularised"});
  for (const auto& c : result.cells) {
    csv << c.cell << c.decay_interval << c.decay_power_law << to_string(c.strategy) << c.runs << c.aborted
        << c.mean_val_acc_quantised << c.std_val_acc_quantised << c.mean_val_acc_regularised;
    csv.end_row();
  }
  return result;
}

int command_train(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log) {
  const DatasetSplit data = generate_dataset(config.dataset);
  const auto outcome = train_experiment(config, data, config.schedule.strategy, config.seed, out);
  if (outcome.aborted) {
    fmt::print(log, "training aborted: {}\n", outcome.message);
    return 3;
  }
  const auto& last = outcome.result.log.epochs.back();
  fmt::print(log, "epoch {} train_loss {:.6f} val_acc_regularised {:.4f} val_acc_quantised {:.4f}\n", last.epoch,
             last.train_loss, last.val_accuracy_regularised, last.val_accuracy_quantised);
  return 0;
}

int command_regcurve(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log) {
  std::filesystem::create_directories(out);
  const auto a = config.regcurve.activation();
  std::vector<std::string> header{"x", "forward", "backward"};
  for (std::size_t k = 0; k < a.quantiser.size(); ++k) header.push_back(fmt::format("p_{}", k));
  CsvWriter csv(out / "regcurve.csv", header);
  const auto xs = config.regcurve.grid();
  for (double x : xs) {
    csv << x << expectation_forward(a, x) << backward(a, x);
    for (double p : level_probabilities(a, x)) csv << p;
    csv.end_row();
  }
  fmt::print(log, "wrote {} points to {}\n", xs.size(), (out / "regcurve.csv").string());
  return 0;
}

Network check_network(const CheckConfig& check, std::uint64_t seed) {
  MlpSpec spec;
  spec.inputs = check.inputs;
  spec.hidden.assign(check.layers, check.width);
  spec.outputs = 1;
  spec.feature = {Quantiser::heaviside(), check.family};
  Network net = make_mlp(spec);
  Rng rng = make_stream(seed, kCheckWeightStream);
  net.init_uniform(rng);
  return net;
}

int command_check(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log) {
  std::filesystem::create_directories(out);
  const auto& k = config.check;
  const auto laws = k.laws();
  const auto grid = dyadic_grid(k.grid_from, k.grid_to);
  const CheckOptions options{k.epsilon, k.tolerance};

  ConvergenceRate rates;
  if (!k.rates.empty()) {
    rates.exponents = k.rates;
  } else if (auto found = search_rates(laws, grid, options)) {
    rates = *found;
  } else {
    rates.exponents.assign(k.layers, 1.0);
    fmt::print(log, "no rate exponents in {{0.25, 0.5, 1, 2}} satisfy every condition; reporting unit rates\n");
  }
  const auto report = check_hypotheses(laws, rates, grid, options);

  {
    CsvWriter csv(out / "hypotheses.csv", {"condition", "layer", "lambda", "value"});
    for (const auto& t : report.trends)
      for (std::size_t i = 0; i < t.values.size(); ++i) {
        csv << to_string(t.condition) << t.layer + 1 << report.grid[i] << t.values[i];
        csv.end_row();
      }
  }
  {
    CsvWriter csv(out / "verdicts.csv", {"condition", "layer", "rate_exponent", "verdict", "final_value", "note"});
    for (const auto& t : report.trends) {
      csv << to_string(t.condition) << t.layer + 1 << rates.exponents.at(t.layer) << verdict(t)
          << (t.values.empty() ? std::nan("") : t.values.back()) << t.note;
      csv.end_row();
    }
  }
  {
    const Network net = check_network(k, config.seed);
    Rng rng = make_stream(config.seed, kCheckInputStream);
    Vector x0(static_cast<Eigen::Index>(k.inputs));
    for (auto& v : x0) v = 2.0 * uniform01(rng) - 1.0;
    const auto m = measure_ratio(net, x0, laws, rates, grid);
    CsvWriter csv(out / "ratios.csv", {"lambda", "layer", "error", "rate", "ratio"});
    for (std::size_t i = 0; i < m.grid.size(); ++i)
      for (std::size_t l = 0; l < m.ratios[i].size(); ++l) {
        csv << m.grid[i] << l + 1 << m.errors[i][l] << rates.at(laws[l], l, m.grid[i]) << m.ratios[i][l];
        csv.end_row();
      }
  }

  for (const auto& t : report.trends)
    fmt::print(log, "{} layer {}: {}\n", to_string(t.condition), t.layer + 1, verdict(t));
  fmt::print(log, "rate exponents:");
  for (double p : rates.exponents) fmt::print(log, " {}", p);
  fmt::print(log, "\noverall: {}\n", report.passed() ? "pass" : "fail");
  return 0;
}

int command_sweep(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log) {
  const auto result = run_sweep(config, out, log);
  for (const auto& c : result.cells)
    if (c.aborted > 0) return 3;
  return 0;
}

}  // namespace ana
