#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "ana/config.hpp"

namespace ana {

/// Writes epoch,train_loss,train_acc,val_acc_regularised,val_acc_quantised
/// followed by alpha_ℓ,beta_ℓ for every quantised layer.
void write_train_log(const std::filesystem::path& path, const TrainLog& log, std::size_t quantised_layers);

/// Writes layer,start,end,c_alpha,c_beta,d_alpha,d_beta,static_mean,static_variance.
void write_schedule(const std::filesystem::path& path, const Schedule& schedule);

struct TrainOutcome {
  TrainResult result;
  bool aborted = false;
  std::string message;
};

/// Trains the configured network once with `strategy` and `seed`, writing
/// train_log.csv, schedule.csv and params.bin into `out`. A non-finite loss
/// does not throw: the partial log is written and `aborted` is set.
TrainOutcome train_experiment(const ExperimentConfig& config, const DatasetSplit& data,
                              const ScheduleStrategy& strategy, std::uint64_t seed, const std::filesystem::path& out);

struct SweepRun {
  std::string cell;
  std::string decay_interval;
  std::string decay_power_law;
  ForwardStrategy strategy = ForwardStrategy::mode;
  std::uint64_t seed = 0;
  bool aborted = false;
  double final_train_loss = 0.0;
  double final_val_acc_regularised = 0.0;
  double final_val_acc_quantised = 0.0;
};

struct SweepCell {
  std::string cell;
  std::string decay_interval;
  std::string decay_power_law;
  ForwardStrategy strategy = ForwardStrategy::mode;
  std::size_t runs = 0;
  std::size_t aborted = 0;
  double mean_val_acc_quantised = 0.0;
  double std_val_acc_quantised = 0.0;
  double mean_val_acc_regularised = 0.0;
};

struct SweepResult {
  std::vector<SweepRun> runs;
  std::vector<SweepCell> cells;

  /// Throws Error when no cell has that name.
  const SweepCell& cell(const std::string& name) const;
};

/// Grid over decay intervals × power laws × forward strategies, plus a static
/// noise baseline per strategy when enabled. Seeds are config.seed + i. Each
/// run writes into out/<cell>/seed_<seed>/; runs.csv and summary.csv go to out.
SweepResult run_sweep(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Subcommands. Each creates `out`, writes its CSVs there and returns the
/// process exit status. Errors other than an aborted training run propagate.
int command_train(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);
int command_regcurve(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);
int command_check(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);
int command_sweep(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Random Heaviside network used by `check` for the measured error ratios.
Network check_network(const CheckConfig& check, std::uint64_t seed);

}  // namespace ana
