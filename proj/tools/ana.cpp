#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ana/commands.hpp"
#include "ana/config.hpp"
#include "ana/errors.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "Experiment config (sectioned key = value)")->required()->check(
      CLI::ExistingFile);
  sub->add_option("--out", o.out, "Output directory (default: [output] directory)");
  sub->add_option_function<std::uint64_t>(
      "--seed",
      [&o](const std::uint64_t& s) {
        o.seed = s;
        o.seed_set = true;
      },
      "Master seed, overriding [experiment] seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additive noise annealing for quantised networks"};
  app.require_subcommand(1);
  Options o;
  auto* train = app.add_subcommand("train", "Train one network and write its log and parameters");
  auto* regcurve = app.add_subcommand("regcurve", "Tabulate a regularised quantiser and its derivative");
  auto* check = app.add_subcommand("check", "Evaluate the convergence hypotheses along a lambda grid");
  auto* sweep = app.add_subcommand("sweep", "Train every schedule cell over several seeds");
  for (auto* sub : {train, regcurve, check, sweep}) add_common(sub, o);
  CLI11_PARSE(app, argc, argv);

  try {
    auto config = ana::parse_config(o.config);
    if (o.seed_set) config.override_seed(o.seed);
    for (const auto& w : config.warnings) std::cerr << "warning: " << w << '\n';
    const std::filesystem::path out = o.out.empty() ? config.output : std::filesystem::path(o.out);

    if (train->parsed()) return ana::command_train(config, out, std::cout);
    if (regcurve->parsed()) return ana::command_regcurve(config, out, std::cout);
    if (check->parsed()) return ana::command_check(config, out, std::cout);
    return ana::command_sweep(config, out, std::cout);
  } catch (const ana::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
