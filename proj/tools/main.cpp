#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bregret/error.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  unsigned workers = 0;
  std::string unit;
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "YAML experiment config")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", flags.overrides, "override a config key, e.g. --set grid.step=0.02");
  cmd->add_option("-o,--out", flags.out, "output file (default: stdout)");
  cmd->add_option("-j,--workers", flags.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("-u,--unit", flags.unit, "nats or bits")->check(CLI::IsMember({"nats", "bits"}));
}

bregret::cli::ExperimentConfig resolve(const Flags& flags) {
  using namespace bregret::cli;
  ExperimentConfig config =
      flags.config_path.empty() ? load_config("", flags.overrides) : load_config_file(flags.config_path, flags.overrides);
  if (!flags.out.empty()) config.output = flags.out;
  if (flags.workers > 0) config.workers = flags.workers;
  if (!flags.unit.empty()) config.unit = parse_unit(flags.unit);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bregret::cli;

  CLI::App app{"Exact batch regret, regret capacity and alpha-regret experiments for i.i.d. sources"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"regret", "per-theta regret of a predictor over a grid (CSV)"},
      {"capacity", "capacity-achieving prior and saddle check (JSON)"},
      {"lowerbound", "mutual-information lower bound against the add-1/2 upper bound (CSV)"},
      {"limits", "alpha-regret sweep between the average and worst-case limits (CSV)"},
      {"oracle-check", "compare fast paths with exhaustive enumeration (CSV)"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const ExperimentConfig config = resolve(flags);
    if (command == "regret") return cmd_regret(config, std::cerr);
    if (command == "capacity") return cmd_capacity(config, std::cerr);
    if (command == "lowerbound") return cmd_lowerbound(config, std::cerr);
    if (command == "limits") return cmd_limits(config, std::cerr);
    const bool configured = !flags.config_path.empty() || !flags.overrides.empty();
    return cmd_oracle_check(config, configured, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bregret::SizeGuardError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitSizeGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
