#include "tumorfbs_app/config.hpp"
#include "tumorfbs_app/run.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char **argv) {
  using namespace tumorfbs::app;

  CLI::App cli{"Optimal inhibitor schedules for a flat tumor layer model"};
  cli.footer("Commands: steady, simulate, optimize, gradcheck, crosscheck, sweep.\n"
             "Every configuration key is also accepted as --key VALUE and overrides the file.\n"
             "Exit status: 0 ok, 1 invalid configuration, 2 solver failure, 3 no convergence.");
  std::string command;
  std::string config_path;
  bool list_keys = false;
  cli.add_option("command", command, "Command to run (overrides 'command' in the file)");
  cli.add_option("-c,--config", config_path, "Configuration file of 'key = value' lines");
  cli.add_flag("--list-keys", list_keys, "Print every configuration key with its default");

  std::map<std::string, std::string> overrides;
  for (const auto &key : config_keys())
    if (key != "command") cli.add_option("--" + key, overrides[key])->group("Configuration keys");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = cli.exit(e);
    return code == 0 ? exit_ok : exit_bad_config;
  }

  if (list_keys) {
    std::cout << echo_config(RunConfig{});
    return exit_ok;
  }

  try {
    std::vector<Assignment> assignments;
    if (!config_path.empty()) assignments = read_config_file(config_path);
    if (!command.empty()) assignments.push_back({"command", command, "command line"});
    for (const auto &key : config_keys()) {
      if (key == "command") continue;
      const auto *opt = cli.get_option("--" + key);
      if (opt->count() > 0) assignments.push_back({key, overrides[key], "--" + key});
    }
    const RunConfig config = build_config(assignments);
    return run(config, std::cerr);
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_config;
  }
}
