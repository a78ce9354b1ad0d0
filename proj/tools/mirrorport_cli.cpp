#include "mirrorport/app/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace {

namespace app = mirrorport::app;

// command-line flag -> config key; values are applied after the config file
const std::vector<std::pair<std::string, std::string>> kOverrides = {
    {"--power,--power-w", "power_w"},
    {"--omega0", "omega0_rad_s"},
    {"--omega-m", "omega_m_rad_s"},
    {"--phi0", "phi0_rad"},
    {"--mass", "mass_kg"},
    {"--dnu-det", "dnu_det_rad_s"},
    {"--dnu-mode", "dnu_mode_rad_s"},
    {"--temperature", "temperature_k"},
    {"--gamma-m", "gamma_m_hz"},
    {"--nbar", "nbar"},
    {"--grid", "grid"},
    {"--edge-points", "edge_points"},
    {"--n-traj", "mc_n_traj"},
    {"--seed", "mc_seed"},
    {"--alpha-re", "alpha_in_re"},
    {"--alpha-im", "alpha_in_im"},
    {"--mc-points", "mc_points"},
    {"--rel-dpower", "rel_dpower"},
    {"--sign-variant", "sign_variant"},
    {"--readout-sigma", "readout_sigma"},
    {"--threads", "threads"},
    {"--out", "out"},
};

int run(int argc, char** argv) {
  CLI::App cli{"Teleportation of an optical coherent state onto a mirror vibrational mode"};
  cli.require_subcommand(1);
  cli.fallthrough();

  std::string config_path;
  bool json_summary = false;
  cli.add_option("--config", config_path, "key = value configuration file");
  cli.add_flag("--json-summary", json_summary, "print scalar results as one JSON object on stdout");
  std::map<std::string, std::string> values;
  for (const auto& [flag, key] : kOverrides) cli.add_option(flag, values[key], "overrides config key " + key);

  const std::map<std::string, std::string> blurbs{
      {"couplings", "coupling constants and oscillation period"},
      {"fidelity-sweep", "teleportation fidelity versus scaled time"},
      {"cooling", "effective thermal number versus scaled time"},
      {"montecarlo", "sampled trajectories against the analytic fidelity"},
      {"readout-check", "mirror readout coefficients and dominance ratio"},
      {"sensitivity", "pump power noise and thermal decoherence budget"}};
  for (const auto& name : app::command_names()) cli.add_subcommand(name, blurbs.at(name));

  try {
    cli.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return 2;
  }

  const std::string command = cli.get_subcommands().front()->get_name();
  app::RunConfig cfg;
  if (!config_path.empty()) app::load_config_file(cfg, config_path);
  for (const auto& [flag, key] : kOverrides) {
    if (cli.get_option(flag.substr(0, flag.find(',')))->count() > 0) {
      try {
        app::apply_setting(cfg, key, values[key]);
      } catch (const app::ConfigError& e) {
        throw app::ConfigError("command line: " + std::string(e.what()));
      }
    }
  }

  const auto result = app::run_command(command, cfg);
  std::cerr << result.report;
  if (cfg.out_path) {
    std::ofstream out(*cfg.out_path, std::ios::binary | std::ios::trunc);
    out << result.csv;
    if (!out) throw app::ConfigError("failed to write '" + *cfg.out_path + "'");
  } else if (!json_summary) {
    std::cout << result.csv;
  }
  if (json_summary) std::cout << result.summary.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const app::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const mirrorport::NumericalContractError& e) {
    std::cerr << "numerical contract violated: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
