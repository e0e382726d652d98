// pgsd: dissociation scans, active-space selection, resource reports and
// noisy ansatz comparison from FCIDUMP input.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "pgsd/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::vector<std::string> fcidumps;
  std::map<std::string, std::string> values;
};

// Flags share the config-file keys so both go through apply_setting.
const std::vector<std::pair<std::string, std::string>> kValueFlags = {
    {"ansatz", "pgsd | uccsd | both"},
    {"electrons", "active electrons"},
    {"orbitals", "active spatial orbitals"},
    {"ms2", "2S for model-space resources (default 0)"},
    {"orbital-set", "comma-separated active orbital indices"},
    {"policy", "auto (re-rank each geometry) | fixed"},
    {"equilibrium", "bond length of the zero-start geometry"},
    {"amplitudes", "external amplitude CSV (select-as)"},
    {"energies", "true | false: attach CASCI energies (select-as)"},
    {"tol", "gradient optimizer energy tolerance"},
    {"max-iter", "gradient optimizer iteration cap"},
    {"df-max-iter", "derivative-free evaluation cap"},
    {"rho-begin", "initial derivative-free trust radius"},
    {"rho-end", "final derivative-free trust radius"},
    {"shots", "shots per measurement group"},
    {"noise", "p1,p2,pr"},
    {"trajectories", "noise trajectories per energy (0 = one per shot)"},
    {"seed", "base RNG seed"},
    {"seeds", "number of seeds in noise-compare"},
    {"out", "output path (default stdout)"},
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "key = value configuration file");
  sub->add_option("--fcidump", f.fcidumps, "FCIDUMP file (repeatable)");
  for (const auto& [key, help] : kValueFlags) sub->add_option("--" + key, f.values[key], help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PGSD variational eigensolver toolkit"};
  app.set_version_flag("--version", std::string("pgsd ") + pgsd::kVersion);
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"scan", "VQE dissociation scan against CASCI"},
      {"select-as", "rank candidate active spaces"},
      {"resources", "circuit resources of PGSD and UCCSD"},
      {"noise-compare", "noisy PGSD vs UCCSD comparison"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pgsd::kConfigError;
  }

  pgsd::RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();
  try {
    if (!flags.config.empty()) pgsd::load_config_file(cfg, flags.config);
    if (!flags.fcidumps.empty()) cfg.fcidumps = flags.fcidumps;
    for (const auto& [key, help] : kValueFlags)
      if (sub->count("--" + key) > 0) pgsd::apply_setting(cfg, key, flags.values[key]);
  } catch (const pgsd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pgsd::kConfigError;
  }
  return pgsd::run_command(cfg, std::cout, std::cerr);
}
