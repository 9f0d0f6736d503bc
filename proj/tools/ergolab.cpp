#include <iostream>

#include <CLI11.hpp>

#include "ergolab/errors.hpp"
#include "ergolab/scenarios.hpp"

using namespace ergolab;

namespace {

int run(const std::string& path, const std::string& out_dir, bool quiet) {
  ExperimentConfig cfg = ExperimentConfig::load(path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  validate_config(cfg);
  const RunReport rep = run_scenario(cfg);
  write_artifacts(rep, cfg);
  if (!quiet) {
    for (const auto& c : rep.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << ' ' << c.relation << ' ' << c.bound;
      if (c.relation == "==") std::cout << " +- " << c.tolerance;
      std::cout << '\n';
    }
    if (!rep.certified) std::cout << "NOT CERTIFIED\n";
    std::cout << rep.scenario << ": " << rep.status() << " (" << cfg.json_path().string() << ")\n";
  }
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: experiments on multiple correlation sequences"};
  app.require_subcommand(1);
  std::string config;
  std::string out_dir;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "Run the scenario described by a JSON config");
  run_cmd->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--out", out_dir, "Override the output directory");
  run_cmd->add_flag("-q,--quiet", quiet, "Only set the exit status");

  auto* list_cmd = app.add_subcommand("list", "List scenarios");
  auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
  validate_cmd->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*list_cmd) {
      for (const auto& s : scenario_catalog()) {
        std::cout << s.name << "  [";
        for (std::size_t i = 0; i < s.required.size(); ++i) std::cout << (i ? ", " : "") << s.required[i];
        std::cout << "]\n    " << s.exercises << '\n';
      }
      return kExitPass;
    }
    if (*validate_cmd) {
      validate_config(ExperimentConfig::load(config));
      std::cout << "ok\n";
      return kExitPass;
    }
    return run(config, out_dir, quiet);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
