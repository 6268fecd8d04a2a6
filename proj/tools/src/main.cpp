#include <CLI11.hpp>

#include <iostream>

#include "mixtype/errors.hpp"
#include "mixtype_cli/run.hpp"

int main(int argc, char** argv) {
  using namespace mixtype;
  CLI::App app{"Mixed-type linear solver and Nash-Moser iteration for det D^2 u = K psi", "mixtype"};
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
  std::string config_path, scenario, out;
  double h = 0.0;
  unsigned seed = 0;
  app.add_option("--config", config_path, "config file (key = value under [section])");
  app.add_option("--scenario", scenario, "scenario, overrides the config");
  app.add_option("--out", out, "output directory, overrides [output] dir");
  app.add_option("--h", h, "grid spacing, overrides [grid] h")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed of the randomized checks, overrides [verification] seed");
  app.footer(cli::help_epilog());
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code(ErrorKind::Config);
  }

  try {
    cli::RunConfig config = config_path.empty() ? cli::RunConfig{} : cli::load_config(config_path);
    if (!scenario.empty()) config.scenario = cli::parse_scenario(scenario);
    if (!out.empty()) config.out = out;
    if (app.count("--h")) config.h = h;
    if (app.count("--seed")) config.seed = seed;
    return cli::run(config, std::cout);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e.kind());
  }
}
