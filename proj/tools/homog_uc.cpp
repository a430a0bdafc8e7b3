#include <iostream>

#include <CLI11.hpp>

#include "homog/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"homog-uc: periodic correctors, homogenized operators and scaling studies"};
  app.require_subcommand(1);
  std::string config;
  bool negative = false;

  auto* corr = app.add_subcommand("correctors", "solve the cell problems and write the corrector table");
  corr->add_option("--config", config, "configuration file")->required();
  auto* study = app.add_subcommand("study", "run the three-ellipsoid / doubling scaling study");
  study->add_option("--config", config, "configuration file")->required();
  study->add_flag("--negative-control", negative, "build psi from the uncorrected seed");
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--config", config, "configuration file")->required();
  verify->add_flag("--negative-control", negative, "inject known defects; the suite must fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : homog::kExitConfig;
  }

  return homog::run_guarded(
      [&] {
        const auto cfg = homog::load_config(config);
        if (*corr) return homog::cmd_correctors(cfg, std::cout);
        if (*study) return homog::cmd_study(cfg, std::cout, negative);
        return homog::cmd_verify(cfg, std::cout, negative);
      },
      std::cerr);
}
