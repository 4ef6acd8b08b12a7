// cslsim: command-line front end for the scenario runner.
#include <iostream>

#include <CLI11.hpp>

#include "csl/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = csl::cli;
  CLI::App app{"Closed-form and grid simulations of CSL decoherence", cli::kToolName};
  app.set_version_flag("--version", std::string(cli::kToolName) + " " + cli::kVersion);

  cli::ScenarioRequest req;
  std::string format = "csv";
  std::uint64_t seed = 0;
  app.add_option("--scenario", req.scenario, "twoslit | scatter | twoparticle | oracle-check")->required();
  app.add_option("--config", req.config_path, "key=value or flat JSON configuration file");
  app.add_option("--set", req.overrides, "key=value override, repeatable")->allow_extra_args(false);
  app.add_option("--out", req.output_path, "output file (default: stdout)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed for stochastic scenarios");
  app.add_flag("--validate,--dry-run", req.dry_run, "check the configuration and report warnings and cost only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error category=config: " << e.what() << '\n';
    return cli::kExitConfig;
  }
  req.format = format == "json" ? cli::Format::Json : cli::Format::Csv;
  if (*seed_opt) req.seed = seed;
  return cli::run(req, std::cout, std::cerr);
}
