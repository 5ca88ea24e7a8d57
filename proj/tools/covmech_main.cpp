#include <iostream>
#include <utility>

#include <CLI11.hpp>

#include "covmech/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Covariant Hamiltonian mechanics: simulate, verify and tabulate brackets of catalog systems"};
  app.require_subcommand(1, 1);

  covmech::cli::Overrides overrides;
  std::string config;
  std::string output;
  std::uint64_t seed = 0;
  std::size_t points = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "integrate the configured orbit and monitor drift of the conserved quantities"},
      {"verify", "check Killing equations, hierarchy residuals, conservation and closure at random points"},
      {"bracket-table", "tabulate pairwise brackets of the configured observables"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "JSON run configuration")->required();
    sub->add_option("--output", output, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed for random verification points");
    sub->add_option("--points", points, "number of random verification points");
    sub->add_flag("--negative-controls", overrides.negative_controls, "also run the catalog negative controls");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : covmech::cli::kConfigError;
  }

  auto* sub = app.get_subcommands().front();
  if (sub->count("--output")) overrides.output_dir = output;
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--points")) overrides.points = points;
  return covmech::cli::run(sub->get_name(), config, overrides, std::cout, std::cerr);
}
