// Command-line driver: qmep <invert|mobility|relax|production> --config <path>
// [--output <path>] [--threads <n>] [--hbar-scale <x>].

#include <iostream>

#include "CLI11.hpp"
#include "qmep/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quantum maximum-entropy closure: inversion, productions, relaxation and mobility"};
  app.require_subcommand(1);

  qmep::cli::Invocation inv;
  std::optional<std::string> output;
  std::optional<int> threads;
  std::optional<double> hbar_scale;

  const std::pair<const char*, const char*> verbs[] = {
      {"invert", "invert moment targets for Lagrange multipliers"},
      {"mobility", "relaxation time and mobility sweep"},
      {"relax", "homogeneous relaxation trajectory under a constant field"},
      {"production", "production-term table per phonon channel"},
  };
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config_path, "run configuration file")->required();
    sub->add_option("--output", output, "CSV output path (stdout when absent)");
    sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::NonNegativeNumber);
    sub->add_option("--hbar-scale", hbar_scale, "multiplier of hbar in second-order terms")
        ->check(CLI::NonNegativeNumber);
    sub->callback([&inv, n = std::string(name)] { inv.verb = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qmep::cli::exit_config;
  }
  inv.output = output;
  inv.threads = threads;
  inv.hbar_scale = hbar_scale;
  return qmep::cli::run_invocation(inv, std::cout, std::cerr);
}
