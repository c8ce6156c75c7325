#include "holling/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

template <typename T>
void flag(CLI::App& app, const std::string& name, std::optional<T>& slot, const std::string& help) {
  app.add_option("--" + name, slot, help);
}

}  // namespace

int main(int argc, char** argv) {
  using holling::RunConfig;
  CLI::App app{"Limit cycles and bifurcations of the quartic Holling predator-prey system"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto common = [&](CLI::App* sub) {
    flag(*sub, "alpha", cfg.alpha, "alpha >= 0");
    flag(*sub, "beta", cfg.beta, "beta");
    flag(*sub, "delta", cfg.delta, "delta > 0");
    flag(*sub, "lambda", cfg.lambda, "lambda > 0");
    flag(*sub, "mu", cfg.mu, "mu >= 0");
    flag(*sub, "gamma", cfg.gamma, "field rotation parameter (default 0)");
    flag(*sub, "format", cfg.format, "json | csv | svg");
    flag(*sub, "out", cfg.out, "output file (default stdout)");
    flag(*sub, "seed", cfg.seed, "audit seed (default 42)");
    flag(*sub, "draws", cfg.draws, "audit draws (default 200)");
    flag(*sub, "workers", cfg.workers, "audit worker threads (default 1)");
    sub->add_option("--config", config_path, "JSON file with the same keys as the flags");
  };

  struct Sub {
    const char* name;
    const char* help;
  };
  for (const Sub s : {Sub{"equilibria", "finite and infinite singular points"},
                      Sub{"cycles", "limit cycles around the first-quadrant anti-saddles"},
                      Sub{"continue", "one-parameter continuation of a located cycle"},
                      Sub{"scenario", "search for the two-cycle bifurcation sequence"},
                      Sub{"audit", "randomized count of nested cycles"},
                      Sub{"portrait", "SVG phase portrait"}}) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    if (std::string(s.name) == "continue") {
      flag(*sub, "parameter", cfg.parameter, "parameter to vary (default gamma)");
      flag(*sub, "to", cfg.to, "end value (default current + 1)");
      flag(*sub, "step", cfg.step, "first step size (default 0.01)");
      flag(*sub, "cycle", cfg.cycle, "start cycle, counted inner to outer (default 0)");
    }
    sub->callback([&cfg, name = std::string(s.name)] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : holling::exit_config;
  }

  try {
    if (!config_path.empty()) holling::apply_config_file(cfg, holling::read_config_file(config_path));
  } catch (const holling::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return holling::exit_config;
  }
  return holling::run_command(cfg, std::cout, std::cerr);
}
