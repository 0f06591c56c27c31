#include <iostream>

#include <CLI11.hpp>

#include "adhesim/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"adhesim: nonlocal cell-cell adhesion model toolkit"};
  app.require_subcommand(1);

  adhesim::CommandOptions opts;
  std::uint64_t seed = 0;

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"simulate", "time-integrate and write profile, kymograph and trace CSVs"},
      {"steady", "integrate to a steady state, optionally polish with Newton"},
      {"bifurcate", "bifurcation points and pitchfork coefficients"},
      {"branch", "continue nontrivial branches in alpha"},
      {"asymptotic", "first-order small-alpha no-flux steady state"},
      {"kernel-info", "kernel samples and Fourier moments"},
      {"verify", "run every acceptance check"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    auto* cfg = sub->add_option("--config", opts.config, "key = value configuration file");
    if (std::string(c.name) != "verify") cfg->required();
    sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "initial-condition seed (overrides ic.seed)");
    sub->add_flag("--svg", opts.svg, "also write SVG plots");
    sub->add_option("--jobs", opts.jobs, "worker threads for sweeps")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return adhesim::kExitConfig;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    opts.command = sub->get_name();
    if (sub->count("--seed") > 0) opts.seed = seed;
  }
  return adhesim::dispatch(opts, std::cout, std::cerr);
}
