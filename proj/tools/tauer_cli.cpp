// Command line front end: `tauer <subcommand> [options]`.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "tauer/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite-level computations for a path of masas in the hyperfinite II1 factor"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string grid;
  std::string out;
  tauer::ScenarioConfig cli;
  std::string tol;

  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--depth", cli.depth, "tower depth");
  app.add_option("--level", cli.level, "approximant level");
  auto* grid_opt = app.add_option("--grid", grid, "grid level or comma-separated fractions");
  auto* probes_opt = app.add_option("--probes", cli.probes, "random probe unitaries per pair");
  auto* iters_opt = app.add_option("--iters", cli.iterations, "power iteration cap");
  auto* samples_opt = app.add_option("--samples", cli.samples, "random samples per check");
  auto* seed_opt = app.add_option("--seed", cli.seed, "random seed");
  auto* out_opt = app.add_option("--out", out, "output directory (default $TAUER_OUT or ./tauer_out)");
  auto* tol_opt = app.add_option("--tol", tol, "threshold for exact-zero claims");
  auto* threads_opt = app.add_option("--threads", cli.threads, "worker threads (0 = all cores)");

  const std::map<std::string, std::string> help{
      {"tower", "primes and products of the tower"},
      {"family", "orthogonal masa families per leg, with defects"},
      {"approximant", "projection labels of each grid approximant"},
      {"distances", "gap estimates against the path bound for every grid pair"},
      {"certify", "singularity, orthogonality, anticommutation and cutdown witnesses"},
      {"gamma", "Gamma-map witnesses and the continuity report"}};
  for (const char* name : tauer::kSubcommands) app.add_subcommand(name, help.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // Config file first, then explicit flags on top.
  tauer::ScenarioConfig config;
  config.out = tauer::default_output_dir();
  try {
    if (!config_path.empty()) tauer::load_config_file(config, config_path);
    if (app.count("--depth")) config.depth = cli.depth;
    if (app.count("--level")) config.level = cli.level;
    if (grid_opt->count()) config.grid = grid;
    if (probes_opt->count()) config.probes = cli.probes;
    if (iters_opt->count()) config.iterations = cli.iterations;
    if (samples_opt->count()) config.samples = cli.samples;
    if (seed_opt->count()) config.seed = cli.seed;
    if (out_opt->count()) config.out = out;
    if (tol_opt->count()) tauer::apply_setting(config, "tol", tol);
    if (threads_opt->count()) config.threads = cli.threads;
  } catch (const tauer::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  return tauer::run(app.get_subcommands().front()->get_name(), config, std::cout, std::cerr);
}
