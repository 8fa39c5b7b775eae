#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  speedup::cli::RunConfig config;
  CLI::App app{"Finite-model G-speedup constructions"};
  app.require_subcommand(1);
  auto add_common = [&config](CLI::App* sub) {
    sub->add_option("--target", config.target_path, "Target system spec")->required();
    sub->add_option("--source", config.source_path, "Source system spec")->required();
    sub->add_option("--n", config.n, "Block length n (n_0 for loops)");
    sub->add_option("--delta", config.delta, "Regularity tolerance delta (delta_0 for loops)");
    sub->add_option("--n1", config.n1, "Next block length n1 (n_k, k >= 1, for loops)");
    sub->add_option("--delta1", config.delta1, "Next regularity tolerance delta1");
    sub->add_option("--epsilon", config.epsilon, "Step epsilon, or the total for loops");
    sub->add_option("--budget", config.budget, "Iteration budget");
    sub->add_option("--seed", config.seed, "Seed for the rectangle sequence");
    sub->add_option("--out", config.out_dir, "Output directory");
    sub->add_flag("--strict-schedule", config.strict_schedule,
                  "Use the sufficient constants and refuse when they cannot hold");
  };
  add_common(app.add_subcommand("metrics", "Distance between the n-name distributions"));
  add_common(app.add_subcommand("improve", "One improvement step from a bootstrapped speedup"));
  add_common(app.add_subcommand("factor", "Iterated improvement with twisting"));
  CLI::App* iso = app.add_subcommand("iso", "Factor loop with partition copying");
  add_common(iso);
  iso->add_option("--copy-height", config.copy_height, "Tower height used when copying");
  CLI::App* seed = app.add_subcommand("seed-orbit", "Copy one target orbit onto the source");
  add_common(seed);
  seed->add_option("--length", config.orbit_length, "Orbit length; 0 is the whole cycle");
  CLI11_PARSE(app, argc, argv);
  config.command = app.get_subcommands().front()->get_name();
  return speedup::cli::RunCommand(config, std::cout);
}
