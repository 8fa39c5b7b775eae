#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace speedup::cli {

struct RunConfig {
  std::string command;  // metrics | improve | factor | iso | seed-orbit
  std::string target_path;
  std::string source_path;
  int n = 8;
  double delta = 0.1;
  int n1 = 64;
  double delta1 = 0.05;
  double epsilon = 0.2;
  int budget = 3;
  uint64_t seed = 1;
  std::string out_dir = "out";
  bool strict_schedule = false;
  int copy_height = 64;  // iso only
  int orbit_length = 0;  // seed-orbit only; 0 is the full cycle
};

// Empty when every tolerance lies in (0, 1), the budget is >= 0 and the
// sizes are positive.
std::string ValidateConfig(const RunConfig& config);

// Exit status of a refusal kind; 0 is reserved for success and 1 for a
// completed run whose logged checks did not all pass.
int ExitCodeFor(const std::string& kind);

// Runs one subcommand, writes its files under out_dir, and returns the exit
// status. Refusals are written to refusal.json. One summary line goes to `log`.
int RunCommand(const RunConfig& config, std::ostream& log);

}  // namespace speedup::cli
