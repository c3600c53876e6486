#pragma once

#include <string>
#include <vector>

namespace stochorder::cli {

// Exit-code contract:
//   0 - all consistent
//   1 - criterion/oracle disagreement (or internal diagnostic failure)
//   2 - input error
//   3 - numeric non-convergence
struct CommandResult {
  int exit_code = 0;
  std::string output;  // stdout payload
  std::string error;   // stderr payload
};

// Testable entry point; args exclude the program name.
CommandResult run_command(const std::vector<std::string>& args);

// Process entry point: prints output/error and returns the exit code.
int run(int argc, char** argv);

}  // namespace stochorder::cli
