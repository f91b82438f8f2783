#pragma once

#include <string>
#include <vector>

namespace ganterp {

struct ProcessResult {
  bool started = false;
  int exit_status = -1;  // valid when started and exited normally
  int signal = 0;        // non-zero when terminated by a signal
  std::string output;    // combined stdout and stderr

  bool succeeded() const noexcept { return started && signal == 0 && exit_status == 0; }
  std::string describe() const;
};

// Runs argv[0] (searched on PATH when it has no slash) with the given
// arguments, waits for it, and captures its output. Never throws for a
// failing child; started == false when the program could not be launched.
ProcessResult run_process(const std::vector<std::string>& argv);

}  // namespace ganterp
