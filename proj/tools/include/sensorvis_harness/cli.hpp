#ifndef SENSORVIS_HARNESS_CLI_HPP_
#define SENSORVIS_HARNESS_CLI_HPP_

#include <iosfwd>

namespace sensorvis::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitInternal = 3,
};

// Entry point of the `sensorvis` command line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sensorvis::harness

#endif  // SENSORVIS_HARNESS_CLI_HPP_
