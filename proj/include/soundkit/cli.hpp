#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace soundkit::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailed = 1,
  kFailure = 2,  // usage, unknown dataset, network, I/O or schema problems
};

struct Config {
  std::filesystem::path builtin_datasets;
};

Config default_config();

// Runs one invocation. `args` excludes the program name. Human-readable
// output and --json documents go to `out`; diagnostics and progress to `err`.
int run(const std::vector<std::string>& args, const std::map<std::string, std::string>& env,
        std::ostream& out, std::ostream& err, const Config& config = default_config());

}  // namespace soundkit::cli
