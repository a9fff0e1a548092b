#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evstudy::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidation = 2,
    kUsage = 3,
    kIo = 4,
};

/// Entry point for the `evstudy` tool. `args` excludes the program name.
/// Subcommands: simulate, estimate, plot, montecarlo, compare.
[[nodiscard]] int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evstudy::cli
