#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace explorable {

struct ProcessResult {
    int exit_code = 0;
    std::string output; // stdout and stderr, interleaved
    bool timed_out = false;
};

// Runs argv[0] (PATH lookup) in `cwd`, killing its process group after
// `timeout_seconds`. Throws ToolchainMissing when the program cannot be executed.
ProcessResult run_process(const std::vector<std::string> &argv, const std::filesystem::path &cwd,
                          double timeout_seconds);

} // namespace explorable
