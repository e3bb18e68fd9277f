#pragma once

// Subprocess access to the Lean toolchain: compilation, goal-state capture
// and probe execution.

#include "explorable/core/types.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace explorable {

struct ToolchainConfig {
    // Command prefix; the source file path is appended. `lake env lean` works too.
    std::vector<std::string> command;
    std::filesystem::path project_dir; // working directory of the toolchain
    double timeout_seconds = 60.0;
    unsigned workers = 0; // 0 = hardware concurrency

    // Built-in defaults overridden by EXPLORABLE_LEAN, EXPLORABLE_LEAN_PROJECT,
    // EXPLORABLE_LEAN_TIMEOUT and EXPLORABLE_WORKERS.
    static ToolchainConfig from_env();
    static ToolchainConfig defaults();
    unsigned effective_workers() const;
    std::string toolchain_id() const;
};

struct DiagnosticMessage {
    std::string severity; // error | warning | info
    int line = 0;
    int column = 0;
    std::string message;
    friend bool operator==(const DiagnosticMessage &, const DiagnosticMessage &) = default;
};

struct CompileReport {
    bool success = false;
    std::vector<DiagnosticMessage> diagnostics;

    std::vector<DiagnosticMessage> errors() const;
    std::string summary() const; // one diagnostic per line
};

struct ProbeOutcome {
    int step_index = 0;
    bool closed = false;
    std::vector<ProofState> raw_states;
    std::string stderr_text;
};

// Parses `file:line:col: severity: message` blocks (continuation lines belong
// to the preceding message) and `--json` message lines.
std::vector<DiagnosticMessage> parse_diagnostics(std::string_view output);

// One goal block in the standard display. "no goals" gives a terminal state.
ProofState parse_goal_text(std::string_view raw);
// Inverse of parse_goal_text: consecutive hypotheses sharing a type are grouped.
std::string render_goal(const ProofState &state);

class LeanRunner {
public:
    explicit LeanRunner(ToolchainConfig config = ToolchainConfig::from_env());

    CompileReport compile(const LeanSource &source, const std::filesystem::path &workdir);
    CompileReport compile_text(const std::string &text, const std::filesystem::path &workdir);

    // States at (line, column) positions of the top-level tactic block, in request order.
    std::vector<ProofState> goal_states(const LeanSource &source, const std::vector<SourcePosition> &positions,
                                        const std::filesystem::path &workdir);

    ProbeOutcome run_probe(const std::string &probe_source, const std::filesystem::path &workdir,
                           int step_index = 0);

    // Number of toolchain processes started so far.
    std::uint64_t invocations() const { return invocations_.load(); }
    const ToolchainConfig &config() const { return config_; }

private:
    struct Raw {
        CompileReport report;
        std::string output;
    };
    Raw invoke(const std::string &text, const std::filesystem::path &file);
    std::filesystem::path scratch_file(const std::filesystem::path &dir, std::string_view stem);

    ToolchainConfig config_;
    std::unique_ptr<std::counting_semaphore<>> slots_;
    std::atomic<std::uint64_t> invocations_{0};
    std::atomic<std::uint64_t> files_{0};
};

} // namespace explorable
