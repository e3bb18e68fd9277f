#include "explorable/runner/runner.hpp"

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/core/lean_structure.hpp"
#include "explorable/core/text.hpp"
#include "explorable/runner/process.hpp"

#include <algorithm>
#include <map>
#include <unistd.h>

namespace explorable {

namespace fs = std::filesystem;

namespace {

// Releases a pool slot on scope exit.
class SlotGuard {
public:
    explicit SlotGuard(std::counting_semaphore<> &s) : s_(s) { s_.acquire(); }
    ~SlotGuard() { s_.release(); }
    SlotGuard(const SlotGuard &) = delete;
    SlotGuard &operator=(const SlotGuard &) = delete;

private:
    std::counting_semaphore<> &s_;
};

} // namespace

LeanRunner::LeanRunner(ToolchainConfig config)
    : config_(std::move(config)),
      slots_(std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(config_.effective_workers())))
{
}

fs::path LeanRunner::scratch_file(const fs::path &dir, std::string_view stem)
{
    fs::create_directories(dir);
    std::string name = std::string(stem.empty() ? "source" : stem) + "_" + std::to_string(::getpid()) + "_" +
                       std::to_string(files_.fetch_add(1)) + ".lean";
    return dir / name;
}

LeanRunner::Raw LeanRunner::invoke(const std::string &text, const fs::path &file)
{
    fs::create_directories(file.parent_path());
    write_file_atomic(file, text);
    auto argv = config_.command;
    argv.push_back(fs::absolute(file).string());
    ProcessResult pr;
    {
        SlotGuard slot(*slots_);
        invocations_.fetch_add(1);
        pr = run_process(argv, config_.project_dir, config_.timeout_seconds);
    }
    if (pr.timed_out)
        throw Timeout(config_.timeout_seconds);
    Raw raw;
    raw.output = std::move(pr.output);
    raw.report.diagnostics = parse_diagnostics(raw.output);
    bool errors = !raw.report.errors().empty();
    if (pr.exit_code != 0 && !errors) {
        raw.report.diagnostics.push_back(
            {"error", 0, 0, "toolchain exited with status " + std::to_string(pr.exit_code) + ": " +
                                text::trim_copy(std::string_view(raw.output).substr(0, 2000))});
        errors = true;
    }
    raw.report.success = pr.exit_code == 0 && !errors;
    return raw;
}

CompileReport LeanRunner::compile(const LeanSource &source, const fs::path &workdir)
{
    return invoke(source.full_text, scratch_file(workdir, source.theorem_name)).report;
}

CompileReport LeanRunner::compile_text(const std::string &text, const fs::path &workdir)
{
    return invoke(text, scratch_file(workdir, "source")).report;
}

std::vector<ProofState> LeanRunner::goal_states(const LeanSource &source, const std::vector<SourcePosition> &positions,
                                                const fs::path &workdir)
{
    auto layout = analyze_lean_layout(source.full_text);
    if (!layout.tactic_proof())
        throw PositionOutsideProof("the source has no tactic block");
    auto lines = text::split_lines(source.full_text);
    const auto &tactics = layout.tactics;

    // Each position maps to the state before tactic k (k == size: after the last tactic).
    std::vector<std::size_t> slot_of;
    for (const auto &p : positions) {
        if (p.line < layout.by_line || p.line > layout.proof_last_line)
            throw PositionOutsideProof("line " + std::to_string(p.line) + " is outside lines " +
                                       std::to_string(layout.by_line) + ".." + std::to_string(layout.proof_last_line));
        std::size_t k = 0;
        while (k < tactics.size() && tactics[k].start < p)
            ++k;
        slot_of.push_back(k);
    }

    // Insertion line (1-based, "insert before") per slot.
    std::map<std::size_t, int> insert_before;
    for (auto k : slot_of)
        insert_before[k] = k < tactics.size() ? tactics[k].lines.first : layout.proof_last_line + 1;

    std::map<int, std::size_t> new_line_of_slot;
    std::vector<std::string> out;
    std::map<int, std::vector<std::size_t>> by_line;
    for (auto [k, line] : insert_before)
        by_line[line].push_back(k);
    for (std::size_t i = 0; i <= lines.size(); ++i) {
        int ln = static_cast<int>(i) + 1;
        if (auto it = by_line.find(ln); it != by_line.end()) {
            for (auto k : it->second) {
                int indent = k < tactics.size() ? tactics[k].start.column : layout.tactic_indent;
                out.push_back(std::string(static_cast<std::size_t>(indent), ' ') + "trace_state");
                new_line_of_slot[static_cast<int>(out.size())] = k;
            }
        }
        if (i < lines.size())
            out.push_back(lines[i]);
    }

    auto raw = invoke(text::join(out, "\n") + "\n", scratch_file(workdir, source.theorem_name + "_goals"));
    std::map<std::size_t, ProofState> state_of_slot;
    for (const auto &d : raw.report.diagnostics) {
        if (d.severity != "info")
            continue;
        auto it = new_line_of_slot.find(d.line);
        if (it == new_line_of_slot.end() || state_of_slot.count(it->second))
            continue;
        auto st = parse_goal_text(d.message);
        int original = insert_before[it->second];
        st.position = {original, it->second < tactics.size() ? tactics[it->second].start.column : layout.tactic_indent};
        state_of_slot[it->second] = std::move(st);
    }
    std::vector<ProofState> result;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        auto it = state_of_slot.find(slot_of[i]);
        if (it == state_of_slot.end())
            throw QueryFailed("no goal state at " + std::to_string(positions[i].line) + ":" +
                              std::to_string(positions[i].column) + "\n" + raw.report.summary());
        result.push_back(it->second);
    }
    return result;
}

ProbeOutcome LeanRunner::run_probe(const std::string &probe_source, const fs::path &workdir, int step_index)
{
    auto raw = invoke(probe_source, workdir / ("step" + std::to_string(step_index) + ".lean"));
    ProbeOutcome outcome;
    outcome.step_index = step_index;
    outcome.stderr_text = raw.output;
    for (const auto &d : raw.report.diagnostics) {
        if (d.severity != "info")
            continue;
        try {
            auto st = parse_goal_text(d.message);
            st.position = {d.line, d.column};
            outcome.raw_states.push_back(std::move(st));
        }
        catch (const NoTurnstile &) {
            // an info message that is not a goal display
        }
    }
    bool errors = !raw.report.errors().empty();
    outcome.closed = !errors && (outcome.raw_states.empty() || outcome.raw_states.back().terminal());
    return outcome;
}

} // namespace explorable
