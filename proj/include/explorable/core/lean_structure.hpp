#pragma once

// Line-level structure of a single-theorem Lean file: binders, the top-level
// tactic sequence, and the `-- step k` annotated step blocks.

#include "explorable/core/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace explorable {

struct Binder {
    std::string name;
    std::string type_text;
    friend bool operator==(const Binder &, const Binder &) = default;
};

struct TacticSpan {
    int index = 0;
    SourcePosition start;
    LineRange lines;
    std::string text; // de-indented source of the tactic, continuation lines included
    std::optional<int> block_id;
};

struct LeanLayout {
    std::string theorem_name;
    int decl_line = 0;
    int by_line = 0;
    int proof_last_line = 0;
    int tactic_indent = 2;
    std::vector<Binder> binders;
    std::string statement;
    std::vector<TacticSpan> tactics;
    std::vector<StepBlock> blocks;
    std::vector<int> unannotated_have_lines;
    std::vector<std::string> problems;

    bool has_declaration() const { return decl_line > 0; }
    bool tactic_proof() const { return by_line > 0; }
    const StepBlock *block(int id) const;
    // Block containing `line`, if any.
    std::optional<int> block_at(int line) const;
};

LeanLayout analyze_lean_layout(std::string_view text);

// Builds a LeanSource whose step blocks come from the text's annotations.
LeanSource make_lean_source(std::string text, std::string toolchain = {});

// Names a tactic introduces into the context via `have` / `obtain`.
std::vector<std::string> have_names(std::string_view tactic_text);
// `have_names` plus names bound by `intro`.
std::vector<std::string> introduced_names(std::string_view tactic_text);
// Every identifier the proof can legitimately refer to: binders and introduced names.
std::vector<std::string> lean_names(const LeanLayout &layout);

std::optional<int> parse_step_comment(std::string_view line);

} // namespace explorable
