#pragma once

#include "explorable/core/errors.hpp"
#include "explorable/core/types.hpp"
#include "explorable/formalizer/provider.hpp"
#include "explorable/runner/runner.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace explorable {

struct AlignmentReport {
    bool rule_order_ok = true;
    bool rule_have_ok = true;
    bool rule_blocks_ok = true;
    std::vector<std::string> order_details;
    std::vector<std::string> have_details;
    std::vector<std::string> blocks_details;
    double name_overlap = 1.0;
    std::vector<std::string> matched_names;
    std::vector<std::string> unmatched_names;
    std::vector<std::string> advisories; // non-gating, e.g. low name overlap

    bool ok() const { return rule_order_ok && rule_have_ok && rule_blocks_ok; }
    std::string summary() const;
};

inline constexpr double name_overlap_advisory_threshold = 0.5;

// Throws UnannotatedBlock when a `have` lies outside every `-- step k` scope.
AlignmentReport check_alignment(const WrittenProof &written, const LeanSource &lean);

class ProofGenerationExhausted : public ExhaustedAttempts {
public:
    ProofGenerationExhausted(int attempts, AlignmentReport alignment, CompileReport compile);
    const AlignmentReport &alignment() const { return alignment_; }
    const CompileReport &compile() const { return compile_; }

private:
    AlignmentReport alignment_;
    CompileReport compile_;
};

struct GenerationResult {
    LeanSource source;
    AlignmentReport alignment;
    CompileReport compile;
    int attempts = 0;
};

// generate -> compile -> check, feeding diagnostics back, at most max_attempts times.
GenerationResult generate_aligned_proof(const WrittenProof &written, GenerationProvider &provider, int max_attempts,
                                        LeanRunner &runner, const std::filesystem::path &workdir,
                                        const std::string &doc_id = {});

// Lean text inside the first ```lean fence (or the whole response).
std::string extract_lean_code(const std::string &response);

std::string numbered_steps(const WrittenProof &written);

} // namespace explorable
