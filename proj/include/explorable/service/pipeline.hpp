#pragma once

#include "explorable/core/types.hpp"
#include "explorable/formalizer/provider.hpp"
#include "explorable/prober/prober.hpp"
#include "explorable/runner/runner.hpp"
#include "explorable/service/corpus.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace explorable {

struct PipelineConfig {
    std::filesystem::path corpus;
    std::filesystem::path workdir = "explorable-work";
    std::filesystem::path fixtures; // empty: <corpus>/fixtures
    ProviderMode provider = ProviderMode::fixture;
    int formalize_attempts = 3;
    int template_attempts = 3;

    std::filesystem::path fixture_dir() const { return fixtures.empty() ? corpus / "fixtures" : fixtures; }
    std::filesystem::path bundle_dir() const { return workdir / "bundles"; }
    std::filesystem::path bundle_path(const std::string &id) const { return bundle_dir() / (id + ".json"); }
};

struct StageLog {
    std::vector<std::string> warnings;
    std::vector<std::string> findings;
};

// Imported Lean is compiled and checked for alignment (advisory); otherwise
// the provider generates an aligned proof. Links follow in both cases.
ProofDocument formalize_document(const CorpusEntry &entry, GenerationProvider &provider, LeanRunner &runner,
                                 const PipelineConfig &config, StageLog &log);

// Dependency graph plus worked-example templates (documents with an oracle).
void analyze_document(ProofDocument &doc, GenerationProvider &provider, LeanRunner &runner,
                      const PipelineConfig &config, StageLog &log);

// One sweep per input over `ranges` (default ranges for missing variables).
void precompute_document(ProofDocument &doc, LeanRunner &runner, const PipelineConfig &config,
                         const std::map<std::string, IntRange> &ranges, StageLog &log);

struct OracleCheckReport {
    std::size_t bindings = 0;
    std::size_t accepted = 0; // oracle hypotheses hold
    std::vector<Disagreement> disagreements;
};

// Every binding of the grid spanned by `ranges`; inputs without a range stay at their default.
OracleCheckReport oracle_check(const ProofDocument &doc, const std::map<std::string, IntRange> &ranges,
                               LeanRunner &runner, const std::filesystem::path &workdir);

struct RenderedEval {
    EvalResult eval;
    std::map<int, std::string> step_text;      // instantiated worked examples
    std::map<int, std::string> render_errors;  // step -> MissingKey message
};

RenderedEval render_eval(const ProofDocument &doc, const EvalResult &eval);

// `LO..HI` or `VAR=LO..HI`.
std::pair<std::string, IntRange> parse_range_arg(const std::string &arg);

} // namespace explorable
