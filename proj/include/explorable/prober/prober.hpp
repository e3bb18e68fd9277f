#pragma once

#include "explorable/core/types.hpp"
#include "explorable/runner/runner.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace explorable {

inline constexpr std::size_t default_sweep_cap = 201;

// Scratch `example` fixing every input to its bound value. Haves of earlier
// steps are copied inside `try`; haves of `step_index` are copied bare, so a
// failure there is an error of the probe. Throws UnboundInput.
std::string make_probe(const LeanSource &lean, int step_index, const Binding &binding);

// Values of the last non-terminal captured state: `v = <numeral>` keys by v,
// closed relations reduce to booleans, anything else stays symbolic text.
std::map<std::string, ReducedValue> extract_values(const ProbeOutcome &outcome, const LinkMap &links);

// Throws MissingOracle.
std::pair<bool, bool> oracle_eval(const ProofDocument &doc, const Binding &binding);

// Throws InvalidBinding unless the binding covers exactly the inputs, within their domains.
void check_binding(const WrittenProof &written, const Binding &binding);

Binding default_binding(const WrittenProof &written);

struct ProbeContext {
    LeanRunner &runner;
    std::filesystem::path workdir;
};

std::filesystem::path probe_dir(const std::filesystem::path &workdir, const std::string &doc_id, const Binding &binding);

EvalResult evaluate_at(const ProofDocument &doc, const Binding &binding, ProbeContext &ctx);

// Fills `cache` (by variable and by binding); reuses cached evals. Throws RangeTooLarge.
Sweep sweep(const ProofDocument &doc, const std::string &var, IntRange range, SweepCache &cache, ProbeContext &ctx,
            std::size_t cap = default_sweep_cap);

// A binding whose oracle accepts the hypotheses but whose probes report a break,
// or whose oracle rejects the conclusion under accepted hypotheses.
struct Disagreement {
    Binding binding;
    std::string reason;
};

std::vector<Disagreement> find_disagreements(const ProofDocument &doc, const EvalResult &eval);

} // namespace explorable
