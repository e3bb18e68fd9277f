#pragma once

// Shared domain types for explorable proof documents.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace explorable {

enum class NumberDomain { integer, natural };

// Inclusive integer interval. An interval with lo > hi is empty.
struct IntRange {
    std::int64_t lo = 0;
    std::int64_t hi = -1;

    bool empty() const { return lo > hi; }
    std::size_t size() const { return empty() ? 0 : static_cast<std::size_t>(hi - lo + 1); }
    bool contains(std::int64_t v) const { return lo <= v && v <= hi; }
    friend bool operator==(const IntRange &, const IntRange &) = default;
};

struct InputVar {
    std::string name;
    NumberDomain domain = NumberDomain::integer;
    IntRange default_range{-10, 10};
    std::int64_t default_value = 0;
    friend bool operator==(const InputVar &, const InputVar &) = default;
};

// Byte range [begin, end) into the owning step's text.
struct PropositionSpan {
    std::string name;
    std::size_t begin = 0;
    std::size_t end = 0;
    friend bool operator==(const PropositionSpan &, const PropositionSpan &) = default;
};

struct ProseStep {
    int index = 0;
    std::string text;
    // Separator that followed this step in the source proof text.
    std::string trailing;
    std::vector<PropositionSpan> propositions;
    friend bool operator==(const ProseStep &, const ProseStep &) = default;
};

// Integer-arithmetic predicates over the inputs, used as ground truth.
struct OraclePredicates {
    std::string hypothesis;
    std::string conclusion;
    friend bool operator==(const OraclePredicates &, const OraclePredicates &) = default;
};

struct WrittenProof {
    std::string theorem_text;
    std::string leading;
    std::vector<ProseStep> steps;
    std::vector<InputVar> inputs;
    std::optional<OraclePredicates> oracle;

    // Reassembles the proof text the steps were cut from.
    std::string proof_text() const;
    const InputVar *find_input(const std::string &name) const;
    friend bool operator==(const WrittenProof &, const WrittenProof &) = default;
};

// 1-based inclusive line range.
struct LineRange {
    int first = 0;
    int last = 0;
    bool contains(int line) const { return first <= line && line <= last; }
    friend bool operator==(const LineRange &, const LineRange &) = default;
};

struct StepBlock {
    int id = 0; // 1-based, in source order
    int prose_step_index = 0;
    LineRange lines;
    std::vector<std::string> have_names;
    bool binder_block = false; // scopes the theorem's binders
    friend bool operator==(const StepBlock &, const StepBlock &) = default;
};

struct LeanSource {
    std::string full_text;
    std::vector<StepBlock> step_blocks;
    std::string theorem_name;
    std::string toolchain;
    friend bool operator==(const LeanSource &, const LeanSource &) = default;
};

struct LinkMap {
    std::map<int, std::vector<int>> block_links;
    std::map<std::pair<int, std::string>, std::string> var_links;
    friend bool operator==(const LinkMap &, const LinkMap &) = default;
};

struct SourcePosition {
    int line = 0;   // 1-based
    int column = 0; // 0-based, as the toolchain reports it
    friend bool operator==(const SourcePosition &, const SourcePosition &) = default;
    friend auto operator<=>(const SourcePosition &, const SourcePosition &) = default;
};

struct Hypothesis {
    std::string name;
    std::string type_text;
    friend bool operator==(const Hypothesis &, const Hypothesis &) = default;
};

struct ProofState {
    SourcePosition position;
    std::vector<Hypothesis> hypotheses;
    std::string goal_text; // empty iff no goals remain

    bool terminal() const { return goal_text.empty(); }
    const Hypothesis *find(const std::string &name) const;
    friend bool operator==(const ProofState &, const ProofState &) = default;
};

// ---- dependency graph ----------------------------------------------------

struct FactNode {
    std::string name;
    std::string type_text;
    std::optional<int> prose_step_index;
    std::string origin_tactic;
    bool axiom = false;
    bool bookkeeping = false;
    bool inactive = false;
    int order = 0; // introduction order, used for deterministic iteration
    friend bool operator==(const FactNode &, const FactNode &) = default;
};

struct StepLink {
    int step = 0;
    std::vector<std::string> facts;
    friend bool operator==(const StepLink &, const StepLink &) = default;
};

struct FourMaps {
    std::map<int, std::vector<StepLink>> relies_on;
    std::map<int, std::vector<int>> used_by;
    std::map<int, std::set<std::string>> consumes;
    std::map<int, std::set<std::string>> introduces;
    friend bool operator==(const FourMaps &, const FourMaps &) = default;
};

enum class WarningKind { bookkeeping_node, closing_tactic_gap, hypothesis_revoked };

struct GraphWarning {
    WarningKind kind = WarningKind::bookkeeping_node;
    std::string subject; // fact name or tactic text
    std::optional<int> step;
    std::string message;
    friend bool operator==(const GraphWarning &, const GraphWarning &) = default;
};

// One tactic transition between consecutive captured states.
struct TacticTransition {
    std::string tactic_text;
    std::optional<int> step;
    std::vector<std::string> introduced;
    bool goal_changed = false;
    bool discharged = false;
    friend bool operator==(const TacticTransition &, const TacticTransition &) = default;
};

using FactEdge = std::pair<std::string, std::string>; // (from, to): `to` references `from`

struct FactGraph {
    std::map<std::string, FactNode> nodes;
    std::set<FactEdge> edges;
    std::vector<TacticTransition> transitions;
    std::vector<ProofState> states; // captured before each tactic, plus the final one
    FourMaps step_maps;
    std::vector<GraphWarning> warnings;
    friend bool operator==(const FactGraph &, const FactGraph &) = default;
};

// ---- execution -----------------------------------------------------------

struct SymbolicValue {
    std::string text;
    friend bool operator==(const SymbolicValue &, const SymbolicValue &) = default;
};

using ReducedValue = std::variant<std::int64_t, bool, SymbolicValue>;

struct Binding {
    std::map<std::string, std::int64_t> assignments;
    // Stable textual key, e.g. "n=3,x=2".
    std::string key() const;
    friend bool operator==(const Binding &, const Binding &) = default;
    friend auto operator<=>(const Binding &, const Binding &) = default;
};

struct ProbeResult {
    int step_index = 0;
    bool closed = false;
    std::map<std::string, ReducedValue> values;
    friend bool operator==(const ProbeResult &, const ProbeResult &) = default;
};

struct EvalResult {
    Binding binding;
    bool hypotheses_ok = false;
    std::optional<bool> conclusion_holds;
    std::optional<int> break_step;
    std::vector<ProbeResult> per_step;
    friend bool operator==(const EvalResult &, const EvalResult &) = default;
};

struct SweepEntry {
    std::int64_t value = 0;
    bool hypotheses_ok = false;
    bool conclusion_holds = false;
    std::optional<int> break_step;
    friend bool operator==(const SweepEntry &, const SweepEntry &) = default;
};

struct Sweep {
    std::string variable;
    IntRange range;
    std::vector<SweepEntry> entries;
    friend bool operator==(const Sweep &, const Sweep &) = default;
};

struct SweepCache {
    std::map<std::string, Sweep> sweeps;      // by variable
    std::map<std::string, EvalResult> evals;  // by Binding::key()
    friend bool operator==(const SweepCache &, const SweepCache &) = default;
};

struct WorkedTemplate {
    int prose_step_index = 0;
    std::string template_text;
    std::set<std::string> keys;
    friend bool operator==(const WorkedTemplate &, const WorkedTemplate &) = default;
};

struct ProofDocument {
    std::string id;
    WrittenProof written;
    LeanSource lean;
    LinkMap links;
    std::optional<FactGraph> graph;
    std::map<int, WorkedTemplate> templates;
    std::optional<SweepCache> sweep_cache;
    friend bool operator==(const ProofDocument &, const ProofDocument &) = default;
};

// ---- validation ----------------------------------------------------------

struct Finding {
    std::string path;
    std::string message;
    friend bool operator==(const Finding &, const Finding &) = default;
};

struct ValidationReport {
    std::vector<Finding> violations;
    std::vector<Finding> warnings;

    bool ok() const { return violations.empty(); }
    void violation(std::string path, std::string message) { violations.push_back({std::move(path), std::move(message)}); }
    void warning(std::string path, std::string message) { warnings.push_back({std::move(path), std::move(message)}); }
    void merge(const ValidationReport &other);
};

std::string to_string(NumberDomain d);
std::string to_string(WarningKind k);
std::string render_value(const ReducedValue &v);

} // namespace explorable
